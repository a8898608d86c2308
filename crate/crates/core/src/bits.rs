use std::fmt;

use serde::{Deserialize, Serialize};

const WORD: usize = 64;

/// A fixed-length bit string packed into 64-bit words, least significant bit first.
///
/// Bits past `len` in the last word are always zero, so word-level
/// equality and XOR behave like their bit-level counterparts.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bits = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        bits.clear_tail();
        bits
    }

    /// Builds a bit string from raw words; bits past `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut bits = Self { len, words };
        bits.clear_tail();
        bits
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut bits = Self::zeros(0);
        for b in iter {
            bits.push(b);
        }
        bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len, "bit {idx} out of range {}", self.len);
        (self.words[idx / WORD] >> (idx % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, idx: usize, value: bool) {
        debug_assert!(idx < self.len, "bit {idx} out of range {}", self.len);
        let mask = 1u64 << (idx % WORD);
        if value {
            self.words[idx / WORD] |= mask;
        } else {
            self.words[idx / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, idx: usize) {
        debug_assert!(idx < self.len);
        self.words[idx / WORD] ^= 1u64 << (idx % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        if value {
            self.set(self.len - 1, true);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XORs `other` into `self`, treating the shorter operand as zero padded.
    /// The result has the length of the longer operand.
    pub fn xor_padded(&mut self, other: &BitString) {
        if other.len > self.len {
            self.len = other.len;
            self.words.resize(words_for(self.len), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND of two equal-length strings.
    pub fn dot(&self, other: &BitString) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Copies bits `[start, start + len)` into a new string.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len, "slice out of range");
        if start.is_multiple_of(WORD) {
            let first = start / WORD;
            let words = self.words[first..first + words_for(len)].to_vec();
            return BitString::from_words(len, words);
        }
        let mut out = BitString::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn extend_from(&mut self, other: &BitString) {
        if self.len.is_multiple_of(WORD) {
            self.words.truncate(words_for(self.len));
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    /// Iterates over the indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * WORD + tz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}; ", self.len)?;
        for (i, b) in self.iter().enumerate() {
            if i == 64 {
                write!(f, "...")?;
                break;
            }
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}
