use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{CacheContents, DemandVector, UserSet, MAX_USERS};

/// Per-bit cache signatures of one file and the classes they induce.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FileClasses {
    masks: Vec<u64>,
    classes: HashMap<u64, Vec<u32>>,
}

/// For each covered file and bit, the set of receivers whose cache holds
/// that bit; bits with equal signature form one class `A_S`.
///
/// Receiver `r` is cache `receivers[r]` of the underlying placement, so a
/// signature can be restricted to the caches that take part in a delivery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSignature {
    receivers: Vec<usize>,
    file_bits: usize,
    files: Vec<Option<FileClasses>>,
}

/// Signatures over every cache and every file.
pub fn build_signatures(caches: &CacheContents) -> BitSignature {
    let receivers: Vec<usize> = (0..caches.num_users()).collect();
    let files: Vec<usize> = (0..caches.num_files()).collect();
    BitSignature::build(caches, &receivers, &files).expect("placement holds at most 64 caches")
}

impl BitSignature {
    /// Builds signatures for the listed files, with mask bit `r` standing
    /// for cache `receivers[r]`.
    pub fn build(caches: &CacheContents, receivers: &[usize], files: &[usize]) -> Result<Self> {
        if receivers.len() > MAX_USERS {
            return Err(Error::TooManyUsers {
                users: receivers.len(),
                max: MAX_USERS,
            });
        }
        let file_bits = caches.file_bits();
        let mut out = vec![None; caches.num_files()];
        for &n in files {
            if out[n].is_some() {
                continue;
            }
            let mut masks = vec![0u64; file_bits];
            for (r, &owner) in receivers.iter().enumerate() {
                let bit = 1u64 << r;
                for b in caches.set(owner, n).iter() {
                    masks[b] |= bit;
                }
            }
            let mut classes: HashMap<u64, Vec<u32>> = HashMap::new();
            for (b, &mask) in masks.iter().enumerate() {
                classes.entry(mask).or_default().push(b as u32);
            }
            out[n] = Some(FileClasses { masks, classes });
        }
        Ok(Self {
            receivers: receivers.to_vec(),
            file_bits,
            files: out,
        })
    }

    pub fn num_receivers(&self) -> usize {
        self.receivers.len()
    }

    /// Placement index of each receiver.
    pub fn receivers(&self) -> &[usize] {
        &self.receivers
    }

    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    pub fn covers(&self, n: usize) -> bool {
        self.files.get(n).is_some_and(Option::is_some)
    }

    fn file(&self, n: usize) -> Result<&FileClasses> {
        self.files
            .get(n)
            .and_then(Option::as_ref)
            .ok_or(Error::MissingSignature(n))
    }

    /// Receivers caching bit `b` of file `n`.
    pub fn mask(&self, n: usize, b: usize) -> Result<UserSet> {
        Ok(UserSet(self.file(n)?.masks[b]))
    }

    /// Bits of file `n` cached exactly by the receivers in `subset`, ascending.
    pub fn class(&self, n: usize, subset: UserSet) -> Result<&[u32]> {
        Ok(self
            .file(n)?
            .classes
            .get(&subset.bits())
            .map_or(&[][..], Vec::as_slice))
    }

    /// Nonempty classes of file `n` and their sizes, ordered by mask.
    pub fn class_sizes(&self, n: usize) -> Result<Vec<(UserSet, usize)>> {
        let mut sizes: Vec<(UserSet, usize)> = self
            .file(n)?
            .classes
            .iter()
            .map(|(&m, v)| (UserSet(m), v.len()))
            .collect();
        sizes.sort_unstable();
        Ok(sizes)
    }
}

/// `V_{k,S}`: bits of user `k`'s requested file cached exactly at `subset`.
pub fn subfile<'a>(
    signatures: &'a BitSignature,
    demands: &DemandVector,
    k: usize,
    subset: UserSet,
) -> Result<&'a [u32]> {
    if subset.contains(k) {
        return Err(Error::UserInSubset {
            user: k + 1,
            subset: subset.to_string(),
        });
    }
    signatures.class(demands.file_of(k), subset)
}
