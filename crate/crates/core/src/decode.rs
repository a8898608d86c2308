//! Receiver-side reconstruction, the correctness oracle for delivery.
//!
//! A decoder knows the public placement (every cache's index sets, derived
//! from announced seeds) but reads bit values only through its own
//! [`LocalCache`].

use crate::bits::BitString;
use crate::error::{DecodeError, Error, Result};
use crate::gf2::Gf2Basis;
use crate::model::{
    BitSignature, CacheContents, DemandVector, FileStore, Message, MessageKind, SystemParams,
    Transcript,
};
use crate::placement::place_from_seeds;

/// The bits one cache physically stores.
#[derive(Debug, Clone, Copy)]
pub struct LocalCache<'a> {
    user: usize,
    caches: &'a CacheContents,
    files: &'a FileStore,
}

impl<'a> LocalCache<'a> {
    pub fn new(user: usize, caches: &'a CacheContents, files: &'a FileStore) -> Self {
        Self {
            user,
            caches,
            files,
        }
    }

    pub fn user(&self) -> usize {
        self.user
    }

    #[inline]
    pub fn bit(&self, file: usize, bit: usize) -> Result<bool, DecodeError> {
        if self.caches.holds(self.user, file, bit) {
            Ok(self.files.bit(file, bit))
        } else {
            Err(DecodeError::NotCached {
                user: self.user + 1,
                file: file + 1,
                bit,
            })
        }
    }

    /// Indices of `file` this cache holds.
    pub fn cached(&self, file: usize) -> impl Iterator<Item = usize> + 'a {
        self.caches.set(self.user, file).iter()
    }
}

/// A file being rebuilt: values plus which positions are known.
struct Partial {
    values: BitString,
    known: BitString,
}

/// Shared decoding state for a set of receivers.
///
/// Receiver `r` is cache `receivers[r]` of the public placement and wants
/// the files `wants[r]`.
pub struct Decoder {
    signatures: BitSignature,
    wants: Vec<Vec<usize>>,
    file_bits: usize,
}

impl Decoder {
    pub fn new(public: &CacheContents, receivers: &[usize], wants: Vec<Vec<usize>>) -> Result<Self> {
        assert_eq!(receivers.len(), wants.len());
        let mut files: Vec<usize> = wants.iter().flatten().copied().collect();
        files.sort_unstable();
        files.dedup();
        let signatures = BitSignature::build(public, receivers, &files)?;
        Ok(Self {
            signatures,
            wants,
            file_bits: public.file_bits(),
        })
    }

    /// Decoder for the usual setting: every user, one file each.
    pub fn for_demands(public: &CacheContents, demands: &DemandVector) -> Result<Self> {
        demands.check_len(public.num_users())?;
        let receivers: Vec<usize> = (0..public.num_users()).collect();
        let wants = demands.as_slice().iter().map(|&n| vec![n]).collect();
        Self::new(public, &receivers, wants)
    }

    pub fn num_receivers(&self) -> usize {
        self.wants.len()
    }

    /// Reconstructs receiver `r`'s files from the whole transcript.
    pub fn decode(
        &self,
        r: usize,
        local: &LocalCache<'_>,
        transcript: &Transcript,
    ) -> Result<Vec<BitString>, DecodeError> {
        self.decode_messages(r, local, transcript.messages.iter())
    }

    /// Reconstructs receiver `r`'s files from the given messages, processed
    /// in order. Returns one bit string per wanted file.
    pub fn decode_messages<'m>(
        &self,
        r: usize,
        local: &LocalCache<'_>,
        messages: impl Iterator<Item = &'m Message>,
    ) -> Result<Vec<BitString>, DecodeError> {
        let wanted = &self.wants[r];
        let mut partial: Vec<Partial> = wanted
            .iter()
            .map(|&n| {
                let mut p = Partial {
                    values: BitString::zeros(self.file_bits),
                    known: BitString::zeros(self.file_bits),
                };
                for b in local.cached(n) {
                    p.known.set(b, true);
                    if local.bit(n, b).expect("own cached bit") {
                        p.values.set(b, true);
                    }
                }
                p
            })
            .collect();

        let mut combos: Vec<Vec<&Message>> = vec![Vec::new(); wanted.len()];
        for message in messages {
            match &message.kind {
                MessageKind::Coded { subset } if subset.contains(r) => {
                    self.apply_coded(r, local, message, &mut partial)?;
                }
                MessageKind::Coded { .. } => {}
                MessageKind::FileCombo { file, .. } => {
                    if let Some(slot) = wanted.iter().position(|n| n == file) {
                        combos[slot].push(message);
                    }
                }
            }
        }

        for (slot, &n) in wanted.iter().enumerate() {
            let p = &mut partial[slot];
            let missing: Vec<u32> = (0..self.file_bits)
                .filter(|&b| !p.known.get(b))
                .map(|b| b as u32)
                .collect();
            if missing.is_empty() {
                continue;
            }
            if combos[slot].is_empty() {
                return Err(DecodeError::Unrecovered {
                    user: local.user() + 1,
                    file: n + 1,
                    missing: missing.len(),
                });
            }
            solve_combos(local.user(), p, &missing, &combos[slot])?;
        }
        Ok(partial.into_iter().map(|p| p.values).collect())
    }

    fn apply_coded(
        &self,
        r: usize,
        local: &LocalCache<'_>,
        message: &Message,
        partial: &mut [Partial],
    ) -> Result<(), DecodeError> {
        let MessageKind::Coded { subset } = message.kind else {
            unreachable!()
        };
        let sig = &self.signatures;
        let own = subset.without(r);
        let needed: usize = self.wants[r]
            .iter()
            .map(|&n| sig.class(n, own).map_or(0, <[u32]>::len))
            .sum();
        if needed == 0 {
            return Ok(());
        }
        if message.payload.len() < needed {
            return Err(DecodeError::ShortPayload {
                got: message.payload.len(),
                needed,
            });
        }
        let mut acc = message.payload.slice(0, needed);
        // cancel every other member's subfile using cached bits
        for j in subset.iter().filter(|&j| j != r) {
            let rest = subset.without(j);
            let mut pos = 0;
            'files: for &n in &self.wants[j] {
                for &b in sig.class(n, rest).unwrap_or(&[]) {
                    if pos == needed {
                        break 'files;
                    }
                    if local.bit(n, b as usize)? {
                        acc.toggle(pos);
                    }
                    pos += 1;
                }
            }
        }
        let mut pos = 0;
        for (slot, &n) in self.wants[r].iter().enumerate() {
            let p = &mut partial[slot];
            for &b in sig.class(n, own).unwrap_or(&[]) {
                p.values.set(b as usize, acc.get(pos));
                p.known.set(b as usize, true);
                pos += 1;
            }
        }
        Ok(())
    }
}

fn solve_combos(
    user: usize,
    p: &mut Partial,
    missing: &[u32],
    combos: &[&Message],
) -> Result<(), DecodeError> {
    let mut basis = Gf2Basis::new(missing.len());
    for message in combos {
        let MessageKind::FileCombo { coefficients, .. } = &message.kind else {
            continue;
        };
        if message.payload.is_empty() {
            continue;
        }
        // move the known part of the combination to the right-hand side
        let rhs = message.payload.get(0) ^ coefficients.dot(&p.values);
        let mut row = vec![0u64; missing.len().div_ceil(64)];
        for (j, &c) in missing.iter().enumerate() {
            if coefficients.get(c as usize) {
                row[j / 64] |= 1 << (j % 64);
            }
        }
        basis.insert(row, rhs);
        if basis.is_full() {
            break;
        }
    }
    let solution = basis.solve().ok_or(DecodeError::RankDeficient {
        user: user + 1,
        rank: basis.rank(),
        needed: missing.len(),
    })?;
    for (j, &c) in missing.iter().enumerate() {
        p.values.set(c as usize, (solution[j / 64] >> (j % 64)) & 1 == 1);
        p.known.set(c as usize, true);
    }
    Ok(())
}

/// Decodes user `k`'s requested file.
pub fn decode_user(
    k: usize,
    public: &CacheContents,
    local: &LocalCache<'_>,
    transcript: &Transcript,
    demands: &DemandVector,
) -> Result<BitString> {
    let decoder = Decoder::for_demands(public, demands)?;
    let mut out = decoder.decode(k, local, transcript)?;
    Ok(out.remove(0))
}

/// Outcome of decoding for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserOutcome {
    pub user: usize,
    pub decoded: bool,
    pub error: Option<DecodeError>,
}

/// Per-user verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub users: Vec<UserOutcome>,
}

impl VerifyReport {
    pub fn all_decoded(&self) -> bool {
        self.users.iter().all(|u| u.decoded)
    }

    /// One-based ids of users that failed.
    pub fn failed_users(&self) -> Vec<usize> {
        self.users
            .iter()
            .filter(|u| !u.decoded)
            .map(|u| u.user + 1)
            .collect()
    }
}

/// Decodes every user and compares against the library.
pub fn verify_all(
    caches: &CacheContents,
    transcript: &Transcript,
    demands: &DemandVector,
    files: &FileStore,
) -> Result<VerifyReport> {
    verify_against(caches, caches, transcript, demands, files)
}

/// As [`verify_all`], with decoders deriving index sets from `public`
/// while reading bits from the true `caches`.
pub fn verify_against(
    public: &CacheContents,
    caches: &CacheContents,
    transcript: &Transcript,
    demands: &DemandVector,
    files: &FileStore,
) -> Result<VerifyReport> {
    let decoder = Decoder::for_demands(public, demands)?;
    let users = (0..caches.num_users())
        .map(|k| {
            let local = LocalCache::new(k, caches, files);
            match decoder.decode(k, &local, transcript) {
                Ok(out) => UserOutcome {
                    user: k,
                    decoded: &out[0] == files.file(demands.file_of(k)),
                    error: None,
                },
                Err(e) => UserOutcome {
                    user: k,
                    decoded: false,
                    error: Some(e),
                },
            }
        })
        .collect();
    Ok(VerifyReport { users })
}

/// Re-derives every cache's index sets from the announced seeds.
pub fn reconstruct_placement(seeds: &[u64], params: &SystemParams) -> Result<CacheContents> {
    if seeds.len() != params.num_users {
        return Err(Error::PlacementMismatch(format!(
            "{} seeds announced for K={}",
            seeds.len(),
            params.num_users
        )));
    }
    place_from_seeds(params, seeds)
}
