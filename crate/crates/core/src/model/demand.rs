use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::placement::mix64;

const DEMAND_DOMAIN: u64 = 0x6465_6d61_6e64_7321;

/// The file requested by each user, zero-based (`d[k]` is in `0..N`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, num_files: usize) -> Result<Self> {
        if let Some(&file) = demands.iter().find(|&&d| d >= num_files) {
            return Err(Error::DemandOutOfRange {
                file: file + 1,
                files: num_files,
            });
        }
        Ok(Self(demands))
    }

    /// Parses one-based file ids as used on the command line.
    pub fn from_one_based(demands: &[usize], num_files: usize) -> Result<Self> {
        let zero_based = demands
            .iter()
            .map(|&d| {
                d.checked_sub(1).ok_or(Error::DemandOutOfRange {
                    file: 0,
                    files: num_files,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero_based, num_files)
    }

    /// User `k` requests file `k`.
    pub fn distinct(num_files: usize, num_users: usize) -> Result<Self> {
        if num_files < num_users {
            return Err(Error::NotEnoughFiles {
                files: num_files,
                users: num_users,
            });
        }
        Ok(Self((0..num_users).collect()))
    }

    pub fn random<R: Rng>(num_files: usize, num_users: usize, rng: &mut R) -> Self {
        Self((0..num_users).map(|_| rng.gen_range(0..num_files)).collect())
    }

    /// Uniformly random demands drawn from a stream determined by `seed`.
    pub fn seeded(num_files: usize, num_users: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ DEMAND_DOMAIN));
        Self::random(num_files, num_users, &mut rng)
    }

    /// Every demand vector in `[N]^K`, in lexicographic order.
    pub fn all(num_files: usize, num_users: usize) -> impl Iterator<Item = DemandVector> {
        let total = (num_files as u128).pow(num_users as u32);
        (0..total).map(move |mut code| {
            let mut d = vec![0; num_users];
            for slot in d.iter_mut().rev() {
                *slot = (code % num_files as u128) as usize;
                code /= num_files as u128;
            }
            DemandVector(d)
        })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn file_of(&self, user: usize) -> usize {
        self.0[user]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn check_len(&self, users: usize) -> Result<()> {
        if self.0.len() != users {
            return Err(Error::DemandLength {
                got: self.0.len(),
                expected: users,
            });
        }
        Ok(())
    }

    /// Distinct requested files in increasing order.
    pub fn requested_files(&self) -> Vec<usize> {
        let mut files = self.0.clone();
        files.sort_unstable();
        files.dedup();
        files
    }

    /// Users requesting file `n`.
    pub fn requesters(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, &d)| d == n)
            .map(|(k, _)| k)
    }
}

impl fmt::Debug for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", d + 1)?;
        }
        write!(f, ")")
    }
}
