use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of users (or cache owners) a bit signature mask can hold.
pub const MAX_USERS: usize = 64;

/// Full configuration of one caching experiment.
///
/// `memory` is the per-user cache size M in units of files, `file_bits` the
/// size F of every file in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub num_files: usize,
    pub num_users: usize,
    pub memory: f64,
    pub file_bits: usize,
    pub seed: u64,
}

impl SystemParams {
    pub fn new(
        num_files: usize,
        num_users: usize,
        memory: f64,
        file_bits: usize,
        seed: u64,
    ) -> Result<Self> {
        let params = Self {
            num_files,
            num_users,
            memory,
            file_bits,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_files == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        if self.num_users == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        if self.file_bits == 0 {
            return Err(Error::InvalidParams("F must be at least 1".into()));
        }
        if self.file_bits > u32::MAX as usize {
            return Err(Error::InvalidParams("F must fit in 32 bits".into()));
        }
        if self.num_users > MAX_USERS {
            return Err(Error::TooManyUsers {
                users: self.num_users,
                max: MAX_USERS,
            });
        }
        if !self.memory.is_finite() || self.memory < 0.0 || self.memory > self.num_files as f64 {
            return Err(Error::MemoryOutOfRange {
                memory: self.memory,
                files: self.num_files,
            });
        }
        Ok(())
    }

    /// Bits of each file held by every cache: floor(MF/N).
    ///
    /// A relative slack of 1e-9 absorbs representation error in M, so that
    /// e.g. M = 0.1, F = 1000, N = 1 caches exactly 100 bits.
    pub fn cached_bits_per_file(&self) -> usize {
        let exact = self.memory * self.file_bits as f64 / self.num_files as f64;
        let bits = (exact + exact.abs() * 1e-9 + 1e-9).floor() as usize;
        bits.min(self.file_bits)
    }

    /// Fraction q = M/N of each file a cache holds.
    pub fn fraction(&self) -> f64 {
        self.memory / self.num_files as f64
    }

    /// Bits of the memory budget MF left unused by the per-file floor.
    pub fn rounding_deficit(&self) -> f64 {
        self.memory * self.file_bits as f64
            - (self.num_files * self.cached_bits_per_file()) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_memory() {
        assert!(matches!(
            SystemParams::new(2, 2, 2.5, 10, 0),
            Err(Error::MemoryOutOfRange { .. })
        ));
        assert!(SystemParams::new(2, 2, -0.1, 10, 0).is_err());
        assert!(SystemParams::new(2, 2, f64::NAN, 10, 0).is_err());
    }

    #[test]
    fn rejects_zero_sizes() {
        assert!(SystemParams::new(0, 2, 0.0, 10, 0).is_err());
        assert!(SystemParams::new(2, 0, 0.0, 10, 0).is_err());
        assert!(SystemParams::new(2, 2, 0.0, 0, 0).is_err());
    }

    #[test]
    fn rejects_more_than_64_users() {
        assert!(matches!(
            SystemParams::new(2, 65, 0.0, 10, 0),
            Err(Error::TooManyUsers { users: 65, .. })
        ));
    }

    #[test]
    fn floor_of_cache_share() {
        let p = SystemParams::new(3, 2, 1.0, 1000, 0).unwrap();
        assert_eq!(p.cached_bits_per_file(), 333);
        assert!((p.rounding_deficit() - 1.0).abs() < 1e-9);
        let p = SystemParams::new(1, 1, 0.1, 1000, 0).unwrap();
        assert_eq!(p.cached_bits_per_file(), 100);
        let p = SystemParams::new(4, 2, 4.0, 999, 0).unwrap();
        assert_eq!(p.cached_bits_per_file(), 999);
    }
}
