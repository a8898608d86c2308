#![allow(dead_code)]

use coded_caching::{decentralized_place, CacheContents, FileStore, SystemParams};

pub struct Setup {
    pub params: SystemParams,
    pub files: FileStore,
    pub caches: CacheContents,
}

pub fn setup(n: usize, k: usize, m: f64, f: usize, seed: u64) -> Setup {
    let params = SystemParams::new(n, k, m, f, seed).unwrap();
    let files = FileStore::generate(&params);
    let caches = decentralized_place(&params).unwrap();
    Setup {
        params,
        files,
        caches,
    }
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expected coded-delivery rate for distinct demands: the sum over subset
/// sizes of the expected subfile sizes, without any closed form.
pub fn coded_rate_by_sum(n: usize, k: usize, m: f64) -> f64 {
    let q = m / n as f64;
    (1..=k)
        .map(|s| {
            binomial(k as u64, s as u64) * q.powi(s as i32 - 1) * (1.0 - q).powi((k - s + 1) as i32)
        })
        .sum()
}

pub fn rel_err(measured: f64, expected: f64) -> f64 {
    ((measured - expected) / expected).abs()
}
