//! Decentralized placement: every cache independently stores a uniformly
//! random `floor(MF/N)`-bit subset of every file.
//!
//! A cache's contents depend only on the global seed, its own index, and
//! `(N, M, F)`. Neither the number nor the identity of other users enters,
//! so caches can be filled at different times and places and later
//! re-derived by anyone who knows the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::Result;
use crate::model::{CacheContents, CachedSet, SystemParams};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer; a bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Placement seed of user `k` (zero-based) under global seed `seed`.
///
/// `k -> seed + (k+1)·GOLDEN` is injective because GOLDEN is odd, and
/// `mix64` is a bijection, so distinct users never share a seed.
pub fn user_seed(seed: u64, k: usize) -> u64 {
    mix64(seed.wrapping_add((k as u64).wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Partial Fisher–Yates sampler over `0..F` with an index buffer that is
/// restored after each draw, so consecutive draws cost O(subset size).
struct SubsetSampler {
    pool: Vec<u32>,
    swaps: Vec<u32>,
}

impl SubsetSampler {
    fn new(universe: usize) -> Self {
        Self {
            pool: (0..universe as u32).collect(),
            swaps: Vec::new(),
        }
    }

    /// Uniformly random `size`-subset of the universe, as a bitmap.
    fn draw<R: Rng>(&mut self, size: usize, rng: &mut R) -> BitString {
        let universe = self.pool.len();
        debug_assert!(size <= universe);
        // draw the smaller of the subset and its complement
        let complement = size > universe / 2;
        let picks = if complement { universe - size } else { size };

        self.swaps.clear();
        for i in 0..picks {
            let j = rng.gen_range(i..universe);
            self.pool.swap(i, j);
            self.swaps.push(j as u32);
        }
        let mut map = if complement {
            BitString::ones(universe)
        } else {
            BitString::zeros(universe)
        };
        for &b in &self.pool[..picks] {
            map.set(b as usize, !complement);
        }
        for i in (0..picks).rev() {
            self.pool.swap(i, self.swaps[i] as usize);
        }
        map
    }
}

fn user_stream(user_seed: u64, file: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(user_seed);
    rng.set_stream(file as u64);
    rng
}

fn place_with_seeds(params: &SystemParams, seeds: Vec<u64>) -> CacheContents {
    let per_file = params.cached_bits_per_file();
    let f = params.file_bits;
    let mut sampler = SubsetSampler::new(f);
    let mut sets = Vec::with_capacity(seeds.len() * params.num_files);
    for &s in &seeds {
        for n in 0..params.num_files {
            let set = if per_file == 0 {
                CachedSet::empty(f)
            } else if per_file == f {
                CachedSet::from_map(BitString::ones(f))
            } else {
                CachedSet::from_map(sampler.draw(per_file, &mut user_stream(s, n)))
            };
            sets.push(set);
        }
    }
    CacheContents::from_parts(params.num_files, f, seeds, sets)
}

/// Runs the placement phase for all `K` users.
pub fn decentralized_place(params: &SystemParams) -> Result<CacheContents> {
    params.validate()?;
    let seeds = (0..params.num_users)
        .map(|k| user_seed(params.seed, k))
        .collect();
    Ok(place_with_seeds(params, seeds))
}

/// Fills caches from explicit per-cache seeds, e.g. seeds announced by
/// users at the start of the delivery phase.
pub fn place_from_seeds(params: &SystemParams, seeds: &[u64]) -> Result<CacheContents> {
    let check = SystemParams {
        num_users: seeds.len().max(1),
        ..*params
    };
    check.validate()?;
    Ok(place_with_seeds(params, seeds.to_vec()))
}
