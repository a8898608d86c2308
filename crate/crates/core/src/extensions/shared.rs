//! Caches shared by groups of `L` users.
//!
//! Each group acts as one super user with an `L`-fold cache; the files its
//! members request form one super file, delivered as a single concatenated
//! subfile per coded message.

use crate::decode::{Decoder, LocalCache, UserOutcome, VerifyReport};
use crate::delivery::{coded_for_receivers, DEFAULT_MAX_CODED_USERS};
use crate::error::{Error, Result};
use crate::model::{BitSignature, CacheContents, DemandVector, FileStore, SystemParams, Transcript};
use crate::placement::decentralized_place;

/// Users per shared cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedConfig {
    pub group_size: usize,
}

impl SharedConfig {
    pub fn new(group_size: usize, params: &SystemParams) -> Result<Self> {
        let (n, k, l) = (params.num_files, params.num_users, group_size);
        if l == 0 || k % l != 0 {
            return Err(Error::SharedConfig(format!("L={l} must divide K={k}")));
        }
        if n < k / l {
            return Err(Error::SharedConfig(format!(
                "need N >= K/L (N={n}, K/L={})",
                k / l
            )));
        }
        if l as f64 * params.memory > n as f64 {
            return Err(Error::SharedConfig(format!(
                "shared cache of {} files exceeds the library of {n}",
                l as f64 * params.memory
            )));
        }
        Ok(Self { group_size })
    }

    pub fn groups(&self, params: &SystemParams) -> usize {
        params.num_users / self.group_size
    }

    /// Parameters of the equivalent system of super users.
    pub fn super_params(&self, params: &SystemParams) -> SystemParams {
        SystemParams {
            num_users: self.groups(params),
            memory: self.group_size as f64 * params.memory,
            ..*params
        }
    }
}

/// A shared-cache delivery and the state needed to check it.
#[derive(Debug, Clone)]
pub struct SharedRun {
    pub config: SharedConfig,
    pub super_params: SystemParams,
    pub caches: CacheContents,
    /// Files requested by each group, in order of first request.
    pub wants: Vec<Vec<usize>>,
    pub transcript: Transcript,
}

impl SharedRun {
    /// Payload bits over the shared link normalized by `F`.
    pub fn rate(&self) -> f64 {
        self.transcript.rate()
    }
}

/// Places caches for the `K/L` super users and runs coded delivery on
/// their super files.
pub fn simulate_shared(
    params: &SystemParams,
    files: &FileStore,
    demands: &DemandVector,
    group_size: usize,
) -> Result<SharedRun> {
    params.validate()?;
    demands.check_len(params.num_users)?;
    let config = SharedConfig::new(group_size, params)?;
    let super_params = config.super_params(params);
    let caches = decentralized_place(&super_params)?;

    let wants: Vec<Vec<usize>> = demands
        .as_slice()
        .chunks(group_size)
        .map(|group| {
            let mut files: Vec<usize> = Vec::with_capacity(group.len());
            for &n in group {
                if !files.contains(&n) {
                    files.push(n);
                }
            }
            files
        })
        .collect();
    let receivers: Vec<usize> = (0..super_params.num_users).collect();
    let mut requested: Vec<usize> = wants.iter().flatten().copied().collect();
    requested.sort_unstable();
    requested.dedup();
    let signatures = BitSignature::build(&caches, &receivers, &requested)?;
    let transcript = coded_for_receivers(&signatures, files, &wants, DEFAULT_MAX_CODED_USERS)?;
    Ok(SharedRun {
        config,
        super_params,
        caches,
        wants,
        transcript,
    })
}

/// Every group reconstructs every file its members asked for.
pub fn verify_shared(run: &SharedRun, files: &FileStore) -> Result<VerifyReport> {
    let receivers: Vec<usize> = (0..run.wants.len()).collect();
    let decoder = Decoder::new(&run.caches, &receivers, run.wants.clone())?;
    let users = receivers
        .iter()
        .map(|&g| {
            let local = LocalCache::new(g, &run.caches, files);
            match decoder.decode(g, &local, &run.transcript) {
                Ok(out) => UserOutcome {
                    user: g,
                    decoded: run.wants[g]
                        .iter()
                        .zip(&out)
                        .all(|(&n, bits)| bits == files.file(n)),
                    error: None,
                },
                Err(e) => UserOutcome {
                    user: g,
                    decoded: false,
                    error: Some(e),
                },
            }
        })
        .collect();
    Ok(VerifyReport { users })
}
