//! The two delivery procedures and the rule choosing between them.
//!
//! The coded procedure walks every nonempty receiver subset `S`, largest
//! first, and broadcasts the XOR of the zero-padded subfiles
//! `V_{k, S\{k}}`. The file-combination procedure sends random binary
//! combinations of each requested file until every requester can solve
//! for its missing bits.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::Gf2Basis;
use crate::model::{
    delivery_order, BitSignature, CacheContents, DemandVector, FileStore, Message, MessageKind,
    SystemParams, Transcript, UserSet, LENGTH_FIELD_BITS, SEED_BITS,
};
use crate::placement::mix64;

/// Subset enumeration is refused above this many receivers unless a larger
/// limit is passed explicitly.
pub const DEFAULT_MAX_CODED_USERS: usize = 25;

const COMBO_DOMAIN: u64 = 0x726c_635f_636f_6566;

/// How the server picks a delivery procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeliveryChoice {
    /// Run both procedures and keep the shorter transcript; ties go to coded.
    MinRate,
    /// Coded if M > 1, file combinations otherwise.
    Threshold,
    ForceCoded,
    ForceRlc,
}

/// How `worst_case_rate` explores demand vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandStrategy {
    /// All `N^K` demand vectors.
    Exhaustive,
    /// The single vector where user `k` requests file `k`.
    Distinct,
}

/// Largest `N^K` accepted by exhaustive search.
pub const MAX_EXHAUSTIVE: u128 = 1_000_000;

fn ceil_log2(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

/// Coded delivery where receiver `r` wants the files `wants[r]`, served as
/// one concatenated subfile per subset.
pub(crate) fn coded_for_receivers(
    signatures: &BitSignature,
    files: &FileStore,
    wants: &[Vec<usize>],
    max_receivers: usize,
) -> Result<Transcript> {
    let receivers = wants.len();
    if receivers > max_receivers {
        return Err(Error::TooManyUsers {
            users: receivers,
            max: max_receivers,
        });
    }
    debug_assert_eq!(receivers, signatures.num_receivers());
    let mut transcript = Transcript::new(files.file_bits());
    transcript.header_bits = receivers as u64 * SEED_BITS;

    for subset in delivery_order(receivers) {
        let mut longest = 0;
        for r in subset.iter() {
            let rest = subset.without(r);
            let mut len = 0;
            for &n in &wants[r] {
                len += signatures.class(n, rest)?.len();
            }
            longest = longest.max(len);
        }
        if longest == 0 {
            continue;
        }
        let mut payload = BitString::zeros(longest);
        for r in subset.iter() {
            let rest = subset.without(r);
            let mut pos = 0;
            for &n in &wants[r] {
                let file = files.file(n);
                for &b in signatures.class(n, rest)? {
                    if file.get(b as usize) {
                        payload.toggle(pos);
                    }
                    pos += 1;
                }
            }
        }
        transcript.header_bits += receivers as u64 + LENGTH_FIELD_BITS;
        transcript.messages.push(Message {
            kind: MessageKind::Coded { subset },
            payload,
        });
    }
    Ok(transcript)
}

/// Signatures over all users, restricted to the files in `demands`.
pub fn demand_signatures(caches: &CacheContents, demands: &DemandVector) -> Result<BitSignature> {
    let receivers: Vec<usize> = (0..caches.num_users()).collect();
    BitSignature::build(caches, &receivers, &demands.requested_files())
}

/// Coded (XOR multicast) delivery over all `K` users.
pub fn coded_delivery(
    signatures: &BitSignature,
    files: &FileStore,
    demands: &DemandVector,
) -> Result<Transcript> {
    coded_delivery_limited(signatures, files, demands, DEFAULT_MAX_CODED_USERS)
}

/// Coded delivery with an explicit cap on the number of users.
pub fn coded_delivery_limited(
    signatures: &BitSignature,
    files: &FileStore,
    demands: &DemandVector,
    max_users: usize,
) -> Result<Transcript> {
    demands.check_len(signatures.num_receivers())?;
    let wants: Vec<Vec<usize>> = demands.as_slice().iter().map(|&n| vec![n]).collect();
    coded_for_receivers(signatures, files, &wants, max_users)
}

/// Per-file bookkeeping of the file-combination procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComboStats {
    pub file: usize,
    pub requesters: usize,
    pub combos: usize,
    /// Most bits any requester of this file was missing.
    pub max_missing: usize,
}

impl ComboStats {
    /// Combinations sent beyond the information-theoretic minimum.
    pub fn slack(&self) -> usize {
        self.combos - self.max_missing
    }
}

fn combo_rng(seed: u64, file: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ COMBO_DOMAIN));
    rng.set_stream(file as u64);
    rng
}

fn random_coefficients<R: RngCore>(rng: &mut R, len: usize) -> BitString {
    let words = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
    BitString::from_words(len, words)
}

/// Restricts `coefficients` to the columns in `cols` (in order).
fn gather(coefficients: &BitString, cols: &[u32]) -> Vec<u64> {
    let mut row = vec![0u64; cols.len().div_ceil(64)];
    for (j, &c) in cols.iter().enumerate() {
        if coefficients.get(c as usize) {
            row[j / 64] |= 1 << (j % 64);
        }
    }
    row
}

/// File-combination delivery: for each requested file, random binary
/// combinations until every requester's system reaches full rank.
pub fn rlc_delivery(
    caches: &CacheContents,
    files: &FileStore,
    demands: &DemandVector,
    params: &SystemParams,
) -> Result<Transcript> {
    rlc_delivery_stats(caches, files, demands, params).map(|(t, _)| t)
}

/// As [`rlc_delivery`], also reporting per-file combination counts.
pub fn rlc_delivery_stats(
    caches: &CacheContents,
    files: &FileStore,
    demands: &DemandVector,
    params: &SystemParams,
) -> Result<(Transcript, Vec<ComboStats>)> {
    demands.check_len(caches.num_users())?;
    let f = files.file_bits();
    let mut transcript = Transcript::new(f);
    transcript.header_bits = caches.num_users() as u64 * SEED_BITS;
    let combo_header = ceil_log2(files.num_files()) + f as u64;
    let mut stats = Vec::new();

    for n in demands.requested_files() {
        let mut solvers: Vec<(Vec<u32>, Gf2Basis)> = demands
            .requesters(n)
            .map(|k| {
                let missing = caches.set(k, n).missing();
                let basis = Gf2Basis::new(missing.len());
                (missing, basis)
            })
            .collect();
        let max_missing = solvers.iter().map(|(m, _)| m.len()).max().unwrap_or(0);
        let mut rng = combo_rng(params.seed, n);
        let mut combos = 0;
        while solvers.iter().any(|(_, b)| !b.is_full()) {
            let coefficients = random_coefficients(&mut rng, f);
            for (missing, basis) in solvers.iter_mut().filter(|(_, b)| !b.is_full()) {
                basis.insert(gather(&coefficients, missing), false);
            }
            let bit = coefficients.dot(files.file(n));
            transcript.header_bits += combo_header;
            transcript.messages.push(Message {
                kind: MessageKind::FileCombo {
                    file: n,
                    coefficients,
                },
                payload: BitString::from_bools([bit]),
            });
            combos += 1;
        }
        stats.push(ComboStats {
            file: n,
            requesters: solvers.len(),
            combos,
            max_missing,
        });
    }
    Ok((transcript, stats))
}

/// Fewest combinations the file-combination procedure can possibly send.
fn rlc_lower_bound(caches: &CacheContents, demands: &DemandVector) -> u64 {
    demands
        .requested_files()
        .into_iter()
        .map(|n| {
            demands
                .requesters(n)
                .map(|k| (caches.file_bits() - caches.set(k, n).len()) as u64)
                .max()
                .unwrap_or(0)
        })
        .sum()
}

/// Runs the delivery phase under the given selection rule.
pub fn deliver(
    caches: &CacheContents,
    files: &FileStore,
    demands: &DemandVector,
    params: &SystemParams,
    choice: DeliveryChoice,
) -> Result<Transcript> {
    deliver_limited(caches, files, demands, params, choice, DEFAULT_MAX_CODED_USERS)
}

/// As [`deliver`], with an explicit cap on users for the coded procedure.
pub fn deliver_limited(
    caches: &CacheContents,
    files: &FileStore,
    demands: &DemandVector,
    params: &SystemParams,
    choice: DeliveryChoice,
    max_coded_users: usize,
) -> Result<Transcript> {
    let coded = || {
        let signatures = demand_signatures(caches, demands)?;
        coded_delivery_limited(&signatures, files, demands, max_coded_users)
    };
    match choice {
        DeliveryChoice::ForceCoded => coded(),
        DeliveryChoice::ForceRlc => rlc_delivery(caches, files, demands, params),
        DeliveryChoice::Threshold => {
            if params.memory > 1.0 {
                coded()
            } else {
                rlc_delivery(caches, files, demands, params)
            }
        }
        DeliveryChoice::MinRate => {
            let coded = coded()?;
            // skip the elimination when file combinations cannot win
            if coded.payload_bits() <= rlc_lower_bound(caches, demands) {
                return Ok(coded);
            }
            let rlc = rlc_delivery(caches, files, demands, params)?;
            Ok(if rlc.payload_bits() < coded.payload_bits() {
                rlc
            } else {
                coded
            })
        }
    }
}

/// The rate-maximizing demand vector found by [`worst_case_rate`].
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub rate: f64,
    pub demands: DemandVector,
    pub evaluated: usize,
}

/// Maximum measured rate over demand vectors.
pub fn worst_case_rate(
    caches: &CacheContents,
    files: &FileStore,
    params: &SystemParams,
    strategy: DemandStrategy,
    choice: DeliveryChoice,
) -> Result<WorstCase> {
    let (n, k) = (params.num_files, params.num_users);
    match strategy {
        DemandStrategy::Distinct => {
            let demands = DemandVector::distinct(n, k)?;
            let rate = deliver(caches, files, &demands, params, choice)?.rate();
            Ok(WorstCase {
                rate,
                demands,
                evaluated: 1,
            })
        }
        DemandStrategy::Exhaustive => {
            let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
            if total > MAX_EXHAUSTIVE {
                return Err(Error::SearchTooLarge(total));
            }
            let mut best: Option<WorstCase> = None;
            for demands in DemandVector::all(n, k) {
                let rate = deliver(caches, files, &demands, params, choice)?.rate();
                if best.as_ref().is_none_or(|b| rate > b.rate) {
                    best = Some(WorstCase {
                        rate,
                        demands,
                        evaluated: 0,
                    });
                }
            }
            let mut best = best.expect("at least one demand vector");
            best.evaluated = total as usize;
            Ok(best)
        }
    }
}

/// Targets of a message: the coded subset, or every requester of the file.
pub fn message_targets(kind: &MessageKind, demands: &DemandVector) -> UserSet {
    match kind {
        MessageKind::Coded { subset } => *subset,
        MessageKind::FileCombo { file, .. } => demands.requesters(*file).collect(),
    }
}
