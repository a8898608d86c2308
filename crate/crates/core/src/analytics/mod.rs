//! Closed-form rates, bounds, and approximations for the memory-rate
//! tradeoff, plus the numeric gap certificates built on them.
//!
//! Every function takes `N` files, `K` users and per-user memory `M` in
//! file units, and evaluates in `f64`.

mod curve;
mod envelope;

pub use curve::{memory_grid, uniform_grid, RateCurve};
pub use envelope::LowerEnvelope;

use crate::error::{Error, Result};

fn check_memory(n: usize, m: f64) -> Result<()> {
    if n == 0 || !m.is_finite() || m < 0.0 || m > n as f64 {
        return Err(Error::MemoryOutOfRange {
            memory: m,
            files: n,
        });
    }
    Ok(())
}

fn check_users(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParams("K must be at least 1".into()));
    }
    Ok(())
}

/// Conventional uncoded caching: `K(1-M/N)·min{1, N/K}`.
pub fn rate_uncoded(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    let (n, k) = (n as f64, k as f64);
    Ok(k * (1.0 - m / n) * (n / k).min(1.0))
}

/// Rate of the coded delivery procedure alone: `(N/M - 1)(1 - (1-M/N)^K)`.
///
/// Undefined at `M = 0`, where its limit is `K`.
pub fn coded_procedure_rate(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    if m == 0.0 {
        return Ok(k as f64);
    }
    let q = m / n as f64;
    Ok((1.0 / q - 1.0) * (1.0 - (1.0 - q).powi(k as i32)))
}

/// Rate of the file-combination procedure: `(1-M/N)·min{K, N}`.
pub fn combo_procedure_rate(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    Ok((1.0 - m / n as f64) * n.min(k) as f64)
}

/// Decentralized coded caching:
/// `K(1-M/N)·min{(N/KM)(1-(1-M/N)^K), N/K}`, and `min{N, K}` at `M = 0`.
pub fn rate_decentralized(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    if m == 0.0 {
        return Ok(n.min(k) as f64);
    }
    let (nf, kf) = (n as f64, k as f64);
    let q = m / nf;
    let global = nf / (kf * m) * (1.0 - (1.0 - q).powi(k as i32));
    Ok(kf * (1.0 - q) * global.min(nf / kf))
}

/// Centralized coded caching at the sample points `M = tN/K`.
pub fn centralized_sample(n: usize, k: usize, t: usize) -> f64 {
    let (nf, kf, tf) = (n as f64, k as f64, t as f64);
    kf * (1.0 - tf / kf) * (1.0 / (1.0 + tf)).min(nf / kf)
}

/// Lower convex envelope of the centralized sample points.
pub fn centralized_envelope(n: usize, k: usize) -> LowerEnvelope {
    let points: Vec<(f64, f64)> = (0..=k)
        .map(|t| (t as f64 * n as f64 / k as f64, centralized_sample(n, k, t)))
        .collect();
    LowerEnvelope::new(&points)
}

/// Centralized coded caching, interpolated along the lower convex envelope.
pub fn rate_centralized(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    Ok(centralized_envelope(n, k).eval(m))
}

/// Cut-set style lower bound on any scheme:
/// `max_{s <= min{N,K}} (s - s·M/floor(N/s))`.
pub fn lower_bound_optimal(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    Ok((1..=n.min(k))
        .map(|s| s as f64 - s as f64 / (n / s) as f64 * m)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `num/den`, with `0/0 = 1`.
fn ratio(num: f64, den: f64) -> f64 {
    const ZERO: f64 = 1e-15;
    if num.abs() <= ZERO && den.abs() <= ZERO {
        1.0
    } else {
        num / den
    }
}

/// `R_D / lower bound`.
pub fn gap_to_optimal(n: usize, k: usize, m: f64) -> Result<f64> {
    Ok(ratio(
        rate_decentralized(n, k, m)?,
        lower_bound_optimal(n, k, m)?,
    ))
}

/// `R_D / R_C`.
pub fn gap_to_centralized(n: usize, k: usize, m: f64) -> Result<f64> {
    Ok(ratio(
        rate_decentralized(n, k, m)?,
        rate_centralized(n, k, m)?,
    ))
}

/// Linear small-memory approximation `K(1 - KM/(2N))`, meant for `M <= N/K`.
pub fn approx_small_m(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok(kf * (1.0 - kf * m / (2.0 * nf)))
}

/// Inverse-memory approximation `K(1-M/N)·N/(KM)`, meant for `M >= N/K`.
pub fn approx_large_m(n: usize, k: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k)?;
    if m == 0.0 {
        return Err(Error::InvalidParams(
            "large-memory approximation is undefined at M = 0".into(),
        ));
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(kf * (1.0 - m / nf) * nf / (kf * m))
}

/// Weights `p(1..=K+1)` expressing `R_D(M)` as a convex combination of the
/// centralized sample rates `R_C(N(s-1)/K)`; `p(s)` is the Binomial(K, M/N)
/// mass at `s - 1`. Index `i` of the result holds `p(i + 1)`.
pub fn mixture_weights(n: usize, k: usize, m: f64) -> Result<Vec<f64>> {
    check_memory(n, m)?;
    check_users(k)?;
    if n < k {
        return Err(Error::MixtureRange { files: n, users: k });
    }
    if m == 0.0 {
        return Err(Error::InvalidParams(
            "mixture weights are defined for M > 0".into(),
        ));
    }
    let q = m / n as f64;
    if q >= 1.0 {
        let mut p = vec![0.0; k + 1];
        p[k] = 1.0;
        return Ok(p);
    }
    let (ln_q, ln_1q) = (q.ln(), (1.0 - q).ln());
    let mut ln_choose = 0.0f64;
    Ok((0..=k)
        .map(|j| {
            if j > 0 {
                ln_choose += ((k - j + 1) as f64).ln() - (j as f64).ln();
            }
            (ln_choose + j as f64 * ln_q + (k - j) as f64 * ln_1q).exp()
        })
        .collect())
}

/// `Σ_s R_C(N(s-1)/K) p(s)` with weights from [`mixture_weights`].
pub fn mixture_rate(n: usize, k: usize, m: f64) -> Result<f64> {
    let p = mixture_weights(n, k, m)?;
    let env = centralized_envelope(n, k);
    Ok(p
        .iter()
        .enumerate()
        .map(|(j, w)| w * env.eval(n as f64 * j as f64 / k as f64))
        .sum())
}

/// Shared caches, `L` users per cache of size `LMF`:
/// `K(1-LM/N)·(N/KM)(1-(1-LM/N)^{K/L})`, and `K` at `M = 0`.
pub fn rate_shared(n: usize, k: usize, l: usize, m: f64) -> Result<f64> {
    check_users(k)?;
    if l == 0 || !k.is_multiple_of(l) {
        return Err(Error::SharedConfig(format!("L={l} must divide K={k}")));
    }
    if n < k / l {
        return Err(Error::SharedConfig(format!(
            "need N >= K/L (N={n}, K/L={})",
            k / l
        )));
    }
    let lm = l as f64 * m;
    if !m.is_finite() || m < 0.0 || lm > n as f64 {
        return Err(Error::SharedConfig(format!("need 0 <= LM <= N (LM={lm})")));
    }
    let (nf, kf) = (n as f64, k as f64);
    if m == 0.0 {
        return Ok(kf);
    }
    let x = lm / nf;
    Ok(kf * (1.0 - x) * nf / (kf * m) * (1.0 - (1.0 - x).powi((k / l) as i32)))
}

/// Rate over a tree link with `K_v` users below it: the coded-procedure
/// rate with `K_v` users for `M > 1`, else `K_v(1-M/N)·min{1, N/K_v}`.
pub fn tree_link_rate(n: usize, k_v: usize, m: f64) -> Result<f64> {
    check_memory(n, m)?;
    check_users(k_v)?;
    if m > 1.0 {
        coded_procedure_rate(n, k_v, m)
    } else {
        rate_uncoded(n, k_v, m)
    }
}

/// Expected size in bits of `V_{k,S\{k}}` for `|S| = s`:
/// `F q^{s-1} (1-q)^{K-s+1}`.
pub fn expected_subfile_bits(file_bits: usize, q: f64, k: usize, s: usize) -> f64 {
    file_bits as f64 * q.powi(s as i32 - 1) * (1.0 - q).powi((k + 1 - s) as i32)
}

/// Largest gap found on a parameter grid, and where.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPeak {
    pub ratio: f64,
    pub files: usize,
    pub users: usize,
    pub memory: f64,
}

/// Maxima of both gap ratios over `N, K` in `1..=max_files`, `1..=max_users`
/// and `points` uniform memory values in `[0, N]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSummary {
    pub to_optimal: GapPeak,
    pub to_centralized: GapPeak,
    pub evaluated: usize,
}

pub fn certify_gaps(max_files: usize, max_users: usize, points: usize) -> Result<GapSummary> {
    let empty = GapPeak {
        ratio: f64::NEG_INFINITY,
        files: 0,
        users: 0,
        memory: 0.0,
    };
    let mut summary = GapSummary {
        to_optimal: empty,
        to_centralized: empty,
        evaluated: 0,
    };
    for n in 1..=max_files {
        for k in 1..=max_users {
            let env = centralized_envelope(n, k);
            for m in uniform_grid(n as f64, points) {
                let rd = rate_decentralized(n, k, m)?;
                let opt = ratio(rd, lower_bound_optimal(n, k, m)?);
                let cen = ratio(rd, env.eval(m));
                let at = |ratio| GapPeak {
                    ratio,
                    files: n,
                    users: k,
                    memory: m,
                };
                if opt > summary.to_optimal.ratio {
                    summary.to_optimal = at(opt);
                }
                if cen > summary.to_centralized.ratio {
                    summary.to_centralized = at(cen);
                }
                summary.evaluated += 1;
            }
        }
    }
    Ok(summary)
}
