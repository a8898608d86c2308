mod common;

use coded_caching::analytics::*;
use common::{binomial, coded_rate_by_sum};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn sample_rate(n: usize, k: usize, t: usize) -> f64 {
    let (n, k, t) = (n as f64, k as f64, t as f64);
    let m = t * n / k;
    k * (1.0 - m / n) * (1.0 / (1.0 + k * m / n)).min(n / k)
}

/// Lower convex envelope by brute force: the best two-point interpolation.
fn envelope_oracle(n: usize, k: usize, m: f64) -> f64 {
    let pts: Vec<(f64, f64)> = (0..=k)
        .map(|t| (t as f64 * n as f64 / k as f64, sample_rate(n, k, t)))
        .collect();
    let mut best = f64::INFINITY;
    for &(x0, y0) in &pts {
        for &(x1, y1) in &pts {
            if x0 <= m && m <= x1 {
                let y = if x1 == x0 {
                    y0.min(y1)
                } else {
                    y0 + (y1 - y0) * (m - x0) / (x1 - x0)
                };
                best = best.min(y);
            }
        }
    }
    best
}

fn lower_bound_oracle(n: usize, k: usize, m: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for s in 1..=n.min(k) {
        let files_per_round = (n as f64 / s as f64).floor();
        best = best.max(s as f64 - s as f64 * m / files_per_round);
    }
    best
}

#[test]
fn uncoded_rate_values() {
    assert_eq!(rate_uncoded(2, 2, 1.0).unwrap(), 1.0);
    assert_eq!(rate_uncoded(100, 20, 25.0).unwrap(), 15.0);
    assert_eq!(rate_uncoded(7, 3, 7.0).unwrap(), 0.0);
    assert_eq!(rate_uncoded(2, 5, 0.0).unwrap(), 2.0);
}

#[test]
fn decentralized_rate_values() {
    assert_eq!(rate_decentralized(2, 2, 1.0).unwrap(), 0.75);
    assert!(close(rate_decentralized(100, 20, 25.0).unwrap(), 2.990486364183198, 1e-12));
    assert!(close(rate_decentralized(10, 5, 2.0).unwrap(), 2.68928, 1e-12));
    assert!(close(rate_decentralized(20, 10, 4.0).unwrap(), 3.5705032704, 1e-9));
    assert_eq!(rate_decentralized(9, 4, 0.0).unwrap(), 4.0);
    assert_eq!(rate_decentralized(3, 8, 0.0).unwrap(), 3.0);
    assert_eq!(rate_decentralized(5, 5, 5.0).unwrap(), 0.0);
}

#[test]
fn decentralized_rate_is_continuous_at_zero() {
    for &(n, k) in &[(4, 9), (9, 4), (5, 5)] {
        let at_zero = rate_decentralized(n, k, 0.0).unwrap();
        let near = rate_decentralized(n, k, 1e-9).unwrap();
        assert!((at_zero - near).abs() < 1e-6, "({n},{k})");
    }
}

#[test]
fn coded_procedure_matches_expected_subfile_sum() {
    for n in [3, 10, 40] {
        for k in [1, 2, 5, 12] {
            for i in 1..=8 {
                let m = n as f64 * i as f64 / 8.0;
                let got = coded_procedure_rate(n, k, m).unwrap();
                assert!(close(got, coded_rate_by_sum(n, k, m), 1e-10));
            }
        }
    }
}

#[test]
fn centralized_rate_values() {
    assert_eq!(rate_centralized(2, 2, 1.0).unwrap(), 0.5);
    assert!(close(rate_centralized(100, 20, 25.0).unwrap(), 2.5, 1e-12));
    assert_eq!(rate_centralized(8, 3, 8.0).unwrap(), 0.0);
}

#[test]
fn centralized_envelope_matches_two_point_oracle() {
    for n in 1..=12 {
        for k in 1..=12 {
            for m in uniform_grid(n as f64, 37) {
                let got = rate_centralized(n, k, m).unwrap();
                let want = envelope_oracle(n, k, m);
                assert!(close(got, want, 1e-12), "({n},{k},{m}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn centralized_rate_is_convex() {
    for &(n, k) in &[(10, 4), (4, 10), (32, 32), (7, 3)] {
        let grid = uniform_grid(n as f64, 201);
        let r: Vec<f64> = grid.iter().map(|&m| rate_centralized(n, k, m).unwrap()).collect();
        for w in r.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
        }
    }
}

#[test]
fn lower_bound_values() {
    assert_eq!(lower_bound_optimal(2, 2, 1.0).unwrap(), 0.5);
    assert_eq!(lower_bound_optimal(6, 4, 0.0).unwrap(), 4.0);
    assert_eq!(lower_bound_optimal(3, 7, 0.0).unwrap(), 3.0);
    let lb = lower_bound_optimal(100, 20, 25.0).unwrap();
    assert!(close(lb, lower_bound_oracle(100, 20, 25.0), 1e-15));
    assert_eq!(lb, 1.0);
    assert!(rate_decentralized(100, 20, 25.0).unwrap() / lb <= 12.0);
}

#[test]
fn lower_bound_matches_oracle_on_grid() {
    for n in 1..=20 {
        for k in 1..=20 {
            for m in uniform_grid(n as f64, 17) {
                let got = lower_bound_optimal(n, k, m).unwrap();
                assert!(close(got, lower_bound_oracle(n, k, m), 1e-12));
            }
        }
    }
}

#[test]
fn rates_are_ordered() {
    for n in 1..=16 {
        for k in 1..=16 {
            for m in uniform_grid(n as f64, 33) {
                let lb = lower_bound_optimal(n, k, m).unwrap();
                let rc = rate_centralized(n, k, m).unwrap();
                let rd = rate_decentralized(n, k, m).unwrap();
                let ru = rate_uncoded(n, k, m).unwrap();
                let eps = 1e-12;
                assert!(rd <= ru + eps, "({n},{k},{m})");
                if n >= k {
                    assert!(lb <= rc + eps && rc <= rd + eps, "({n},{k},{m})");
                }
            }
        }
    }
}

#[test]
fn all_rates_vanish_at_full_memory() {
    for &(n, k) in &[(1, 1), (5, 3), (3, 5)] {
        let m = n as f64;
        assert_eq!(rate_uncoded(n, k, m).unwrap(), 0.0);
        assert_eq!(rate_decentralized(n, k, m).unwrap(), 0.0);
        assert_eq!(rate_centralized(n, k, m).unwrap(), 0.0);
        assert!(lower_bound_optimal(n, k, m).unwrap() <= 0.0);
        assert_eq!(gap_to_centralized(n, k, m).unwrap(), 1.0);
    }
}

#[test]
fn two_user_gap_to_centralized() {
    assert_eq!(gap_to_centralized(2, 2, 1.0).unwrap(), 1.5);
}

#[test]
fn gap_certificate_on_reference_grid() {
    let summary = certify_gaps(32, 32, 64).unwrap();
    assert_eq!(summary.evaluated, 32 * 32 * 64);
    assert!(summary.to_optimal.ratio <= 12.0);
    assert!(summary.to_centralized.ratio <= 1.6);
    assert!(close(summary.to_optimal.ratio, 4.2328, 1e-4));
    assert!(close(summary.to_centralized.ratio, 1.49206, 1e-5));
    assert_eq!(
        (summary.to_centralized.files, summary.to_centralized.users),
        (2, 2)
    );
}

#[test]
fn min_simplification_holds() {
    for n in 1..=20 {
        for k in 1..=20 {
            for m in uniform_grid(n as f64, 21).into_iter().skip(1) {
                let (nf, kf) = (n as f64, k as f64);
                let x = nf / (kf * m) * (1.0 - (1.0 - m / nf).powi(k));
                assert!((x.min(1.0).min(nf / kf) - x.min(nf / kf)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn small_memory_approximation() {
    assert_eq!(approx_small_m(100, 5, 0.0).unwrap(), 5.0);
    for m in uniform_grid(20.0, 20) {
        let rd = rate_decentralized(100, 5, m).unwrap();
        assert!((approx_small_m(100, 5, m).unwrap() - rd).abs() / rd <= 0.15);
    }
}

#[test]
fn large_memory_approximation() {
    assert_eq!(approx_large_m(100, 5, 100.0).unwrap(), 0.0);
    assert!(approx_large_m(100, 5, 0.0).is_err());
    let bound = std::f64::consts::E / (std::f64::consts::E - 1.0);
    let mut last = f64::INFINITY;
    for i in 0..19 {
        let m = 20.0 + 80.0 * i as f64 / 19.0;
        let ratio = approx_large_m(100, 5, m).unwrap() / rate_decentralized(100, 5, m).unwrap();
        assert!((1.0..=bound).contains(&ratio), "{m}: {ratio}");
        assert!(ratio <= last);
        last = ratio;
    }
    assert!(last < 1.001);
}

fn mixture_oracle(n: usize, k: usize, m: f64) -> f64 {
    let q = m / n as f64;
    (0..=k)
        .map(|j| {
            binomial(k as u64, j as u64)
                * q.powi(j as i32)
                * (1.0 - q).powi((k - j) as i32)
                * sample_rate(n, k, j)
        })
        .sum()
}

#[test]
fn mixture_weights_are_binomial() {
    let p = mixture_weights(16, 16, 4.0).unwrap();
    assert_eq!(p.len(), 17);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for (j, &w) in p.iter().enumerate() {
        let want = binomial(16, j as u64) * 0.25f64.powi(j as i32) * 0.75f64.powi(16 - j as i32);
        assert!(close(w, want, 1e-12));
    }
    assert!(mixture_weights(4, 5, 1.0).is_err());
    assert!(mixture_weights(5, 5, 0.0).is_err());
}

#[test]
fn mixture_reproduces_decentralized_rate() {
    for &(n, k) in &[(4, 4), (10, 3), (20, 20), (50, 7)] {
        for m in uniform_grid(n as f64, 11).into_iter().skip(1) {
            let rd = rate_decentralized(n, k, m).unwrap();
            let mix = mixture_rate(n, k, m).unwrap();
            if rd > 0.0 {
                assert!((mix - rd).abs() / rd <= 1e-9, "({n},{k},{m})");
            }
            assert!(close(mix, mixture_oracle(n, k, m), 1e-10));
        }
    }
}

#[test]
fn mixture_mode_sits_near_expected_cache_count() {
    let (n, k, m) = (256, 256, 16.0);
    let p = mixture_weights(n, k, m).unwrap();
    let mode = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, _)| j + 1)
        .unwrap();
    let center = 1.0 + k as f64 * m / n as f64;
    assert!((mode as f64 - center).abs() <= 1.0);
}

#[test]
fn shared_rate_reductions() {
    for &(n, k) in &[(6, 6), (100, 20), (12, 4)] {
        for m in uniform_grid(n as f64, 13) {
            let one = rate_shared(n, k, 1, m).unwrap();
            assert!(close(one, rate_decentralized(n, k, m).unwrap(), 1e-12));
            if k as f64 * m <= n as f64 {
                let all = rate_shared(n, k, k, m).unwrap();
                assert!(close(all, k as f64 * (1.0 - k as f64 * m / n as f64), 1e-12));
            }
        }
    }
    assert!(close(rate_shared(6, 6, 2, 1.25).unwrap(), 2.244212962962963, 1e-12));
}

#[test]
fn shared_rate_preconditions() {
    assert!(rate_shared(6, 6, 4, 1.0).is_err());
    assert!(rate_shared(2, 6, 2, 0.5).is_err());
    assert!(rate_shared(6, 6, 2, 3.5).is_err());
}

#[test]
fn shared_rate_close_to_unshared_for_small_memory() {
    let (n, k, l) = (100, 20, 4);
    let gap = |m: f64| {
        let rd = rate_decentralized(n, k, m).unwrap();
        (rd - rate_shared(n, k, l, m).unwrap()) / rd
    };
    assert!(close(gap(1.0), 0.0168, 0.01));
    assert!(close(gap(2.0), 0.0371, 0.01));
    for m in uniform_grid(5.0, 21) {
        let g = gap(m);
        assert!(g >= -1e-12 && g <= l as f64 / k as f64, "{m}: {g}");
    }
}

#[test]
fn tree_link_rate_branches() {
    for m in [1.5, 2.0, 4.0] {
        assert!(close(tree_link_rate(6, 1, m).unwrap(), 1.0 - m / 6.0, 1e-12));
        assert_eq!(
            tree_link_rate(6, 6, m).unwrap(),
            coded_procedure_rate(6, 6, m).unwrap()
        );
    }
    assert!(close(tree_link_rate(6, 3, 2.0).unwrap(), 1.4074074074074074, 1e-12));
    assert!(close(tree_link_rate(6, 4, 0.5).unwrap(), 4.0 * (1.0 - 0.5 / 6.0), 1e-12));
    assert!(close(tree_link_rate(2, 4, 1.0).unwrap(), 1.0, 1e-12));
}

#[test]
fn expected_subfile_bits_values() {
    assert_eq!(expected_subfile_bits(1000, 0.5, 2, 1), 250.0);
    assert_eq!(expected_subfile_bits(1000, 0.5, 2, 2), 250.0);
    assert_eq!(expected_subfile_bits(1000, 0.0, 3, 1), 1000.0);
}

#[test]
fn out_of_range_memory_is_rejected() {
    assert!(rate_uncoded(4, 2, -0.1).is_err());
    assert!(rate_decentralized(4, 2, 4.5).is_err());
    assert!(rate_centralized(4, 2, f64::NAN).is_err());
    assert!(lower_bound_optimal(4, 0, 1.0).is_err());
}

#[test]
fn curves_tabulate_and_validate() {
    let grid = memory_grid(0.0, 25.0, 2.5).unwrap();
    assert_eq!(grid.len(), 11);
    let curve = RateCurve::tabulate("R_D", &grid, |m| rate_decentralized(100, 20, m)).unwrap();
    assert_eq!(curve.len(), 11);
    assert_eq!(curve.points[0], (0.0, 20.0));
    let mut bad = RateCurve::new("x");
    bad.push(1.0, 2.0).unwrap();
    assert!(bad.push(1.0, 1.0).is_err());
    assert!(bad.push(2.0, -1.0).is_err());
    assert!(memory_grid(1.0, 0.0, 0.5).is_err());
}
