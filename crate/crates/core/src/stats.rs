//! Kolmogorov–Smirnov statistics and the Dvoretzky–Kiefer–Wolfowitz band.
//!
//! Distribution functions with jumps are compared with a small location
//! tolerance `δ`: the one-sample statistic uses `F(x + δ)` and `F(x - δ)`
//! as the right and left limits at a sample point, and the two-sample
//! statistic merges values closer than `δ` into ties. This absorbs rounding in
//! samples that sit exactly on a jump.

use serde::Serialize;

/// Default location tolerance for jump-aware comparisons.
pub const JITTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Effective sample size used in the asymptotic law.
    pub n_eff: f64,
    pub p_value: f64,
}

impl KsResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn p_value(d: f64, n_eff: f64) -> f64 {
    let rn = n_eff.sqrt();
    kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d)
}

/// Smallest `D` rejected at level `alpha` for effective size `n_eff`.
pub fn critical_value(n_eff: f64, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if p_value(mid, n_eff) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Half-width `ε` with `P(sup |F_n - F| > ε) ≤ α`.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Confidence `1 - α` that a band of half-width `eps` covers `F`.
pub fn dkw_confidence(n: usize, eps: f64) -> f64 {
    1.0 - (2.0 * (-2.0 * n as f64 * eps * eps).exp()).min(1.0)
}

fn sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_t |F_n(t) - F(t)|` against a right-continuous `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F, delta: f64) -> KsResult {
    let x = sorted(data);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let upper = (i + 1) as f64 / n - cdf(v + delta);
        let lower = cdf(v - delta) - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    KsResult { statistic: d, n_eff: n, p_value: p_value(d, n) }
}

/// Two-sample statistic `sup_t |F_a(t) - F_b(t)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64], delta: f64) -> KsResult {
    let (xa, xb) = (sorted(a), sorted(b));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() || j < xb.len() {
        let next = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => break,
        };
        // Consume every value within δ of the running cluster end.
        let mut edge = next;
        loop {
            let mut moved = false;
            while i < xa.len() && xa[i] <= edge + delta {
                edge = edge.max(xa[i]);
                i += 1;
                moved = true;
            }
            while j < xb.len() && xb[j] <= edge + delta {
                edge = edge.max(xb[j]);
                j += 1;
                moved = true;
            }
            if !moved {
                break;
            }
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    KsResult { statistic: d, n_eff, p_value: p_value(d, n_eff) }
}

/// Upper bound on `sup_t |F_n(t) - F(t)|` from `F` evaluated only at every
/// `stride`-th order statistic and at `extra` points.
///
/// Between consecutive evaluation points both functions are monotone, which
/// bounds the deviation there by the endpoint values. Empirical counts treat
/// values within `delta` of an evaluation point `g` as equal to it, so they
/// are compared with `F(g + delta)` and `F(g - delta -)`.
pub fn ecdf_sup_bound<F, G>(data: &[f64], cdf: F, cdf_left: G, stride: usize, extra: &[f64], delta: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let x = sorted(data);
    if x.is_empty() {
        return f64::NAN;
    }
    let n = x.len() as f64;
    let mut grid: Vec<f64> = x.iter().step_by(stride.max(1)).copied().collect();
    grid.push(*x.last().unwrap());
    grid.extend_from_slice(extra);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let at = |g: f64| x.partition_point(|&v| v <= g + delta) as f64 / n;
    let before = |g: f64| x.partition_point(|&v| v < g - delta) as f64 / n;
    let values: Vec<(f64, f64, f64, f64)> = grid.iter().map(|&g| (at(g), before(g), cdf(g + delta), cdf_left(g - delta))).collect();
    let mut d: f64 = 0.0;
    let first = values[0];
    d = d.max(first.1).max(first.3);
    for (i, v) in values.iter().enumerate() {
        d = d.max((v.0 - v.2).abs()).max((v.1 - v.3).abs());
        if let Some(next) = values.get(i + 1) {
            d = d.max(next.1 - v.2).max(next.3 - v.0);
        }
    }
    let last = values[values.len() - 1];
    d.max(1.0 - last.0).max(1.0 - last.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
}

pub fn mean_estimate(values: &[f64]) -> MeanEstimate {
    let n = values.len() as f64;
    if values.is_empty() {
        return MeanEstimate { mean: f64::NAN, std_err: f64::NAN };
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    MeanEstimate { mean, std_err: (var / n).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kolmogorov_quantiles() {
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn uniform_sample_not_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let r = ks_one_sample(&x, |t| t.clamp(0.0, 1.0), 0.0);
        assert!(!r.rejects(0.001), "{r:?}");
        let shifted: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert!(ks_one_sample(&shifted, |t| t.clamp(0.0, 1.0), 0.0).rejects(0.01));
    }

    #[test]
    fn jumps_with_jitter() {
        // Half the mass at 0.5, half uniform on [0,1].
        let cdf = |t: f64| 0.5 * t.clamp(0.0, 1.0) + if t >= 0.5 { 0.5 } else { 0.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..10_000)
            .map(|_| if rng.random::<bool>() { 0.5 - 1e-15 } else { rng.random::<f64>() })
            .collect();
        assert!(ks_one_sample(&x, cdf, 0.0).statistic > 0.3);
        assert!(!ks_one_sample(&x, cdf, JITTER).rejects(0.001));
    }

    #[test]
    fn two_sample_ties() {
        let a = vec![0.25; 100];
        let b: Vec<f64> = (0..80).map(|i| 0.25 + (i % 3) as f64 * 1e-16).collect();
        let r = ks_two_sample(&a, &b, JITTER);
        assert_eq!(r.statistic, 0.0);
        let c: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        assert!(ks_two_sample(&a, &c, JITTER).rejects(0.01));
    }

    #[test]
    fn sup_bound_brackets_statistic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>().sqrt()).collect();
        let cdf = |t: f64| t.clamp(0.0, 1.0).powi(2);
        let exact = ks_one_sample(&x, cdf, 0.0).statistic;
        let bound = ecdf_sup_bound(&x, cdf, cdf, 40, &[0.0, 1.0], 0.0);
        assert!(bound >= exact - 1e-12 && bound < exact + 0.005, "{bound} vs {exact}");
        let atoms = vec![0.5; 100];
        let step = |t: f64| if t >= 0.5 { 1.0 } else { 0.0 };
        let step_left = |t: f64| if t > 0.5 { 1.0 } else { 0.0 };
        assert_eq!(ecdf_sup_bound(&atoms, step, step_left, 7, &[0.0, 1.0], JITTER), 0.0);
    }

    #[test]
    fn dkw() {
        let e = dkw_epsilon(100_000, 0.05);
        assert!((e - 0.004_294_8).abs() < 1e-6);
        assert!(dkw_confidence(100_000, 0.01) > 0.999_999);
        assert!((critical_value(1e6, 0.05) * 1e3 - 1.358).abs() < 2e-3);
    }
}
