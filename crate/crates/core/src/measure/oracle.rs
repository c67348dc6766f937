//! Atom-free base distributions on `[0, 1]` used as singular components.
//!
//! The built-in family is the self-similar digit measure: the law of
//! `Σ_k D_k b^{-k}` with i.i.d. digits `D_k`. Truncated at a finite depth,
//! each leaf cell carries its mass uniformly, which makes every integral of a
//! polynomial exact for the truncated measure. The distance to the ideal
//! self-similar law is at most the largest leaf mass in CDF sup-norm.

use std::fmt;

use super::poly;

/// Highest polynomial degree the oracles integrate through moment tables.
pub const MAX_DEGREE: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Middle-thirds Cantor measure.
    Cantor { depth: u32 },
    /// Binary digits with `P(D = 0) = p`; singular and fully supported for
    /// `p ≠ 1/2`.
    Bernoulli { p: f64, depth: u32 },
}

pub trait CdfOracle: Send + Sync + fmt::Debug {
    fn cdf(&self, x: f64) -> f64;

    fn quantile(&self, u: f64) -> f64;

    /// Sup-norm distance in CDF between this oracle and the ideal law.
    fn resolution(&self) -> f64;

    fn family(&self) -> Family;

    /// `∫_{[a,b] ∩ [0,1]} p dF`. The default is a Riemann–Stieltjes sum on a
    /// uniform mesh, with error at most `sup|p'| · mesh`.
    fn integrate_poly(&self, p: &[f64], a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(0.0), b.min(1.0));
        if b <= a {
            return 0.0;
        }
        let cells = 1 << 14;
        let h = (b - a) / cells as f64;
        let mut acc = 0.0;
        let mut prev = self.cdf(a);
        for i in 0..cells {
            let right = a + h * (i + 1) as f64;
            let next = self.cdf(right);
            acc += poly::eval(p, right - 0.5 * h) * (next - prev);
            prev = next;
        }
        acc
    }

    /// Open intervals of `(0, 1)` of width at least `min_width` carrying no
    /// mass.
    fn support_gaps(&self, _min_width: f64) -> Vec<(f64, f64)> {
        Vec::new()
    }

    fn fully_supported(&self) -> bool;
}

#[derive(Debug, Clone)]
pub struct DigitMeasure {
    base: usize,
    weights: Vec<f64>,
    cum: Vec<f64>,
    depth: u32,
    family: Family,
    // moments[r][k] = E[X^k] for the measure truncated at r remaining levels.
    moments: Vec<Vec<f64>>,
}

impl DigitMeasure {
    fn new(base: usize, weights: Vec<f64>, depth: u32, family: Family) -> Self {
        assert!(base >= 2 && weights.len() == base);
        assert!(weights[0] > 0.0 && weights[base - 1] > 0.0);
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cum = Vec::with_capacity(base + 1);
        let mut acc = 0.0;
        for w in &weights {
            cum.push(acc);
            acc += w;
        }
        cum.push(1.0);

        let digit_moments: Vec<f64> = (0..=MAX_DEGREE)
            .map(|n| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * (j as f64).powi(n as i32))
                    .sum()
            })
            .collect();
        let mut moments = Vec::with_capacity(depth as usize + 1);
        moments.push((0..=MAX_DEGREE).map(|k| 1.0 / (k + 1) as f64).collect::<Vec<_>>());
        let b = base as f64;
        for r in 1..=depth as usize {
            let prev = &moments[r - 1];
            let next: Vec<f64> = (0..=MAX_DEGREE)
                .map(|k| {
                    let s: f64 = (0..=k)
                        .map(|i| poly::binomial(k, i) * digit_moments[k - i] * prev[i])
                        .sum();
                    s / b.powi(k as i32)
                })
                .collect();
            moments.push(next);
        }
        Self { base, weights, cum, depth, family, moments }
    }

    pub fn cantor(depth: u32) -> Self {
        Self::new(3, vec![0.5, 0.0, 0.5], depth, Family::Cantor { depth })
    }

    pub fn bernoulli(p: f64, depth: u32) -> Self {
        assert!(p > 0.0 && p < 1.0, "digit probability must lie in (0,1)");
        Self::new(2, vec![p, 1.0 - p], depth, Family::Bernoulli { p, depth })
    }

    pub fn from_family(family: Family) -> Self {
        match family {
            Family::Cantor { depth } => Self::cantor(depth),
            Family::Bernoulli { p, depth } => Self::bernoulli(p, depth),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `E[X^k]` of the truncated measure.
    pub fn moment(&self, k: usize) -> f64 {
        self.moments[self.depth as usize][k]
    }

    fn cell_integral(&self, p: &[f64], c: f64, w: f64, remaining: usize) -> f64 {
        let q = poly::compose_affine(p, c, w);
        let m = &self.moments[remaining];
        q.iter().zip(m).map(|(a, b)| a * b).sum()
    }

    #[allow(clippy::too_many_arguments)]
    fn integrate_cell(&self, p: &[f64], a: f64, b: f64, c: f64, w: f64, mass: f64, level: u32) -> f64 {
        if b <= c || a >= c + w || mass == 0.0 {
            return 0.0;
        }
        let remaining = (self.depth - level) as usize;
        if a <= c && b >= c + w {
            return mass * self.cell_integral(p, c, w, remaining);
        }
        if remaining == 0 {
            return mass * poly::integrate(p, a.max(c), b.min(c + w)) / w;
        }
        let child = w / self.base as f64;
        (0..self.base)
            .filter(|&j| self.weights[j] > 0.0)
            .map(|j| {
                self.integrate_cell(p, a, b, c + j as f64 * child, child, mass * self.weights[j], level + 1)
            })
            .sum()
    }

    fn gaps_in(&self, c: f64, w: f64, level: u32, min_width: f64, out: &mut Vec<(f64, f64)>) {
        const CAP: usize = 1 << 16;
        if level >= self.depth || out.len() >= CAP {
            return;
        }
        let child = w / self.base as f64;
        if child < min_width {
            return;
        }
        let present: Vec<usize> = (0..self.base).filter(|&j| self.weights[j] > 0.0).collect();
        for pair in present.windows(2) {
            let (j1, j2) = (pair[0], pair[1]);
            if j2 > j1 + 1 && (j2 - j1 - 1) as f64 * child >= min_width {
                out.push((c + (j1 + 1) as f64 * child, c + j2 as f64 * child));
            }
        }
        for &j in &present {
            self.gaps_in(c + j as f64 * child, child, level + 1, min_width, out);
        }
    }
}

impl CdfOracle for DigitMeasure {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let b = self.base as f64;
        let (mut acc, mut mass, mut y) = (0.0, 1.0, x);
        for _ in 0..self.depth {
            y *= b;
            let j = (y.floor() as usize).min(self.base - 1);
            acc += mass * self.cum[j];
            mass *= self.weights[j];
            y -= j as f64;
            if mass == 0.0 {
                return acc;
            }
        }
        acc + mass * y.clamp(0.0, 1.0)
    }

    fn quantile(&self, u: f64) -> f64 {
        let b = self.base as f64;
        let (mut x, mut scale, mut v) = (0.0, 1.0, u.clamp(0.0, 1.0));
        for _ in 0..self.depth {
            let j = (0..self.base).rfind(|&j| self.weights[j] > 0.0 && self.cum[j] <= v)
                .unwrap_or(0);
            v = ((v - self.cum[j]) / self.weights[j]).clamp(0.0, 1.0);
            scale /= b;
            x += j as f64 * scale;
        }
        (x + v * scale).min(1.0)
    }

    fn resolution(&self) -> f64 {
        let top = self.weights.iter().cloned().fold(0.0, f64::max);
        top.powi(self.depth as i32)
    }

    fn family(&self) -> Family {
        self.family
    }

    fn integrate_poly(&self, p: &[f64], a: f64, b: f64) -> f64 {
        assert!(p.len() <= MAX_DEGREE + 1, "polynomial degree exceeds oracle moment table");
        if a <= 0.0 && b >= 1.0 {
            return self.cell_integral(p, 0.0, 1.0, self.depth as usize);
        }
        self.integrate_cell(p, a, b, 0.0, 1.0, 1.0, 0)
    }

    fn support_gaps(&self, min_width: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        self.gaps_in(0.0, 1.0, 0, min_width, &mut out);
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    fn fully_supported(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cantor_values() {
        let c = DigitMeasure::cantor(24);
        assert!((c.cdf(1.0 / 3.0) - 0.5).abs() < 1e-12);
        assert!((c.cdf(0.5) - 0.5).abs() < 1e-12);
        assert!((c.cdf(0.25) - 1.0 / 3.0).abs() < 1e-6);
        assert!((c.cdf(2.0 / 9.0) - 0.25).abs() < 1e-12);
        assert_eq!(c.resolution(), 0.5f64.powi(24));
    }

    #[test]
    fn cantor_moments() {
        let c = DigitMeasure::cantor(24);
        assert!((c.moment(1) - 0.5).abs() < 1e-12);
        // E[X^2] = 3/8 for the ideal Cantor law.
        assert!((c.moment(2) - 0.375).abs() < 1e-10);
    }

    #[test]
    fn partial_integral_matches_riemann_sum() {
        let c = DigitMeasure::cantor(16);
        let p = [0.3, -1.0, 2.0];
        let exact = c.integrate_poly(&p, 0.1, 0.8);
        let mut approx = 0.0;
        let n = 200_000;
        for i in 0..n {
            let a = 0.1 + 0.7 * i as f64 / n as f64;
            let b = 0.1 + 0.7 * (i + 1) as f64 / n as f64;
            approx += poly::eval(&p, 0.5 * (a + b)) * (c.cdf(b) - c.cdf(a));
        }
        assert!((exact - approx).abs() < 1e-5, "{exact} vs {approx}");
    }

    #[test]
    fn gaps() {
        let c = DigitMeasure::cantor(24);
        let g = c.support_gaps(0.1);
        assert_eq!(g.len(), 3);
        assert!((g[1].0 - 1.0 / 3.0).abs() < 1e-15 && (g[1].1 - 2.0 / 3.0).abs() < 1e-15);
        assert!(DigitMeasure::bernoulli(0.3, 30).support_gaps(1e-6).is_empty());
    }

    proptest! {
        #[test]
        fn quantile_inverts_cdf(u in 0.0f64..1.0) {
            let m = DigitMeasure::bernoulli(0.3, 40);
            let x = m.quantile(u);
            prop_assert!((m.cdf(x) - u).abs() < 1e-9);
        }

        #[test]
        fn cdf_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let m = DigitMeasure::cantor(24);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(m.cdf(lo) <= m.cdf(hi));
        }

        #[test]
        fn integral_additive(s in 0.0f64..1.0) {
            let m = DigitMeasure::cantor(20);
            let p = [1.0, 0.5, -0.25, 0.125];
            let whole = m.integrate_poly(&p, 0.0, 1.0);
            let split = m.integrate_poly(&p, 0.0, s) + m.integrate_poly(&p, s, 1.0);
            prop_assert!((whole - split).abs() < 1e-12);
        }
    }
}
