//! The Williamson d-transform of a measure and its pseudo-inverse.

use std::sync::Arc;

use serde::Serialize;

use crate::measure::{Interval, WilliamsonMeasure};
use crate::{Error, Result};

/// `ψ(1) = 1/2` must hold to this tolerance for a generator to be built.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Relative distance within which `1/z` is identified with an atom.
pub const ATOM_SNAP: f64 = 1e-13;
const PHI_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A point where `ψ^{(d-2)}` has a kink: `z = 1/q` for an atom `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    pub z: f64,
    pub q: f64,
    pub psi: f64,
}

/// `φ(y)` together with the atom `q` when `φ(y) = 1/q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub z: f64,
    pub atom: Option<f64>,
}

impl PhiValue {
    /// `1/φ(y)`, exact when `φ(y)` sits at a kink.
    pub fn reciprocal(&self) -> f64 {
        self.atom.unwrap_or(1.0 / self.z)
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    measure: Arc<WilliamsonMeasure>,
    d: usize,
    phi0: f64,
    strict: bool,
    kinks: Vec<Kink>,
    factorial: f64,
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

impl Generator {
    pub fn new(measure: WilliamsonMeasure) -> Result<Self> {
        Self::from_arc(Arc::new(measure))
    }

    pub fn from_arc(measure: Arc<WilliamsonMeasure>) -> Result<Self> {
        let d = measure.dimension();
        let psi1 = measure.williamson_transform(1.0);
        if (psi1 - 0.5).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::measure(format!(
                "measure is not normalized: ψ(1) = {psi1}; normalize it first"
            )));
        }
        let strict = measure.is_strict();
        let phi0 = if strict { f64::INFINITY } else { 1.0 / measure.left_end() };
        let mut g = Self { measure, d, phi0, strict, kinks: Vec::new(), factorial: falling(d - 1, d - 1) };
        let mut kinks: Vec<Kink> = g
            .measure
            .atoms()
            .iter()
            .map(|a| Kink { z: 1.0 / a.location, q: a.location, psi: 0.0 })
            .collect();
        for k in &mut kinks {
            k.psi = g.psi(k.z);
        }
        kinks.reverse();
        g.kinks = kinks;
        Ok(g)
    }

    pub fn measure(&self) -> &WilliamsonMeasure {
        &self.measure
    }

    pub fn measure_arc(&self) -> Arc<WilliamsonMeasure> {
        self.measure.clone()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `φ(0)`, infinite for strict generators.
    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Kinks sorted by increasing `z`.
    pub fn kinks(&self) -> &[Kink] {
        &self.kinks
    }

    /// `1/z`, replaced by the atom it denotes when within [`ATOM_SNAP`].
    pub fn reciprocal(&self, z: f64) -> f64 {
        let r = 1.0 / z;
        self.snap(r, ATOM_SNAP)
    }

    /// Nearest atom to `r` within relative distance `tol`, else `r`.
    pub fn snap(&self, r: f64, tol: f64) -> f64 {
        let atoms = self.measure.atoms();
        let k = atoms.partition_point(|a| a.location < r);
        for j in [k.wrapping_sub(1), k] {
            if let Some(a) = atoms.get(j) {
                if (a.location - r).abs() <= tol * r.abs() {
                    return a.location;
                }
            }
        }
        r
    }

    pub fn psi(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        if z.is_infinite() {
            return 0.0;
        }
        self.measure.williamson_transform(z).clamp(0.0, 1.0)
    }

    /// `ψ^{(k)}(z)` for `k ≤ d - 2`.
    pub fn psi_derivative(&self, k: usize, z: f64) -> Result<f64> {
        if k + 2 > self.d {
            return Err(Error::arg(format!(
                "derivative order {k} exceeds d - 2 = {}",
                self.d - 2
            )));
        }
        if z.is_infinite() {
            return Ok(0.0);
        }
        if z < 0.0 {
            return Err(Error::arg(format!("ψ^({k}) needs z ≥ 0, got {z}")));
        }
        if k == 0 {
            return Ok(self.psi(z));
        }
        let m = self.d - 1 - k;
        let upper = if z == 0.0 { Interval::everything() } else { Interval::left_open(0.0, 1.0 / z) };
        let integral = self.measure.integrate_kernel(k, m, z, upper);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * falling(self.d - 1, k) * integral)
    }

    /// `∫_{(0,r]} t^{d-1} dγ` (closed) or `∫_{(0,r)} t^{d-1} dγ`.
    pub fn top_moment(&self, r: f64, closed: bool) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let i = if closed { Interval::left_open(0.0, r) } else { Interval::open(0.0, r) };
        self.measure.integrate_kernel(self.d - 1, 0, 0.0, i)
    }

    /// One-sided derivative of `ψ^{(d-2)}` at `z > 0`, with `1/z` given
    /// exactly as `r`.
    pub fn one_sided_at(&self, r: f64, side: Side) -> f64 {
        let sign = if self.d.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * self.factorial * self.top_moment(r, side == Side::Left)
    }

    /// `D⁻ψ^{(d-2)}(z)`
    pub fn dminus_psi(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        self.one_sided_at(self.reciprocal(z), Side::Left)
    }

    /// `D⁺ψ^{(d-2)}(z)`
    pub fn dplus_psi(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        self.one_sided_at(self.reciprocal(z), Side::Right)
    }

    /// `G(z) = (-1)^{d-2} D⁻ψ^{(d-2)}(z) = -(d-1)! ∫_{(0,1/z]} t^{d-1} dγ`.
    pub fn g_function(&self, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        -self.factorial * self.top_moment(self.reciprocal(z), true)
    }

    /// `∫_{(0,1/z]} t^{m-1} (1 - t z)^{d-m} dγ`, the kernel normalizer of the
    /// `m`-dimensional marginal. For `m = d` this is the top moment.
    pub fn marginal_moment(&self, m: usize, z: f64) -> f64 {
        if z.is_infinite() {
            return 0.0;
        }
        let upper = if z <= 0.0 { Interval::everything() } else { Interval::left_open(0.0, self.reciprocal(z)) };
        self.measure.integrate_kernel(m - 1, self.d - m, z.max(0.0), upper)
    }

    /// `D⁻ψ^{(d-1)}(z)`, defined when the measure is absolutely continuous.
    pub fn dminus_psi_d1(&self, z: f64) -> Result<f64> {
        let c = self.measure.lebesgue_components();
        if c.abs < 1.0 - 1e-12 {
            return Err(Error::NotAbsolutelyContinuous);
        }
        if z <= 0.0 || z.is_infinite() {
            return Ok(0.0);
        }
        let t = 1.0 / z;
        let f: f64 = self.measure.pieces().iter().map(|p| p.density(t)).sum();
        let sign = if self.d.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * self.factorial * z.powi(-(self.d as i32 + 1)) * f)
    }

    /// `ψ'` at `z`, using the `D⁻` convention when `d = 2`.
    pub fn psi_prime(&self, z: f64) -> f64 {
        if self.d == 2 {
            self.dminus_psi(z)
        } else {
            self.psi_derivative(1, z).expect("order 1 is available for d ≥ 3")
        }
    }

    /// `φ'(x) = 1/ψ'(φ(x))`.
    pub fn phi_prime(&self, x: f64) -> Result<f64> {
        let z = self.phi(x)?;
        Ok(1.0 / self.psi_prime(z))
    }

    pub fn phi(&self, y: f64) -> Result<f64> {
        self.phi_value(y).map(|p| p.z)
    }

    pub fn phi_value(&self, y: f64) -> Result<PhiValue> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::arg(format!("φ needs y in [0,1], got {y}")));
        }
        if y == 1.0 {
            return Ok(PhiValue { z: 0.0, atom: None });
        }
        if y == 0.0 {
            let atom = (!self.strict).then(|| self.measure.left_end()).filter(|q| self.measure.atom_mass_at(*q) > 0.0);
            return Ok(PhiValue { z: self.phi0, atom });
        }
        // Kinks are sorted by z, so ψ at the kinks is non-increasing.
        let k = self.kinks.partition_point(|k| k.psi > y);
        for j in [k.wrapping_sub(1), k] {
            if let Some(kink) = self.kinks.get(j) {
                if (kink.psi - y).abs() <= 1e-14 {
                    return Ok(PhiValue { z: kink.z, atom: Some(kink.q) });
                }
            }
        }
        let mut lo = if k == 0 { 0.0 } else { self.kinks[k - 1].z };
        let mut hi = match self.kinks.get(k) {
            Some(kink) => kink.z,
            None if self.phi0.is_finite() => self.phi0,
            None => {
                let mut h = lo.max(1.0);
                while self.psi(h) > y {
                    h *= 2.0;
                }
                h
            }
        };
        for _ in 0..PHI_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if self.psi(mid) > y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(PhiValue { z: 0.5 * (lo + hi), atom: None })
    }

    /// Checks `target_d`-monotonicity on a sorted grid. Orders up to `d - 2`
    /// use closed forms; higher orders use divided differences of
    /// `ψ^{(d-2)}`.
    pub fn check_d_monotone(&self, grid: &[f64], target_d: usize) -> MonotoneReport {
        let report = |violation| MonotoneReport { target_d, points: grid.len(), violation };
        let closed = target_d.min(self.d);
        for &z in grid {
            for k in 0..=closed - 2 {
                let v = self.psi_derivative(k, z).expect("order within range");
                let signed = if k % 2 == 0 { v } else { -v };
                if signed < -1e-12 {
                    return report(Some(Violation { kind: ViolationKind::Sign { order: k }, z, value: signed }));
                }
            }
        }
        let top = closed - 2;
        let sign = if top.is_multiple_of(2) { 1.0 } else { -1.0 };
        let f: Vec<f64> = grid
            .iter()
            .map(|&z| sign * self.psi_derivative(top, z).expect("order within range"))
            .collect();
        let extra = target_d - closed;
        // (-1)^j Δ^j f ≥ 0 for j = 1 ..= extra + 2.
        let mut diffs = f.clone();
        for order in 1..=extra + 2 {
            let next: Vec<f64> = (0..diffs.len().saturating_sub(1))
                .map(|i| (diffs[i + 1] - diffs[i]) / (grid[i + order] - grid[i]))
                .collect();
            let scale = f.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let tol = 1e-9 * scale / grid_spacing(grid).powi(order as i32);
            for (i, v) in next.iter().enumerate() {
                let signed = if order % 2 == 0 { *v } else { -*v };
                if signed < -tol {
                    let kind = match order {
                        1 => ViolationKind::Monotonicity,
                        2 => ViolationKind::Convexity,
                        _ => ViolationKind::DividedDifference { order },
                    };
                    return report(Some(Violation { kind, z: grid[i], value: signed }));
                }
            }
            diffs = next;
        }
        report(None)
    }

    pub fn summary(&self) -> GeneratorSummary {
        GeneratorSummary {
            d: self.d,
            strict: self.strict,
            phi0: self.phi0.is_finite().then_some(self.phi0),
            support_left: self.measure.left_end(),
            support_right: self.measure.right_end(),
            normalization_defect: self.psi(1.0) - 0.5,
        }
    }
}

fn grid_spacing(grid: &[f64]) -> f64 {
    grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min).clamp(1e-12, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Sign { order: usize },
    Monotonicity,
    Convexity,
    DividedDifference { order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub z: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub target_d: usize,
    pub points: usize,
    pub violation: Option<Violation>,
}

impl MonotoneReport {
    pub fn pass(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorSummary {
    pub d: usize,
    pub strict: bool,
    /// `null` when `φ(0) = ∞`.
    pub phi0: Option<f64>,
    pub support_left: f64,
    pub support_right: f64,
    pub normalization_defect: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    fn two_atom() -> Generator {
        Generator::new(catalog::two_atom()).unwrap()
    }

    #[test]
    fn closed_forms_of_two_atom() {
        let g = two_atom();
        for i in 0..=100 {
            let z = 0.5 * i as f64 / 100.0;
            let want = (137.0 * z * z - 152.0 * z + 98.0) / 98.0;
            assert!((g.psi(z) - want).abs() < 1e-12);
            let z = 0.5 + 7.5 * i as f64 / 100.0;
            let want = 32.0 / 49.0 * (1.0 - z / 8.0).powi(2);
            assert!((g.psi(z) - want).abs() < 1e-12);
        }
        assert!((g.psi(0.5) - 225.0 / 392.0).abs() < 1e-15);
        assert!((g.psi_derivative(1, 4.0).unwrap() + 4.0 / 49.0).abs() < 1e-15);
        assert!((g.dminus_psi(3.0) - 1.0 / 49.0).abs() < 1e-15);
        assert!((g.dminus_psi(0.25) - 137.0 / 49.0).abs() < 1e-14);
        assert_eq!(g.dminus_psi(9.0), 0.0);
        assert!(g.psi_derivative(2, 1.0).is_err());
    }

    #[test]
    fn phi_inverts() {
        let g = two_atom();
        let v = g.phi_value(225.0 / 392.0).unwrap();
        assert_eq!(v.z, 0.5);
        assert_eq!(v.atom, Some(2.0));
        assert_eq!(g.phi(0.0).unwrap(), 8.0);
        assert_eq!(g.phi(1.0).unwrap(), 0.0);
        assert!((g.phi(0.5).unwrap() - 1.0).abs() < 1e-9);
        let w = Generator::new(catalog::lower_frechet()).unwrap();
        assert!((w.phi(0.3).unwrap() - 1.4).abs() < 1e-13);
        let e = Generator::new(catalog::gapped_mixture()).unwrap();
        assert!((e.phi(11.0 / 18.0).unwrap() - 0.5).abs() < 1e-13);
        assert!(g.phi(1.5).is_err());
    }

    #[test]
    fn strictness() {
        assert!(!two_atom().is_strict());
        let u = Generator::new(catalog::uniform()).unwrap();
        assert!(u.is_strict());
        assert_eq!(u.phi(0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rejects_unnormalized() {
        let m = crate::WilliamsonMeasure::new(2, vec![crate::measure::Atom::new(1.0, 1.0)], vec![], vec![]).unwrap();
        assert!(Generator::new(m).is_err());
    }

    #[test]
    fn monotonicity_checks() {
        let grid: Vec<f64> = (1..=320).map(|i| i as f64 / 32.0).collect();
        assert!(two_atom().check_d_monotone(&grid, 3).pass());
        let w = Generator::new(catalog::lower_frechet()).unwrap();
        assert!(w.check_d_monotone(&grid, 2).pass());
        let r = w.check_d_monotone(&grid, 4);
        assert!(!r.pass());
        assert!(two_atom().check_d_monotone(&[1.0], 3).pass());
    }

    #[test]
    fn atom_jump_identity() {
        for m in [catalog::two_atom(), catalog::gapped_mixture(), catalog::root_mixture()] {
            let g = Generator::new(m).unwrap();
            let d = g.d() as i32;
            for a in g.measure().atoms() {
                let z = 1.0 / a.location;
                let jump = g.dminus_psi(z) - g.dplus_psi(z);
                let fact = falling(g.d() - 1, g.d() - 1);
                let want = (-1f64).powi(d - 1) * fact * a.mass * a.location.powi(d - 1);
                assert!((jump - want).abs() < 1e-14, "{jump} vs {want}");
            }
        }
    }

    proptest! {
        #[test]
        fn psi_phi_round_trip(y in 0.001f64..0.999) {
            for m in [catalog::two_atom(), catalog::gapped_mixture(), catalog::root_mixture(), catalog::uniform(), catalog::cantor()] {
                let g = Generator::new(m).unwrap();
                let z = g.phi(y).unwrap();
                prop_assert!((g.psi(z) - y).abs() < 1e-10);
            }
        }

        #[test]
        fn g_matches_backward_difference(z in 0.05f64..6.0) {
            for m in [catalog::two_atom(), catalog::root_mixture(), catalog::cantor()] {
                let g = Generator::new(m).unwrap();
                let near_atom = g.measure().atoms().iter().any(|a| (1.0 / a.location - z).abs() < 1e-3);
                prop_assume!(!near_atom);
                let k = g.d() - 2;
                let h = 1e-6;
                let bd = (g.psi_derivative(k, z).unwrap() - g.psi_derivative(k, z - h).unwrap()) / h;
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                let want = g.g_function(z);
                prop_assert!((sign * bd - want).abs() <= 1e-3 * want.abs().max(1e-3));
            }
        }

        #[test]
        fn psi_non_increasing(a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let g = two_atom();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(g.psi(lo) >= g.psi(hi) - 1e-15);
        }
    }
}
