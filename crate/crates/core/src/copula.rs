//! Archimedean copulas `C(x) = ψ(φ(x_1) + … + φ(x_m))`.

use std::sync::Arc;

use serde::Serialize;

use crate::generator::{Generator, PhiValue, Side};
use crate::quadrature::{self, QuadResult, Tolerance};
use crate::{Error, Result, WilliamsonMeasure};

/// Two closed forms are considered equal to this tolerance.
pub const LEVEL_AGREEMENT: f64 = 1e-10;
pub const KENDALL_AGREEMENT: f64 = 1e-9;
/// Marginal mass neglected near a zero coordinate of a strict copula.
const EDGE_MASS: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct ArchCopula {
    gen: Arc<Generator>,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelForm {
    GammaAtom,
    DerivativeJump,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub t: f64,
    pub mass: f64,
    /// `1/φ(t)`; infinite when `t = 1`.
    pub atom_location: f64,
    pub form: LevelForm,
    pub gamma_form: f64,
    pub jump_form: Option<f64>,
    pub forms_agree: bool,
    /// Mass as `p/q` when the atom was given exactly.
    pub exact_mass: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KendallValue {
    pub t: f64,
    pub gamma_form: f64,
    pub long_form: f64,
    pub agree: bool,
}

impl ArchCopula {
    pub fn new(gen: Generator) -> Self {
        let dim = gen.d();
        Self { gen: Arc::new(gen), dim }
    }

    pub fn from_measure(measure: WilliamsonMeasure) -> Result<Self> {
        Ok(Self::new(Generator::new(measure)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    pub fn measure(&self) -> &WilliamsonMeasure {
        self.gen.measure()
    }

    /// The copula `C^{1:m}` of the first `m` coordinates.
    pub fn marginal(&self, m: usize) -> Result<Self> {
        if m < 2 || m >= self.dim {
            return Err(Error::arg(format!("marginal dimension {m} must lie in [2, {}]", self.dim - 1)));
        }
        Ok(Self { gen: self.gen.clone(), dim: m })
    }

    fn check_point(&self, x: &[f64], len: usize) -> Result<()> {
        if x.len() != len {
            return Err(Error::arg(format!("expected {len} coordinates, got {}", x.len())));
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::arg(format!("coordinate {v} outside [0,1]")));
        }
        Ok(())
    }

    /// `Σ φ(x_i)`, infinite when some coordinate sits at `φ = ∞`.
    pub fn phi_sum(&self, x: &[f64]) -> Result<f64> {
        let mut s = 0.0;
        for &v in x {
            s += self.gen.phi(v)?;
        }
        Ok(s)
    }

    pub fn cdf(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x, self.dim)?;
        if x.contains(&0.0) {
            return Ok(0.0);
        }
        Ok(self.gen.psi(self.phi_sum(x)?))
    }

    /// `C` evaluated from precomputed `φ` values.
    pub fn cdf_from_sum(&self, s: f64) -> f64 {
        self.gen.psi(s)
    }

    /// `(d-1)!/(d-m)! ∫_{(0,1/z]} t^{m-1}(1 - tz)^{d-m} dγ = (-1)^{m-1} ψ^{(m-1)}(z)`
    /// with the left-derivative convention at order `d - 1`.
    fn order_density(&self, m: usize, z: f64) -> f64 {
        let d = self.gen.d();
        let c: f64 = ((d - m + 1)..d).map(|i| i as f64).product();
        c * self.gen.marginal_moment(m, z)
    }

    /// Density of the `m`-dimensional copula, `m = x.len()`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x, self.dim)?;
        let m = self.dim;
        if x.iter().any(|&v| v <= 0.0 || v >= 1.0) {
            return Ok(0.0);
        }
        let s = self.phi_sum(x)?;
        let phi_prime: f64 = x.iter().map(|&v| self.gen.phi_prime(v)).collect::<Result<Vec<_>>>()?.iter().product();
        let d = self.gen.d();
        let signed = if m < d {
            // (-1)^m ψ^{(m)} = order_density(m + 1, ·)
            self.order_density(m + 1, s)
        } else {
            let v = self.gen.dminus_psi_d1(s)?;
            if d.is_multiple_of(2) { v } else { -v }
        };
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * phi_prime * signed)
    }

    /// `K(x, [0, y])` given `s = Σ φ(x_i)` and `φ(y)`. `closed = false` gives
    /// `K(x, [0, y))`.
    pub fn kernel_from_sum(&self, s: f64, phi_y: PhiValue, closed: bool) -> f64 {
        let phi0 = self.gen.phi0();
        if s == 0.0 || s >= phi0 {
            return 1.0;
        }
        let z = s + phi_y.z;
        if z > phi0 {
            return 0.0;
        }
        let den = self.gen.marginal_moment(self.dim, s);
        if den <= 0.0 {
            return 1.0;
        }
        let num = self.kernel_numerator(self.gen.reciprocal(z), z, closed);
        (num / den).clamp(0.0, 1.0)
    }

    fn kernel_numerator(&self, r: f64, z: f64, closed: bool) -> f64 {
        use crate::measure::Interval;
        let d = self.gen.d();
        let m = self.dim;
        let i = if closed { Interval::left_open(0.0, r) } else { Interval::open(0.0, r) };
        self.gen.measure().integrate_kernel(m - 1, d - m, z, i)
    }

    /// Markov kernel `K(x, [0, y])` of the last coordinate given the others.
    pub fn kernel_cdf(&self, x: &[f64], y: f64) -> Result<f64> {
        self.check_point(x, self.dim - 1)?;
        if x.iter().all(|&v| v == 1.0) {
            return Ok(1.0);
        }
        let s = self.phi_sum(x)?;
        if y >= 1.0 {
            return Ok(1.0);
        }
        let phi_y = self.gen.phi_value(y)?;
        Ok(self.kernel_from_sum(s, phi_y, true))
    }

    /// `K(x, [0, y))`
    pub fn kernel_cdf_left(&self, x: &[f64], y: f64) -> Result<f64> {
        self.check_point(x, self.dim - 1)?;
        if x.iter().all(|&v| v == 1.0) {
            return Ok(1.0);
        }
        let s = self.phi_sum(x)?;
        let phi_y = self.gen.phi_value(y)?;
        Ok(self.kernel_from_sum(s, phi_y, false))
    }

    /// `f^t(x)`, with value 1 outside the upper `t`-cut of `C^{1:m-1}`.
    pub fn level_function(&self, t: f64, x: &[f64]) -> Result<f64> {
        self.check_point(x, self.dim - 1)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::arg(format!("level {t} outside [0,1]")));
        }
        if x.contains(&0.0) && t > 0.0 {
            return Ok(1.0);
        }
        let s = self.phi_sum(x)?;
        let phi_t = self.gen.phi(t)?;
        let u = phi_t - s;
        if t > 0.0 {
            return Ok(if u < 0.0 { 1.0 } else { self.gen.psi(u) });
        }
        if u.is_nan() || u < 0.0 {
            return Ok(1.0);
        }
        Ok(self.gen.psi(u))
    }

    /// `μ_C(L_t)` from the atom of `γ` at `1/φ(t)`, cross-checked against the
    /// jump of `D⁻ψ^{(d-2)}` at `φ(t)`.
    pub fn level_mass(&self, t: f64) -> Result<LevelSetReport> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::arg(format!("level {t} outside [0,1]")));
        }
        let gen = &self.gen;
        if t == 1.0 {
            return Ok(LevelSetReport {
                t,
                mass: 0.0,
                atom_location: f64::INFINITY,
                form: LevelForm::GammaAtom,
                gamma_form: 0.0,
                jump_form: None,
                forms_agree: true,
                exact_mass: None,
            });
        }
        let pv = gen.phi_value(t)?;
        if pv.z.is_infinite() {
            return Ok(LevelSetReport {
                t,
                mass: 0.0,
                atom_location: 0.0,
                form: LevelForm::GammaAtom,
                gamma_form: 0.0,
                jump_form: None,
                forms_agree: true,
                exact_mass: None,
            });
        }
        let r = gen.snap(pv.reciprocal(), ATOM_MATCH);
        let atom = gen.measure().atom_at(r);
        let gamma_form = atom.map_or(0.0, |a| a.mass);
        let d = gen.d() as i32;
        let fact: f64 = (1..d).map(f64::from).product();
        let jump = gen.one_sided_at(r, Side::Left) - gen.one_sided_at(r, Side::Right);
        let jump_form = (-pv.z).powi(d - 1) / fact * jump;
        Ok(LevelSetReport {
            t,
            mass: gamma_form,
            atom_location: r,
            form: LevelForm::GammaAtom,
            gamma_form,
            jump_form: Some(jump_form),
            forms_agree: (gamma_form - jump_form).abs() <= LEVEL_AGREEMENT,
            exact_mass: atom.and_then(|a| a.exact_mass).map(|m| format!("{}/{}", m.numer(), m.denom())),
        })
    }

    /// Levels `ψ(1/q)` carried by the atoms `q` of `γ`, with their masses.
    pub fn atom_levels(&self) -> Vec<(f64, f64)> {
        self.measure()
            .atoms()
            .iter()
            .map(|a| (self.gen.psi(1.0 / a.location), a.mass))
            .collect()
    }

    /// `μ_C(L_{[s1,s2]}) = γ([1/φ(s1), 1/φ(s2)])`
    pub fn band_mass(&self, s1: f64, s2: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s1) || !(0.0..=1.0).contains(&s2) || s1 > s2 {
            return Err(Error::arg(format!("band [{s1}, {s2}] must satisfy 0 ≤ s1 ≤ s2 ≤ 1")));
        }
        use crate::measure::Interval;
        let lo = if s1 == 0.0 { 0.0 } else { self.gen.snap(self.gen.phi_value(s1)?.reciprocal(), ATOM_MATCH) };
        let hi = self.gen.snap(self.gen.phi_value(s2)?.reciprocal(), ATOM_MATCH);
        Ok(self.measure().mass(Interval::closed(lo, hi)))
    }

    /// Kendall distribution function in both closed forms.
    pub fn kendall(&self, t: f64) -> Result<KendallValue> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::arg(format!("level {t} outside [0,1]")));
        }
        if t == 1.0 {
            return Ok(KendallValue { t, gamma_form: 1.0, long_form: 1.0, agree: true });
        }
        let gen = &self.gen;
        let pv = gen.phi_value(t)?;
        if pv.z.is_infinite() {
            return Ok(KendallValue { t, gamma_form: 0.0, long_form: 0.0, agree: true });
        }
        use crate::measure::Interval;
        let r = gen.snap(pv.reciprocal(), ATOM_MATCH);
        let gamma_form = self.measure().mass(Interval::closed(0.0, r));
        let d = gen.d();
        let phi = pv.z;
        let mut fact = 1.0;
        let mut long_form = 0.0;
        for k in 0..=d - 2 {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            long_form += gen.psi_derivative(k, phi)? * sign * phi.powi(k as i32) / fact;
        }
        fact *= (d - 1) as f64;
        let sign = if (d - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        long_form += gen.one_sided_at(r, Side::Left) * sign * phi.powi(d as i32 - 1) / fact;
        Ok(KendallValue {
            t,
            gamma_form,
            long_form,
            agree: (gamma_form - long_form).abs() <= KENDALL_AGREEMENT,
        })
    }

    /// `F_K(t) = γ([0, 1/φ(t)])`
    pub fn kendall_cdf(&self, t: f64) -> Result<f64> {
        self.kendall_gamma(t, true)
    }

    /// `F_K(t-) = γ([0, 1/φ(t)))`
    pub fn kendall_cdf_left(&self, t: f64) -> Result<f64> {
        self.kendall_gamma(t, false)
    }

    fn kendall_gamma(&self, t: f64, closed: bool) -> Result<f64> {
        use crate::measure::Interval;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::arg(format!("level {t} outside [0,1]")));
        }
        if t == 1.0 {
            return Ok(1.0);
        }
        let pv = self.gen.phi_value(t)?;
        if pv.z.is_infinite() {
            return Ok(0.0);
        }
        let r = self.gen.snap(pv.reciprocal(), ATOM_MATCH);
        let i = if closed { Interval::closed(0.0, r) } else { Interval::right_open(0.0, r) };
        Ok(self.measure().mass(i))
    }

    /// `γ([0, z])` recovered as `F_K(ψ(1/z))`.
    pub fn measure_cdf_from_kendall(&self, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::arg(format!("z = {z} must be nonnegative")));
        }
        let phi0 = self.gen.phi0();
        if z < 1.0 / phi0 || z == 0.0 {
            return Ok(0.0);
        }
        self.kendall_cdf(self.gen.psi(1.0 / z))
    }

    /// `μ_C` of the box `Π [lo_i, hi_i]` by inclusion–exclusion over `C`.
    pub fn corner_mass(&self, lo: &[f64], hi: &[f64]) -> Result<f64> {
        self.check_box(lo, hi)?;
        let m = self.dim;
        let phi_lo: Vec<f64> = lo.iter().map(|&v| self.gen.phi(v)).collect::<Result<_>>()?;
        let phi_hi: Vec<f64> = hi.iter().map(|&v| self.gen.phi(v)).collect::<Result<_>>()?;
        let mut acc = 0.0;
        for mask in 0..(1usize << m) {
            let mut s = 0.0;
            let mut zero = false;
            for i in 0..m {
                let (v, p) = if mask >> i & 1 == 1 { (lo[i], phi_lo[i]) } else { (hi[i], phi_hi[i]) };
                zero |= v == 0.0;
                s += p;
            }
            if zero {
                continue;
            }
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * self.gen.psi(s);
        }
        Ok(acc)
    }

    fn check_box(&self, lo: &[f64], hi: &[f64]) -> Result<()> {
        self.check_point(lo, self.dim)?;
        self.check_point(hi, self.dim)?;
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return Err(Error::arg("box needs lo ≤ hi in every coordinate"));
        }
        Ok(())
    }

    /// `μ_C` of the box by disintegration: the kernel mass of
    /// `(lo_m, hi_m]` integrated against the density of `C^{1:m-1}`.
    ///
    /// Substituting `u_i = φ(x_i)` turns the marginal law into the density
    /// `(-1)^{m-1} ψ^{(m-1)}(Σ u_i)` on a box of `u`, and both factors depend
    /// on `u` only through `s = Σ u_i`, so the integral collapses to one
    /// dimension with the box-spline weight of the `u` box.
    pub fn box_mass(&self, lo: &[f64], hi: &[f64], tol: Tolerance) -> Result<QuadResult> {
        self.check_box(lo, hi)?;
        let m = self.dim;
        let gen = &self.gen;
        let cap = if gen.is_strict() { gen.phi(EDGE_MASS)? } else { gen.phi0() };
        let mut a = Vec::with_capacity(m - 1);
        let mut b = Vec::with_capacity(m - 1);
        for i in 0..m - 1 {
            let low = gen.phi(hi[i])?;
            let high = if lo[i] == 0.0 { cap } else { gen.phi(lo[i])?.min(cap) };
            if high <= low {
                return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
            }
            a.push(low);
            b.push(high);
        }
        let y_hi = gen.phi_value(hi[m - 1])?;
        let y_lo = gen.phi_value(lo[m - 1])?;
        let weight = BoxSpline::new(&a, &b);
        let integrand = |s: f64| {
            let w = weight.eval(s);
            if w == 0.0 {
                return 0.0;
            }
            let k = self.kernel_from_sum(s, y_hi, true) - self.kernel_from_sum(s, y_lo, true);
            k * self.order_density(m, s) * w
        };
        let mut cuts = weight.corners();
        for t in self.measure().breakpoints() {
            let z = 1.0 / t;
            for off in [0.0, y_hi.z, y_lo.z] {
                if off.is_finite() {
                    cuts.push(z - off);
                }
            }
        }
        if gen.phi0().is_finite() {
            for off in [0.0, y_hi.z, y_lo.z] {
                cuts.push(gen.phi0() - off);
            }
        }
        let (s0, s1) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
        // Geometric cuts keep heavy tails of strict generators from hiding
        // the bulk of the mass inside one huge first segment.
        let mut c = s0.max(1e-3);
        while c < s1 {
            cuts.push(c);
            c *= 2.0;
        }
        quadrature::integrate(integrand, s0, s1, &cuts, tol)
    }

    /// `∫ K(x, [0, y]) dμ_{C^{1:m-1}}(x)`, which equals `y` for a copula.
    pub fn kernel_margin_integral(&self, y: f64, tol: Tolerance) -> Result<QuadResult> {
        // K(x, {0}) vanishes off a μ-null set, so (0, y] and [0, y] agree.
        let lo = vec![0.0; self.dim];
        let mut hi = vec![1.0; self.dim];
        hi[self.dim - 1] = y;
        self.box_mass(&lo, &hi, tol)
    }
}

/// Relative tolerance for recognizing `1/φ(t)` as an atom location.
pub const ATOM_MATCH: f64 = 1e-10;

/// Density of `Σ U_i` for independent uniforms on `[a_i, b_i]`, scaled by
/// the box volume: the `(k-1)`-volume of the slice `{Σ u_i = s}`.
struct BoxSpline {
    corners: Vec<(f64, f64)>,
    k: usize,
    fact: f64,
}

impl BoxSpline {
    fn new(a: &[f64], b: &[f64]) -> Self {
        let k = a.len();
        let mut corners = Vec::with_capacity(1 << k);
        for mask in 0..(1usize << k) {
            let mut c = 0.0;
            for i in 0..k {
                c += if mask >> i & 1 == 1 { b[i] } else { a[i] };
            }
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            corners.push((c, sign));
        }
        let fact = (1..k).map(|i| i as f64).product();
        Self { corners, k, fact }
    }

    fn eval(&self, s: f64) -> f64 {
        if self.k == 1 {
            let (a, b) = (self.corners[0].0, self.corners[1].0);
            return if s >= a && s <= b { 1.0 } else { 0.0 };
        }
        let v: f64 = self
            .corners
            .iter()
            .map(|&(c, sign)| if s > c { sign * (s - c).powi(self.k as i32 - 1) } else { 0.0 })
            .sum();
        (v / self.fact).max(0.0)
    }

    fn corners(&self) -> Vec<f64> {
        self.corners.iter().map(|c| c.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    fn cop(m: WilliamsonMeasure) -> ArchCopula {
        ArchCopula::from_measure(m).unwrap()
    }

    #[test]
    fn lower_frechet_values() {
        let w = cop(catalog::lower_frechet());
        for (x, y) in [(0.3, 0.9), (0.5, 0.5), (0.2, 0.4)] {
            let want: f64 = (x + y - 1.0f64).max(0.0);
            assert!((w.cdf(&[x, y]).unwrap() - want).abs() < 1e-13);
        }
        assert_eq!(w.kernel_cdf(&[0.3], 0.69).unwrap(), 0.0);
        assert_eq!(w.kernel_cdf(&[0.3], 0.71).unwrap(), 1.0);
        assert!((w.level_function(0.0, &[0.3]).unwrap() - 0.7).abs() < 1e-13);
        assert_eq!(w.kendall_cdf(0.3).unwrap(), 1.0);
        assert_eq!(w.level_mass(0.0).unwrap().mass, 1.0);
    }

    #[test]
    fn two_atom_levels() {
        let c = cop(catalog::two_atom());
        let l0 = c.level_mass(0.0).unwrap();
        assert_eq!(l0.mass, 32.0 / 49.0);
        assert!(l0.forms_agree);
        assert_eq!(l0.exact_mass.as_deref(), Some("32/49"));
        let l1 = c.level_mass(225.0 / 392.0).unwrap();
        assert_eq!(l1.mass, 17.0 / 49.0);
        assert!(l1.forms_agree);
        assert_eq!(c.level_mass(0.3).unwrap().mass, 0.0);
        assert_eq!(c.level_mass(1.0).unwrap().mass, 0.0);
    }

    #[test]
    fn two_atom_kernel_ratio() {
        let c = cop(catalog::two_atom());
        let x = [0.9, 0.9];
        let s = c.phi_sum(&x).unwrap();
        assert!(s < 0.5);
        let f0 = c.level_function(0.0, &x).unwrap();
        let k = c.kernel_cdf(&x, f0 + 1e-9).unwrap();
        assert!((k - 1.0 / 137.0).abs() < 1e-9, "{k}");
        assert_eq!(c.kernel_cdf(&x, 1.0).unwrap(), 1.0);
        assert_eq!(c.kernel_cdf(&x, f0 * 0.5).unwrap(), 0.0);
    }

    #[test]
    fn gapped_bands() {
        let c = cop(catalog::gapped_mixture());
        assert!((c.band_mass(0.5, 11.0 / 18.0).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!((c.band_mass(2.0 / 3.0, 17.0 / 24.0).unwrap() - 2.0 / 9.0).abs() < 1e-12);
        let t = 0.4;
        assert_eq!(c.band_mass(t, t).unwrap(), c.level_mass(t).unwrap().mass);
        assert!(c.band_mass(0.6, 0.5).is_err());
    }

    #[test]
    fn kendall_two_atom() {
        let c = cop(catalog::two_atom());
        assert!((c.kendall_cdf(0.3).unwrap() - 32.0 / 49.0).abs() < 1e-15);
        assert!((c.kendall_cdf(0.6).unwrap() - 1.0).abs() < 1e-15);
        assert!((c.measure_cdf_from_kendall(1.0).unwrap() - 32.0 / 49.0).abs() < 1e-12);
        assert_eq!(c.measure_cdf_from_kendall(0.1).unwrap(), 0.0);
    }

    #[test]
    fn densities() {
        let c = cop(catalog::two_atom());
        assert!(matches!(c.density(&[0.5, 0.5, 0.5]), Err(Error::NotAbsolutelyContinuous)));
        let m2 = c.marginal(2).unwrap();
        assert!(m2.density(&[0.5, 0.5]).unwrap() > 0.0);
        let u = cop(catalog::uniform());
        for i in 1..32 {
            for j in 1..32 {
                let v = u.density(&[i as f64 / 32.0, j as f64 / 32.0]).unwrap();
                assert!(v >= 0.0);
            }
        }
        assert!(c.marginal(3).is_err() && c.marginal(1).is_err());
    }

    #[test]
    fn box_mass_matches_corners() {
        let c = cop(catalog::two_atom());
        let lo = [0.3, 0.5, 0.2];
        let hi = [0.9, 0.95, 0.8];
        let q = c.box_mass(&lo, &hi, Tolerance::default()).unwrap();
        let e = c.corner_mass(&lo, &hi).unwrap();
        assert!((q.value - e).abs() < 1e-8, "{} vs {e}", q.value);
        let full = c.box_mass(&[0.0; 3], &[1.0; 3], Tolerance::default()).unwrap();
        assert!((full.value - 1.0).abs() < 1e-8);
        let w = cop(catalog::lower_frechet());
        assert!(w.box_mass(&[0.0, 0.0], &[0.5, 0.5], Tolerance::default()).unwrap().value.abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn uniform_margins(y in 0.0f64..1.0) {
            let c = cop(catalog::two_atom());
            prop_assert!((c.cdf(&[1.0, 1.0, y]).unwrap() - y).abs() < 1e-10);
            prop_assert!((c.cdf(&[y, 1.0, 1.0]).unwrap() - y).abs() < 1e-10);
        }

        #[test]
        fn lipschitz(a in proptest::collection::vec(0.0f64..1.0, 2), b in proptest::collection::vec(0.0f64..1.0, 2)) {
            for m in [catalog::gapped_mixture(), catalog::root_mixture(), catalog::cantor()] {
                let c = cop(m);
                let diff = (c.cdf(&a).unwrap() - c.cdf(&b).unwrap()).abs();
                let l1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
                prop_assert!(diff <= l1 + 1e-10);
            }
        }

        #[test]
        fn kernel_monotone(x in 0.01f64..0.99, y1 in 0.0f64..1.0, y2 in 0.0f64..1.0) {
            let c = cop(catalog::gapped_mixture());
            let (lo, hi) = if y1 < y2 { (y1, y2) } else { (y2, y1) };
            prop_assert!(c.kernel_cdf(&[x], lo).unwrap() <= c.kernel_cdf(&[x], hi).unwrap() + 1e-12);
        }

        #[test]
        fn level_function_solves(t in 0.05f64..0.95, x in 0.9f64..1.0) {
            let c = cop(catalog::two_atom());
            let pt = [x, x];
            let f = c.level_function(t, &pt).unwrap();
            if f < 1.0 {
                prop_assert!((c.cdf(&[x, x, f]).unwrap() - t).abs() < 1e-10);
            }
        }

        #[test]
        fn kendall_forms_agree(t in 0.0f64..1.0) {
            for m in [catalog::two_atom(), catalog::gapped_mixture(), catalog::root_mixture(), catalog::cantor()] {
                let k = cop(m).kendall(t).unwrap();
                prop_assert!(k.agree, "{k:?}");
            }
        }
    }
}
