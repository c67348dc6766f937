//! Lebesgue decomposition of the Markov kernel and of the copula measure.
//!
//! With `s = Σ φ(x_i)` and `z = s + φ(y)` the kernel of the last coordinate is
//! `∫_{(0,1/z]} t^{d-1} dγ / ∫_{(0,1/s]} t^{d-1} dγ`. Splitting `γ` into its
//! absolutely continuous, discrete and singular parts splits the numerator,
//! which gives the triple `(H^abs_x, H^dis_x, H^sing_x)`.

use serde::Serialize;

use crate::copula::ArchCopula;
use crate::measure::{Interval, Kind};
use crate::par::{self, Execution};
use crate::sampler::{self, Method};
use crate::stats;
use crate::{Error, Result};

/// Kernel components at one ordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitValue {
    pub abs: f64,
    pub dis: f64,
    pub sing: f64,
}

impl SplitValue {
    pub fn total(&self) -> f64 {
        self.abs + self.dis + self.sing
    }

    pub fn get(&self, kind: Kind) -> f64 {
        match kind {
            Kind::Abs => self.abs,
            Kind::Discrete => self.dis,
            Kind::Singular => self.sing,
        }
    }
}

/// The triple `(H^abs_x, H^dis_x, H^sing_x)` at a fixed conditioning point.
#[derive(Debug, Clone)]
pub struct KernelSplit<'a> {
    cop: &'a ArchCopula,
    x: Vec<f64>,
    s: f64,
    den: f64,
}

impl<'a> KernelSplit<'a> {
    /// Fails with [`Error::DegenerateConditioning`] when `x` lies in the zero
    /// set of `C^{1:m-1}` or at `(1, …, 1)`, where the kernel is the constant
    /// first case.
    pub fn new(cop: &'a ArchCopula, x: &[f64]) -> Result<Self> {
        if x.len() + 1 != cop.dim() {
            return Err(Error::arg(format!("expected {} conditioning coordinates, got {}", cop.dim() - 1, x.len())));
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::arg(format!("coordinate {v} outside [0,1]")));
        }
        let gen = cop.generator();
        let s = cop.phi_sum(x)?;
        let den = gen.marginal_moment(cop.dim(), s);
        if s == 0.0 || s >= gen.phi0() || den <= 0.0 {
            return Err(Error::DegenerateConditioning);
        }
        Ok(Self { cop, x: x.to_vec(), s, den })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// `Σ φ(x_i)`
    pub fn phi_sum(&self) -> f64 {
        self.s
    }

    fn component(&self, kind: Kind, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::arg(format!("ordinate {y} outside [0,1]")));
        }
        let gen = self.cop.generator();
        let z = self.s + gen.phi(y)?;
        if z > gen.phi0() || z.is_infinite() {
            return Ok(0.0);
        }
        let d = gen.d();
        let m = self.cop.dim();
        let num = gen.measure().integrate_kernel_component(
            kind,
            m - 1,
            d - m,
            z,
            Interval::left_open(0.0, gen.reciprocal(z)),
        );
        Ok(num / self.den)
    }

    pub fn habs(&self, y: f64) -> Result<f64> {
        self.component(Kind::Abs, y)
    }

    pub fn hdis(&self, y: f64) -> Result<f64> {
        self.component(Kind::Discrete, y)
    }

    pub fn hsing(&self, y: f64) -> Result<f64> {
        self.component(Kind::Singular, y)
    }

    pub fn eval(&self, y: f64) -> Result<SplitValue> {
        Ok(SplitValue { abs: self.habs(y)?, dis: self.hdis(y)?, sing: self.hsing(y)? })
    }

    /// Component masses of `K(x, ·)`, summing to one.
    pub fn totals(&self) -> Result<SplitValue> {
        self.eval(1.0)
    }

    /// Point masses `(y_j, mass_j)` of `K(x, ·)`, one per atom `q_j ≤ 1/s`,
    /// located at `ψ(1/q_j - s)` and sorted by `y`.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let gen = self.cop.generator();
        let m = self.cop.dim();
        if m < gen.d() {
            return Vec::new();
        }
        let bound = gen.reciprocal(self.s);
        let mut out: Vec<(f64, f64)> = gen
            .measure()
            .atoms()
            .iter()
            .filter(|a| a.location <= bound)
            .map(|a| {
                let y = gen.psi(1.0 / a.location - self.s);
                (y, a.mass * a.location.powi(m as i32 - 1) / self.den)
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

/// `(H^abs_x(y), H^dis_x(y), H^sing_x(y))`
pub fn kernel_split(cop: &ArchCopula, x: &[f64], y: f64) -> Result<SplitValue> {
    KernelSplit::new(cop, x)?.eval(y)
}

pub fn kernel_atoms(cop: &ArchCopula, x: &[f64]) -> Result<Vec<(f64, f64)>> {
    Ok(KernelSplit::new(cop, x)?.atoms())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MassMethod {
    Structural,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentMasses {
    pub abs: f64,
    pub dis: f64,
    pub sing: f64,
    /// Standard errors of `(abs, dis, sing)`.
    pub stderr: [f64; 3],
    pub method: MassMethod,
    /// Conditioning draws used; excluded draws fell in the zero set.
    pub n: usize,
    pub excluded: usize,
    /// Resolution of the singular oracle, inherited by `sing`.
    pub resolution: f64,
}

impl ComponentMasses {
    pub fn get(&self, kind: Kind) -> (f64, f64) {
        match kind {
            Kind::Abs => (self.abs, self.stderr[0]),
            Kind::Discrete => (self.dis, self.stderr[1]),
            Kind::Singular => (self.sing, self.stderr[2]),
        }
    }

    /// Estimate exceeds `k` standard errors.
    pub fn significant(&self, kind: Kind, k: f64) -> bool {
        let (v, se) = self.get(kind);
        v > k * se
    }
}

/// Masses of `μ^abs_C`, `μ^dis_C`, `μ^sing_C` on the unit cube.
///
/// A purely typed `γ` answers structurally. Otherwise conditioning points
/// are drawn from `C^{1:d-1}` and the kernel totals averaged.
pub fn component_masses(cop: &ArchCopula, n: usize, seed: u64, exec: Execution) -> Result<ComponentMasses> {
    if n == 0 {
        return Err(Error::arg("Monte-Carlo size must be at least 1"));
    }
    let m = cop.measure();
    let resolution = m.resolution();
    let comps = m.lebesgue_components();
    if let Some(kind) = comps.pure_kind() {
        let one = |k: Kind| if k == kind { 1.0 } else { 0.0 };
        return Ok(ComponentMasses {
            abs: one(Kind::Abs),
            dis: one(Kind::Discrete),
            sing: one(Kind::Singular),
            stderr: [0.0; 3],
            method: MassMethod::Structural,
            n: 0,
            excluded: 0,
            resolution,
        });
    }
    let d = cop.dim();
    let gen = cop.generator();
    // Conditioning sums `s = Σ_{i<d} φ(x_i)` for x ~ C^{1:d-1}.
    let sums: Vec<f64> = if d == 2 {
        let chunks = par::chunk_ranges(n);
        par::map_indexed(exec, chunks.len(), |c| {
            use rand::Rng;
            let mut rng = par::substream(seed, c);
            chunks[c].clone().map(|_| gen.phi(1.0 - rng.random::<f64>()).unwrap_or(f64::INFINITY)).collect::<Vec<_>>()
        })
        .concat()
    } else {
        let marginal = cop.marginal(d - 1)?;
        let batch = sampler::sample(&marginal, Method::Radial, n, seed, exec)?;
        batch.levels.iter().map(|&l| gen.phi(l).unwrap_or(f64::INFINITY)).collect()
    };
    let values: Vec<Option<SplitValue>> = {
        let chunks = par::chunk_ranges(n);
        par::map_indexed(exec, chunks.len(), |c| {
            chunks[c].clone().map(|i| totals_from_sum(cop, sums[i])).collect::<Vec<_>>()
        })
        .concat()
    };
    let kept: Vec<SplitValue> = values.iter().flatten().copied().collect();
    if kept.is_empty() {
        return Err(Error::DegenerateConditioning);
    }
    let est = |f: fn(&SplitValue) -> f64| stats::mean_estimate(&kept.iter().map(f).collect::<Vec<_>>());
    let (a, di, si) = (est(|v| v.abs), est(|v| v.dis), est(|v| v.sing));
    Ok(ComponentMasses {
        abs: a.mean,
        dis: di.mean,
        sing: si.mean,
        stderr: [a.std_err, di.std_err, si.std_err],
        method: MassMethod::Mc,
        n: kept.len(),
        excluded: n - kept.len(),
        resolution,
    })
}

fn totals_from_sum(cop: &ArchCopula, s: f64) -> Option<SplitValue> {
    let gen = cop.generator();
    if !(s > 0.0) || s >= gen.phi0() {
        return None;
    }
    let den = gen.marginal_moment(cop.dim(), s);
    if den <= 0.0 {
        return None;
    }
    let d = gen.d();
    let m = cop.dim();
    let i = Interval::left_open(0.0, gen.reciprocal(s));
    let part = |k| gen.measure().integrate_kernel_component(k, m - 1, d - m, s, i) / den;
    Some(SplitValue { abs: part(Kind::Abs), dis: part(Kind::Discrete), sing: part(Kind::Singular) })
}

/// A band `L_{[lo, hi]}` of levels together with the `γ`-interval `[a, b]`
/// it corresponds to through `t ↦ 1/φ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelBand {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub gamma: (f64, f64),
}

impl LevelBand {
    /// The band is the graph `Γ(f^0)` bounding the zero set.
    pub fn is_zero_graph(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }
}

impl std::fmt::Display for LevelBand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero_graph() {
            return f.write_str("Γ(f^0)");
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "L_{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportReport {
    /// `γ` is strict and has no gaps below its right end.
    pub full_support: bool,
    pub strict: bool,
    /// Bands covering the support of `μ_C`, in increasing level order.
    pub support: Vec<LevelBand>,
    /// Zero-mass bands from gaps of `γ`, including the band above the
    /// right end of `γ` when that end is finite.
    pub zero_bands: Vec<LevelBand>,
}

/// Maps the support of `γ` to level bands of `μ_C` via `[a, b] ↦ [ψ(1/a), ψ(1/b)]`.
pub fn support_report(cop: &ArchCopula) -> SupportReport {
    let gen = cop.generator();
    let gaps = cop.measure().support_gaps();
    let level = |t: f64| if t == 0.0 { 0.0 } else { gen.psi(1.0 / t) };
    let band = |a: f64, b: f64, closed: bool| LevelBand {
        lo: level(a),
        hi: level(b),
        lo_closed: closed,
        hi_closed: closed,
        gamma: (a, b),
    };
    let mut support = Vec::new();
    let mut zero_bands = Vec::new();
    let mut start = gaps.left_end;
    for &(a, b) in &gaps.interior {
        support.push(band(start, a, true));
        zero_bands.push(band(a, b, false));
        start = b;
    }
    support.push(band(start, gaps.right_end, true));
    if gaps.right_end.is_finite() {
        zero_bands.push(LevelBand {
            lo: level(gaps.right_end),
            hi: 1.0,
            lo_closed: false,
            hi_closed: true,
            gamma: (gaps.right_end, f64::INFINITY),
        });
    }
    let strict = gen.is_strict();
    SupportReport { full_support: strict && gaps.interior.is_empty(), strict, support, zero_bands }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::measure::approx;
    use proptest::prelude::*;

    fn cop(m: crate::WilliamsonMeasure) -> ArchCopula {
        ArchCopula::from_measure(m).unwrap()
    }

    #[test]
    fn atomic_split_is_pure_jump() {
        let c = cop(catalog::two_atom());
        let split = KernelSplit::new(&c, &[0.9, 0.9]).unwrap();
        for y in [0.1, 0.5, 0.9, 1.0] {
            let v = split.eval(y).unwrap();
            assert_eq!(v.abs, 0.0);
            assert_eq!(v.sing, 0.0);
            assert!((v.dis - c.kernel_cdf(&[0.9, 0.9], y).unwrap()).abs() < 1e-12);
        }
        let atoms = split.atoms();
        assert_eq!(atoms.len(), 2);
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Masses proportional to α q².
        let ratio = atoms[1].1 / atoms[0].1;
        let expected = (17.0 / 49.0 * 4.0) / (32.0 / 49.0 / 64.0);
        assert!((ratio - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn lower_frechet_kernel_atom() {
        let c = cop(catalog::lower_frechet());
        for x in [0.2, 0.5, 0.75] {
            let atoms = kernel_atoms(&c, &[x]).unwrap();
            assert_eq!(atoms.len(), 1);
            assert!((atoms[0].0 - (1.0 - x)).abs() < 1e-12);
            assert!((atoms[0].1 - 1.0).abs() < 1e-12);
        }
        assert!(matches!(kernel_atoms(&c, &[1.0]), Err(Error::DegenerateConditioning)));
        assert!(matches!(kernel_atoms(&c, &[0.0]), Err(Error::DegenerateConditioning)));
    }

    #[test]
    fn atom_masses_are_kernel_jumps() {
        let c = cop(catalog::root_mixture());
        let x = [0.6];
        let split = KernelSplit::new(&c, &x).unwrap();
        let atoms = split.atoms();
        assert!(!atoms.is_empty());
        for (y, mass) in atoms {
            let jump = c.kernel_cdf(&x, y).unwrap() - c.kernel_cdf_left(&x, y).unwrap();
            assert!((jump - mass).abs() < 1e-10, "{jump} vs {mass}");
        }
        let hdis = split.hdis(1.0).unwrap();
        let summed: f64 = split.atoms().iter().map(|a| a.1).sum();
        assert!((hdis - summed).abs() < 1e-12);
    }

    #[test]
    fn structural_masses() {
        for (m, kind) in [
            (catalog::two_atom(), Kind::Discrete),
            (catalog::uniform(), Kind::Abs),
            (catalog::cantor(), Kind::Singular),
        ] {
            let r = component_masses(&cop(m), 10, 1, Execution::Sequential).unwrap();
            assert_eq!(r.method, MassMethod::Structural);
            assert_eq!(r.get(kind).0, 1.0);
        }
    }

    #[test]
    fn mixed_masses_by_monte_carlo() {
        let c = cop(catalog::root_mixture());
        let r = component_masses(&c, 4000, 2, Execution::default()).unwrap();
        assert_eq!(r.method, MassMethod::Mc);
        assert!(r.significant(Kind::Abs, 3.0) && r.significant(Kind::Discrete, 3.0));
        assert_eq!(r.sing, 0.0);
        assert!((r.abs + r.dis - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gapped_support() {
        let r = support_report(&cop(catalog::gapped_mixture()));
        assert!(!r.full_support && !r.strict);
        assert_eq!(r.support.len(), 3);
        assert!(r.support[0].is_zero_graph());
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(r.support[1].lo, 0.5) && close(r.support[1].hi, 11.0 / 18.0));
        assert!(close(r.support[2].lo, 2.0 / 3.0) && close(r.support[2].hi, 17.0 / 24.0));
        assert_eq!(r.support[0].to_string(), "Γ(f^0)");
    }

    #[test]
    fn approximant_full_support() {
        let beta = approx::approximant(Kind::Abs, 2).unwrap().normalize().unwrap();
        assert!(support_report(&cop(beta)).full_support);
        assert!(!support_report(&cop(catalog::two_atom())).full_support);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn split_adds_up(x1 in 0.05..0.95f64, x2 in 0.05..0.95f64, y in 0.0..1.0f64) {
            let c = cop(catalog::root_mixture());
            let c3 = cop(catalog::root_mixture().with_dimension(3).unwrap().normalize().unwrap());
            for (c, x) in [(c, vec![x1]), (c3, vec![x1, x2])] {
                match kernel_split(&c, &x, y) {
                    Ok(v) => prop_assert!((v.total() - c.kernel_cdf(&x, y).unwrap()).abs() < 1e-10),
                    Err(Error::DegenerateConditioning) => prop_assert!(c.cdf(&[x.clone(), vec![1.0]].concat()).unwrap() == 0.0),
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                }
            }
        }

        #[test]
        fn split_components_monotone(x in 0.05..0.95f64, y1 in 0.0..1.0f64, y2 in 0.0..1.0f64) {
            let m = crate::WilliamsonMeasure::mixture(&[(0.5, &catalog::uniform()), (0.5, &catalog::lower_frechet())]).unwrap().normalize().unwrap();
            let c = cop(m);
            let s = KernelSplit::new(&c, &[x]).unwrap();
            let (a, b) = if y1 < y2 { (y1, y2) } else { (y2, y1) };
            let (va, vb) = (s.eval(a).unwrap(), s.eval(b).unwrap());
            prop_assert!(va.abs <= vb.abs + 1e-15 && va.dis <= vb.dis + 1e-15);
        }
    }
}
