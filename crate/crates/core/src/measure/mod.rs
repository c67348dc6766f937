//! Finite measures on `[0, ∞)` built from atoms, piecewise densities and
//! self-similar singular components.

pub mod approx;
pub mod oracle;
pub mod poly;
pub mod spec;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};
use oracle::CdfOracle;

/// Absolute tolerance on the total mass of the exactly represented parts.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Highest polynomial degree allowed for a density piece.
pub const MAX_PIECE_DEGREE: usize = 6;
/// Default smallest gap width reported inside singular carriers.
pub const DEFAULT_GAP_WIDTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: true }
    }

    /// `[lo, hi)`
    pub fn right_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: false }
    }

    /// `[0, ∞)`
    pub fn everything() -> Self {
        Self::right_open(0.0, f64::INFINITY)
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }
}

/// Value of an integral together with a bound on its distance to the
/// corresponding integral against the ideal singular law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
    pub exact_location: Option<Ratio<i64>>,
    pub exact_mass: Option<Ratio<i64>>,
}

impl Atom {
    pub fn new(location: f64, mass: f64) -> Self {
        Self { location, mass, exact_location: None, exact_mass: None }
    }

    pub fn exact(location: Ratio<i64>, mass: Ratio<i64>) -> Self {
        Self {
            location: ratio_f64(location),
            mass: ratio_f64(mass),
            exact_location: Some(location),
            exact_mass: Some(mass),
        }
    }
}

pub fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `coef · (t - anchor)^exponent` with `exponent > -1`, so the term is
/// integrable at its anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coef: f64,
    pub anchor: f64,
    pub exponent: f64,
}

/// Lebesgue density on `[from, to)`: a polynomial in `t` plus optional
/// power terms.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPiece {
    from: f64,
    to: f64,
    coeffs: Vec<f64>,
    powers: Vec<PowerTerm>,
    local: Vec<f64>,
}

impl DensityPiece {
    pub fn polynomial(from: f64, to: f64, coeffs: Vec<f64>) -> Self {
        Self::with_powers(from, to, coeffs, Vec::new())
    }

    pub fn with_powers(from: f64, to: f64, coeffs: Vec<f64>, powers: Vec<PowerTerm>) -> Self {
        let local = poly::compose_affine(&coeffs, from, 1.0);
        Self { from, to, coeffs, powers, local }
    }

    pub fn from(&self) -> f64 {
        self.from
    }

    pub fn to(&self) -> f64 {
        self.to
    }

    /// Coefficients of the polynomial part in powers of `t`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn powers(&self) -> &[PowerTerm] {
        &self.powers
    }

    pub fn density(&self, t: f64) -> f64 {
        if t < self.from || t >= self.to {
            return 0.0;
        }
        let mut v = poly::eval(&self.local, t - self.from);
        for p in &self.powers {
            v += p.coef * (t - p.anchor).powf(p.exponent);
        }
        v
    }

    /// `∫_{[lo,hi] ∩ [from,to)} p(t) f(t) dt` with `p` in powers of `t`.
    pub fn integrate_poly(&self, p: &[f64], lo: f64, hi: f64) -> f64 {
        let (lo, hi) = (lo.max(self.from), hi.min(self.to));
        if hi <= lo {
            return 0.0;
        }
        let mut acc = 0.0;
        if !self.local.is_empty() {
            let q = poly::mul(&poly::compose_affine(p, self.from, 1.0), &self.local);
            acc += poly::integrate(&q, lo - self.from, hi - self.from);
        }
        for term in &self.powers {
            let r = poly::compose_affine(p, term.anchor, 1.0);
            let (a, b) = (lo - term.anchor, hi - term.anchor);
            let mut s = 0.0;
            for (j, rj) in r.iter().enumerate() {
                let e = j as f64 + term.exponent + 1.0;
                s += rj * (b.max(0.0).powf(e) - a.max(0.0).powf(e)) / e;
            }
            acc += term.coef * s;
        }
        acc
    }

    pub fn mass(&self) -> f64 {
        self.integrate_poly(&[1.0], self.from, self.to)
    }

    fn scaled_mass(&self, w: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * w).collect();
        let powers = self.powers.iter().map(|p| PowerTerm { coef: p.coef * w, ..*p }).collect();
        Self::with_powers(self.from, self.to, coeffs, powers)
    }

    fn pushforward(&self, c: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a / c.powi(j as i32 + 1))
            .collect();
        let powers = self
            .powers
            .iter()
            .map(|p| PowerTerm {
                coef: p.coef * c.powf(-(p.exponent + 1.0)),
                anchor: p.anchor * c,
                exponent: p.exponent,
            })
            .collect();
        Self::with_powers(self.from * c, self.to * c, coeffs, powers)
    }

    fn restricted(&self, from: f64, to: f64) -> Self {
        Self::with_powers(from, to, self.coeffs.clone(), self.powers.clone())
    }

    fn validate(&self) -> Result<()> {
        if !(self.from >= 0.0 && self.from < self.to && self.to.is_finite()) {
            return Err(Error::measure(format!(
                "density piece [{}, {}) must be a bounded nonempty interval in [0,∞)",
                self.from, self.to
            )));
        }
        if self.coeffs.len() > MAX_PIECE_DEGREE + 1 {
            return Err(Error::measure(format!(
                "density piece [{}, {}) has degree {} > {MAX_PIECE_DEGREE}",
                self.from,
                self.to,
                self.coeffs.len() - 1
            )));
        }
        for p in &self.powers {
            if !(p.exponent > -1.0) || p.anchor > self.from || !p.coef.is_finite() {
                return Err(Error::measure(format!(
                    "power term on [{}, {}) needs exponent > -1 and anchor at or left of the piece",
                    self.from, self.to
                )));
            }
        }
        // Chebyshev nodes plus the endpoints where the density is finite.
        let n = 33;
        let width = self.to - self.from;
        let mut probes: Vec<f64> = (0..n)
            .map(|j| {
                let c = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
                self.from + 0.5 * width * (1.0 - c)
            })
            .collect();
        probes.push(self.from);
        probes.push(self.to - width * 1e-12);
        let scale = self.coeffs.iter().map(|c| c.abs()).fold(1e-300, f64::max);
        for t in probes {
            let v = self.density(t);
            if v.is_finite() && v < -1e-12 * scale {
                return Err(Error::measure(format!(
                    "density is negative at t = {t} (value {v})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SingularComponent {
    pub weight: f64,
    pub offset: f64,
    pub scale: f64,
    pub oracle: Arc<dyn CdfOracle>,
}

impl SingularComponent {
    pub fn new(weight: f64, offset: f64, scale: f64, oracle: Arc<dyn CdfOracle>) -> Self {
        Self { weight, offset, scale, oracle }
    }

    pub fn right(&self) -> f64 {
        self.offset + self.scale
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z < self.offset {
            0.0
        } else if z >= self.right() {
            self.weight
        } else {
            self.weight * self.oracle.cdf((z - self.offset) / self.scale)
        }
    }

    pub fn integrate_poly(&self, p: &[f64], lo: f64, hi: f64) -> f64 {
        if hi < self.offset || lo > self.right() {
            return 0.0;
        }
        let q = poly::compose_affine(p, self.offset, self.scale);
        let a = (lo - self.offset) / self.scale;
        let b = (hi - self.offset) / self.scale;
        self.weight * self.oracle.integrate_poly(&q, a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Discrete,
    Abs,
    Singular,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Kind::Discrete),
            "abs" => Ok(Kind::Abs),
            "singular" => Ok(Kind::Singular),
            other => Err(Error::arg(format!("unknown measure kind `{other}`"))),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Discrete => "discrete",
            Kind::Abs => "abs",
            Kind::Singular => "singular",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    pub abs: f64,
    pub dis: f64,
    pub sing: f64,
}

impl Components {
    pub fn pure_kind(&self) -> Option<Kind> {
        match (self.abs > 0.0, self.dis > 0.0, self.sing > 0.0) {
            (true, false, false) => Some(Kind::Abs),
            (false, true, false) => Some(Kind::Discrete),
            (false, false, true) => Some(Kind::Singular),
            _ => None,
        }
    }

    pub fn get(&self, kind: Kind) -> f64 {
        match kind {
            Kind::Abs => self.abs,
            Kind::Discrete => self.dis,
            Kind::Singular => self.sing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportGaps {
    /// `(0, left end)` when the support stays away from the origin.
    pub leading: Option<(f64, f64)>,
    /// Maximal open zero-mass intervals between the left and right ends.
    pub interior: Vec<(f64, f64)>,
    pub left_end: f64,
    pub right_end: f64,
    /// Smallest reported width inside singular carriers.
    pub min_width: f64,
}

impl SupportGaps {
    pub fn all(&self) -> Vec<(f64, f64)> {
        self.leading.iter().copied().chain(self.interior.iter().copied()).collect()
    }

    pub fn zero_in_support(&self) -> bool {
        self.leading.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct WilliamsonMeasure {
    dimension: usize,
    atoms: Vec<Atom>,
    pieces: Vec<DensityPiece>,
    singular: Vec<SingularComponent>,
    atom_prefix: Vec<f64>,
    piece_prefix: Vec<f64>,
    breaks: Vec<f64>,
    breaks_left: Vec<f64>,
    breaks_right: Vec<f64>,
}

impl WilliamsonMeasure {
    pub fn new(
        dimension: usize,
        mut atoms: Vec<Atom>,
        mut pieces: Vec<DensityPiece>,
        singular: Vec<SingularComponent>,
    ) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::measure(format!("dimension must be at least 2, got {dimension}")));
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        for w in atoms.windows(2) {
            if w[0].location == w[1].location {
                return Err(Error::measure(format!("duplicate atom at {}", w[0].location)));
            }
        }
        for a in &atoms {
            if !(a.location > 0.0 && a.location.is_finite()) {
                return Err(Error::measure(format!("atom location {} must be positive", a.location)));
            }
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::measure(format!("atom mass {} must be positive", a.mass)));
            }
        }
        pieces.sort_by(|a, b| a.from.total_cmp(&b.from));
        for p in &pieces {
            p.validate()?;
        }
        for w in pieces.windows(2) {
            if w[1].from < w[0].to {
                return Err(Error::measure(format!(
                    "density pieces [{}, {}) and [{}, {}) overlap",
                    w[0].from, w[0].to, w[1].from, w[1].to
                )));
            }
        }
        let mut resolution = 0.0;
        for s in &singular {
            if !(s.weight > 0.0 && s.offset >= 0.0 && s.scale > 0.0 && s.right().is_finite()) {
                return Err(Error::measure(format!(
                    "singular component needs positive weight and a carrier in [0,∞), got weight {} carrier [{}, {}]",
                    s.weight,
                    s.offset,
                    s.right()
                )));
            }
            resolution += s.weight * s.oracle.resolution();
        }

        let mut atom_prefix = vec![0.0];
        for a in &atoms {
            atom_prefix.push(atom_prefix.last().unwrap() + a.mass);
        }
        let mut piece_prefix = vec![0.0];
        for p in &pieces {
            let m = p.mass();
            if !(m > 0.0) {
                return Err(Error::measure(format!(
                    "density piece [{}, {}) carries no mass",
                    p.from, p.to
                )));
            }
            piece_prefix.push(piece_prefix.last().unwrap() + m);
        }
        let mut m = Self {
            dimension,
            atoms,
            pieces,
            singular,
            atom_prefix,
            piece_prefix,
            breaks: Vec::new(),
            breaks_left: Vec::new(),
            breaks_right: Vec::new(),
        };
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOLERANCE + resolution {
            return Err(Error::measure(format!("total mass is {total}, expected 1")));
        }
        m.breaks = m.breakpoints();
        m.breaks_left = m.breaks.iter().map(|&b| m.cdf_left(b)).collect();
        m.breaks_right = m.breaks.iter().map(|&b| m.cdf(b)).collect();
        Ok(m)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn with_dimension(&self, dimension: usize) -> Result<Self> {
        Self::new(dimension, self.atoms.clone(), self.pieces.clone(), self.singular.clone())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn singular(&self) -> &[SingularComponent] {
        &self.singular
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_prefix.last().unwrap()
            + self.piece_prefix.last().unwrap()
            + self.singular.iter().map(|s| s.weight).sum::<f64>()
    }

    /// Sum over singular components of weight times oracle resolution.
    pub fn resolution(&self) -> f64 {
        self.singular.iter().map(|s| s.weight * s.oracle.resolution()).sum()
    }

    /// Sorted, deduplicated atom locations, piece endpoints and carrier
    /// endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.atoms.iter().map(|a| a.location).collect();
        for p in &self.pieces {
            b.push(p.from);
            b.push(p.to);
        }
        for s in &self.singular {
            b.push(s.offset);
            b.push(s.right());
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `γ([0, z])`
    pub fn cdf(&self, z: f64) -> f64 {
        if z.is_nan() || z < 0.0 {
            return 0.0;
        }
        let k = self.atoms.partition_point(|a| a.location <= z);
        self.atom_prefix[k] + self.continuous_cdf(z)
    }

    /// `γ([0, z))`
    pub fn cdf_left(&self, z: f64) -> f64 {
        if z.is_nan() || z <= 0.0 {
            return 0.0;
        }
        let k = self.atoms.partition_point(|a| a.location < z);
        self.atom_prefix[k] + self.continuous_cdf(z)
    }

    fn continuous_cdf(&self, z: f64) -> f64 {
        let k = self.pieces.partition_point(|p| p.to <= z);
        let mut v = self.piece_prefix[k];
        if let Some(p) = self.pieces.get(k) {
            if p.from < z {
                v += p.integrate_poly(&[1.0], p.from, z);
            }
        }
        v + self.singular.iter().map(|s| s.cdf(z)).sum::<f64>()
    }

    pub fn mass(&self, i: Interval) -> f64 {
        let hi = if i.hi_closed { self.cdf(i.hi) } else { self.cdf_left(i.hi) };
        let lo = if i.lo_closed { self.cdf_left(i.lo) } else { self.cdf(i.lo) };
        (hi - lo).max(0.0)
    }

    pub fn atom_mass_at(&self, q: f64) -> f64 {
        self.atom_at(q).map_or(0.0, |a| a.mass)
    }

    pub fn atom_at(&self, q: f64) -> Option<&Atom> {
        let k = self.atoms.partition_point(|a| a.location < q);
        self.atoms.get(k).filter(|a| a.location == q)
    }

    fn atom_range(&self, i: Interval) -> std::ops::Range<usize> {
        let start = if i.lo_closed {
            self.atoms.partition_point(|a| a.location < i.lo)
        } else {
            self.atoms.partition_point(|a| a.location <= i.lo)
        };
        let end = if i.hi_closed {
            self.atoms.partition_point(|a| a.location <= i.hi)
        } else {
            self.atoms.partition_point(|a| a.location < i.hi)
        };
        start..end.max(start)
    }

    /// `∫_I p dγ` where `exact` evaluates `p` at atoms without expanding it.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, p: &[f64], exact: F, i: Interval) -> f64 {
        self.integrate_parts(p, exact, i, None)
    }

    /// Same as [`Self::integrate_with`], restricted to one Lebesgue component
    /// when `only` is set.
    fn integrate_parts<F: Fn(f64) -> f64>(&self, p: &[f64], exact: F, i: Interval, only: Option<Kind>) -> f64 {
        if !(i.hi >= i.lo) {
            return 0.0;
        }
        let mut acc = 0.0;
        if only.is_none_or(|k| k == Kind::Discrete) {
            for a in &self.atoms[self.atom_range(i)] {
                acc += a.mass * exact(a.location);
            }
        }
        if only.is_none_or(|k| k == Kind::Abs) {
            let first = self.pieces.partition_point(|p| p.to <= i.lo);
            for piece in &self.pieces[first..] {
                if piece.from >= i.hi {
                    break;
                }
                acc += piece.integrate_poly(p, i.lo, i.hi);
            }
        }
        if only.is_none_or(|k| k == Kind::Singular) {
            for s in &self.singular {
                acc += s.integrate_poly(p, i.lo, i.hi);
            }
        }
        acc
    }

    pub fn integrate_poly(&self, p: &[f64], i: Interval) -> f64 {
        self.integrate_with(p, |t| poly::eval(p, t), i)
    }

    /// `∫_I t^k (1 - z t)^m dγ(t)`
    pub fn integrate_kernel(&self, k: usize, m: usize, z: f64, i: Interval) -> f64 {
        let p = poly::williamson_kernel(k, m, z);
        self.integrate_with(&p, |t| t.powi(k as i32) * (1.0 - z * t).powi(m as i32), i)
    }

    /// `∫_I t^k (1 - z t)^m dγ^{kind}(t)`
    pub fn integrate_kernel_component(&self, kind: Kind, k: usize, m: usize, z: f64, i: Interval) -> f64 {
        let p = poly::williamson_kernel(k, m, z);
        self.integrate_parts(&p, |t| t.powi(k as i32) * (1.0 - z * t).powi(m as i32), i, Some(kind))
    }

    /// `∫_I t^k dγ(t)` for `k ≤ 2(d - 1)`.
    pub fn stieltjes_monomial(&self, k: usize, i: Interval) -> Result<Estimate> {
        if k > 2 * (self.dimension - 1) {
            return Err(Error::arg(format!(
                "monomial degree {k} exceeds 2(d-1) = {}",
                2 * (self.dimension - 1)
            )));
        }
        let value = self.integrate_kernel(k, 0, 0.0, i);
        let error_bound = self
            .singular
            .iter()
            .map(|s| s.weight * s.oracle.resolution() * s.right().powi(k as i32))
            .sum();
        Ok(Estimate { value, error_bound })
    }

    pub fn lebesgue_components(&self) -> Components {
        let total = self.total_mass();
        Components {
            abs: self.piece_prefix.last().unwrap() / total,
            dis: self.atom_prefix.last().unwrap() / total,
            sing: self.singular.iter().map(|s| s.weight).sum::<f64>() / total,
        }
    }

    /// `ψ(z) = ∫ (1 - t z)_+^{d-1} dγ(t)` for this measure's dimension.
    pub fn williamson_transform(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return self.total_mass();
        }
        if z.is_infinite() {
            return 0.0;
        }
        self.integrate_kernel(0, self.dimension - 1, z, Interval::left_open(0.0, 1.0 / z))
    }

    /// Pushforward under `t ↦ c t`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::arg(format!("scale factor {c} must be positive")));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                if c == 1.0 {
                    a.clone()
                } else {
                    Atom::new(a.location * c, a.mass)
                }
            })
            .collect();
        let pieces = self.pieces.iter().map(|p| p.pushforward(c)).collect();
        let singular = self
            .singular
            .iter()
            .map(|s| SingularComponent { offset: s.offset * c, scale: s.scale * c, ..s.clone() })
            .collect();
        Self::new(self.dimension, atoms, pieces, singular)
    }

    /// Rescales so that `ψ(1) = 1/2`.
    pub fn normalize(&self) -> Result<Self> {
        if (self.williamson_transform(1.0) - 0.5).abs() <= 1e-15 {
            return Ok(self.clone());
        }
        let (mut lo, mut hi) = (-60.0f64, 60.0f64);
        if self.williamson_transform(hi.exp2()) > 0.5 {
            return Err(Error::NotNormalizable("ψ stays above 1/2 up to z = 2^60; too much mass near 0".to_string()));
        }
        if self.williamson_transform(lo.exp2()) < 0.5 {
            return Err(Error::NotNormalizable(
                "ψ drops below 1/2 before z = 2^-60".to_string(),
            ));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.williamson_transform(mid.exp2()) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.scaled((0.5 * (lo + hi)).exp2())
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.williamson_transform(1.0) - 0.5).abs() <= tol
    }

    pub fn left_end(&self) -> f64 {
        let a = self.atoms.first().map_or(f64::INFINITY, |a| a.location);
        let p = self.pieces.first().map_or(f64::INFINITY, |p| p.from);
        let s = self.singular.iter().map(|s| s.offset).fold(f64::INFINITY, f64::min);
        a.min(p).min(s)
    }

    pub fn right_end(&self) -> f64 {
        let a = self.atoms.last().map_or(0.0, |a| a.location);
        let p = self.pieces.last().map_or(0.0, |p| p.to);
        let s = self.singular.iter().map(|s| s.right()).fold(0.0, f64::max);
        a.max(p).max(s)
    }

    /// Every neighbourhood of 0 carries mass.
    pub fn is_strict(&self) -> bool {
        self.left_end() == 0.0
    }

    pub fn support_gaps(&self) -> SupportGaps {
        self.support_gaps_with(DEFAULT_GAP_WIDTH)
    }

    pub fn support_gaps_with(&self, min_width: f64) -> SupportGaps {
        let mut cover: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.location, a.location)).collect();
        cover.extend(self.pieces.iter().map(|p| (p.from, p.to)));
        for s in &self.singular {
            let mut start = 0.0;
            for (a, b) in s.oracle.support_gaps(min_width / s.scale) {
                cover.push((s.offset + start * s.scale, s.offset + a * s.scale));
                start = b;
            }
            cover.push((s.offset + start * s.scale, s.right()));
        }
        cover.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut interior = Vec::new();
        let mut reach = f64::NEG_INFINITY;
        for (a, b) in cover {
            if reach > f64::NEG_INFINITY && a > reach {
                interior.push((reach, a));
            }
            reach = reach.max(b);
        }
        let left_end = self.left_end();
        SupportGaps {
            leading: (left_end > 0.0).then_some((0.0, left_end)),
            interior,
            left_end,
            right_end: self.right_end(),
            min_width,
        }
    }

    /// `inf { t : γ([0,t]) ≥ u }`, exact at atoms.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.breaks.len();
        if u <= 0.0 || n == 0 {
            return self.left_end();
        }
        let i = self.breaks_right.partition_point(|&f| f < u);
        if i >= n {
            return self.breaks[n - 1];
        }
        if self.breaks_left[i] < u {
            return self.breaks[i];
        }
        let mut lo = if i == 0 { 0.0 } else { self.breaks[i - 1] };
        let mut hi = self.breaks[i];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Convex combination of measures of the same dimension, not normalized.
    pub fn mixture(parts: &[(f64, &WilliamsonMeasure)]) -> Result<Self> {
        let dimension = parts
            .first()
            .map(|p| p.1.dimension)
            .ok_or_else(|| Error::arg("empty mixture"))?;
        let mut atoms: Vec<Atom> = Vec::new();
        let mut pieces = Vec::new();
        let mut singular = Vec::new();
        for &(w, m) in parts {
            if m.dimension != dimension {
                return Err(Error::arg("mixture components differ in dimension"));
            }
            if w == 0.0 {
                continue;
            }
            atoms.extend(m.atoms.iter().map(|a| Atom::new(a.location, a.mass * w)));
            pieces.extend(m.pieces.iter().map(|p| p.scaled_mass(w)));
            singular.extend(
                m.singular.iter().map(|s| SingularComponent { weight: s.weight * w, ..s.clone() }),
            );
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.location == a.location => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        Self::new(dimension, merged, merge_pieces(pieces), singular)
    }
}

/// Rewrites possibly overlapping pieces as pieces with disjoint supports
/// whose densities add up to the same function.
pub fn merge_pieces(pieces: Vec<DensityPiece>) -> Vec<DensityPiece> {
    let mut cuts: Vec<f64> = pieces.iter().flat_map(|p| [p.from, p.to]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let covering: Vec<&DensityPiece> =
            pieces.iter().filter(|p| p.from <= a && p.to >= b).collect();
        if covering.is_empty() {
            continue;
        }
        let degree = covering.iter().map(|p| p.coeffs.len()).max().unwrap_or(0);
        let mut coeffs = vec![0.0; degree];
        let mut powers = Vec::new();
        for p in covering {
            for (j, c) in p.coeffs.iter().enumerate() {
                coeffs[j] += c;
            }
            powers.extend(p.powers.iter().copied());
        }
        out.push(DensityPiece::with_powers(a, b, coeffs, powers).restricted(a, b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    fn delta(q: f64) -> WilliamsonMeasure {
        WilliamsonMeasure::new(2, vec![Atom::new(q, 1.0)], vec![], vec![]).unwrap()
    }

    #[test]
    fn rejects_bad_mass() {
        let r = WilliamsonMeasure::new(2, vec![Atom::new(1.0, 0.5)], vec![], vec![]);
        assert!(r.is_err());
    }

    #[test]
    fn rejects_negative_density() {
        let piece = DensityPiece::polynomial(0.0, 2.0, vec![1.5, -1.0]);
        assert!(WilliamsonMeasure::new(2, vec![], vec![piece], vec![]).is_err());
    }

    #[test]
    fn single_atom() {
        let m = delta(0.5);
        assert_eq!(m.cdf(0.4), 0.0);
        assert_eq!(m.cdf(0.5), 1.0);
        assert_eq!(m.cdf_left(0.5), 0.0);
        let v = m.stieltjes_monomial(1, Interval::left_open(0.0, 1.0)).unwrap();
        assert_eq!(v.value, 0.5);
    }

    #[test]
    fn normalize_delta_one() {
        let m = delta(1.0).normalize().unwrap();
        assert!((m.atoms()[0].location - 0.5).abs() < 1e-13);
    }

    #[test]
    fn normalize_uniform_matches_quadratic() {
        // Uniform on [0,2] with d = 2 has ψ(c) = 1/(4c) for c ≥ 1/2, so c = 1/2.
        let piece = DensityPiece::polynomial(0.0, 2.0, vec![0.5]);
        let m = WilliamsonMeasure::new(2, vec![], vec![piece], vec![]).unwrap();
        let n = m.normalize().unwrap();
        assert!((n.pieces()[0].to() - 1.0).abs() < 1e-12);
        assert!((n.williamson_transform(1.0) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn example_breakpoints() {
        let m = catalog::gapped_mixture();
        assert!((m.cdf(1.5) - 13.0 / 18.0).abs() < 1e-15);
        assert!((m.cdf(0.25) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.cdf(2.0) - 7.0 / 9.0).abs() < 1e-15);
        assert!((m.cdf(3.5) - (7.0 / 9.0 + 1.0 / 18.0)).abs() < 1e-15);
        assert!((m.cdf(4.0) - 1.0).abs() < 1e-15);
        let e = catalog::two_atom();
        assert_eq!(e.cdf(0.125), 32.0 / 49.0);
    }

    #[test]
    fn root_density_mean() {
        let m = catalog::root_mixture();
        let v = m.stieltjes_monomial(1, Interval::everything()).unwrap().value;
        assert!((v - 233.0 / 288.0).abs() < 1e-14, "{v}");
        let c = m.lebesgue_components();
        assert!((c.abs - 5.0 / 24.0).abs() < 1e-14);
        assert!((c.dis - 19.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn gaps_of_gapped_mixture() {
        let g = catalog::gapped_mixture().support_gaps();
        assert_eq!(g.leading, Some((0.0, 0.25)));
        assert_eq!(g.interior, vec![(0.25, 1.0), (2.0, 3.0)]);
        assert_eq!(g.right_end, 4.0);
    }

    #[test]
    fn quantile_hits_atoms_exactly() {
        let m = catalog::gapped_mixture();
        assert_eq!(m.quantile(0.3), 0.25);
        assert_eq!(m.quantile(0.99), 4.0);
        let q = m.quantile(13.0 / 18.0);
        assert!((q - 1.5).abs() < 1e-12);
    }

    #[test]
    fn merge_sums_overlaps() {
        let a = DensityPiece::polynomial(0.0, 2.0, vec![0.25]);
        let b = DensityPiece::polynomial(1.0, 3.0, vec![0.25]);
        let merged = merge_pieces(vec![a, b]);
        assert_eq!(merged.len(), 3);
        assert_eq!(merged[1].density(1.5), 0.5);
    }

    #[test]
    fn power_term_integral() {
        // ∫_1^2 (t-1)^{-1/2} dt = 2
        let p = DensityPiece::with_powers(
            1.0,
            2.0,
            vec![],
            vec![PowerTerm { coef: 1.0, anchor: 1.0, exponent: -0.5 }],
        );
        assert!((p.mass() - 2.0).abs() < 1e-15);
        // ∫_1^2 t (t-1)^{-1/2} dt = 2/3 + 2
        assert!((p.integrate_poly(&[0.0, 1.0], 1.0, 2.0) - 8.0 / 3.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn cdf_monotone_and_right_continuous(a in 0.0f64..5.0, b in 0.0f64..5.0) {
            for m in [catalog::gapped_mixture(), catalog::root_mixture(), catalog::cantor()] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assert!(m.cdf(lo) <= m.cdf(hi) + 1e-15);
                prop_assert!((m.cdf(lo + 1e-13) - m.cdf(lo)).abs() < 1e-9);
                prop_assert!(m.cdf_left(lo) <= m.cdf(lo));
            }
        }

        #[test]
        fn monomial_additive(s in 0.0f64..5.0, k in 0usize..3) {
            for m in [catalog::gapped_mixture(), catalog::root_mixture(), catalog::cantor()] {
                let whole = m.stieltjes_monomial(k, Interval::closed(0.0, 5.0)).unwrap().value;
                let left = m.stieltjes_monomial(k, Interval::closed(0.0, s)).unwrap().value;
                let right = m.stieltjes_monomial(k, Interval::left_open(s, 5.0)).unwrap().value;
                prop_assert!((whole - left - right).abs() < 1e-12);
            }
        }

        #[test]
        fn normalize_idempotent(q in 0.05f64..5.0, w in 0.05f64..0.95) {
            let m = WilliamsonMeasure::new(
                3,
                vec![Atom::new(q, w), Atom::new(q * 2.5, 1.0 - w)],
                vec![],
                vec![],
            ).unwrap();
            let n1 = m.normalize().unwrap();
            let n2 = n1.normalize().unwrap();
            for (a, b) in n1.atoms().iter().zip(n2.atoms()) {
                prop_assert!((a.location - b.location).abs() <= 1e-12 * a.location.max(1.0));
            }
        }

        #[test]
        fn quantile_is_generalized_inverse(u in 0.0001f64..0.9999) {
            for m in [catalog::gapped_mixture(), catalog::root_mixture(), catalog::cantor()] {
                // The truncated Cantor CDF rises by about 1e-12 per ulp of t.
                let tol = 1e-12 + m.resolution();
                let t = m.quantile(u);
                prop_assert!(m.cdf(t) >= u - tol);
                prop_assert!(m.cdf_left(t) <= u + tol);
            }
        }
    }
}
