//! Non-differentiability of the order `d - 1` mixed partials.
//!
//! For `x ∈ (0,1)^{d-1}` and `y ∈ (0,1)` the mixed partial in all coordinates
//! of `x` but one is `Π_{j≠i} φ'(x_j) ψ^{(d-2)}(Σ φ(x_k) + φ(y))`. Its one-sided
//! derivatives in the remaining coordinate involve `D^∓ψ^{(d-2)}`, which
//! differ exactly at arguments `1/q` for atoms `q` of `γ`. Locations are
//! enumerated from the atom list; finite differences only certify them.

use serde::Serialize;

use crate::copula::{ArchCopula, ATOM_MATCH};
use crate::generator::Side;
use crate::measure::{approx, Atom};
use crate::{Error, Result, WilliamsonMeasure};

/// Default number of halvings in a certification step schedule.
pub const SCHEDULE_LEN: usize = 6;
/// Largest admissible finite-difference step.
pub const MAX_STEP: f64 = 1e-2;
/// Relative agreement between finite differences and closed forms.
pub const FD_AGREEMENT: f64 = 0.05;
/// Required ratio of the analytic gap to the noise floor.
pub const GAP_TO_NOISE: f64 = 10.0;

fn check(cop: &ArchCopula, x: &[f64], y: f64) -> Result<()> {
    let d = cop.dim();
    if d != cop.generator().d() {
        return Err(Error::arg("mixed partials need the full-dimensional copula"));
    }
    if x.len() + 1 != d {
        return Err(Error::arg(format!("expected {} coordinates, got {}", d - 1, x.len())));
    }
    if x.iter().any(|v| !(*v > 0.0 && *v < 1.0)) || !(y > 0.0 && y < 1.0) {
        return Err(Error::arg("mixed partials need interior points"));
    }
    Ok(())
}

fn phi_primes(cop: &ArchCopula, x: &[f64]) -> Result<Vec<f64>> {
    x.iter().map(|&v| cop.generator().phi_prime(v)).collect()
}

/// `∂_{x_j, j≠i} C(x, y)`: every conditioning coordinate except `i`.
pub fn mixed_partial_except(cop: &ArchCopula, x: &[f64], y: f64, i: usize) -> Result<f64> {
    check(cop, x, y)?;
    if i >= x.len() {
        return Err(Error::arg(format!("coordinate {i} out of range")));
    }
    let gen = cop.generator();
    let z = cop.phi_sum(x)? + gen.phi(y)?;
    let prod: f64 = phi_primes(cop, x)?
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, v)| v)
        .product();
    Ok(prod * gen.psi_derivative(gen.d() - 2, z)?)
}

/// `∂_2 … ∂_{d-1} C(x, y)`
pub fn mixed_partial_dm2(cop: &ArchCopula, x: &[f64], y: f64) -> Result<f64> {
    mixed_partial_except(cop, x, y, 0)
}

/// Counterpart of the `x`-side: a right derivative in `x_1` is a left
/// derivative in the composite argument, since `φ` is decreasing.
fn z_side(side: Side) -> Side {
    match side {
        Side::Right => Side::Left,
        Side::Left => Side::Right,
    }
}

/// `∂_1^± ∂_2 … ∂_{d-1} C(x, y) = Π φ'(x_i) D^∓ψ^{(d-2)}(Σ φ(x_i) + φ(y))`
pub fn one_sided_dm1(cop: &ArchCopula, x: &[f64], y: f64, side: Side) -> Result<f64> {
    check(cop, x, y)?;
    let gen = cop.generator();
    let z = cop.phi_sum(x)? + gen.phi(y)?;
    let r = gen.snap(1.0 / z, ATOM_MATCH);
    one_sided_at(cop, x, r, side)
}

fn one_sided_at(cop: &ArchCopula, x: &[f64], r: f64, side: Side) -> Result<f64> {
    let prod: f64 = phi_primes(cop, x)?.iter().product();
    Ok(prod * cop.generator().one_sided_at(r, z_side(side)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonDiffPoint {
    /// Level `ψ(1/q)` of the atom.
    pub t: f64,
    /// Ordinate `f^t(x) = ψ(1/q - Σ φ(x_i))`.
    pub y: f64,
    /// Atom location.
    pub q: f64,
    pub left: f64,
    pub right: f64,
    /// `right - left = (d-1)! α q^{d-1} Π |φ'(x_i)|`.
    pub gap: f64,
}

/// Ordinates at which `y ↦ ∂_1 ∂_2 … ∂_{d-1} C(x, y)` fails to exist, one per
/// atom `q` with `1/q > Σ φ(x_i)`, sorted by `y`.
pub fn nondiff_points(cop: &ArchCopula, x: &[f64]) -> Result<Vec<NonDiffPoint>> {
    check(cop, x, 0.5)?;
    let gen = cop.generator();
    let s = cop.phi_sum(x)?;
    let mut out = Vec::new();
    for a in gen.measure().atoms() {
        let w = 1.0 / a.location - s;
        if !(w > 0.0) {
            continue;
        }
        let y = gen.psi(w);
        if !(y > 0.0 && y < 1.0) {
            continue;
        }
        let left = one_sided_at(cop, x, a.location, Side::Left)?;
        let right = one_sided_at(cop, x, a.location, Side::Right)?;
        out.push(NonDiffPoint { t: gen.psi(1.0 / a.location), y, q: a.location, left, right, gap: right - left });
    }
    out.sort_by(|a, b| a.y.total_cmp(&b.y));
    Ok(out)
}

/// Largest distance between consecutive sorted ordinates.
pub fn max_ordinate_gap(points: &[NonDiffPoint]) -> f64 {
    points.windows(2).map(|w| w[1].y - w[0].y).fold(0.0, f64::max)
}

/// Normalized atomic measure on the given atoms.
pub fn atomic_measure(d: usize, atoms: &[(f64, f64)]) -> Result<WilliamsonMeasure> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let atoms = atoms.iter().map(|&(q, m)| Atom::new(q, m / total)).collect();
    WilliamsonMeasure::new(d, atoms, vec![], vec![])?.normalize()
}

/// Atoms on the first `n` points of the Stern–Brocot enumeration with masses
/// proportional to `1/i`, normalized.
pub fn dense_pathology_measure(d: usize, n: usize) -> Result<WilliamsonMeasure> {
    if n == 0 {
        return Err(Error::arg("truncation must be at least 1"));
    }
    let atoms = approx::enumerated_atoms(n, |i| 1.0 / (i + 1) as f64);
    WilliamsonMeasure::new(d, atoms, vec![], vec![])?.normalize()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdEstimate {
    pub estimate: f64,
    /// Spread of the last two extrapolated quotients.
    pub noise_floor: f64,
    pub steps: Vec<f64>,
    pub quotients: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

/// One-sided difference quotients of [`mixed_partial_except`] in coordinate
/// `i` with Richardson extrapolation across the schedule.
pub fn fd_probe_along(cop: &ArchCopula, x: &[f64], y: f64, i: usize, side: Side, steps: &[f64]) -> Result<FdEstimate> {
    check(cop, x, y)?;
    if steps.len() < 4 {
        return Err(Error::arg(format!("step schedule needs at least 4 steps, got {}", steps.len())));
    }
    if steps.iter().any(|h| !(*h > 0.0 && *h <= MAX_STEP)) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::arg("steps must be decreasing and lie in (0, 1e-2]"));
    }
    let sign = if side == Side::Right { 1.0 } else { -1.0 };
    if x[i] + sign * steps[0] <= 0.0 || x[i] + sign * steps[0] >= 1.0 {
        return Err(Error::arg("step schedule leaves the unit interval"));
    }
    let f0 = mixed_partial_except(cop, x, y, i)?;
    let mut xs = x.to_vec();
    let mut quotients = Vec::with_capacity(steps.len());
    for &h in steps {
        xs[i] = x[i] + sign * h;
        quotients.push(sign * (mixed_partial_except(cop, &xs, y, i)? - f0) / h);
    }
    let extrapolated: Vec<f64> = steps
        .windows(2)
        .zip(quotients.windows(2))
        .map(|(h, q)| {
            let rho = h[0] / h[1];
            (rho * q[1] - q[0]) / (rho - 1.0)
        })
        .collect();
    let n = extrapolated.len();
    let estimate = extrapolated[n - 1];
    let noise_floor = (extrapolated[n - 1] - extrapolated[n - 2]).abs();
    if !estimate.is_finite() || noise_floor > 0.1 * estimate.abs() + 1e-8 {
        return Err(Error::FdNonConvergence { spread: noise_floor });
    }
    Ok(FdEstimate { estimate, noise_floor, steps: steps.to_vec(), quotients, extrapolated })
}

pub fn fd_probe(cop: &ArchCopula, x: &[f64], y: f64, side: Side, steps: &[f64]) -> Result<FdEstimate> {
    fd_probe_along(cop, x, y, 0, side, steps)
}

/// Halving schedule starting at `h0`.
pub fn halving_schedule(h0: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| h0 / f64::powi(2.0, k as i32)).collect()
}

/// Largest step in `x_i` that keeps both `φ(x_i)` and the composite
/// argument `z` clear of every other kink of `ψ`.
pub fn admissible_step(cop: &ArchCopula, x: &[f64], i: usize, z: f64) -> Result<f64> {
    let gen = cop.generator();
    let zi = gen.phi(x[i])?;
    let slope = gen.phi_prime(x[i])?.abs();
    let clearance = |c: f64| {
        gen.kinks()
            .iter()
            .map(|k| (k.z - c).abs())
            .filter(|dist| *dist > 1e-9 * c.max(1.0))
            .fold(f64::INFINITY, f64::min)
    };
    let room = clearance(z).min(clearance(zi));
    Ok((0.25 * room / slope).min(MAX_STEP).min(0.5 * x[i]).min(0.5 * (1.0 - x[i])))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonDiffCertificate {
    pub x: Vec<f64>,
    pub y: f64,
    pub t: f64,
    pub left: f64,
    pub right: f64,
    pub gap: f64,
    pub fd_left: f64,
    pub fd_right: f64,
    pub noise_floor: f64,
    pub steps: Vec<f64>,
    pub verdict: bool,
}

/// Gap exceeds [`GAP_TO_NOISE`] noise floors and both finite-difference
/// estimates match their closed forms within [`FD_AGREEMENT`].
pub fn verdict(left: f64, right: f64, fd_left: f64, fd_right: f64, noise: f64) -> bool {
    let scale = left.abs().max(right.abs());
    let close = |fd: f64, a: f64| (fd - a).abs() <= FD_AGREEMENT * a.abs() + noise + 1e-9 * scale;
    (right - left).abs() > GAP_TO_NOISE * noise && close(fd_left, left) && close(fd_right, right)
}

pub fn certify(cop: &ArchCopula, x: &[f64], point: &NonDiffPoint) -> Result<NonDiffCertificate> {
    let h0 = admissible_step(cop, x, 0, 1.0 / point.q)?;
    let steps = halving_schedule(h0, SCHEDULE_LEN);
    let left = fd_probe(cop, x, point.y, Side::Left, &steps)?;
    let right = fd_probe(cop, x, point.y, Side::Right, &steps)?;
    let noise = left.noise_floor.max(right.noise_floor);
    Ok(NonDiffCertificate {
        x: x.to_vec(),
        y: point.y,
        t: point.t,
        left: point.left,
        right: point.right,
        gap: point.gap,
        fd_left: left.estimate,
        fd_right: right.estimate,
        noise_floor: noise,
        steps,
        verdict: verdict(point.left, point.right, left.estimate, right.estimate, noise),
    })
}

/// Certificates for every enumerated non-differentiability point at `x`.
pub fn certify_all(cop: &ArchCopula, x: &[f64]) -> Result<Vec<NonDiffCertificate>> {
    nondiff_points(cop, x)?.iter().map(|p| certify(cop, x, p)).collect()
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
    fn two_atom_points_and_values() {
        let c = cop(catalog::two_atom());
        let x = [0.9, 0.9];
        let pts = nondiff_points(&c, &x).unwrap();
        assert_eq!(pts.len(), 2);
        let g = c.generator();
        let pp = g.phi_prime(0.9).unwrap().powi(2);
        assert!(pts[0].t == 0.0 && (pts[0].right - pp / 49.0).abs() < 1e-10 && pts[0].left.abs() < 1e-15);
        assert!((pts[1].t - 225.0 / 392.0).abs() < 1e-12);
        assert!((pts[1].gap - 136.0 / 49.0 * pp).abs() < 1e-10);
        let y0 = c.level_function(0.0, &x).unwrap();
        assert!((pts[0].y - y0).abs() < 1e-12);
        assert!((one_sided_dm1(&c, &x, y0, Side::Right).unwrap() - pp / 49.0).abs() < 1e-10);
        assert!(one_sided_dm1(&c, &x, y0, Side::Left).unwrap().abs() < 1e-15);
        for cert in certify_all(&c, &x).unwrap() {
            assert!(cert.verdict, "{cert:?}");
        }
    }

    #[test]
    fn absolutely_continuous_has_no_points() {
        let c = cop(catalog::uniform());
        assert!(nondiff_points(&c, &[0.4]).unwrap().is_empty());
    }

    #[test]
    fn dense_measure_ordinates() {
        let m = dense_pathology_measure(3, 64).unwrap();
        let c = cop(m);
        let pts = nondiff_points(&c, &[0.7, 0.7]).unwrap();
        assert!(pts.len() >= 16);
        assert!(max_ordinate_gap(&pts) < 0.1, "{}", max_ordinate_gap(&pts));
        assert!(certify_all(&c, &[0.7, 0.7]).unwrap().iter().all(|c| c.verdict));
        let one = dense_pathology_measure(3, 1).unwrap();
        assert_eq!(nondiff_points(&cop(one), &[0.7, 0.7]).unwrap().len(), 1);
        assert!(dense_pathology_measure(3, 0).is_err());
    }

    #[test]
    fn two_point_truncation_is_two_atom() {
        let m = atomic_measure(3, &[(0.125, 32.0), (2.0, 17.0)]).unwrap();
        let reference = catalog::two_atom();
        for z in [0.1, 0.5, 1.0, 4.0] {
            assert!((m.williamson_transform(z) - reference.williamson_transform(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_rules() {
        let c = cop(catalog::two_atom());
        let x = [0.5, 0.5];
        assert!(fd_probe(&c, &x, 0.5, Side::Right, &[1e-3, 5e-4, 2.5e-4]).is_err());
        assert!(fd_probe(&c, &x, 0.5, Side::Right, &[1e-3, 2e-3, 5e-4, 2e-4]).is_err());
        assert!(fd_probe(&c, &x, 0.5, Side::Right, &[0.1, 5e-3, 2.5e-3, 1e-3]).is_err());
    }

    #[test]
    fn mixed_partial_matches_central_differences() {
        let c = cop(catalog::root_mixture().with_dimension(3).unwrap().normalize().unwrap());
        let h = 1e-5;
        for &(x1, x2, y) in &[(0.6, 0.7, 0.8), (0.8, 0.5, 0.9), (0.9, 0.95, 0.6)] {
            let fd = (c.cdf(&[x1, x2 + h, y]).unwrap() - c.cdf(&[x1, x2 - h, y]).unwrap()) / (2.0 * h);
            let exact = mixed_partial_dm2(&c, &[x1, x2], y).unwrap();
            assert!((fd - exact).abs() <= 1e-4 * exact.abs().max(1e-12), "{fd} vs {exact}");
        }
        let w = cop(catalog::lower_frechet());
        assert_eq!(mixed_partial_dm2(&w, &[0.7], 0.6).unwrap(), w.cdf(&[0.7, 0.6]).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn smooth_points_certify(x1 in 0.55..0.95f64, x2 in 0.55..0.95f64, y in 0.3..0.95f64) {
            let c = cop(catalog::two_atom());
            let x = [x1, x2];
            let z = c.phi_sum(&x).unwrap() + c.generator().phi(y).unwrap();
            let h0 = admissible_step(&c, &x, 0, z).unwrap();
            prop_assume!(h0 > 1e-6);
            let steps = halving_schedule(h0, SCHEDULE_LEN);
            let exact = one_sided_dm1(&c, &x, y, Side::Right).unwrap();
            prop_assert!((exact - one_sided_dm1(&c, &x, y, Side::Left).unwrap()).abs() < 1e-10);
            let fd = fd_probe(&c, &x, y, Side::Right, &steps).unwrap();
            prop_assert!((fd.estimate - exact).abs() <= 1e-3 * exact.abs().max(1e-12));
        }

        #[test]
        fn gap_formula(x1 in 0.3..0.99f64, x2 in 0.3..0.99f64, x3 in 0.3..0.99f64) {
            let m = crate::derivative::atomic_measure(4, &[(0.2, 1.0), (1.0, 2.0), (3.0, 1.0)]).unwrap();
            let c = cop(m);
            let x = [x1, x2, x3];
            let g = c.generator();
            let prod: f64 = x.iter().map(|&v| g.phi_prime(v).unwrap().abs()).product();
            for p in nondiff_points(&c, &x).unwrap() {
                let a = g.measure().atom_at(p.q).unwrap();
                let expected = 6.0 * a.mass * p.q.powi(3) * prod;
                prop_assert!((p.gap - expected).abs() <= 1e-10 * expected.max(1.0));
            }
        }
    }
}
