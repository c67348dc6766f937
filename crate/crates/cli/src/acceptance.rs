//! The acceptance suite and the per-measure verification checks.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use williamson::copula::KENDALL_AGREEMENT;
use williamson::decomposition::{self, MassMethod};
use williamson::derivative;
use williamson::generator::Side;
use williamson::measure::approx;
use williamson::measure::spec::MeasureSpec;
use williamson::measure::{Interval, Kind};
use williamson::metrics;
use williamson::par::Execution;
use williamson::quadrature::Tolerance;
use williamson::sampler::{self, Method, SampleBatch};
use williamson::stats;
use williamson::{ArchCopula, Result, WilliamsonMeasure};

use crate::bundled;
use crate::report::{Check, CriterionReport, VerificationReport};

/// Monte-Carlo size fixed by the acceptance criteria.
pub const ACCEPTANCE_N: usize = 100_000;
/// Half-width of the band around `F_K` for empirical `C(X)` laws.
pub const DKW_BAND: f64 = 0.01;
/// Order-statistic stride used to bound the sup distance to `F_K`.
const ECDF_STRIDE: usize = 25;
/// Standard errors allowed between box frequencies and box masses.
const BOX_SE: f64 = 4.0;
/// Standard errors a nondegenerate component mass must exceed.
const COMPONENT_SE: f64 = 3.0;

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    run: fn(u64) -> Result<Vec<Check>>,
}

impl Criterion {
    /// Runs the criterion; an error becomes a single failed check.
    pub fn evaluate(&self, seed: u64) -> CriterionReport {
        let start = Instant::now();
        let checks = match (self.run)(seed) {
            Ok(c) => c,
            Err(e) => vec![Check::holds("evaluation", false, e.to_string())],
        };
        CriterionReport::new(self.id, self.title, checks, start.elapsed().as_secs_f64())
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "two-atom measure in dimension 3 reproduced exactly", run: criterion_1 },
        Criterion { id: 2, title: "gapped mixture: breakpoints, support bands, band masses", run: criterion_2 },
        Criterion { id: 3, title: "root mixture: slope and nondegenerate components", run: criterion_3 },
        Criterion { id: 4, title: "Kendall function: two forms and both samplers", run: criterion_4 },
        Criterion { id: 5, title: "kernel disintegration and box masses", run: criterion_5 },
        Criterion { id: 6, title: "dense-atom non-differentiability certificates", run: criterion_6 },
        Criterion { id: 7, title: "round trips", run: criterion_7 },
        Criterion { id: 8, title: "approximation sequences converge in the uniform metric", run: criterion_8 },
        Criterion { id: 9, title: "purity propagates to component masses", run: criterion_9 },
    ]
}

/// The full acceptance suite.
pub fn run_all(seed: u64) -> VerificationReport {
    VerificationReport::new(criteria().iter().map(|c| c.evaluate(seed)).collect(), seed)
}

fn bundled_copula(name: &str) -> Result<ArchCopula> {
    let m = bundled::measure(name).expect("bundled spec exists")?;
    ArchCopula::from_measure(m)
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| a.max(b.abs()))
}

/// Closed forms of the two-atom generator.
mod two_atom {
    pub fn psi(z: f64) -> f64 {
        if z <= 0.5 {
            (137.0 * z * z - 152.0 * z + 98.0) / 98.0
        } else if z <= 8.0 {
            32.0 / 49.0 * (1.0 - z / 8.0).powi(2)
        } else {
            0.0
        }
    }

    pub fn psi_prime(z: f64) -> f64 {
        if z <= 0.5 {
            (274.0 * z - 152.0) / 98.0
        } else {
            -8.0 / 49.0 * (1.0 - z / 8.0)
        }
    }

    pub fn phi(x: f64) -> f64 {
        if x >= 225.0 / 392.0 {
            (152.0 - (152.0f64 * 152.0 - 4.0 * 137.0 * 98.0 * (1.0 - x)).sqrt()) / 274.0
        } else {
            8.0 * (1.0 - (49.0 * x / 32.0).sqrt())
        }
    }
}

fn criterion_1(_seed: u64) -> Result<Vec<Check>> {
    let c = bundled_copula("two_atom")?;
    let g = c.generator();
    let mut checks = Vec::new();
    let err = max_abs((0..1024).map(|i| {
        let z = 10.0 * i as f64 / 1023.0;
        g.psi(z) - two_atom::psi(z)
    }));
    checks.push(Check::close("max |ψ - closed form| on 1024 points of [0,10]", 0.0, err, 1e-12));
    for (t, label, mass) in [(0.0, "0", "32/49"), (225.0 / 392.0, "225/392", "17/49")] {
        let r = c.level_mass(t)?;
        checks.push(Check::equal(format!("level mass at t={label} (exact)"), mass, r.exact_mass.unwrap_or_default()));
        checks.push(Check::holds(format!("level mass forms agree at t={label}"), r.forms_agree, format!("{:?}", r.jump_form)));
    }
    for x in [[0.9, 0.9], [0.8, 0.95], [0.95, 0.7], [0.6, 0.99]] {
        let prod: f64 = x.iter().map(|&v| 1.0 / two_atom::psi_prime(two_atom::phi(v))).product();
        let y = two_atom::psi(8.0 - two_atom::phi(x[0]) - two_atom::phi(x[1]));
        let right = derivative::one_sided_dm1(&c, &x, y, Side::Right)?;
        let left = derivative::one_sided_dm1(&c, &x, y, Side::Left)?;
        checks.push(Check::close(format!("right derivative at f0({x:?}) = φ'φ'/49"), prod / 49.0, right, 1e-10));
        checks.push(Check::above(format!("right derivative at f0({x:?}) positive"), 0.0, right));
        checks.push(Check::close(format!("left derivative at f0({x:?})"), 0.0, left, 1e-10));
    }
    Ok(checks)
}

fn criterion_2(_seed: u64) -> Result<Vec<Check>> {
    let c = bundled_copula("gapped_mixture")?;
    let g = c.generator();
    let mut checks = Vec::new();
    for (z, label, v) in [
        (0.25, "1/4", 17.0 / 24.0),
        (1.0 / 3.0, "1/3", 2.0 / 3.0),
        (0.5, "1/2", 11.0 / 18.0),
        (1.0, "1", 0.5),
    ] {
        checks.push(Check::close(format!("ψ({label})"), v, g.psi(z), 1e-12));
    }
    let report = decomposition::support_report(&c);
    let listed: Vec<String> = report.support.iter().map(|b| b.to_string()).collect();
    checks.push(Check::equal("support components", 3.0, report.support.len() as f64));
    checks.push(Check::holds("first component is Γ(f^0)", report.support.first().is_some_and(|b| b.is_zero_graph()), listed.join(" ∪ ")));
    for (i, (lo, hi)) in [(0.5, 11.0 / 18.0), (2.0 / 3.0, 17.0 / 24.0)].into_iter().enumerate() {
        let band = report.support.get(i + 1);
        checks.push(Check::close(format!("support band {} lower level", i + 1), lo, band.map_or(f64::NAN, |b| b.lo), 1e-12));
        checks.push(Check::close(format!("support band {} upper level", i + 1), hi, band.map_or(f64::NAN, |b| b.hi), 1e-12));
        checks.push(Check::holds(format!("support band {} closed", i + 1), band.is_some_and(|b| b.lo_closed && b.hi_closed), listed.join(" ∪ ")));
    }
    checks.push(Check::holds("not full support", !report.full_support, format!("{:?}", report.zero_bands)));
    checks.push(Check::close("band mass [1/2, 11/18]", 1.0 / 9.0, c.band_mass(0.5, 11.0 / 18.0)?, 1e-12));
    checks.push(Check::close("band mass [2/3, 17/24]", 2.0 / 9.0, c.band_mass(2.0 / 3.0, 17.0 / 24.0)?, 1e-12));
    Ok(checks)
}

fn criterion_3(seed: u64) -> Result<Vec<Check>> {
    let c = bundled_copula("root_mixture")?;
    let g = c.generator();
    let slope = 233.0 / 288.0;
    let grid: Vec<f64> = (0..256).map(|i| i as f64 / 256.0 / 3.0).collect();
    let mut checks = vec![
        Check::close("max |ψ(z) - (1 - 233z/288)| on [0,1/3)", 0.0, max_abs(grid.iter().map(|&z| g.psi(z) - (1.0 - slope * z))), 1e-12),
        Check::close("max |ψ'(z) + 233/288| on (0,1/3)", 0.0, max_abs(grid[1..].iter().map(|&z| g.psi_prime(z) + slope)), 1e-12),
        Check::close("∫ t dγ", slope, c.measure().stieltjes_monomial(1, Interval::everything())?.value, 1e-12),
    ];
    let comps = c.measure().lebesgue_components();
    checks.push(Check::close("γ^abs mass", 5.0 / 24.0, comps.abs, 1e-12));
    checks.push(Check::close("γ^dis mass", 19.0 / 24.0, comps.dis, 1e-12));
    let masses = decomposition::component_masses(&c, ACCEPTANCE_N, seed, Execution::default())?;
    checks.push(Check::equal("component masses by Monte Carlo", "mc", format!("{:?}", masses.method).to_lowercase()));
    for kind in [Kind::Discrete, Kind::Abs] {
        let (v, se) = masses.get(kind);
        checks.push(Check::above(format!("μ^{kind} > {COMPONENT_SE} SE (SE = {se:.2e})"), COMPONENT_SE * se, v));
    }
    checks.push(Check::close("μ^sing", 0.0, masses.sing, 0.0));
    Ok(checks)
}

/// `sup_t |F_n(t) - F_K(t)|` bound for the levels of a batch.
pub fn kendall_band_distance(c: &ArchCopula, batch: &SampleBatch) -> Result<f64> {
    let mut extra = vec![0.0, 1.0];
    extra.extend(c.atom_levels().iter().map(|l| l.0));
    let kc = |t: f64| c.kendall_cdf(t.clamp(0.0, 1.0)).unwrap_or(f64::NAN);
    let kl = |t: f64| c.kendall_cdf_left(t.clamp(0.0, 1.0)).unwrap_or(f64::NAN);
    let d = stats::ecdf_sup_bound(&batch.levels, kc, kl, ECDF_STRIDE, &extra, stats::JITTER);
    Ok(if d.is_nan() { f64::INFINITY } else { d })
}

/// Two-form agreement of `F_K` on `t = i/256` and the band check for both
/// samplers.
pub fn kendall_checks(name: &str, c: &ArchCopula, n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut prev = 0.0;
    for i in 1..=256 {
        let k = c.kendall(i as f64 / 256.0)?;
        worst = worst.max((k.gamma_form - k.long_form).abs());
        monotone &= k.gamma_form >= prev;
        prev = k.gamma_form;
    }
    let mut checks = vec![
        Check::close(format!("{name}: max |γ form - long form| of F_K on 256 levels"), 0.0, worst, KENDALL_AGREEMENT),
        Check::holds(format!("{name}: F_K non-decreasing with F_K(1) = 1"), monotone && prev == 1.0, format!("F_K(1) = {prev}")),
    ];
    for method in [Method::Radial, Method::Conditional] {
        let batch = sampler::sample(c, method, n, seed, Execution::default())?;
        let d = kendall_band_distance(c, &batch)?;
        checks.push(Check::at_most(format!("{name}: {method} sup |F_n - F_K| (n = {n})"), DKW_BAND, d));
    }
    Ok(checks)
}

fn criterion_4(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for name in bundled::names() {
        checks.extend(kendall_checks(name, &bundled_copula(name)?, ACCEPTANCE_N, seed)?);
    }
    Ok(checks)
}

fn random_box(rng: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, Vec<f64>) {
    (0..d)
        .map(|_| {
            let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
            (a.min(b), a.max(b))
        })
        .unzip()
}

/// Quadrature request for checks pinned at `1e-5`; singular marginals need
/// many intervals.
const MARGIN_QUAD: Tolerance = Tolerance { abs: 1e-7, rel: 0.0, max_intervals: 20_000 };

pub fn kernel_margin_checks(name: &str, c: &ArchCopula) -> Result<Vec<Check>> {
    let label = format!("{name}: max |∫K(x,[0,y])dμ - y| for y = 0.1..0.9");
    let mut worst: f64 = 0.0;
    for i in 1..=9 {
        let y = i as f64 / 10.0;
        match c.kernel_margin_integral(y, MARGIN_QUAD) {
            Ok(q) => worst = worst.max((q.value - y).abs() + q.error),
            Err(e) => return Ok(vec![Check::holds(label, false, e.to_string())]),
        }
    }
    Ok(vec![Check::close(label, 0.0, worst, 1e-5)])
}

pub fn box_checks(name: &str, c: &ArchCopula, boxes: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..boxes {
        let (lo, hi) = random_box(&mut rng, c.dim());
        let q = c.box_mass(&lo, &hi, Tolerance::default())?.value;
        worst = worst.max((q - c.corner_mass(&lo, &hi)?).abs());
    }
    Ok(vec![Check::close(format!("{name}: max |box_mass - corner inclusion-exclusion| on {boxes} boxes"), 0.0, worst, 1e-6)])
}

pub fn frequency_checks(name: &str, c: &ArchCopula, boxes: usize, n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let shapes: Vec<_> = (0..boxes).map(|_| random_box(&mut rng, c.dim())).collect();
    let mut checks = Vec::new();
    for method in [Method::Radial, Method::Conditional] {
        let batch = sampler::sample(c, method, n, seed, Execution::default())?;
        let mut worst: f64 = 0.0;
        for (lo, hi) in &shapes {
            let p = c.box_mass(lo, hi, Tolerance::default())?.value.clamp(0.0, 1.0);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let dev = (batch.box_frequency(lo, hi) - p).abs();
            worst = worst.max(if se > 0.0 { dev / se } else if dev < 1e-12 { 0.0 } else { f64::INFINITY });
        }
        checks.push(Check::at_most(format!("{name}: {method} worst box frequency deviation in SE ({boxes} boxes)"), BOX_SE, worst));
    }
    Ok(checks)
}

fn criterion_5(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for name in bundled::names() {
        checks.extend(kernel_margin_checks(name, &bundled_copula(name)?)?);
    }
    let c = bundled_copula("two_atom")?;
    checks.extend(box_checks("two_atom", &c, 64, seed)?);
    checks.extend(box_checks("root_mixture", &bundled_copula("root_mixture")?, 64, seed)?);
    checks.extend(frequency_checks("two_atom", &c, 32, ACCEPTANCE_N, seed)?);
    Ok(checks)
}

fn criterion_6(_seed: u64) -> Result<Vec<Check>> {
    let c = ArchCopula::from_measure(derivative::dense_pathology_measure(3, 64)?)?;
    let x = [0.7, 0.7];
    let points = derivative::nondiff_points(&c, &x)?;
    let certs = derivative::certify_all(&c, &x)?;
    let failed = certs.iter().filter(|c| !c.verdict).count();
    Ok(vec![
        Check::above("non-differentiability ordinates at x = (0.7, 0.7)", 1.0, points.len() as f64),
        Check::at_most("max gap between sorted ordinates (strict < 0.1)", 0.1 - f64::EPSILON, derivative::max_ordinate_gap(&points)),
        Check::equal("certificates failing FD bracketing", 0.0, failed as f64),
    ])
}

/// Largest difference between corresponding numeric fields.
pub fn fieldwise_distance(a: &WilliamsonMeasure, b: &WilliamsonMeasure) -> f64 {
    if a.atoms().len() != b.atoms().len() || a.pieces().len() != b.pieces().len() || a.singular().len() != b.singular().len() {
        return f64::INFINITY;
    }
    let mut d: f64 = 0.0;
    for (x, y) in a.atoms().iter().zip(b.atoms()) {
        d = d.max((x.location - y.location).abs()).max((x.mass - y.mass).abs());
    }
    for (x, y) in a.pieces().iter().zip(b.pieces()) {
        if x.coeffs().len() != y.coeffs().len() || x.powers().len() != y.powers().len() {
            return f64::INFINITY;
        }
        d = d.max((x.from() - y.from()).abs()).max((x.to() - y.to()).abs());
        for (p, q) in x.coeffs().iter().zip(y.coeffs()) {
            d = d.max((p - q).abs());
        }
        for (p, q) in x.powers().iter().zip(y.powers()) {
            d = d.max((p.coef - q.coef).abs()).max((p.anchor - q.anchor).abs()).max((p.exponent - q.exponent).abs());
        }
    }
    for (x, y) in a.singular().iter().zip(b.singular()) {
        d = d.max((x.weight - y.weight).abs()).max((x.offset - y.offset).abs()).max((x.scale - y.scale).abs());
    }
    d
}

/// `γ([0,z]) = F_K(ψ(1/z))` at 256 continuity points.
pub fn inversion_checks(name: &str, c: &ArchCopula) -> Result<Vec<Check>> {
    let m = c.measure();
    let top = 1.25 * m.right_end();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let mut i = 0;
    while used < 256 {
        let z = top * (i as f64 + 0.5) / 256.0;
        i += 1;
        if m.atoms().iter().any(|a| (a.location - z).abs() <= 1e-9 * z) {
            continue;
        }
        worst = worst.max((m.cdf(z) - c.measure_cdf_from_kendall(z)?).abs());
        used += 1;
    }
    let tol = 1e-9 + m.resolution();
    Ok(vec![Check::close(format!("{name}: max |γ([0,z]) - F_K(ψ(1/z))| at 256 continuity points"), 0.0, worst, tol)])
}

pub fn normalize_checks(name: &str, m: &WilliamsonMeasure) -> Result<Vec<Check>> {
    let once = m.normalize()?;
    let twice = once.normalize()?;
    Ok(vec![Check::close(format!("{name}: normalize idempotent (field-wise)"), 0.0, fieldwise_distance(&once, &twice), 1e-12)])
}

pub fn spec_round_trip_checks(name: &str, text: &str) -> Result<Vec<Check>> {
    let first = MeasureSpec::from_json(text)?;
    let json = first.to_json();
    let second = MeasureSpec::from_json(&json)?;
    Ok(vec![
        Check::holds(format!("{name}: spec parse → serialize → parse is the identity"), first == second, json.len().to_string()),
        Check::holds(format!("{name}: serialization is stable"), json == second.to_json(), String::new()),
    ])
}

fn criterion_7(_seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, text) in bundled::SPECS {
        let c = bundled_copula(name)?;
        checks.extend(inversion_checks(name, &c)?);
        checks.extend(spec_round_trip_checks(name, text)?);
        let raw = MeasureSpec::from_json(text)?.build()?;
        checks.extend(normalize_checks(&format!("{name} scaled by 3"), &raw.scaled(3.0)?)?);
    }
    let unit = MeasureSpec::from_json(r#"{"dimension": 2, "atoms": [{"q": 1, "mass": 1}], "density": [], "singular": []}"#)?.build()?;
    let half = unit.normalize()?;
    checks.push(Check::close("δ_1 normalizes to δ_1/2", 0.5, half.atoms()[0].location, 1e-12));
    checks.extend(normalize_checks("δ_1", &unit)?);
    let wide = MeasureSpec::from_json(r#"{"dimension": 2, "atoms": [], "density": [{"from": 0, "to": 2, "coeffs": ["1/2"]}], "singular": []}"#)?.build()?;
    checks.extend(normalize_checks("uniform on [0,2]", &wide)?);
    let exact = MeasureSpec::from_json(bundled::text("two_atom").unwrap())?;
    let exact_text = exact.to_json();
    checks.push(Check::holds("exact rationals survive serialization", exact_text.contains("\"32/49\"") && exact_text.contains("\"1/8\""), String::new()));
    Ok(checks)
}

fn criterion_8(_seed: u64) -> Result<Vec<Check>> {
    let target = bundled::measure("gapped_mixture").expect("bundled")?;
    let c = ArchCopula::from_measure(target.clone())?;
    let g = metrics::default_grid(c.dim());
    let mut checks = Vec::new();
    for kind in [Kind::Discrete, Kind::Abs, Kind::Singular] {
        let mut reports = Vec::new();
        for n in [10, 100] {
            let a = approx::approximation_sequence(&target, kind, n)?;
            let cn = ArchCopula::from_measure(a.measure)?;
            reports.push(metrics::dinf_distance(&cn, &c, g, Execution::default())?);
        }
        checks.push(Check::above(
            format!("{kind}: d∞(C_10, C) > d∞(C_100, C) [{:.4} vs {:.4}]", reports[0].grid_value, reports[1].grid_value),
            reports[1].grid_value,
            reports[0].grid_value,
        ));
        checks.push(Check::at_most(
            format!("{kind}: d∞(C_100, C) grid value + Lipschitz bound {:.4} (strict < 0.05)", reports[1].lipschitz_bound),
            0.05 - f64::EPSILON,
            reports[1].upper(),
        ));
    }
    Ok(checks)
}

fn criterion_9(seed: u64) -> Result<Vec<Check>> {
    let mut cases: Vec<(String, WilliamsonMeasure, Kind)> = vec![
        ("two_atom".into(), bundled::measure("two_atom").unwrap()?, Kind::Discrete),
        ("uniform".into(), bundled::measure("uniform").unwrap()?, Kind::Abs),
        ("cantor".into(), bundled::measure("cantor").unwrap()?, Kind::Singular),
    ];
    let target = bundled::measure("gapped_mixture").unwrap()?;
    for kind in [Kind::Discrete, Kind::Abs, Kind::Singular] {
        cases.push((format!("{kind} approximation of gapped_mixture"), approx::approximation_sequence(&target, kind, 10)?.measure, kind));
    }
    let mut checks = Vec::new();
    for (name, m, kind) in cases {
        let r = decomposition::component_masses(&ArchCopula::from_measure(m)?, ACCEPTANCE_N, seed, Execution::default())?;
        checks.push(Check::holds(format!("{name}: structural path"), r.method == MassMethod::Structural, format!("{:?}", r.method)));
        checks.push(Check::close(format!("{name}: μ^{kind}(I^d)"), 1.0, r.get(kind).0, 0.0));
        let others: f64 = [Kind::Discrete, Kind::Abs, Kind::Singular].iter().filter(|k| **k != kind).map(|k| r.get(*k).0).sum();
        checks.push(Check::close(format!("{name}: other components"), 0.0, others, 0.0));
    }
    Ok(checks)
}

/// Checks applicable to an arbitrary measure, used by `verify --spec`.
pub fn measure_checks(name: &str, text: Option<&str>, m: &WilliamsonMeasure, n: usize, seed: u64) -> Result<Vec<Check>> {
    let c = ArchCopula::from_measure(m.clone())?;
    let mut checks = Vec::new();
    let g = c.generator();
    checks.push(Check::close(format!("{name}: ψ(1)"), 0.5, g.psi(1.0), 1e-9));
    let monotone = g.check_d_monotone(&(1..=256).map(|i| i as f64 / 16.0).collect::<Vec<_>>(), g.d());
    checks.push(Check::holds(format!("{name}: ψ is {}-monotone on the grid", g.d()), monotone.pass(), format!("{:?}", monotone.violation)));
    let mut level_total = 0.0;
    let mut agree = true;
    for (t, _) in c.atom_levels() {
        let r = c.level_mass(t)?;
        agree &= r.forms_agree;
        level_total += r.mass;
    }
    checks.push(Check::holds(format!("{name}: level masses agree in both forms"), agree, String::new()));
    checks.push(Check::close(format!("{name}: Σ level masses = γ^dis mass"), m.lebesgue_components().dis, level_total, 1e-12));
    checks.extend(kendall_checks(name, &c, n, seed)?);
    checks.extend(inversion_checks(name, &c)?);
    checks.extend(normalize_checks(name, m)?);
    if let Some(text) = text {
        checks.extend(spec_round_trip_checks(name, text)?);
    }
    checks.extend(kernel_margin_checks(name, &c)?);
    checks.extend(box_checks(name, &c, 16, seed)?);
    if let Some(kind) = m.lebesgue_components().pure_kind() {
        let r = decomposition::component_masses(&c, n, seed, Execution::default())?;
        checks.push(Check::close(format!("{name}: μ^{kind}(I^d) structural"), 1.0, r.get(kind).0, 0.0));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_agree_with_each_other() {
        for x in [0.3, 0.6, 0.9] {
            assert!((two_atom::psi(two_atom::phi(x)) - x).abs() < 1e-12);
        }
        assert!((two_atom::psi(0.5) - 225.0 / 392.0).abs() < 1e-15);
    }

    #[test]
    fn fieldwise_distance_detects_changes() {
        let m = bundled::measure("gapped_mixture").unwrap().unwrap();
        assert_eq!(fieldwise_distance(&m, &m), 0.0);
        assert!(fieldwise_distance(&m, &m.scaled(1.5).unwrap()) > 0.1);
        let other = bundled::measure("two_atom").unwrap().unwrap();
        assert!(fieldwise_distance(&m, &other).is_infinite());
    }

    #[test]
    fn exact_criteria_pass() {
        for id in [1, 2, 6] {
            let c = criteria().into_iter().find(|c| c.id == id).unwrap();
            let r = c.evaluate(1);
            assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        }
    }
}
