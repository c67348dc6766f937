//! One function per subcommand. Each returns whether its checks passed.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use williamson::decomposition::{self, ComponentMasses, SupportReport};
use williamson::derivative;
use williamson::generator::GeneratorSummary;
use williamson::measure::approx;
use williamson::measure::spec::MeasureSpec;
use williamson::metrics;
use williamson::par::Execution;
use williamson::sampler::{self, Method};
use williamson::{ArchCopula, Error, Result, WilliamsonMeasure};

use crate::acceptance;
use crate::bundled;
use crate::config::{Command, RunConfig};
use crate::output::{self, num, Table};
use crate::report::{CriterionReport, VerificationReport};

/// A loaded measure with the text it came from.
pub struct Loaded {
    pub name: String,
    pub text: String,
    pub measure: WilliamsonMeasure,
}

/// Reads the spec from a file, or from the bundled set when no such file
/// exists, applies the dimension override and normalizes.
pub fn load(spec: &Path, d: Option<usize>) -> Result<Loaded> {
    let (name, text) = if spec.exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", spec.display())))?;
        (spec.display().to_string(), text)
    } else {
        let key = spec.to_string_lossy();
        let text = bundled::text(&key).ok_or_else(|| {
            let known: Vec<_> = bundled::names().collect();
            Error::InvalidArgument(format!("no spec file `{key}` and no bundled spec of that name (bundled: {})", known.join(", ")))
        })?;
        (key.into_owned(), text.to_string())
    };
    let spec = MeasureSpec::from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse { location: format!("{name}: {location}"), message },
        other => other,
    })?;
    let mut measure = spec.build()?;
    if let Some(d) = d {
        measure = measure.with_dimension(d)?;
    }
    Ok(Loaded { name, text, measure: measure.normalize()? })
}

fn require_spec(cfg: &RunConfig) -> Result<Loaded> {
    let spec = cfg
        .spec
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("`{}` needs --spec", cfg.command.name())))?;
    load(spec, cfg.d)
}

fn copula(cfg: &RunConfig) -> Result<ArchCopula> {
    ArchCopula::from_measure(require_spec(cfg)?.measure)
}

fn out(cfg: &RunConfig) -> Option<&Path> {
    cfg.out.as_deref()
}

/// Hex SHA-256 of the canonical spec serialization.
pub fn measure_hash(m: &WilliamsonMeasure) -> String {
    let json = MeasureSpec::from_measure(m).to_json();
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn dispatch(cfg: &RunConfig) -> Result<bool> {
    match &cfg.command {
        Command::Transform { zmax } => transform(cfg, *zmax),
        Command::Eval { points } => eval(cfg, points),
        Command::Kendall => kendall(cfg),
        Command::Levelmass { t, curve } => levelmass(cfg, *t, *curve),
        Command::Bandmass { s1, s2 } => bandmass(cfg, *s1, *s2),
        Command::Decompose => decompose(cfg),
        Command::Nondiff { x, dense } => nondiff(cfg, x.as_deref(), *dense),
        Command::Sample { method } => sample(cfg, *method),
        Command::Approx { kinds, steps } => approx_trace(cfg, kinds, steps),
        Command::Verify => verify(cfg),
    }
}

/// `z, ψ, ψ', …, ψ^{(d-2)}, D⁻ψ^{(d-2)}, D⁺ψ^{(d-2)}, F_γ(z)`.
fn transform(cfg: &RunConfig, zmax: Option<f64>) -> Result<bool> {
    let c = copula(cfg)?;
    let g = c.generator();
    let m = c.measure();
    let zmax = zmax.unwrap_or_else(|| {
        let phi0 = g.phi0();
        if phi0.is_finite() { 1.25 * phi0 } else { 4.0 / m.left_end().max(1e-3) }
    });
    if !(zmax > 0.0 && zmax.is_finite()) {
        return Err(Error::InvalidArgument(format!("--zmax must be positive, got {zmax}")));
    }
    let steps = cfg.grid_or(256);
    let d = g.d();
    let mut header = vec!["z".to_string(), "psi".to_string()];
    header.extend((1..d - 1).map(|k| format!("psi_d{k}")));
    header.extend(["dminus".into(), "dplus".into(), "gamma_cdf".into()]);
    let mut table = Table::new(header);
    table.comments.push(format!("generator {}", serde_json::to_string(&g.summary()).unwrap_or_default()));
    for i in 0..=steps {
        let z = zmax * i as f64 / steps as f64;
        let mut row = vec![num(z), num(g.psi(z))];
        for k in 1..d - 1 {
            row.push(num(g.psi_derivative(k, z)?));
        }
        let (dm, dp) = if z > 0.0 { (g.dminus_psi(z), g.dplus_psi(z)) } else { (f64::NAN, f64::NAN) };
        row.extend([num(dm), num(dp), num(m.cdf(z))]);
        table.push(row);
    }
    table.write(out(cfg))?;
    Ok(true)
}

fn eval(cfg: &RunConfig, points: &[Vec<f64>]) -> Result<bool> {
    let c = copula(cfg)?;
    let d = c.dim();
    if points.is_empty() {
        return Err(Error::InvalidArgument("`eval` needs at least one --x point".into()));
    }
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("cdf".into());
    let mut table = Table::new(header);
    for p in points {
        let v = c.cdf(p)?;
        let mut row: Vec<String> = p.iter().map(|&x| num(x)).collect();
        row.push(num(v));
        table.push(row);
    }
    table.write(out(cfg))?;
    Ok(true)
}

fn kendall(cfg: &RunConfig) -> Result<bool> {
    let c = copula(cfg)?;
    let g = cfg.grid_or(256);
    let mut table = Table::new(["t", "kendall_gamma", "kendall_long", "agree"]);
    let mut all = true;
    for i in 0..=g {
        let k = c.kendall(i as f64 / g as f64)?;
        all &= k.agree;
        table.push(vec![num(k.t), num(k.gamma_form), num(k.long_form), k.agree.to_string()]);
    }
    table.write(out(cfg))?;
    Ok(all)
}

fn levelmass(cfg: &RunConfig, t: Option<f64>, curve: bool) -> Result<bool> {
    let c = copula(cfg)?;
    let mut levels: Vec<f64> = match t {
        Some(t) => vec![t],
        None => {
            let mut l: Vec<f64> = c.atom_levels().into_iter().map(|(t, _)| t).collect();
            l.sort_by(f64::total_cmp);
            l
        }
    };
    if curve {
        if t.is_none() && !levels.contains(&0.0) {
            levels.insert(0, 0.0);
        }
        return level_curves(cfg, &c, &levels);
    }
    let mut table = Table::new(["t", "mass", "gamma_form", "jump_form", "forms_agree", "atom_location", "exact_mass"]);
    let mut all = true;
    for t in levels {
        let r = c.level_mass(t)?;
        all &= r.forms_agree;
        table.push(vec![
            num(r.t),
            num(r.mass),
            num(r.gamma_form),
            r.jump_form.map(num).unwrap_or_default(),
            r.forms_agree.to_string(),
            num(r.atom_location),
            r.exact_mass.unwrap_or_default(),
        ]);
    }
    table.write(out(cfg))?;
    Ok(all)
}

/// `f^t` on a grid of `(0,1]^{d-1}` for `d ≤ 3`.
fn level_curves(cfg: &RunConfig, c: &ArchCopula, levels: &[f64]) -> Result<bool> {
    let d = c.dim();
    if d > 3 {
        return Err(Error::InvalidArgument(format!("level curves are tabulated for d ≤ 3, got d = {d}")));
    }
    let g = cfg.grid_or(if d == 2 { 256 } else { 64 });
    let mut header = vec!["t".to_string()];
    header.extend((1..d).map(|i| format!("x{i}")));
    header.push("f".into());
    let mut table = Table::new(header);
    let axis: Vec<f64> = (1..=g).map(|i| i as f64 / g as f64).collect();
    for &t in levels {
        if d == 2 {
            for &x in &axis {
                table.push(vec![num(t), num(x), num(c.level_function(t, &[x])?)]);
            }
        } else {
            for &x1 in &axis {
                for &x2 in &axis {
                    table.push(vec![num(t), num(x1), num(x2), num(c.level_function(t, &[x1, x2])?)]);
                }
            }
        }
    }
    table.write(out(cfg))?;
    Ok(true)
}

fn bandmass(cfg: &RunConfig, s1: f64, s2: f64) -> Result<bool> {
    let c = copula(cfg)?;
    let mut table = Table::new(["s1", "s2", "mass"]);
    table.push(vec![num(s1), num(s2), num(c.band_mass(s1, s2)?)]);
    table.write(out(cfg))?;
    Ok(true)
}

#[derive(Serialize)]
struct DecomposeReport {
    #[serde(flatten)]
    masses: ComponentMasses,
    #[serde(flatten)]
    support: SupportReport,
    /// The support written as a union of bands.
    support_bands: Vec<String>,
    generator: GeneratorSummary,
}

fn decompose(cfg: &RunConfig) -> Result<bool> {
    let c = copula(cfg)?;
    let masses = decomposition::component_masses(&c, cfg.n, cfg.seed, Execution::default())?;
    let support = decomposition::support_report(&c);
    let support_bands = support.support.iter().map(|b| b.to_string()).collect();
    let report = DecomposeReport { masses, support, support_bands, generator: c.generator().summary() };
    output::write_json(&report, out(cfg))?;
    Ok(true)
}

fn nondiff(cfg: &RunConfig, x: Option<&[f64]>, dense: Option<usize>) -> Result<bool> {
    let c = match dense {
        Some(n) => ArchCopula::from_measure(derivative::dense_pathology_measure(cfg.d.unwrap_or(3), n)?)?,
        None => copula(cfg)?,
    };
    let d = c.dim();
    let x: Vec<f64> = match x {
        Some(x) => x.to_vec(),
        None => vec![0.7; d - 1],
    };
    if x.len() != d - 1 {
        return Err(Error::InvalidArgument(format!("--x needs {} coordinates, got {}", d - 1, x.len())));
    }
    let certs = derivative::certify_all(&c, &x)?;
    let mut header: Vec<String> = (1..d).map(|i| format!("x{i}")).collect();
    header.extend(["y", "t", "left", "right", "gap", "fd_left", "fd_right", "noise_floor", "verdict"].map(String::from));
    let mut table = Table::new(header);
    for cert in &certs {
        let mut row: Vec<String> = cert.x.iter().map(|&v| num(v)).collect();
        row.extend([cert.y, cert.t, cert.left, cert.right, cert.gap, cert.fd_left, cert.fd_right, cert.noise_floor].map(num));
        row.push(cert.verdict.to_string());
        table.push(row);
    }
    table.write(out(cfg))?;
    Ok(certs.iter().all(|c| c.verdict))
}

fn sample(cfg: &RunConfig, method: Method) -> Result<bool> {
    let c = copula(cfg)?;
    let batch = sampler::sample(&c, method, cfg.n, cfg.seed, Execution::default())?;
    let mut header: Vec<String> = (1..=batch.d).map(|i| format!("u{i}")).collect();
    header.push("level".into());
    let mut table = Table::new(header);
    table.comments.push(format!(
        "seed={} method={} n={} d={} measure_sha256={}",
        cfg.seed,
        method,
        batch.n,
        batch.d,
        measure_hash(c.measure())
    ));
    for i in 0..batch.n {
        let mut row: Vec<String> = batch.row(i).iter().map(|&u| num(u)).collect();
        row.push(num(batch.levels[i]));
        table.push(row);
    }
    table.write(out(cfg))?;
    Ok(true)
}

fn approx_trace(cfg: &RunConfig, kinds: &[williamson::measure::Kind], steps: &[usize]) -> Result<bool> {
    let target = require_spec(cfg)?.measure;
    let c = ArchCopula::from_measure(target.clone())?;
    let g = cfg.grid_or(metrics::default_grid(c.dim()));
    let mut table = Table::new(["kind", "n", "grid", "grid_value", "lipschitz_bound", "upper", "full_support"]);
    for &kind in kinds {
        for &n in steps {
            let a = approx::approximation_sequence(&target, kind, n)?;
            let full = a.full_support_by_construction;
            let r = metrics::dinf_distance(&ArchCopula::from_measure(a.measure)?, &c, g, Execution::default())?;
            table.push(vec![
                kind.to_string(),
                n.to_string(),
                g.to_string(),
                num(r.grid_value),
                num(r.lipschitz_bound),
                num(r.upper()),
                full.to_string(),
            ]);
        }
    }
    table.write(out(cfg))?;
    Ok(true)
}

/// The acceptance suite, or the generic checks for `--spec`.
fn verify(cfg: &RunConfig) -> Result<bool> {
    let report = match &cfg.spec {
        None => acceptance::run_all(cfg.seed),
        Some(_) => {
            let loaded = require_spec(cfg)?;
            let start = std::time::Instant::now();
            let checks = acceptance::measure_checks(&loaded.name, Some(&loaded.text), &loaded.measure, cfg.n, cfg.seed)?;
            let title = format!("checks for {}", loaded.name);
            VerificationReport::new(vec![CriterionReport::new(1, title, checks, start.elapsed().as_secs_f64())], cfg.seed)
        }
    };
    for c in &report.criteria {
        eprintln!("{}", c.line());
    }
    output::write_json(&report, out(cfg))?;
    Ok(report.pass)
}

