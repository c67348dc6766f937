//! Exact simulation from an Archimedean copula.
//!
//! Two independent constructions are provided. The radial sampler uses that
//! `ψ` is the Williamson transform of `γ`: with `T ~ γ` and `S` uniform on the
//! unit simplex, `(ψ(S_1/T), …, ψ(S_d/T))` has law `C`. The conditional
//! sampler draws one coordinate at a time from the Markov kernels of the
//! marginals `C^{1:k}`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::copula::ArchCopula;
use crate::measure::Interval;
use crate::par::{self, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Radial,
    Conditional,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Radial => "radial",
            Method::Conditional => "conditional",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(Method::Radial),
            "conditional" => Ok(Method::Conditional),
            other => Err(Error::arg(format!("unknown sampling method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub n: usize,
    pub d: usize,
    /// Row-major `n × d` values.
    pub rows: Vec<f64>,
    /// `C(X)` for every row, carried from the construction.
    pub levels: Vec<f64>,
    pub method: Method,
    pub seed: u64,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.rows[i * self.d + j]).collect()
    }

    /// Fraction of rows inside the box `Π (lo_i, hi_i]`.
    pub fn box_frequency(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let hits = (0..self.n)
            .filter(|&i| {
                self.row(i)
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(&v, (&a, &b))| v > a && v <= b)
            })
            .count();
        hits as f64 / self.n as f64
    }
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

fn collect(cop: &ArchCopula, n: usize, seed: u64, method: Method, exec: Execution, rows: Vec<(Vec<f64>, Vec<f64>)>) -> SampleBatch {
    let mut out = Vec::with_capacity(n * cop.dim());
    let mut levels = Vec::with_capacity(n);
    for (r, l) in rows {
        out.extend(r);
        levels.extend(l);
    }
    let _ = exec;
    SampleBatch { n, d: cop.dim(), rows: out, levels, method, seed }
}

pub fn sample(cop: &ArchCopula, method: Method, n: usize, seed: u64, exec: Execution) -> Result<SampleBatch> {
    match method {
        Method::Radial => sample_radial(cop, n, seed, exec),
        Method::Conditional => sample_conditional(cop, n, seed, exec),
    }
}

pub fn sample_radial(cop: &ArchCopula, n: usize, seed: u64, exec: Execution) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::arg("sample size must be at least 1"));
    }
    let d = cop.dim();
    let gen = cop.generator();
    let m = gen.measure();
    let chunks = par::chunk_ranges(n);
    let rows = par::map_indexed(exec, chunks.len(), |c| {
        let mut rng = par::substream(seed, c);
        let len = chunks[c].len();
        let mut rows = Vec::with_capacity(len * d);
        let mut levels = Vec::with_capacity(len);
        // A marginal keeps the first `d` coordinates of the full simplex draw.
        let mut e = vec![0.0; gen.d()];
        for _ in 0..len {
            let t = m.quantile(open_unit(&mut rng));
            let r = 1.0 / t;
            for v in e.iter_mut() {
                *v = -open_unit(&mut rng).ln();
            }
            let total: f64 = e.iter().sum();
            for v in &e[..d] {
                rows.push(gen.psi(r * v / total));
            }
            let used: f64 = e[..d].iter().sum();
            levels.push(gen.psi(r * used / total));
        }
        (rows, levels)
    });
    Ok(collect(cop, n, seed, Method::Radial, exec, rows))
}

struct Conditional<'a> {
    cop: &'a ArchCopula,
    // Breakpoints of γ with ∫_{(0,b)} and ∫_{(0,b]} of t^{d-1} dγ.
    breaks: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl<'a> Conditional<'a> {
    fn new(cop: &'a ArchCopula) -> Self {
        let gen = cop.generator();
        let breaks = gen.measure().breakpoints();
        let left = breaks.iter().map(|&b| gen.top_moment(b, false)).collect();
        let right = breaks.iter().map(|&b| gen.top_moment(b, true)).collect();
        Self { cop, breaks, left, right }
    }

    /// `inf { r : ∫_{(0,r]} t^{d-1} dγ ≥ target }`, exact at atoms.
    fn tilted_quantile(&self, target: f64) -> f64 {
        let n = self.breaks.len();
        let i = self.right.partition_point(|&f| f < target);
        if i >= n {
            return self.breaks[n - 1];
        }
        if self.left[i] < target {
            return self.breaks[i];
        }
        let m = self.cop.measure();
        let d = self.cop.generator().d();
        let base = if i == 0 { 0.0 } else { self.right[i - 1] };
        let from = if i == 0 { 0.0 } else { self.breaks[i - 1] };
        let (mut lo, mut hi) = (from, self.breaks[i]);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = base + m.integrate_kernel(d - 1, 0, 0.0, Interval::left_open(from, mid));
            if v >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Draws coordinate `k ≥ 2` of `C^{1:k}` given `s = Σ_{i<k} φ(u_i)`.
    /// Returns the coordinate and the updated sum.
    fn next(&self, k: usize, s: f64, v: f64) -> (f64, f64) {
        let gen = self.cop.generator();
        let d = gen.d();
        let phi0 = gen.phi0();
        if s >= phi0 {
            return (0.0, f64::INFINITY);
        }
        if k == d {
            let top = gen.top_moment(gen.reciprocal(s), true);
            let r = self.tilted_quantile(v * top);
            let z = 1.0 / r;
            return (gen.psi(z - s), z);
        }
        let den = gen.marginal_moment(k, s);
        let ratio = |w: f64| gen.marginal_moment(k, s + w) / den;
        let (mut lo, mut hi) = (0.0, if phi0.is_finite() { phi0 - s } else { 1.0 });
        if phi0.is_infinite() {
            while ratio(hi) >= v {
                lo = hi;
                hi *= 2.0;
            }
        }
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ratio(mid) >= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = 0.5 * (lo + hi);
        (gen.psi(w), s + w)
    }
}

pub fn sample_conditional(cop: &ArchCopula, n: usize, seed: u64, exec: Execution) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::arg("sample size must be at least 1"));
    }
    let d = cop.dim();
    let gen = cop.generator();
    let sampler = Conditional::new(cop);
    let chunks = par::chunk_ranges(n);
    let rows = par::map_indexed(exec, chunks.len(), |c| {
        let mut rng = par::substream(seed, c);
        let len = chunks[c].len();
        let mut rows = Vec::with_capacity(len * d);
        let mut levels = Vec::with_capacity(len);
        for _ in 0..len {
            let u1 = open_unit(&mut rng);
            rows.push(u1);
            let mut s = gen.phi(u1).expect("u1 lies in (0,1]");
            for k in 2..=d {
                let (u, next) = sampler.next(k, s, open_unit(&mut rng));
                rows.push(u);
                s = next;
            }
            levels.push(gen.psi(s));
        }
        (rows, levels)
    });
    Ok(collect(cop, n, seed, Method::Conditional, exec, rows))
}
