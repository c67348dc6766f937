//! Run configuration and number parsing.

use std::path::PathBuf;
use std::str::FromStr;

use williamson::measure::Kind;
use williamson::sampler::Method;
use williamson::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// `ψ`, its derivatives and `F_γ` on a `z` grid.
    Transform { zmax: Option<f64> },
    /// `C` at the given points.
    Eval { points: Vec<Vec<f64>> },
    /// `F_K` in both forms on a `t` grid.
    Kendall,
    /// Level-set masses at `t`, or at every atom level when `t` is absent;
    /// with `curve`, the level curves `f^t` instead.
    Levelmass { t: Option<f64>, curve: bool },
    Bandmass { s1: f64, s2: f64 },
    Decompose,
    /// Certificates at `x`; `dense` replaces the spec by the dense-atom
    /// measure with that truncation.
    Nondiff { x: Option<Vec<f64>>, dense: Option<usize> },
    Sample { method: Method },
    /// Approximation sequences with their uniform distances to the target.
    Approx { kinds: Vec<Kind>, steps: Vec<usize> },
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Transform { .. } => "transform",
            Command::Eval { .. } => "eval",
            Command::Kendall => "kendall",
            Command::Levelmass { .. } => "levelmass",
            Command::Bandmass { .. } => "bandmass",
            Command::Decompose => "decompose",
            Command::Nondiff { .. } => "nondiff",
            Command::Sample { .. } => "sample",
            Command::Approx { .. } => "approx",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Spec file, or the name of a bundled spec.
    pub spec: Option<PathBuf>,
    /// Dimension override.
    pub d: Option<usize>,
    /// Output file; standard output when absent.
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Monte-Carlo size.
    pub n: usize,
    /// Grid resolution; each command has its own default.
    pub grid: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_N: usize = 100_000;

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, spec: None, d: None, out: None, seed: DEFAULT_SEED, n: DEFAULT_N, grid: None }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.d {
            if d < 2 {
                return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
            }
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("Monte-Carlo size must be at least 1".into()));
        }
        if let Some(g) = self.grid {
            if g < 2 {
                return Err(Error::InvalidArgument(format!("grid resolution must be at least 2, got {g}")));
            }
        }
        if let Command::Bandmass { s1, s2 } = self.command {
            if !(0.0..=1.0).contains(&s1) || !(0.0..=1.0).contains(&s2) || s1 > s2 {
                return Err(Error::InvalidArgument(format!("band [{s1}, {s2}] must satisfy 0 ≤ s1 ≤ s2 ≤ 1")));
            }
        }
        Ok(())
    }

    pub fn grid_or(&self, default: usize) -> usize {
        self.grid.unwrap_or(default)
    }
}

/// A decimal number or an exact fraction `p/q`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("`{s}` is not a number"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = f64::from_str(p.trim()).map_err(|_| bad())?;
            let q = f64::from_str(q.trim()).map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            Ok(p / q)
        }
        None => f64::from_str(s).ok().filter(|v| v.is_finite()).ok_or_else(bad),
    }
}

/// Comma-separated numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("225/392").unwrap(), 225.0 / 392.0);
        assert_eq!(parse_number(" 0.5 ").unwrap(), 0.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
        assert!(parse_number("inf").is_err());
        assert_eq!(parse_list("0.9,1/2").unwrap(), vec![0.9, 0.5]);
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::new(Command::Kendall);
        assert!(c.validate().is_ok());
        c.d = Some(1);
        assert!(c.validate().is_err());
        c.d = None;
        c.grid = Some(1);
        assert!(c.validate().is_err());
        let band = RunConfig::new(Command::Bandmass { s1: 0.7, s2: 0.2 });
        assert!(band.validate().is_err());
    }
}
