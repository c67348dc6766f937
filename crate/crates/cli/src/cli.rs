//! Command-line parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use williamson::measure::Kind;
use williamson::sampler::Method;
use williamson::Result;

use crate::config::{self, Command, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "williamson", version, about = "Archimedean copulas from Williamson measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Measure spec file, or the name of a bundled spec.
    #[arg(long, global = true, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    /// Dimension override.
    #[arg(long, global = true, value_name = "INT")]
    pub d: Option<usize>,
    /// Output file; standard output by default.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64", default_value_t = config::DEFAULT_SEED)]
    pub seed: u64,
    /// Monte-Carlo size.
    #[arg(long, global = true, value_name = "INT", default_value_t = config::DEFAULT_N)]
    pub n: usize,
    /// Grid resolution.
    #[arg(long, global = true, value_name = "INT")]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Tabulate ψ, its derivatives and the distribution function of γ.
    Transform {
        /// Largest z of the table.
        #[arg(long)]
        zmax: Option<String>,
    },
    /// Evaluate the copula at points.
    Eval {
        /// Comma-separated point; repeat for several.
        #[arg(long = "x", required = true)]
        points: Vec<String>,
    },
    /// Kendall distribution function in both forms.
    Kendall,
    /// Level-set masses, or level curves with --curve.
    Levelmass {
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        curve: bool,
    },
    /// Mass of the band of levels [s1, s2].
    Bandmass {
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
    },
    /// Masses of the Lebesgue components and the support bands.
    Decompose,
    /// Certified non-differentiability points of the mixed partial.
    Nondiff {
        /// Conditioning point with d-1 coordinates.
        #[arg(long)]
        x: Option<String>,
        /// Use the dense-atom measure with this many atoms instead of --spec.
        #[arg(long)]
        dense: Option<usize>,
    },
    /// Draw a sample.
    Sample {
        #[arg(long, default_value = "radial")]
        method: String,
    },
    /// Approximation sequences and their uniform distances to the target.
    Approx {
        #[arg(long, default_value = "discrete,abs,singular")]
        kinds: String,
        #[arg(long, default_value = "10,100")]
        steps: String,
    },
    /// Run the acceptance suite, or the generic checks for --spec.
    Verify,
}

fn split(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty())
}

fn parse_steps(s: &str) -> Result<Vec<usize>> {
    split(s)
        .map(|p| p.parse().map_err(|_| williamson::Error::InvalidArgument(format!("`{p}` is not a step count"))))
        .collect()
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let opt = |v: Option<String>| v.as_deref().map(config::parse_number).transpose();
        let command = match self.command {
            Sub::Transform { zmax } => Command::Transform { zmax: opt(zmax)? },
            Sub::Eval { points } => Command::Eval { points: points.iter().map(|p| config::parse_list(p)).collect::<Result<_>>()? },
            Sub::Kendall => Command::Kendall,
            Sub::Levelmass { t, curve } => Command::Levelmass { t: opt(t)?, curve },
            Sub::Bandmass { s1, s2 } => Command::Bandmass { s1: config::parse_number(&s1)?, s2: config::parse_number(&s2)? },
            Sub::Decompose => Command::Decompose,
            Sub::Nondiff { x, dense } => Command::Nondiff { x: x.as_deref().map(config::parse_list).transpose()?, dense },
            Sub::Sample { method } => Command::Sample { method: method.parse::<Method>()? },
            Sub::Approx { kinds, steps } => Command::Approx {
                kinds: split(&kinds).map(str::parse::<Kind>).collect::<Result<_>>()?,
                steps: parse_steps(&steps)?,
            },
            Sub::Verify => Command::Verify,
        };
        let g = self.global;
        let cfg = RunConfig { command, spec: g.spec, d: g.d, out: g.out, seed: g.seed, n: g.n, grid: g.grid };
        cfg.validate()?;
        Ok(cfg)
    }
}
