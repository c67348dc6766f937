//! Williamson measures and the d-dimensional Archimedean copulas they generate.
//!
//! A copula is built from a finite measure `γ` on `(0, ∞)` through the
//! Williamson d-transform
//!
//! ```text
//! ψ(z) = ∫ (1 - t z)_+^{d-1} dγ(t)
//! ```
//!
//! and `C(x) = ψ(φ(x_1) + … + φ(x_d))`. Measures are represented
//! structurally (atoms, piecewise densities, self-similar singular parts), so
//! every integral the copula needs reduces to a closed-form Stieltjes
//! integral of a polynomial.
//!
//! Module map:
//!
//! - [`measure`]: the measure model, normalization, approximation sequences
//! - [`generator`]: `ψ`, its derivatives, one-sided derivatives, `φ`
//! - [`copula`]: copula values, Markov kernel, level sets, Kendall function
//! - [`decomposition`]: kernel splitting and component masses
//! - [`derivative`]: non-differentiability points and their certification
//! - [`sampler`]: radial and conditional-inversion samplers
//! - [`metrics`]: uniform distance between copulas on a grid
//! - [`stats`]: Kolmogorov–Smirnov, DKW and empirical sup bounds
//! - [`catalog`]: ready-made measures used in tests and examples
//! - [`quadrature`]: adaptive Gauss–Kronrod integration
//! - [`par`]: rayon execution with a sequential fallback and seeded substreams

pub mod catalog;
pub mod copula;
pub mod decomposition;
pub mod derivative;
mod error;
pub mod generator;
pub mod measure;
pub mod metrics;
pub mod par;
pub mod quadrature;
pub mod sampler;
pub mod stats;

pub use copula::ArchCopula;
pub use error::{Error, Result};
pub use generator::Generator;
pub use measure::WilliamsonMeasure;
