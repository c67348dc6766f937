//! Reference measures with known closed forms.

use std::sync::Arc;

use num_rational::Ratio;

use crate::measure::oracle::DigitMeasure;
use crate::measure::{Atom, DensityPiece, PowerTerm, SingularComponent, WilliamsonMeasure};

fn r(p: i64, q: i64) -> Ratio<i64> {
    Ratio::new(p, q)
}

/// `32/49 δ_{1/8} + 17/49 δ_2` in dimension 3.
pub fn two_atom() -> WilliamsonMeasure {
    let atoms = vec![Atom::exact(r(1, 8), r(32, 49)), Atom::exact(r(2, 1), r(17, 49))];
    WilliamsonMeasure::new(3, atoms, vec![], vec![]).expect("valid measure")
}

/// `2/3 δ_{1/4} + 1/9 λ|[1,2] + 1/9 λ|[3,4] + 1/9 δ_4` in dimension 2.
pub fn gapped_mixture() -> WilliamsonMeasure {
    let atoms = vec![Atom::exact(r(1, 4), r(2, 3)), Atom::exact(r(4, 1), r(1, 9))];
    let pieces = vec![
        DensityPiece::polynomial(1.0, 2.0, vec![1.0 / 9.0]),
        DensityPiece::polynomial(3.0, 4.0, vec![1.0 / 9.0]),
    ];
    WilliamsonMeasure::new(2, atoms, pieces, vec![]).expect("valid measure")
}

/// Atoms `2/3` at `1/4` and `1/8` at `2`, with densities
/// `(t-1)^{-1/2}/24` on `[1,2)` and `(t-2)^{-2/3}/24` on `[2,3)`; dimension 2.
pub fn root_mixture() -> WilliamsonMeasure {
    let atoms = vec![Atom::exact(r(1, 4), r(2, 3)), Atom::exact(r(2, 1), r(1, 8))];
    let root = |anchor: f64, exponent: f64| PowerTerm { coef: 1.0 / 24.0, anchor, exponent };
    let pieces = vec![
        DensityPiece::with_powers(1.0, 2.0, vec![], vec![root(1.0, -0.5)]),
        DensityPiece::with_powers(2.0, 3.0, vec![], vec![root(2.0, -2.0 / 3.0)]),
    ];
    WilliamsonMeasure::new(2, atoms, pieces, vec![]).expect("valid measure")
}

/// `δ_{1/2}` in dimension 2; generates the lower Fréchet bound.
pub fn lower_frechet() -> WilliamsonMeasure {
    WilliamsonMeasure::new(2, vec![Atom::exact(r(1, 2), r(1, 1))], vec![], vec![]).expect("valid measure")
}

/// Uniform distribution on `[0,1]` in dimension 2, the normalization of the
/// uniform law on `[0,2]`.
pub fn uniform() -> WilliamsonMeasure {
    WilliamsonMeasure::new(2, vec![], vec![DensityPiece::polynomial(0.0, 2.0, vec![0.5])], vec![])
        .and_then(|m| m.normalize())
        .expect("valid measure")
}

/// Normalized Cantor measure in dimension 2.
pub fn cantor() -> WilliamsonMeasure {
    let oracle = Arc::new(DigitMeasure::cantor(24));
    WilliamsonMeasure::new(2, vec![], vec![], vec![SingularComponent::new(1.0, 0.0, 1.0, oracle)])
        .and_then(|m| m.normalize())
        .expect("valid measure")
}

/// Every catalog measure with a short name.
pub fn all() -> Vec<(&'static str, WilliamsonMeasure)> {
    vec![
        ("two_atom", two_atom()),
        ("gapped_mixture", gapped_mixture()),
        ("root_mixture", root_mixture()),
        ("lower_frechet", lower_frechet()),
        ("uniform", uniform()),
        ("cantor", cantor()),
    ]
}
