//! Approximation sequences of a fixed Lebesgue type.
//!
//! For a target `γ` and `n ≥ 1` the sequence element is
//! `normalize((1 - 1/n) γ_n + (1/n) β)`, where `γ_n` is a purely typed
//! approximation of `γ` and `β` is a measure of the same type whose support
//! is as wide as the representation allows.

use std::sync::Arc;

use num_rational::Ratio;

use super::oracle::{CdfOracle, DigitMeasure};
use super::{Atom, DensityPiece, Kind, SingularComponent, WilliamsonMeasure};
use crate::{Error, Result};

/// Number of enumerated rationals in the discrete approximant.
pub const DENSE_POINTS: usize = 64;
/// Right end of the absolutely continuous and singular approximants.
pub const APPROXIMANT_RANGE: f64 = 8.0;
/// Depth used for every singular component created here.
pub const SINGULAR_DEPTH: u32 = 24;
/// Digit probability of the fully supported singular tiles.
pub const TILE_DIGIT_P: f64 = 1.0 / 3.0;

#[derive(Debug, Clone)]
pub struct Approximation {
    pub measure: WilliamsonMeasure,
    pub kind: Kind,
    pub n: usize,
    /// The mixture contains the full-support approximant with positive weight.
    pub full_support_by_construction: bool,
}

/// Breadth-first Stern–Brocot enumeration of the positive rationals:
/// `1, 1/2, 2, 1/3, 2/3, 3/2, 3, 1/4, …`.
pub fn stern_brocot(count: usize) -> Vec<Ratio<i64>> {
    let mut out = Vec::with_capacity(count);
    // Each entry is a node's (left bound, right bound) pair as (p, q) tuples.
    let mut row = vec![((0i64, 1i64), (1i64, 0i64))];
    while out.len() < count {
        let mut next = Vec::with_capacity(2 * row.len());
        for &(l, r) in &row {
            let m = (l.0 + r.0, l.1 + r.1);
            out.push(Ratio::new(m.0, m.1));
            if out.len() == count {
                break;
            }
            next.push((l, m));
            next.push((m, r));
        }
        row = next;
    }
    out
}

/// `count` Stern–Brocot points carrying masses proportional to `weight(i)`.
pub fn enumerated_atoms(count: usize, weight: impl Fn(usize) -> f64) -> Vec<Atom> {
    let points = stern_brocot(count);
    let total: f64 = (0..count).map(&weight).sum();
    let mut atoms: Vec<Atom> = points
        .iter()
        .enumerate()
        .map(|(i, q)| Atom::new(super::ratio_f64(*q), weight(i) / total))
        .collect();
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    atoms
}

/// The full-support approximant of the given type.
pub fn approximant(kind: Kind, dimension: usize) -> Result<WilliamsonMeasure> {
    match kind {
        Kind::Discrete => {
            let atoms = enumerated_atoms(DENSE_POINTS, |i| 0.5f64.powi(i as i32 + 1));
            WilliamsonMeasure::new(dimension, atoms, vec![], vec![])
        }
        Kind::Abs => {
            let cells = 64;
            let h = APPROXIMANT_RANGE / cells as f64;
            let heights: Vec<f64> = (0..cells).map(|k| (-(k as f64 + 0.5) * h).exp()).collect();
            let total: f64 = heights.iter().sum::<f64>() * h;
            let pieces = heights
                .iter()
                .enumerate()
                .map(|(k, v)| DensityPiece::polynomial(k as f64 * h, (k + 1) as f64 * h, vec![v / total]))
                .collect();
            WilliamsonMeasure::new(dimension, vec![], pieces, vec![])
        }
        Kind::Singular => {
            let tiles = APPROXIMANT_RANGE as usize;
            let oracle: Arc<dyn CdfOracle> = Arc::new(DigitMeasure::bernoulli(TILE_DIGIT_P, 40));
            let weights: Vec<f64> = (0..tiles).map(|k| (-(k as f64 + 0.5)).exp()).collect();
            let total: f64 = weights.iter().sum();
            let singular = weights
                .iter()
                .enumerate()
                .map(|(k, w)| SingularComponent::new(w / total, k as f64, 1.0, oracle.clone()))
                .collect();
            WilliamsonMeasure::new(dimension, vec![], vec![], singular)
        }
    }
}

fn discretized(target: &WilliamsonMeasure, n: usize) -> Result<WilliamsonMeasure> {
    let levels = 16 * n;
    let mut atoms: Vec<Atom> = Vec::with_capacity(levels);
    for i in 0..levels {
        let q = target.quantile((i as f64 + 0.5) / levels as f64).max(f64::MIN_POSITIVE);
        match atoms.last_mut() {
            Some(a) if a.location == q => a.mass += 1.0 / levels as f64,
            _ => atoms.push(Atom::new(q, 1.0 / levels as f64)),
        }
    }
    WilliamsonMeasure::new(target.dimension(), atoms, vec![], vec![])
}

fn smoothed(target: &WilliamsonMeasure, n: usize) -> Result<WilliamsonMeasure> {
    let width = 1.0 / n as f64;
    let mut pieces: Vec<DensityPiece> = target
        .atoms()
        .iter()
        .map(|a| DensityPiece::polynomial(a.location, a.location + width, vec![a.mass / width]))
        .collect();
    pieces.extend(target.pieces().iter().cloned());
    for s in target.singular() {
        let cells = (s.scale * n as f64).ceil().max(1.0) as usize;
        let h = s.scale / cells as f64;
        for k in 0..cells {
            let (a, b) = (s.offset + k as f64 * h, s.offset + (k + 1) as f64 * h);
            let mass = s.cdf(b) - s.cdf(a);
            if mass > 0.0 {
                pieces.push(DensityPiece::polynomial(a, b, vec![mass / h]));
            }
        }
    }
    WilliamsonMeasure::new(target.dimension(), vec![], super::merge_pieces(pieces), vec![])
}

fn singularized(target: &WilliamsonMeasure, n: usize) -> Result<WilliamsonMeasure> {
    let width = 1.0 / n as f64;
    let cantor: Arc<dyn CdfOracle> = Arc::new(DigitMeasure::cantor(SINGULAR_DEPTH));
    let mut singular: Vec<SingularComponent> = target
        .atoms()
        .iter()
        .map(|a| SingularComponent::new(a.mass, a.location, width, cantor.clone()))
        .collect();
    for p in target.pieces() {
        let cells = ((p.to() - p.from()) * n as f64).ceil().max(1.0) as usize;
        let h = (p.to() - p.from()) / cells as f64;
        for k in 0..cells {
            let a = p.from() + k as f64 * h;
            let mass = p.integrate_poly(&[1.0], a, a + h);
            if mass > 0.0 {
                singular.push(SingularComponent::new(mass, a, h, cantor.clone()));
            }
        }
    }
    singular.extend(target.singular().iter().cloned());
    WilliamsonMeasure::new(target.dimension(), vec![], vec![], singular)
}

pub fn approximation_sequence(target: &WilliamsonMeasure, kind: Kind, n: usize) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::arg("approximation index n must be at least 1"));
    }
    let typed = match kind {
        Kind::Discrete => discretized(target, n)?,
        Kind::Abs => smoothed(target, n)?,
        Kind::Singular => singularized(target, n)?,
    };
    let beta = approximant(kind, target.dimension())?;
    let w = 1.0 / n as f64;
    let mixed = WilliamsonMeasure::mixture(&[(1.0 - w, &typed), (w, &beta)])?;
    Ok(Approximation {
        measure: mixed.normalize()?,
        kind,
        n,
        full_support_by_construction: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn stern_brocot_order() {
        let got: Vec<String> = stern_brocot(7).iter().map(|r| r.to_string()).collect();
        assert_eq!(got, ["1", "1/2", "2", "1/3", "2/3", "3/2", "3"]);
        let mut all = stern_brocot(DENSE_POINTS);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), DENSE_POINTS);
    }

    #[test]
    fn approximants_are_pure_and_ungapped() {
        for kind in [Kind::Discrete, Kind::Abs, Kind::Singular] {
            let b = approximant(kind, 2).unwrap();
            assert_eq!(b.lebesgue_components().pure_kind(), Some(kind));
        }
        let abs = approximant(Kind::Abs, 2).unwrap();
        let g = abs.support_gaps();
        assert!(g.interior.is_empty() && g.leading.is_none());
        assert_eq!(g.right_end, 8.0);
        let sing = approximant(Kind::Singular, 2).unwrap();
        assert!(sing.support_gaps().interior.is_empty());
    }

    #[test]
    fn sequence_kinds() {
        let target = catalog::two_atom();
        let a = approximation_sequence(&target, Kind::Abs, 4).unwrap();
        let c = a.measure.lebesgue_components();
        assert_eq!((c.abs, c.dis, c.sing), (1.0, 0.0, 0.0));
        assert!(a.measure.is_normalized(1e-12));
        let g = catalog::gapped_mixture();
        for kind in [Kind::Discrete, Kind::Singular] {
            let s = approximation_sequence(&g, kind, 10).unwrap();
            assert_eq!(s.measure.lebesgue_components().pure_kind(), Some(kind));
        }
        assert!(approximation_sequence(&g, Kind::Abs, 0).is_err());
    }

    #[test]
    fn discrete_closure() {
        let beta = approximant(Kind::Discrete, 2).unwrap().normalize().unwrap();
        let s = approximation_sequence(&beta, Kind::Discrete, 10).unwrap();
        assert_eq!(s.measure.lebesgue_components().pure_kind(), Some(Kind::Discrete));
        assert!(s.full_support_by_construction);
    }
}
