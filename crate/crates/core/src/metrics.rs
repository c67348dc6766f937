//! Uniform distance between copulas on a regular grid.

use serde::Serialize;

use crate::copula::ArchCopula;
use crate::par::{self, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DinfReport {
    /// `max |A(x) - B(x)|` over the grid `{0, 1/g, …, 1}^d`.
    pub grid_value: f64,
    /// `d/g`: both copulas are 1-Lipschitz in the l1 norm and every point of
    /// the cube is within `d/(2g)` of the grid.
    pub lipschitz_bound: f64,
    pub grid: usize,
    pub d: usize,
}

impl DinfReport {
    /// Guaranteed upper bound on the uniform distance.
    pub fn upper(&self) -> f64 {
        self.grid_value + self.lipschitz_bound
    }
}

/// Grid resolution used when none is given.
pub fn default_grid(d: usize) -> usize {
    match d {
        0..=2 => 256,
        3 => 64,
        _ => 32,
    }
}

/// Uniform distance evaluated at common grid arguments.
pub fn dinf_distance(a: &ArchCopula, b: &ArchCopula, g: usize, exec: Execution) -> Result<DinfReport> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::arg(format!("dimensions differ: {} and {}", d, b.dim())));
    }
    if g < 2 {
        return Err(Error::arg(format!("grid resolution must be at least 2, got {g}")));
    }
    let cells = (g + 1)
        .checked_pow(d as u32)
        .filter(|n| *n <= 1 << 28)
        .ok_or_else(|| Error::arg("grid too large"))?;
    let axis = |c: &ArchCopula| -> Result<Vec<f64>> {
        (0..=g).map(|i| c.generator().phi(i as f64 / g as f64)).collect()
    };
    let (pa, pb) = (axis(a)?, axis(b)?);
    let chunks = par::chunk_ranges(cells);
    let maxima = par::map_indexed(exec, chunks.len(), |c| {
        let mut best: f64 = 0.0;
        for mut idx in chunks[c].clone() {
            let (mut sa, mut sb) = (0.0, 0.0);
            let mut zero = false;
            for _ in 0..d {
                let i = idx % (g + 1);
                idx /= g + 1;
                zero |= i == 0;
                sa += pa[i];
                sb += pb[i];
            }
            if !zero {
                best = best.max((a.cdf_from_sum(sa) - b.cdf_from_sum(sb)).abs());
            }
        }
        best
    });
    Ok(DinfReport {
        grid_value: maxima.into_iter().fold(0.0, f64::max),
        lipschitz_bound: d as f64 / g as f64,
        grid: g,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn self_distance_is_zero() {
        let c = ArchCopula::from_measure(catalog::gapped_mixture()).unwrap();
        let r = dinf_distance(&c, &c, 16, Execution::Sequential).unwrap();
        assert_eq!(r.grid_value, 0.0);
        assert_eq!(r.lipschitz_bound, 2.0 / 16.0);
    }

    #[test]
    fn lower_frechet_against_uniform_generator() {
        let w = ArchCopula::from_measure(catalog::lower_frechet()).unwrap();
        let u = ArchCopula::from_measure(catalog::uniform()).unwrap();
        let r = dinf_distance(&w, &u, 2, Execution::Sequential).unwrap();
        let at_half = u.cdf(&[0.5, 0.5]).unwrap();
        assert!(r.grid_value >= at_half - 1e-15);
        assert!(dinf_distance(&w, &u, 1, Execution::Sequential).is_err());
        assert_eq!(default_grid(2), 256);
        assert_eq!(default_grid(5), 32);
    }
}
