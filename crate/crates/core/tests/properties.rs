//! Invariants that hold for every Archimedean copula built here.

use proptest::prelude::*;
use williamson::measure::spec::MeasureSpec;
use williamson::quadrature::Tolerance;
use williamson::{catalog, ArchCopula};

fn copulas() -> Vec<ArchCopula> {
    catalog::all().into_iter().map(|(_, m)| ArchCopula::from_measure(m).unwrap()).collect()
}

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..=1.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn frechet_bounds(x in point(3)) {
        for c in copulas() {
            let x = &x[..c.dim()];
            let v = c.cdf(x).unwrap();
            let upper = x.iter().cloned().fold(1.0, f64::min);
            let lower = (x.iter().sum::<f64>() - (c.dim() as f64 - 1.0)).max(0.0);
            prop_assert!(v <= upper + 1e-12 && v >= lower - 1e-12);
        }
    }

    #[test]
    fn uniform_margins(x in 0.0f64..=1.0, j in 0usize..3) {
        for c in copulas() {
            let mut p = vec![1.0; c.dim()];
            p[j % c.dim()] = x;
            prop_assert!((c.cdf(&p).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn box_masses_nonnegative(a in point(3), b in point(3)) {
        let lo: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p.min(*q)).collect();
        let hi: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p.max(*q)).collect();
        for c in copulas() {
            let d = c.dim();
            prop_assert!(c.corner_mass(&lo[..d], &hi[..d]).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn kernel_is_a_distribution_function(x in 0.01f64..1.0, y1 in 0.0f64..=1.0, y2 in 0.0f64..=1.0) {
        let (lo, hi) = (y1.min(y2), y1.max(y2));
        for c in copulas().into_iter().filter(|c| c.dim() == 2) {
            if let (Ok(a), Ok(b)) = (c.kernel_cdf(&[x], lo), c.kernel_cdf(&[x], hi)) { prop_assert!((0.0..=1.0).contains(&a) && a <= b + 1e-12) }
        }
    }

    #[test]
    fn kendall_is_monotone(t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        for c in copulas() {
            let (a, b) = (c.kendall_cdf(lo).unwrap(), c.kendall_cdf(hi).unwrap());
            prop_assert!(a <= b + 1e-12);
            prop_assert!(c.kendall_cdf_left(lo).unwrap() <= a + 1e-12);
            prop_assert!(lo <= a + 1e-12);
        }
    }

    #[test]
    fn spec_round_trip_on_rationals(
        atoms in proptest::collection::vec((1i64..50, 1i64..50, 1i64..20), 1..5),
        d in 2usize..5,
    ) {
        let body: Vec<String> = atoms.iter().map(|(p, q, w)| format!(r#"{{"q": "{p}/{q}", "mass": "{w}/7"}}"#)).collect();
        let text = format!(r#"{{"dimension": {d}, "atoms": [{}]}}"#, body.join(", "));
        let first = MeasureSpec::from_json(&text).unwrap();
        let json = first.to_json();
        let second = MeasureSpec::from_json(&json).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(json, second.to_json());
    }
}

#[test]
fn box_mass_two_ways_on_grid() {
    let c = ArchCopula::from_measure(catalog::gapped_mixture()).unwrap();
    for lo in [0.0, 0.25, 0.5] {
        for hi in [0.6, 0.8, 1.0] {
            let q = c.box_mass(&[lo, lo], &[hi, hi], Tolerance::default()).unwrap().value;
            assert!((q - c.corner_mass(&[lo, lo], &[hi, hi]).unwrap()).abs() < 1e-7);
        }
    }
}
