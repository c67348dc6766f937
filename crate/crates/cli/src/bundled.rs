//! Measure specs shipped with the binary.

use williamson::measure::spec::MeasureSpec;
use williamson::{Result, WilliamsonMeasure};

/// `(name, json)` for every bundled spec.
pub const SPECS: [(&str, &str); 6] = [
    ("two_atom", include_str!("../specs/two_atom.json")),
    ("gapped_mixture", include_str!("../specs/gapped_mixture.json")),
    ("root_mixture", include_str!("../specs/root_mixture.json")),
    ("lower_frechet", include_str!("../specs/lower_frechet.json")),
    ("uniform", include_str!("../specs/uniform.json")),
    ("cantor", include_str!("../specs/cantor.json")),
];

pub fn text(name: &str) -> Option<&'static str> {
    SPECS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn spec(name: &str) -> Option<Result<MeasureSpec>> {
    text(name).map(MeasureSpec::from_json)
}

/// The bundled measure, normalized.
pub fn measure(name: &str) -> Option<Result<WilliamsonMeasure>> {
    spec(name).map(|s| s.and_then(|s| s.build()).and_then(|m| m.normalize()))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SPECS.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use williamson::catalog;

    #[test]
    fn bundled_specs_match_catalog() {
        for (name, reference) in catalog::all() {
            let m = measure(name).expect("bundled").expect("valid");
            assert_eq!(m.dimension(), reference.dimension());
            for z in [0.05, 0.2, 0.5, 1.0, 2.0, 5.0] {
                let (a, b) = (m.williamson_transform(z), reference.williamson_transform(z));
                assert!((a - b).abs() < 1e-12, "{name} at {z}: {a} vs {b}");
            }
        }
        assert!(text("missing").is_none());
    }
}
