//! Dense polynomial helpers, coefficients in ascending order.

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub fn eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `y ↦ p(c + w·y)`.
pub fn compose_affine(p: &[f64], c: f64, w: f64) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0; n];
    for (k, &pk) in p.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        // (c + w y)^k = Σ_j C(k, j) c^{k-j} w^j y^j
        for j in 0..=k {
            out[j] += pk * binomial(k, j) * c.powi((k - j) as i32) * w.powi(j as i32);
        }
    }
    out
}

/// `t^k (1 - z t)^m` expanded in `t`.
pub fn williamson_kernel(k: usize, m: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + m + 1];
    for j in 0..=m {
        out[k + j] = binomial(m, j) * (-z).powi(j as i32);
    }
    out
}

/// `∫_a^b p(t) dt`.
pub fn integrate(p: &[f64], a: f64, b: f64) -> f64 {
    let anti = |x: f64| {
        p.iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (j, &c)| acc * x + c / (j + 1) as f64)
            * x
    };
    anti(b) - anti(a)
}

/// Largest `|p|` reached at a handful of points on `[a, b]`; used only for
/// error bounds, so a coarse sweep is enough.
pub fn sup_abs(p: &[f64], a: f64, b: f64) -> f64 {
    (0..=16)
        .map(|i| eval(p, a + (b - a) * i as f64 / 16.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn composition_matches_direct_evaluation() {
        let p = [1.0, -2.0, 0.5, 3.0];
        let q = compose_affine(&p, 0.7, 1.9);
        for y in [0.0, 0.3, 1.0, -2.0] {
            let direct = eval(&p, 0.7 + 1.9 * y);
            assert!((eval(&q, y) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_expansion() {
        let p = williamson_kernel(1, 2, 0.25);
        let t = 1.5_f64;
        assert!((eval(&p, t) - t * (1.0 - 0.25 * t).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn integrates_cubic() {
        // ∫_0^2 (1 + t^3) dt = 2 + 4
        assert!((integrate(&[1.0, 0.0, 0.0, 1.0], 0.0, 2.0) - 6.0).abs() < 1e-14);
    }
}
