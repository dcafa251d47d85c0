//! Gauss–Legendre rules, dyadic panel refinement and polynomial
//! extrapolation to zero.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre with `panels` equal panels on `[a, b]`.
pub fn composite_gl<F>(f: &F, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in rule.0.iter().zip(&rule.1) {
            acc += *wi * f(mid + 0.5 * h * xi);
        }
    }
    acc * (0.5 * h)
}

/// Dyadic panel refinement until two successive levels agree to `rel_tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    const MAX_LEVEL: u32 = 14;
    let rule = gauss_legendre(20);
    let mut prev = composite_gl(&f, a, b, 1, &rule);
    let mut achieved = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        let cur = composite_gl(&f, a, b, 1 << level, &rule);
        achieved = (cur - prev).norm() / cur.norm().max(1e-300);
        if achieved <= rel_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { achieved, requested: rel_tol })
}

/// Polynomial (Neville) extrapolation of samples `(h_k, v_k)` to `h = 0`.
/// Returns the full tableau diagonal: entry `k` is the extrapolant that uses
/// the first `k + 1` samples.
pub fn neville_to_zero(h: &[f64], v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(h.len(), v.len());
    let n = h.len();
    let mut p = v.to_vec();
    let mut diag = vec![p[0]];
    // after pass m, p[i] interpolates samples i..=i+m
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m]);
        }
        diag.push(p[0]);
    }
    diag
}

/// Extrapolated value with error estimate (difference of the last two
/// extrapolants).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub error: f64,
}

pub fn richardson(h: &[f64], v: &[Complex64]) -> Extrapolated {
    let diag = neville_to_zero(h, v);
    let n = diag.len();
    let error = if n > 1 { (diag[n - 1] - diag[n - 2]).norm() } else { f64::INFINITY };
    Extrapolated { value: diag[n - 1], error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        for k in 0..20 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((s - exact).abs() < 1e-14, "k = {k}: {s}");
        }
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let v = integrate_adaptive(|t| Complex64::new(t.sin().powi(3), 0.0), 0.0, PI, 1e-13).unwrap();
        assert!((v.re - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = integrate_adaptive(|t| Complex64::new(1.0 / t.abs().sqrt().max(1e-300), 0.0), -1.0, 1.0 + 1e-9, 1e-15);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let h: Vec<f64> = (0..4).map(|k| 0.1 / 2f64.powi(k)).collect();
        let v: Vec<Complex64> = h.iter().map(|&e| Complex64::new(2.0 + 3.0 * e - e * e + 0.5 * e * e * e, e)).collect();
        let r = richardson(&h, &v);
        assert!((r.value - Complex64::new(2.0, 0.0)).norm() < 1e-13);
    }
}
