//! Closed-form descriptions of test functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap_signed, GroupElement};
use crate::jet::{Jet2, Taylor1};

use super::grid::{box_discrete, GridSpec, MARGIN};

/// Separable bump `amp * b((tau - tau_c)/w_tau) * b(wrap(theta - theta_c)/w_theta)`
/// with `b(s) = exp(1 - 1/(1 - s^2))` on `|s| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub tau_c: f64,
    pub theta_c: f64,
    pub w_tau: f64,
    pub w_theta: f64,
    pub amp: Complex64,
}

fn profile(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

fn profile_taylor(s0: f64, inv_w: f64, order: usize) -> Taylor1 {
    if s0.abs() >= 1.0 {
        return Taylor1::constant(0.0, order);
    }
    let s = Taylor1::affine(s0, inv_w, order);
    let u = s.mul(&s).scale(-1.0).add_const(1.0);
    u.recip().scale(-1.0).add_const(1.0).exp()
}

impl BumpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_tau > 0.0 && self.w_theta > 0.0 && self.w_theta <= PI) {
            return Err(Error::InvalidParameter(format!(
                "bump widths must satisfy w_tau > 0, 0 < w_theta <= pi (got {}, {})",
                self.w_tau, self.w_theta
            )));
        }
        Ok(())
    }

    pub fn value(&self, tau: f64, theta: f64) -> Complex64 {
        let a = profile((tau - self.tau_c) / self.w_tau);
        if a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.amp * a * profile(wrap_signed(theta - self.theta_c) / self.w_theta)
    }

    pub fn jet(&self, tau: f64, theta: f64, order: usize) -> Jet2 {
        let t = profile_taylor((tau - self.tau_c) / self.w_tau, 1.0 / self.w_tau, order);
        let q = profile_taylor(wrap_signed(theta - self.theta_c) / self.w_theta, 1.0 / self.w_theta, order);
        Jet2::outer(&t, &q, self.amp)
    }
}

/// `(tau, theta)` of `g x` for `x = (tau, theta)`.
pub fn map_conformal(g: &GroupElement, tau: f64, theta: f64, r: f64) -> (f64, f64) {
    let t = tau / r;
    let c = t.cos();
    let x = [r * t.tan(), r * theta.cos() / c, r * theta.sin() / c];
    let y = g.apply_embedding(&x);
    (r * (y[0] / r).atan(), y[2].atan2(y[1]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Bump(BumpSpec),
    Combination(Vec<(Complex64, Generator)>),
    /// Wave operator applied to the inner function. On a grid it is the
    /// discrete operator; pointwise evaluation uses analytic derivatives.
    Laplacian(Box<Generator>),
    /// `x -> inner(g_inv x)`. Only ever wraps closed-form leaves; see
    /// [`Generator::transported`].
    Pullback {
        g_inv: GroupElement,
        inner: Box<Generator>,
    },
}

/// Wave operator on a jet: `cos^2(tau/R) (d_tau^2 - R^-2 d_theta^2)`.
fn box_jet(j: &Jet2, tau: f64, r: f64) -> Jet2 {
    let n = j.order() - 2;
    let mut d = j.d_tau().d_tau().truncate(n);
    d.add_scaled(Complex64::new(-1.0 / (r * r), 0.0), &j.d_theta().d_theta().truncate(n));
    let (_, c) = Taylor1::affine(tau / r, 1.0 / r, n).sin_cos();
    d.mul_tau(&c.mul(&c))
}

impl Generator {
    pub fn bump(spec: BumpSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Generator::Bump(spec))
    }

    pub fn laplacian(self) -> Self {
        Generator::Laplacian(Box::new(self))
    }

    pub fn scaled(self, c: Complex64) -> Self {
        Generator::Combination(vec![(c, self)])
    }

    /// Number of nested wave operators on the deepest branch.
    pub fn laplacian_depth(&self) -> usize {
        match self {
            Generator::Bump(_) => 0,
            Generator::Combination(v) => v.iter().map(|(_, g)| g.laplacian_depth()).max().unwrap_or(0),
            Generator::Laplacian(g) => 1 + g.laplacian_depth(),
            Generator::Pullback { inner, .. } => inner.laplacian_depth(),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Generator::Bump(b) => b.amp.im == 0.0,
            Generator::Combination(v) => v.iter().all(|(c, g)| c.im == 0.0 && g.is_real()),
            Generator::Laplacian(g) => g.is_real(),
            Generator::Pullback { inner, .. } => inner.is_real(),
        }
    }

    /// `alpha_g f`, with pullbacks pushed down to the leaves (the wave
    /// operator commutes with isometries).
    pub fn transported(&self, g: &GroupElement) -> Self {
        let g_inv = g.inverse();
        self.pull(&g_inv)
    }

    fn pull(&self, g_inv: &GroupElement) -> Self {
        match self {
            Generator::Bump(_) => Generator::Pullback { g_inv: *g_inv, inner: Box::new(self.clone()) },
            Generator::Combination(v) => Generator::Combination(v.iter().map(|(c, f)| (*c, f.pull(g_inv))).collect()),
            Generator::Laplacian(f) => Generator::Laplacian(Box::new(f.pull(g_inv))),
            // f(h_inv g_inv x)
            Generator::Pullback { g_inv: h_inv, inner } => {
                Generator::Pullback { g_inv: h_inv.compose(g_inv), inner: inner.clone() }
            }
        }
    }

    /// Pointwise value of `box^m f` from analytic derivatives.
    pub fn analytic_box(&self, m: usize, tau: f64, theta: f64, r: f64) -> Complex64 {
        match self {
            Generator::Bump(b) => {
                let mut j = b.jet(tau, theta, 2 * m);
                for _ in 0..m {
                    j = box_jet(&j, tau, r);
                }
                j.value()
            }
            Generator::Combination(v) => v.iter().map(|(c, f)| c * f.analytic_box(m, tau, theta, r)).sum(),
            Generator::Laplacian(f) => f.analytic_box(m + 1, tau, theta, r),
            Generator::Pullback { g_inv, inner } => {
                let (t, q) = map_conformal(g_inv, tau, theta, r);
                inner.analytic_box(m, t, q, r)
            }
        }
    }

    pub fn analytic_value(&self, tau: f64, theta: f64, r: f64) -> Complex64 {
        self.analytic_box(0, tau, theta, r)
    }

    /// Analytic `tau`-extent of the support (before any discrete spreading);
    /// `None` for the zero function.
    pub fn tau_support(&self, r: f64) -> Option<(f64, f64)> {
        match self {
            Generator::Bump(b) => (b.amp != Complex64::new(0.0, 0.0)).then_some((b.tau_c - b.w_tau, b.tau_c + b.w_tau)),
            Generator::Combination(v) => v
                .iter()
                .filter(|(c, _)| *c != Complex64::new(0.0, 0.0))
                .filter_map(|(_, f)| f.tau_support(r))
                .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1))),
            Generator::Laplacian(f) => f.tau_support(r),
            Generator::Pullback { g_inv, inner } => {
                let Generator::Bump(b) = inner.as_ref() else {
                    return inner.tau_support(r);
                };
                if b.amp == Complex64::new(0.0, 0.0) {
                    return None;
                }
                // the image of the support is bounded by the image of its boundary
                let g = g_inv.inverse();
                let (t0, t1) = (b.tau_c - b.w_tau, b.tau_c + b.w_tau);
                let (q0, q1) = (b.theta_c - b.w_theta, b.theta_c + b.w_theta);
                let n = 512;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut visit = |t: f64, q: f64| {
                    let (tt, _) = map_conformal(&g, t, q, r);
                    lo = lo.min(tt);
                    hi = hi.max(tt);
                };
                for i in 0..=n {
                    let s = i as f64 / n as f64;
                    let q = q0 + s * (q1 - q0);
                    let t = t0 + s * (t1 - t0);
                    visit(t0, q);
                    visit(t1, q);
                    visit(t, q0);
                    visit(t, q1);
                }
                Some((lo, hi))
            }
        }
    }

    /// Samples on the grid. Wave-operator nodes are applied discretely.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<Complex64>> {
        match self {
            Generator::Bump(_) | Generator::Pullback { .. } => {
                let mut v = vec![Complex64::new(0.0, 0.0); grid.len()];
                let support = self.tau_support(grid.r);
                for k in 0..grid.n_tau {
                    let t = grid.tau(k);
                    if let Some((lo, hi)) = support {
                        if t <= lo - 1e-12 || t >= hi + 1e-12 {
                            continue;
                        }
                    } else {
                        break;
                    }
                    for j in 0..grid.n_theta {
                        v[grid.index(k, j)] = self.analytic_value(t, grid.theta(j), grid.r);
                    }
                }
                Ok(v)
            }
            Generator::Combination(parts) => {
                let mut v = vec![Complex64::new(0.0, 0.0); grid.len()];
                for (c, f) in parts {
                    for (a, b) in v.iter_mut().zip(f.sample(grid)?) {
                        *a += c * b;
                    }
                }
                Ok(v)
            }
            Generator::Laplacian(f) => {
                let inner = f.sample(grid)?;
                check_margin(&inner, grid, 2 * MARGIN)?;
                Ok(box_discrete(&inner, grid))
            }
        }
    }
}

/// Error unless `values` vanish on the first and last `rows` rows.
pub fn check_margin(values: &[Complex64], grid: &GridSpec, rows: usize) -> Result<()> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let rows = rows.min(grid.n_tau / 2);
    for k in 0..rows {
        for (kk, boundary) in [(k, "lower"), (grid.n_tau - 1 - k, "upper")] {
            let row = &values[grid.index(kk, 0)..grid.index(kk, 0) + grid.n_theta];
            if row.iter().any(|v| v.norm() > tol) {
                return Err(Error::SupportEscape { boundary, tau: grid.tau(kk) });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{wave_operator_fd, GeneratorKind};

    fn b() -> BumpSpec {
        BumpSpec { tau_c: 0.1, theta_c: 1.0, w_tau: 0.8, w_theta: 2.0, amp: Complex64::new(1.5, -0.5) }
    }

    #[test]
    fn bump_value_and_jet_agree() {
        let s = b();
        let j = s.jet(0.3, 1.7, 3);
        assert!((j.value() - s.value(0.3, 1.7)).norm() < 1e-15);
        let h = 1e-5;
        let fd = (s.value(0.3 + h, 1.7) - s.value(0.3 - h, 1.7)) / (2.0 * h);
        assert!((j.derivative(1, 0) - fd).norm() < 1e-8);
        assert_eq!(s.value(0.95, 1.0), Complex64::new(0.0, 0.0));
        assert_eq!(s.value(0.1, 1.0 + PI), Complex64::new(0.0, 0.0));
        // peak value
        assert!((s.value(0.1, 1.0) - s.amp).norm() < 1e-15);
    }

    #[test]
    fn analytic_box_matches_finite_differences() {
        let g = Generator::Bump(b());
        for r in [1.0, 2.0] {
            let f = |t: f64, q: f64| g.analytic_value(t, q, r);
            let want = wave_operator_fd(f, 0.2, 1.3, r, 1e-3);
            let got = g.clone().laplacian().analytic_value(0.2, 1.3, r);
            assert!((got - want).norm() < 1e-7 * want.norm(), "{got} vs {want}");
        }
    }

    #[test]
    fn pullback_composes() {
        let g = Generator::Bump(b());
        let a = GroupElement::generator(GeneratorKind::Boost01, 0.2);
        let c = GroupElement::generator(GeneratorKind::Rotation, 0.7);
        let two = g.transported(&a).transported(&c);
        let one = g.transported(&c.compose(&a));
        for (t, q) in [(0.0, 0.5), (0.3, 2.0), (-0.4, 1.0)] {
            assert!((two.analytic_value(t, q, 1.0) - one.analytic_value(t, q, 1.0)).norm() < 1e-13);
        }
        // box commutes with the pullback
        let lhs = g.clone().laplacian().transported(&a).analytic_value(0.2, 1.1, 1.0);
        let f = |t: f64, q: f64| g.transported(&a).analytic_value(t, q, 1.0);
        let rhs = wave_operator_fd(f, 0.2, 1.1, 1.0, 1e-3);
        assert!((lhs - rhs).norm() < 1e-7 * rhs.norm().max(1.0));
    }

    #[test]
    fn pullback_support_contains_samples() {
        let g = Generator::Bump(b()).transported(&GroupElement::generator(GeneratorKind::Boost01, 0.3));
        let (lo, hi) = g.tau_support(1.0).unwrap();
        for i in 0..200 {
            let t = -1.3 + 2.6 * i as f64 / 199.0;
            for j in 0..64 {
                let q = j as f64 * 2.0 * PI / 64.0;
                if g.analytic_value(t, q, 1.0).norm() > 0.0 {
                    assert!(t >= lo - 1e-9 && t <= hi + 1e-9);
                }
            }
        }
    }
}
