//! The two-dimensional de Sitter hyperboloid, its conformal chart and the
//! proper orthochronous Lorentz group acting on it.
//!
//! Points are stored both in embedding coordinates `(x0, x1, x2)` of the
//! ambient Minkowski space and in the conformal chart `(tau, theta)`:
//!
//! ```text
//! x0 = R tan(tau/R),  x1 = R cos(theta)/cos(tau/R),  x2 = R sin(theta)/cos(tau/R)
//! ds^2 = (dtau^2 - R^2 dtheta^2) / cos^2(tau/R)
//! ```

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// De Sitter radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsParams {
    r: f64,
}

impl DsParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive and finite, got {r}")));
        }
        Ok(Self { r })
    }

    pub fn unit() -> Self {
        Self { r: 1.0 }
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Conformal time of future/past infinity, `pi R / 2`.
    #[inline]
    pub fn tau_infinity(&self) -> f64 {
        FRAC_PI_2 * self.r
    }
}

impl Default for DsParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Ambient Minkowski product with signature (+, -, -).
#[inline]
pub fn minkowski_dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

#[inline]
fn minkowski_dot_c(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

/// Reduce an angle to `[0, 2pi)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Reduce an angle difference to `(-pi, pi]`.
#[inline]
pub fn wrap_signed(theta: f64) -> f64 {
    let t = wrap_angle(theta);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// A real point of the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsPoint {
    tau: f64,
    theta: f64,
    x: [f64; 3],
    r: f64,
}

impl DsPoint {
    pub fn from_conformal(tau: f64, theta: f64, params: &DsParams) -> Result<Self> {
        let r = params.radius();
        if !(tau.is_finite() && theta.is_finite()) || tau.abs() >= params.tau_infinity() {
            return Err(Error::Domain {
                what: "conformal chart",
                detail: format!("tau = {tau} outside (-pi R/2, pi R/2)"),
            });
        }
        let theta = wrap_angle(theta);
        let t = tau / r;
        let c = t.cos();
        let x = [r * t.tan(), r * theta.cos() / c, r * theta.sin() / c];
        Ok(Self { tau, theta, x, r })
    }

    pub fn from_embedding(x: [f64; 3], params: &DsParams) -> Result<Self> {
        let r = params.radius();
        let norm = minkowski_dot(&x, &x);
        if ((norm + r * r) / (r * r)).abs() > 1e-10 {
            return Err(Error::Domain { what: "hyperboloid", detail: format!("x.x = {norm}, expected {}", -r * r) });
        }
        let tau = r * (x[0] / r).atan();
        let theta = wrap_angle(x[2].atan2(x[1]));
        Ok(Self { tau, theta, x, r })
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn embedding(&self) -> [f64; 3] {
        self.x
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.r
    }

    /// The antipodal point `-x`.
    pub fn antipode(&self) -> Self {
        let x = [-self.x[0], -self.x[1], -self.x[2]];
        Self::from_embedding(x, &DsParams { r: self.r }).expect("antipode stays on the hyperboloid")
    }

    /// Complexify by shifting the conformal time, `tau -> tau + i shift`.
    pub fn shifted(&self, shift: f64) -> ComplexDsPoint {
        ComplexDsPoint::from_conformal(Complex64::new(self.tau, shift), self.theta, self.r)
    }

    pub fn to_complex(&self) -> ComplexDsPoint {
        ComplexDsPoint { z: self.x.map(|v| Complex64::new(v, 0.0)), tube: TubeTag::Real }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TubeTag {
    Real,
    /// Imaginary part in the open future cone.
    Forward,
    /// Imaginary part in the open past cone.
    Backward,
    /// Complex point in neither tube.
    Outside,
}

/// A point of the complexified hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDsPoint {
    z: [Complex64; 3],
    tube: TubeTag,
}

impl ComplexDsPoint {
    pub fn new(z: [Complex64; 3], params: &DsParams) -> Result<Self> {
        let r2 = params.radius().powi(2);
        let norm = minkowski_dot_c(&z, &z);
        let scale = r2 + z.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if (norm + r2).norm() > 1e-12 * scale {
            return Err(Error::Domain {
                what: "complex hyperboloid",
                detail: format!("z.z = {norm}, expected {}", -r2),
            });
        }
        Ok(Self { z, tube: classify_tube(&z) })
    }

    /// Complex conformal time, real angle.
    pub fn from_conformal(tau: Complex64, theta: f64, r: f64) -> Self {
        let t = tau / r;
        let c = t.cos();
        let z = [r * t.tan(), r * theta.cos() / c, r * theta.sin() / c];
        Self { z, tube: classify_tube(&z) }
    }

    #[inline]
    pub fn coords(&self) -> [Complex64; 3] {
        self.z
    }

    #[inline]
    pub fn tube(&self) -> TubeTag {
        self.tube
    }
}

fn classify_tube(z: &[Complex64; 3]) -> TubeTag {
    let y = [z[0].im, z[1].im, z[2].im];
    let scale = z.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if y.iter().all(|v| v.abs() <= 1e-15 * scale) {
        return TubeTag::Real;
    }
    let spatial = (y[1] * y[1] + y[2] * y[2]).sqrt();
    if y[0] > spatial {
        TubeTag::Forward
    } else if -y[0] > spatial {
        TubeTag::Backward
    } else {
        TubeTag::Outside
    }
}

/// `lambda = z.z' / R^2`.
pub fn invariant_lambda(z: &ComplexDsPoint, zp: &ComplexDsPoint, params: &DsParams) -> Complex64 {
    minkowski_dot_c(&z.z, &zp.z) / params.radius().powi(2)
}

/// Real-point specialisation of [`invariant_lambda`].
pub fn lambda_real(x: &DsPoint, xp: &DsPoint) -> f64 {
    minkowski_dot(&x.x, &xp.x) / (x.r * x.r)
}

/// Closed form of the invariant in the conformal chart; accepts complex
/// conformal times.
pub fn lambda_conformal(tau: Complex64, theta: f64, taup: Complex64, thetap: f64, r: f64) -> Complex64 {
    let (t, tp) = (tau / r, taup / r);
    (t.sin() * tp.sin() - (theta - thetap).cos()) / (t.cos() * tp.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    Timelike,
    Lightlike,
    Spacelike,
}

/// Classification by the sign of `(x - x')^2 = -2 R^2 (1 + lambda)`.
pub fn causal_class(x: &DsPoint, xp: &DsPoint) -> CausalClass {
    let l = lambda_real(x, xp);
    if (l + 1.0).abs() <= 1e-10 {
        CausalClass::Lightlike
    } else if l < -1.0 {
        CausalClass::Timelike
    } else {
        CausalClass::Spacelike
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    Rotation,
    Boost01,
    Boost02,
}

const J: [f64; 3] = [1.0, -1.0, -1.0];

/// Element of `SO_0(1,2)` as a 3x3 matrix acting on embedding coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    m: [[f64; 3]; 3],
}

impl GroupElement {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        // M^T J M = J
        for i in 0..3 {
            for k in 0..3 {
                let s: f64 = (0..3).map(|j| m[j][i] * J[j] * m[j][k]).sum();
                let target = if i == k { J[i] } else { 0.0 };
                if (s - target).abs() > 1e-12 * (1.0 + max_abs(&m).powi(2)) {
                    return Err(Error::InvalidParameter(format!(
                        "matrix does not preserve the form (entry {i},{k}: {s})"
                    )));
                }
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (det - 1.0).abs() > 1e-10 || m[0][0] <= 0.0 {
            return Err(Error::InvalidParameter(format!("not proper orthochronous: det = {det}, M00 = {}", m[0][0])));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// One-parameter subgroups: rotation by an angle, boosts by a rapidity.
    pub fn generator(kind: GeneratorKind, parameter: f64) -> Self {
        let (c, s) = (parameter.cos(), parameter.sin());
        let (ch, sh) = (parameter.cosh(), parameter.sinh());
        let m = match kind {
            GeneratorKind::Rotation => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            GeneratorKind::Boost01 => [[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]],
            GeneratorKind::Boost02 => [[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]],
        };
        Self { m }
    }

    #[inline]
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|j| self.m[i][j] * other.m[j][k]).sum();
            }
        }
        Self { m }
    }

    /// `J M^T J`.
    pub fn inverse(&self) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = J[i] * self.m[k][i] * J[k];
            }
        }
        Self { m }
    }

    pub fn apply_embedding(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut y = [0.0; 3];
        for (i, v) in y.iter_mut().enumerate() {
            *v = (0..3).map(|j| self.m[i][j] * x[j]).sum();
        }
        y
    }

    pub fn act(&self, x: &DsPoint) -> DsPoint {
        let y = self.apply_embedding(&x.x);
        let r = x.r;
        let tau = r * (y[0] / r).atan();
        let theta = wrap_angle(y[2].atan2(y[1]));
        DsPoint { tau, theta, x: y, r }
    }
}

fn max_abs(m: &[[f64; 3]; 3]) -> f64 {
    m.iter().flatten().fold(0.0_f64, |a, b| a.max(b.abs()))
}

/// Conformal-chart wave operator `cos^2(tau/R) (d_tau^2 - R^-2 d_theta^2)` by
/// 8th-order central differences with step `h` in both directions.
pub fn wave_operator_fd<F>(f: F, tau: f64, theta: f64, r: f64, h: f64) -> Complex64
where
    F: Fn(f64, f64) -> Complex64,
{
    // coefficients of the 9-point second-derivative stencil
    const C: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let mut dtt = C[0] * f(tau, theta);
    let mut dqq = C[0] * f(tau, theta);
    for (k, c) in C.iter().enumerate().skip(1) {
        let s = k as f64 * h;
        dtt += *c * (f(tau + s, theta) + f(tau - s, theta));
        dqq += *c * (f(tau, theta + s) + f(tau, theta - s));
    }
    let c2 = (tau / r).cos().powi(2);
    c2 * (dtt - dqq / (r * r)) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(t: f64, q: f64) -> DsPoint {
        DsPoint::from_conformal(t, q, &DsParams::unit()).unwrap()
    }

    #[test]
    fn hyperboloid_invariant_holds() {
        for &(t, q, r) in &[(0.3, 0.5, 1.0), (-1.4, 5.9, 2.5), (0.0, 0.0, 0.7)] {
            let p = DsParams::new(r).unwrap();
            let x = DsPoint::from_conformal(t * r, q, &p).unwrap();
            let e = x.embedding();
            assert!((minkowski_dot(&e, &e) + r * r).abs() <= 1e-12 * r * r * (1.0 + e[0] * e[0]));
        }
    }

    #[test]
    fn lambda_examples() {
        let x = pt(0.3, 0.5);
        assert!((lambda_real(&x, &x) + 1.0).abs() < 1e-14);
        assert!((lambda_real(&x, &x.antipode()) - 1.0).abs() < 1e-14);

        let xp = pt(-0.2, 1.7);
        let emb = invariant_lambda(&x.to_complex(), &xp.to_complex(), &DsParams::unit());
        let (t, tp) = (0.3_f64, -0.2_f64);
        let closed = (t.sin() * tp.sin() - (0.5_f64 - 1.7).cos()) / (t.cos() * tp.cos());
        assert!((emb.re - closed).abs() < 1e-12);
        assert_eq!(emb.im, 0.0);
    }

    #[test]
    fn causal_examples() {
        assert_eq!(causal_class(&pt(0.0, 0.0), &pt(0.0, 0.0)), CausalClass::Lightlike);
        assert_eq!(causal_class(&pt(0.0, 0.0), &pt(0.0, PI)), CausalClass::Spacelike);
        assert_eq!(causal_class(&pt(0.0, 0.0), &pt(1.2, 0.0)), CausalClass::Timelike);
        let l = lambda_real(&pt(0.0, 0.0), &pt(1.2, 0.0));
        assert!((l + 1.0 / 1.2_f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn rotation_shifts_theta() {
        let x = pt(0.4, 1.0);
        let y = GroupElement::generator(GeneratorKind::Rotation, 0.7).act(&x);
        assert!((y.tau() - 0.4).abs() < 1e-14);
        assert!((y.theta() - 1.7).abs() < 1e-14);
        let z = GroupElement::identity().act(&x);
        assert!((z.tau() - x.tau()).abs() < 1e-15 && (z.theta() - x.theta()).abs() < 1e-15);
    }

    #[test]
    fn boost_preserves_lambda() {
        let g = GroupElement::generator(GeneratorKind::Boost01, 0.7);
        let (x, xp) = (pt(0.1, 0.4), pt(-0.5, 2.0));
        let l0 = lambda_real(&x, &xp);
        let l1 = lambda_real(&g.act(&x), &g.act(&xp));
        assert!((l0 - l1).abs() < 1e-12 * l0.abs().max(1.0));
    }

    #[test]
    fn group_validation() {
        assert!(GroupElement::new(GroupElement::generator(GeneratorKind::Boost02, 1.1).matrix()).is_ok());
        assert!(GroupElement::new([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(GroupElement::new([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(GroupElement::new([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
    }

    #[test]
    fn epsilon_shift_lands_in_tubes() {
        let x = pt(0.9, 2.0);
        assert_eq!(x.shifted(-1e-2).tube(), TubeTag::Backward);
        assert_eq!(x.shifted(1e-2).tube(), TubeTag::Forward);
        assert_eq!(x.to_complex().tube(), TubeTag::Real);
        let z = x.shifted(0.3);
        assert!(ComplexDsPoint::new(z.coords(), &DsParams::unit()).is_ok());
    }

    #[test]
    fn chart_rejects_infinity() {
        assert!(DsPoint::from_conformal(FRAC_PI_2, 0.0, &DsParams::unit()).is_err());
        assert!(DsParams::new(0.0).is_err());
        assert!(DsParams::new(f64::NAN).is_err());
    }

    #[test]
    fn wave_operator_on_lambda() {
        // box lambda = 2 lambda / R^2 for lambda(x, x') with fixed x'
        let r = 1.7;
        let p = DsParams::new(r).unwrap();
        let xp = DsPoint::from_conformal(0.2, 0.3, &p).unwrap();
        let f = |t: f64, q: f64| Complex64::new(lambda_conformal(t.into(), q, xp.tau().into(), xp.theta(), r).re, 0.0);
        let (t, q) = (0.5, 1.9);
        let l = f(t, q).re;
        let bx = wave_operator_fd(f, t, q, r, 1e-2);
        assert!((bx.re - 2.0 * l / (r * r)).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn kind() -> impl Strategy<Value = GeneratorKind> {
            prop_oneof![Just(GeneratorKind::Rotation), Just(GeneratorKind::Boost01), Just(GeneratorKind::Boost02)]
        }

        proptest! {
            #[test]
            fn lambda_is_invariant(t1 in -1.2f64..1.2, q1 in 0.0f64..TAU, t2 in -1.2f64..1.2, q2 in 0.0f64..TAU,
                                   k in kind(), a in -1.0f64..1.0) {
                let g = GroupElement::generator(k, a);
                let (x, y) = (pt(t1, q1), pt(t2, q2));
                let l0 = lambda_real(&x, &y);
                let l1 = lambda_real(&g.act(&x), &g.act(&y));
                prop_assert!((l0 - l1).abs() <= 1e-11 * l0.abs().max(1.0));
            }

            #[test]
            fn one_parameter_subgroups(k in kind(), a in -1.5f64..1.5, b in -1.5f64..1.5) {
                let ab = GroupElement::generator(k, a).compose(&GroupElement::generator(k, b));
                let sum = GroupElement::generator(k, a + b);
                for i in 0..3 { for j in 0..3 {
                    prop_assert!((ab.matrix()[i][j] - sum.matrix()[i][j]).abs() <= 1e-12 * (1.0 + sum.matrix()[i][j].abs()));
                }}
            }

            #[test]
            fn chart_round_trip(t in -1.5f64..1.5, q in 0.0f64..TAU, r in 0.3f64..3.0) {
                let p = DsParams::new(r).unwrap();
                let x = DsPoint::from_conformal(t * r, q, &p).unwrap();
                let y = DsPoint::from_embedding(x.embedding(), &p).unwrap();
                prop_assert!((y.tau() - x.tau()).abs() <= 1e-12 * r);
                prop_assert!(wrap_signed(y.theta() - x.theta()).abs() <= 1e-12);
            }

            #[test]
            fn inverse_undoes(k in kind(), a in -1.5f64..1.5, t in -1.2f64..1.2, q in 0.0f64..TAU) {
                let g = GroupElement::generator(k, a);
                let x = pt(t, q);
                let y = g.inverse().act(&g.act(&x));
                prop_assert!((y.tau() - t).abs() < 1e-11);
                prop_assert!(wrap_signed(y.theta() - x.theta()).abs() < 1e-11);
            }
        }
    }
}
