//! Local form of the charge at the two-point level.
//!
//! `u(x) = int W0(x, x') g(x') d sigma(x')` is evaluated from the mode
//! expansion of the kernel, which gives `u` and its derivatives in closed
//! form at any point. The one-form
//!
//! ```text
//! omega = -R d_tau u d theta - R^-1 d_theta u d tau + kappa tan(tau/R) c0 d theta,   c0 = int g,
//! ```
//!
//! is the metric dual of `du` plus the correction that compensates the
//! constant source of `box u`; it is closed for `kappa = -1/(4 pi)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelConvention;
use crate::quadrature::gauss_legendre;
use crate::testfn::grid::D2_STENCIL;
use crate::testfn::pairing::{Dispersion, ModeBasis};
use crate::testfn::{integral, GridSpec, TestFunction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficient of the `tan(tau/R) c0 d theta` correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaConvention {
    /// `-1/(4 pi)`: the value that closes the form for every `R`.
    #[default]
    Derived,
    /// `-1/(4 pi R)`: agrees with the derived value only at `R = 1`.
    Paper,
}

impl KappaConvention {
    pub fn kappa(self, r: f64) -> f64 {
        match self {
            KappaConvention::Derived => -1.0 / (4.0 * PI),
            KappaConvention::Paper => -1.0 / (4.0 * PI * r),
        }
    }
}

impl std::str::FromStr for KappaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Self::Derived),
            "paper" => Ok(Self::Paper),
            _ => Err(Error::InvalidParameter(format!("unknown kappa convention '{s}' (derived|paper)"))),
        }
    }
}

/// Tensor grid on which `u` and the one-form are tabulated.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub r: f64,
    pub taus: Vec<f64>,
    pub n_theta: usize,
}

impl EvalGrid {
    /// `n_tau` uniform slices over `[tau_min, tau_max]`.
    pub fn new(r: f64, tau_min: f64, tau_max: f64, n_tau: usize, n_theta: usize) -> Result<Self> {
        if n_tau < 2 || n_theta < 4 || !(tau_min < tau_max) || tau_min.abs().max(tau_max.abs()) >= PI * r / 2.0 {
            return Err(Error::InvalidParameter("evaluation grid must be non-degenerate and inside the chart".into()));
        }
        let h = (tau_max - tau_min) / (n_tau - 1) as f64;
        Ok(Self { r, taus: (0..n_tau).map(|k| tau_min + k as f64 * h).collect(), n_theta })
    }

    /// The test-function window shrunk by its margin, `n_theta` of the grid.
    pub fn interior(grid: &GridSpec, n_tau: usize) -> Result<Self> {
        let (a, b) = grid.admissible_tau();
        Self::new(grid.r, a, b, n_tau, grid.n_theta)
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn h_tau(&self) -> f64 {
        self.taus[1] - self.taus[0]
    }

    pub fn len(&self) -> usize {
        self.taus.len() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, k: usize, j: usize) -> usize {
        k * self.n_theta + j
    }
}

/// A solution of the smeared field equation in closed form:
///
/// ```text
/// u = sum b e^{i n theta - i s |n| tau / R} + alpha ln cos t + beta t + gamma,   t = tau / R.
/// ```
#[derive(Debug, Clone)]
pub struct SmearedField {
    pub r: f64,
    /// `int g`, the coefficient of the anomalous source.
    pub c0: Complex64,
    /// `(n, s, b)` with frequency sign `s = +-1`.
    modes: Vec<(i64, f64, Complex64)>,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
}

/// Derivatives of `u` at a point.
#[derive(Debug, Clone, Copy)]
pub struct FieldJet {
    pub u: Complex64,
    pub u_tau: Complex64,
    pub u_theta: Complex64,
    pub u_tau_tau: Complex64,
    pub u_theta_theta: Complex64,
}

impl SmearedField {
    pub fn jet(&self, tau: f64, theta: f64) -> FieldJet {
        let r = self.r;
        let t = tau / r;
        let z = Complex64::new(0.0, 0.0);
        let mut j = FieldJet { u: z, u_tau: z, u_theta: z, u_tau_tau: z, u_theta_theta: z };
        for &(n, s, b) in &self.modes {
            let w = s * n.unsigned_abs() as f64 / r;
            let nf = n as f64;
            let e = b * Complex64::from_polar(1.0, nf * theta - w * tau);
            j.u += e;
            j.u_tau += -I * w * e;
            j.u_theta += I * nf * e;
            j.u_tau_tau += -w * w * e;
            j.u_theta_theta += -nf * nf * e;
        }
        let (tan, sec2) = (t.tan(), 1.0 / t.cos().powi(2));
        j.u += self.alpha * t.cos().ln() + self.beta * t + self.gamma;
        j.u_tau += (-self.alpha * tan + self.beta) / r;
        j.u_tau_tau += -self.alpha * sec2 / (r * r);
        j
    }

    pub fn value(&self, tau: f64, theta: f64) -> Complex64 {
        self.jet(tau, theta).u
    }

    /// Closed-form `box u`.
    pub fn box_value(&self, tau: f64, theta: f64) -> Complex64 {
        let j = self.jet(tau, theta);
        (tau / self.r).cos().powi(2) * (j.u_tau_tau - j.u_theta_theta / (self.r * self.r))
    }

    /// `(omega_tau, omega_theta)`; `kappa = None` drops the correction.
    pub fn one_form(&self, tau: f64, theta: f64, kappa: Option<KappaConvention>) -> (Complex64, Complex64) {
        let r = self.r;
        let j = self.jet(tau, theta);
        let corr = kappa.map_or(0.0, |k| k.kappa(r)) * (tau / r).tan();
        (-j.u_theta / r, -r * j.u_tau + corr * self.c0)
    }

    pub fn tabulate(&self, eval: &EvalGrid) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(eval.len());
        for &t in &eval.taus {
            for j in 0..eval.n_theta {
                out.push(self.value(t, eval.theta(j)));
            }
        }
        out
    }

    /// `self - conj(other)`.
    fn minus_conjugate(&self, other: &SmearedField) -> SmearedField {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().map(|&(n, s, b)| (-n, -s, -b.conj())));
        SmearedField {
            r: self.r,
            c0: self.c0 - other.c0.conj(),
            modes,
            alpha: self.alpha - other.alpha.conj(),
            beta: self.beta - other.beta.conj(),
            gamma: self.gamma - other.gamma.conj(),
        }
    }
}

/// `u` for the massless two-point function smeared with `g`.
pub fn smear(g: &TestFunction, conv: KernelConvention) -> Result<SmearedField> {
    let grid = g.grid();
    let mb = ModeBasis::with_options(grid, conv, Dispersion::Continuum, 0.0)?;
    let p = mb.profile(g)?;
    let modes = grid
        .wavenumbers()
        .into_iter()
        .zip(p.modes)
        .skip(1)
        .map(|(n, a)| (n, 1.0, a / (4.0 * PI * n.unsigned_abs() as f64).sqrt()))
        .collect();
    let k = 1.0 / (4.0 * PI);
    Ok(SmearedField {
        r: grid.r,
        c0: integral(g),
        modes,
        alpha: k * p.integral,
        beta: -I * k * p.integral,
        gamma: k * (conv.zero_mode_constant() * p.integral + p.log_moment),
    })
}

/// The same construction with the commutator function
/// `W(x, x') - W(x', x)` in place of `W`:
/// `u_C = u_g - conj(u_{conj g})`. Its source `c0` vanishes.
pub fn smear_commutator(g: &TestFunction, conv: KernelConvention) -> Result<SmearedField> {
    let a = smear(g, conv)?;
    let conj_vals: Vec<Complex64> = g.values().iter().map(|v| v.conj()).collect();
    let b = smear(&TestFunction::from_values(g.grid(), conj_vals)?, conv)?;
    Ok(a.minus_conjugate(&b))
}

/// Tabulated one-form.
#[derive(Debug, Clone)]
pub struct OneFormGrid {
    pub eval: EvalGrid,
    pub w_tau: Vec<Complex64>,
    pub w_theta: Vec<Complex64>,
}

pub fn corrected_current(sf: &SmearedField, eval: &EvalGrid, kappa: Option<KappaConvention>) -> OneFormGrid {
    let mut w_tau = Vec::with_capacity(eval.len());
    let mut w_theta = Vec::with_capacity(eval.len());
    for &t in &eval.taus {
        for j in 0..eval.n_theta {
            let (a, b) = sf.one_form(t, eval.theta(j), kappa);
            w_tau.push(a);
            w_theta.push(b);
        }
    }
    OneFormGrid { eval: eval.clone(), w_tau, w_theta }
}

/// Spectral `theta` derivative of every row of a tabulated function.
fn d_theta_rows(v: &[Complex64], eval: &EvalGrid) -> Vec<Complex64> {
    let n = eval.n_theta;
    let mut planner = FftPlanner::new();
    let (fwd, inv) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    let mut out = v.to_vec();
    for row in out.chunks_mut(n) {
        fwd.process(row);
        for (j, c) in row.iter_mut().enumerate() {
            let m = if j < n / 2 {
                j as f64
            } else if j == n / 2 {
                0.0
            } else {
                j as f64 - n as f64
            };
            *c *= I * m / n as f64;
        }
        inv.process(row);
    }
    out
}

/// 8th-order `tau` derivative of order 1 or 2 at interior row `k`.
fn d_tau_at(v: &[Complex64], eval: &EvalGrid, k: usize, j: usize, order: u32) -> Complex64 {
    const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let h = eval.h_tau();
    let at = |kk: usize| v[eval.index(kk, j)];
    match order {
        1 => D1.iter().enumerate().map(|(m, c)| *c * (at(k + m + 1) - at(k - m - 1))).sum::<Complex64>() / h,
        _ => {
            let mut s = D2_STENCIL[0] * at(k);
            for (m, c) in D2_STENCIL.iter().enumerate().skip(1) {
                s += *c * (at(k + m) + at(k - m));
            }
            s / (h * h)
        }
    }
}

/// Rows at which the 9-point stencils fit.
fn interior_rows(eval: &EvalGrid) -> std::ops::Range<usize> {
    4..eval.taus.len().saturating_sub(4)
}

impl OneFormGrid {
    /// `max |d_tau omega_theta - d_theta omega_tau|` over interior rows and
    /// the scale `max |d_tau omega_theta|` it should be compared with.
    pub fn closure_residual(&self) -> (f64, f64) {
        let e = &self.eval;
        let dq = d_theta_rows(&self.w_tau, e);
        let (mut res, mut scale) = (0.0f64, 0.0f64);
        for k in interior_rows(e) {
            for j in 0..e.n_theta {
                let dt = d_tau_at(&self.w_theta, e, k, j, 1);
                res = res.max((dt - dq[e.index(k, j)]).norm());
                scale = scale.max(dt.norm());
            }
        }
        (res, scale)
    }

    /// `J(tau_k) = -(1/8 pi) oint omega_theta d theta` per row.
    pub fn slice_charges(&self) -> Vec<Complex64> {
        let n = self.eval.n_theta;
        self.w_theta.chunks(n).map(|row| -row.iter().sum::<Complex64>() * (2.0 * PI / n as f64) / (8.0 * PI)).collect()
    }
}

/// Max deviation from the mean, relative to the mean.
pub fn relative_spread(js: &[Complex64]) -> f64 {
    let mean = js.iter().sum::<Complex64>() / js.len() as f64;
    let dev = js.iter().fold(0.0f64, |m, j| m.max((j - mean).norm()));
    if mean.norm() == 0.0 {
        dev
    } else {
        dev / mean.norm()
    }
}

/// `J` on the given constant-`tau` slices.
pub fn slice_charge(sf: &SmearedField, taus: &[f64], n_theta: usize, kappa: Option<KappaConvention>) -> Vec<Complex64> {
    taus.iter()
        .map(|&t| {
            let s: Complex64 =
                (0..n_theta).map(|j| sf.one_form(t, 2.0 * PI * j as f64 / n_theta as f64, kappa).1).sum();
            -s * (2.0 * PI / n_theta as f64) / (8.0 * PI)
        })
        .collect()
}

/// `(max |d(du)* - box u dvol|, scale)` on the evaluation grid, with
/// `d(du)* = -(R d_tau^2 u - R^-1 d_theta^2 u) dtau dtheta` from stencils
/// and `dvol = R / cos^2 dtau dtheta`.
pub fn divergence_identity(sf: &SmearedField, eval: &EvalGrid) -> (f64, f64) {
    let r = sf.r;
    let u = sf.tabulate(eval);
    let mut uqq = d_theta_rows(&u, eval);
    uqq = d_theta_rows(&uqq, eval);
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    for k in interior_rows(eval) {
        let t = eval.taus[k];
        for j in 0..eval.n_theta {
            let d = -(r * d_tau_at(&u, eval, k, j, 2) - uqq[eval.index(k, j)] / r);
            let rhs = -sf.box_value(t, eval.theta(j)) * r / (t / r).cos().powi(2);
            res = res.max((d - rhs).norm());
            scale = scale.max(rhs.norm()).max(d.norm());
        }
    }
    (res, scale)
}

/// Line integral of the one-form along a polyline of `(tau, theta)`
/// vertices, Gauss-Legendre on each segment.
pub fn path_integral(sf: &SmearedField, path: &[(f64, f64)], kappa: Option<KappaConvention>) -> Result<Complex64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter("path needs two vertices".into()));
    }
    let (xs, ws) = gauss_legendre(24);
    let mut acc = Complex64::new(0.0, 0.0);
    for seg in path.windows(2) {
        let ((t0, q0), (t1, q1)) = (seg[0], seg[1]);
        let len = ((t1 - t0).powi(2) + (q1 - q0).powi(2)).sqrt();
        let pieces = ((len / 0.1).ceil() as usize).max(1);
        for p in 0..pieces {
            let (a, b) = (p as f64 / pieces as f64, (p + 1) as f64 / pieces as f64);
            for (x, w) in xs.iter().zip(&ws) {
                let s = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let (t, q) = (t0 + s * (t1 - t0), q0 + s * (q1 - q0));
                let (wt, wq) = sf.one_form(t, q, kappa);
                acc += 0.5 * (b - a) * w * (wt * (t1 - t0) + wq * (q1 - q0));
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct DualField {
    pub eval: EvalGrid,
    /// Potential on the grid cut at `theta = base.1`, i.e. with `theta` in
    /// `[base.1, base.1 + 2 pi)`.
    pub potential: Vec<Complex64>,
    /// `oint dphi~` around the `theta` loop at the base slice.
    pub winding: Complex64,
    /// Largest magnitude, along the grid, of the exact term
    /// `-(1/4 pi) (ln cos t - ln cos t_base)` per unit `phi~(v0)` that the
    /// potential omits; it has no loop integral.
    pub dropped_term_max: f64,
}

/// Integrate the closed form from `base`: first along `tau` at fixed
/// `theta`, then along `theta`.
pub fn dual_field(sf: &SmearedField, eval: &EvalGrid, base: (f64, f64), kappa: KappaConvention) -> Result<DualField> {
    let k = Some(kappa);
    let (t0, q0) = base;
    let mut potential = Vec::with_capacity(eval.len());
    let mut dropped = 0.0f64;
    for &t in &eval.taus {
        let leg =
            if (t - t0).abs() > 0.0 { path_integral(sf, &[(t0, q0), (t, q0)], k)? } else { Complex64::new(0.0, 0.0) };
        dropped = dropped.max(((t / sf.r).cos().ln() - (t0 / sf.r).cos().ln()).abs() / (4.0 * PI));
        for j in 0..eval.n_theta {
            let q = q0 + eval.theta(j);
            let arc = if j == 0 { Complex64::new(0.0, 0.0) } else { path_integral(sf, &[(t, q0), (t, q)], k)? };
            potential.push(leg + arc);
        }
    }
    let winding = path_integral(sf, &[(t0, q0), (t0, q0 + 2.0 * PI)], k)?;
    Ok(DualField { eval: eval.clone(), potential, winding, dropped_term_max: dropped })
}

/// CSV with columns `tau,J_real,J_imag,spread`.
pub fn conservation_csv(taus: &[f64], js: &[Complex64]) -> String {
    let spread = relative_spread(js);
    let mut s = String::from("tau,J_real,J_imag,spread\n");
    for (t, j) in taus.iter().zip(js) {
        let _ = writeln!(s, "{t:.17e},{:.17e},{:.17e},{spread:.17e}", j.re, j.im);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DsParams, DsPoint};
    use crate::testfn::{bump, laplace_beltrami, Resolution};

    fn setup(r: f64) -> (GridSpec, TestFunction) {
        let g = GridSpec::standard(r, Resolution::Default).unwrap();
        let p = DsPoint::from_conformal(0.1 * r, 2.0, &DsParams::new(r).unwrap()).unwrap();
        let f = bump(&g, &p, (0.6 * r, 1.5), 1.3.into()).unwrap();
        (g, f)
    }

    fn slices(g: &GridSpec) -> Vec<f64> {
        let (a, b) = g.admissible_tau();
        (0..8).map(|k| a + (b - a) * (k as f64 + 0.5) / 8.0).collect()
    }

    #[test]
    fn smeared_field_satisfies_anomalous_equation() {
        for r in [1.0, 2.0] {
            let (_, f) = setup(r);
            let sf = smear(&f, KernelConvention::SeriesLimit).unwrap();
            let want = -sf.c0 / (4.0 * PI * r * r);
            for (t, q) in [(0.0, 0.0), (0.3 * r, 2.0), (-0.8 * r, 4.0), (0.9 * r, 1.0)] {
                assert!((sf.box_value(t, q) - want).norm() < 1e-10 * want.norm());
            }
        }
    }

    #[test]
    fn field_matches_direct_pairing() {
        // u(x) ~ <delta_x, g>: compare the smeared value at a point with the
        // mode-sum kernel integrated against g by quadrature
        let (g, f) = setup(1.0);
        let conv = KernelConvention::SeriesLimit;
        let sf = smear(&f, conv).unwrap();
        let m = crate::testfn::MeasureGrid::new(&g);
        // spacelike to the whole support, where the kernel is smooth
        let (tx, qx) = (0.1, 2.0 + PI);
        let mut direct = Complex64::new(0.0, 0.0);
        let eps = 0.0;
        for k in 0..g.n_tau {
            for j in 0..g.n_theta {
                let v = f.at(k, j);
                if v != Complex64::new(0.0, 0.0) {
                    let l = crate::geometry::lambda_conformal(
                        Complex64::new(tx, -eps),
                        qx,
                        Complex64::new(g.tau(k), eps),
                        g.theta(j),
                        1.0,
                    );
                    direct += m.row[k] * crate::kernels::massless_w(l, conv).unwrap() * v;
                }
            }
        }
        assert!((sf.value(tx, qx) - direct).norm() < 1e-6 * direct.norm(), "{} vs {direct}", sf.value(tx, qx));
    }

    #[test]
    fn derived_kappa_closes_and_conserves() {
        for r in [1.0, 2.0] {
            let (g, f) = setup(r);
            let sf = smear(&f, KernelConvention::SeriesLimit).unwrap();
            let eval = EvalGrid::interior(&g, 97).unwrap();
            let (res, scale) = corrected_current(&sf, &eval, Some(KappaConvention::Derived)).closure_residual();
            assert!(res <= 1e-4 * scale, "R={r}: {res:e} / {scale:e}");
            let js = slice_charge(&sf, &slices(&g), g.n_theta * 2, Some(KappaConvention::Derived));
            assert!(relative_spread(&js) < 1e-10);
            let want = -I * sf.c0 / (16.0 * PI);
            assert!((js[0] - want).norm() < 1e-12 * want.norm());
            // negative control
            let bare = slice_charge(&sf, &slices(&g), g.n_theta * 2, None);
            assert!(relative_spread(&bare) > 1e-3);
            // paper kappa closes only at R = 1
            let (res_p, _) = corrected_current(&sf, &eval, Some(KappaConvention::Paper)).closure_residual();
            if r == 1.0 {
                assert!(res_p <= 1e-4 * scale);
            } else {
                assert!(res_p > 1e-2 * scale);
            }
        }
    }

    #[test]
    fn zero_integral_smearing() {
        let (g, f) = setup(1.0);
        let z = laplace_beltrami(&f).unwrap();
        let sf = smear(&z, KernelConvention::SeriesLimit).unwrap();
        assert!(sf.c0.norm() < 1e-12);
        for (t, q) in [(0.0, 0.0), (0.5, 2.0)] {
            assert!(sf.box_value(t, q).norm() < 1e-12);
        }
        let eval = EvalGrid::interior(&g, 65).unwrap();
        let d = dual_field(&sf, &eval, (0.0, 0.0), KappaConvention::Derived).unwrap();
        assert!(d.winding.norm() < 1e-10);
    }

    #[test]
    fn divergence_of_dual_is_box() {
        let (g, f) = setup(1.0);
        let sf = smear(&f, KernelConvention::SeriesLimit).unwrap();
        let eval = EvalGrid::interior(&g, 129).unwrap();
        let (res, scale) = divergence_identity(&sf, &eval);
        assert!(res <= 1e-4 * scale, "{res:e} / {scale:e}");
    }

    #[test]
    fn winding_and_path_independence() {
        let (g, f) = setup(1.0);
        let sf = smear(&f, KernelConvention::SeriesLimit).unwrap();
        let k = KappaConvention::Derived;
        let eval = EvalGrid::interior(&g, 17).unwrap();
        let d = dual_field(&sf, &eval, (-0.5, 0.3), k).unwrap();
        let j = slice_charge(&sf, &[-0.5, 0.7], 192, Some(k));
        for jj in &j {
            assert!((d.winding + 8.0 * PI * jj).norm() < 1e-4 * d.winding.norm());
        }
        let a = path_integral(&sf, &[(-0.5, 0.3), (0.6, 0.3), (0.6, 2.9)], Some(k)).unwrap();
        let b = path_integral(&sf, &[(-0.5, 0.3), (-0.5, 2.9), (0.6, 2.9)], Some(k)).unwrap();
        assert!((a - b).norm() < 1e-6 * a.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn commutator_calibration() {
        let (_, f) = setup(1.0);
        let sc = smear_commutator(&f, KernelConvention::SeriesLimit).unwrap();
        assert_eq!(sc.c0, Complex64::new(0.0, 0.0));
        let js = slice_charge(&sc, &[-0.4, 0.0, 0.6], 192, None);
        let want = -I * integral(&f) / (8.0 * PI);
        for j in js {
            assert!((j - want).norm() < 1e-10 * want.norm(), "{j} vs {want}");
        }
    }

    #[test]
    fn csv_layout() {
        let s = conservation_csv(&[0.0, 1.0], &[Complex64::new(1.0, 2.0), Complex64::new(1.0, 2.0)]);
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "tau,J_real,J_imag,spread");
        assert_eq!(lines.len(), 3);
    }
}
