//! Smeared two-point pairing `<f, g> = int int conj(f) W0 g`.
//!
//! The massless kernel is expanded in angular modes,
//!
//! ```text
//! W0 = sum_{n != 0} e^{-i|n|(t - t')} e^{i n (theta - theta')} / (4 pi |n|)
//!      + (1/4pi) (c + ln cos t + ln cos t' - i (t - t')),      t = tau / R,
//! ```
//!
//! which is the boundary value of the closed form with the first time moved
//! to `tau - i0` and the second to `tau' + i0`. Pairings then reduce to
//! per-function profiles and never touch the coincident singularity. On the
//! grid the mode frequencies are the roots of the discrete dispersion
//! relation, so that the pairing and the discrete wave operator satisfy
//! `<f, box g> = -(1/4 pi R^2) conj(int f) int g` to rounding (apart from
//! the `O(h^8)` stencil error in `D2 ln cos`).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{lambda_conformal, DsPoint};
use crate::kernels::{massless_w, KernelConvention};

use super::function::{integral, laplace_beltrami, TestFunction};
use super::generator::{BumpSpec, Generator};
use super::grid::{row_fft, GridSpec, MeasureGrid, MARGIN};

/// Which `tau` frequency the `n`-th angular mode carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispersion {
    /// Root of the discrete dispersion relation of the 9-point stencil.
    #[default]
    Discrete,
    /// `|n| / R`.
    Continuum,
}

/// Mode data for one grid, kernel convention and imaginary time shift.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    grid: GridSpec,
    conv: KernelConvention,
    eps: f64,
    measure: MeasureGrid,
    wavenumbers: Vec<i64>,
    omega: Vec<f64>,
}

/// Everything a function contributes to a pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    /// `A_n`, FFT order; the `n = 0` slot is unused.
    pub modes: Vec<Complex64>,
    /// `int f`.
    pub integral: Complex64,
    /// `int f (ln cos(t + i eps/R) + i t)`.
    pub log_moment: Complex64,
}

impl ModeBasis {
    pub fn new(grid: &GridSpec, conv: KernelConvention) -> Result<Self> {
        Self::with_options(grid, conv, Dispersion::Discrete, 0.0)
    }

    /// `eps > 0` pairs with the kernel at `tau - i eps`, `tau' + i eps`
    /// instead of its boundary value.
    pub fn with_options(grid: &GridSpec, conv: KernelConvention, dispersion: Dispersion, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
        }
        let wavenumbers = grid.wavenumbers();
        let omega = wavenumbers
            .iter()
            .map(|&n| match dispersion {
                Dispersion::Discrete => grid.discrete_frequency(n),
                Dispersion::Continuum => Ok(n.unsigned_abs() as f64 / grid.r),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: *grid, conv, eps, measure: MeasureGrid::new(grid), wavenumbers, omega })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn convention(&self) -> KernelConvention {
        self.conv
    }

    pub fn profile(&self, f: &TestFunction) -> Result<Profile> {
        let g = &self.grid;
        if !g.same_as(f.grid()) {
            return Err(Error::GridMismatch);
        }
        let nq = g.n_theta;
        let spec = row_fft(f.values(), g);
        let mut modes = vec![Complex64::new(0.0, 0.0); nq];
        let mut i0 = Complex64::new(0.0, 0.0);
        let mut p0 = Complex64::new(0.0, 0.0);
        let shift = Complex64::new(0.0, self.eps / g.r);
        for k in 0..g.n_tau {
            let row = &spec[k * nq..(k + 1) * nq];
            if row.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
                continue;
            }
            let w = self.measure.row[k];
            let tau = g.tau(k);
            let t = tau / g.r;
            i0 += w * row[0];
            p0 += w * row[0] * ((shift + t).cos().ln() + Complex64::new(0.0, t));
            for j in 1..nq {
                let om = self.omega[j];
                let phase = Complex64::from_polar((-om * self.eps).exp(), om * tau);
                modes[j] += w * phase * row[j];
            }
        }
        for (m, n) in modes.iter_mut().zip(&self.wavenumbers).skip(1) {
            *m /= (4.0 * PI * n.unsigned_abs() as f64).sqrt();
        }
        Ok(Profile { modes, integral: i0, log_moment: p0 })
    }

    /// Zero-mode constant including the `-2 eps / R` of the shifted times.
    fn zero_constant(&self) -> f64 {
        self.conv.zero_mode_constant() - 2.0 * self.eps / self.grid.r
    }

    pub fn pair(&self, a: &Profile, b: &Profile) -> Complex64 {
        let oscill: Complex64 = a.modes.iter().zip(&b.modes).skip(1).map(|(x, y)| x.conj() * y).sum();
        let zero = self.zero_constant() * a.integral.conj() * b.integral
            + a.integral.conj() * b.log_moment
            + a.log_moment.conj() * b.integral;
        oscill + zero / (4.0 * PI)
    }

    /// Gram matrix `G_ij = <f_i, f_j>`.
    pub fn gram(&self, profiles: &[Profile]) -> DMatrix<Complex64> {
        let n = profiles.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            g[(i, i)] = Complex64::new(self.pair(&profiles[i], &profiles[i]).re, 0.0);
            for j in i + 1..n {
                let v = self.pair(&profiles[i], &profiles[j]);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    pub fn profiles(&self, fs: &[TestFunction]) -> Result<Vec<Profile>> {
        fs.par_iter().map(|f| self.profile(f)).collect()
    }
}

/// `<f, g>` with the massless kernel.
pub fn pair_indef(f: &TestFunction, g: &TestFunction, conv: KernelConvention) -> Result<Complex64> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let m = ModeBasis::new(f.grid(), conv)?;
    Ok(m.pair(&m.profile(f)?, &m.profile(g)?))
}

/// Gram matrix of the massless pairing over `basis`.
pub fn gram_indef(basis: &[TestFunction], conv: KernelConvention) -> Result<DMatrix<Complex64>> {
    let first = basis.first().ok_or_else(|| Error::InvalidParameter("empty basis".into()))?;
    let m = ModeBasis::new(first.grid(), conv)?;
    Ok(m.gram(&m.profiles(basis)?))
}

/// Position-space double sum of `conj(f) W0(x_eps, x'_eps) g` with the
/// closed-form kernel at `tau - i eps`, `tau' + i eps`. Independent of the
/// mode expansion; accurate once `eps` is several grid spacings.
pub fn pair_indef_regularized(
    f: &TestFunction,
    g: &TestFunction,
    eps: f64,
    conv: KernelConvention,
) -> Result<Complex64> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let grid = *f.grid();
    let m = MeasureGrid::new(&grid);
    let support = |v: &TestFunction| -> Vec<(f64, f64, Complex64)> {
        let mut out = Vec::new();
        for k in 0..grid.n_tau {
            for j in 0..grid.n_theta {
                let x = v.at(k, j);
                if x != Complex64::new(0.0, 0.0) {
                    out.push((grid.tau(k), grid.theta(j), m.row[k] * x));
                }
            }
        }
        out
    };
    let (fs, gs) = (support(f), support(g));
    fs.par_iter()
        .map(|&(t, q, fv)| {
            let tc = Complex64::new(t, -eps);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(tp, qp, gv) in &gs {
                let l = lambda_conformal(tc, q, Complex64::new(tp, eps), qp, grid.r);
                acc += massless_w(l, conv)? * gv;
            }
            Ok(fv.conj() * acc)
        })
        .sum::<Result<Complex64>>()
}

/// Massless kernel from its mode sum, truncated at `|n| <= n_max`, with the
/// times already shifted into the tube.
pub fn massless_mode_sum(
    tau: Complex64,
    theta: f64,
    taup: Complex64,
    thetap: f64,
    r: f64,
    conv: KernelConvention,
    n_max: u32,
) -> Complex64 {
    let (t, tp) = (tau / r, taup / r);
    let u = t - tp;
    let phi = theta - thetap;
    let mut s = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        let nf = n as f64;
        s += (Complex64::new(0.0, -nf) * u).exp() * 2.0 * (nf * phi).cos() / nf;
    }
    let zero = conv.zero_mode_constant() + t.cos().ln() + tp.cos().ln() - Complex64::new(0.0, 1.0) * u;
    (s + zero) / (4.0 * PI)
}

/// Result of [`construct_h`].
#[derive(Debug, Clone)]
pub struct HConstruction {
    pub h: TestFunction,
    /// Normalized seed bump.
    pub h1: TestFunction,
    pub beta: f64,
    /// `2 pi R^2 <h1, h1>`, from the anomaly alone.
    pub beta_closed: f64,
    /// Measured `<h1, box h1>`.
    pub cross: Complex64,
    pub h1_norm: f64,
    /// `<h, h>` after correction.
    pub residual: f64,
}

/// Shape of the seed bump used for `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HParams {
    pub w_tau: f64,
    pub w_theta: f64,
    pub conv: KernelConvention,
}

impl Default for HParams {
    fn default() -> Self {
        Self { w_tau: 0.75, w_theta: 2.5, conv: KernelConvention::default() }
    }
}

/// Number of wave operators that will still be applied to `h` downstream
/// (`v0 = -4 pi R^2 box h` with `h` itself containing one).
const H_DEPTH: usize = 2;

/// Real `h` with `int h = 1` and `<h, h> = 0`: `h = h1 + beta box h1` for a
/// normalized bump `h1`, with `beta` solving the quadratic (which is linear
/// because `<box g, box g> = 0`).
pub fn construct_h(grid: &GridSpec, seed_center: &DsPoint, params: &HParams) -> Result<HConstruction> {
    let r = grid.r;
    let (w_tau, w_theta) = (params.w_tau * r, params.w_theta);
    let spread = (H_DEPTH * MARGIN) as f64 * grid.h_tau();
    let (a, b) = grid.admissible_tau();
    let (lo, hi) = (seed_center.tau() - w_tau, seed_center.tau() + w_tau);
    if lo - spread < a {
        return Err(Error::SupportEscape { boundary: "lower", tau: lo });
    }
    if hi + spread > b {
        return Err(Error::SupportEscape { boundary: "upper", tau: hi });
    }
    let spec = BumpSpec { tau_c: seed_center.tau(), theta_c: seed_center.theta(), w_tau, w_theta, amp: 1.0.into() };
    let raw = TestFunction::from_generator(grid, Generator::bump(spec)?)?;
    let norm = integral(&raw);
    let h1 = TestFunction::from_generator(grid, Generator::bump(BumpSpec { amp: (1.0 / norm.re).into(), ..spec })?)?;
    let box_h1 = laplace_beltrami(&h1)?;

    let modes = ModeBasis::new(grid, params.conv)?;
    let (p1, pb) = (modes.profile(&h1)?, modes.profile(&box_h1)?);
    let h1_norm = modes.pair(&p1, &p1).re;
    let cross = modes.pair(&p1, &pb);
    if cross.re.abs() < 1e-12 {
        return Err(Error::Degenerate(format!("cross term <h1, box g> = {cross}")));
    }
    let beta = -h1_norm / (2.0 * cross.re);
    let beta_closed = 2.0 * PI * r * r * h1_norm;
    let h = TestFunction::combination(&[(1.0.into(), &h1), (beta.into(), &box_h1)])?;

    let ih = integral(&h);
    if (ih - 1.0).norm() > 1e-9 {
        return Err(Error::NotNormalized(format!("int h = {ih}")));
    }
    let ph = modes.profile(&h)?;
    let residual = modes.pair(&ph, &ph).re;
    if residual.abs() > 1e-7 * h1_norm.abs().max(1.0) {
        return Err(Error::Degenerate(format!("<h, h> = {residual:e} after correction")));
    }
    Ok(HConstruction { h, h1, beta, beta_closed, cross, h1_norm, residual })
}

/// Real function with `<f, f> = -1`: `f = h1 + s box h1` with
/// `s = 2 pi R^2 (<h1, h1> + 1)`. Its integral is that of `h1`, namely 1.
pub fn negative_witness(hc: &HConstruction) -> Result<TestFunction> {
    let r = hc.h1.grid().r;
    let s = 2.0 * PI * r * r * (hc.h1_norm + 1.0);
    let b = laplace_beltrami(&hc.h1)?;
    TestFunction::combination(&[(1.0.into(), &hc.h1), (s.into(), &b)])
}
