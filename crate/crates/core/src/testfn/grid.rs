//! Chart grid, invariant measure and the discrete differential operators.
//!
//! All derivatives that feed pairings are discrete and in summation-by-parts
//! form: spectral in `theta`, a symmetric 9-point stencil in `tau`. With test
//! functions vanishing in a 4-cell margin, `sum w (box f) phi = sum w f (box phi)`
//! holds exactly on the grid, which is what keeps the anomaly and the
//! integral of `box f` at rounding level.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Taylor1;

/// Rows at each `tau` end on which test functions must vanish.
pub const MARGIN: usize = 4;

/// 8th-order central stencil for the second derivative.
pub const D2_STENCIL: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Half,
    #[default]
    Default,
    Double,
}

impl Resolution {
    pub fn dims(self) -> (usize, usize) {
        match self {
            Resolution::Half => (48, 64),
            Resolution::Default => (96, 128),
            Resolution::Double => (192, 256),
        }
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(Self::Half),
            "default" => Ok(Self::Default),
            "double" => Ok(Self::Double),
            other => Err(Error::InvalidParameter(format!("unknown resolution {other:?}"))),
        }
    }
}

/// Uniform grid on `[tau_min, tau_max] x [0, 2 pi)`; `tau` nodes include both
/// endpoints, `theta_j = 2 pi j / n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r: f64,
    pub n_theta: usize,
    pub n_tau: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub delta: f64,
}

impl GridSpec {
    pub fn new(r: f64, n_theta: usize, n_tau: usize, tau_min: f64, tau_max: f64, delta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
        }
        if n_theta < 8 || !n_theta.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("n_theta must be even and >= 8, got {n_theta}")));
        }
        if n_tau < 4 * MARGIN + 2 {
            return Err(Error::InvalidParameter(format!("n_tau too small: {n_tau}")));
        }
        let edge = PI * r / 2.0 - delta;
        if !(delta > 0.0) || !(tau_min < tau_max) || tau_min < -edge - 1e-12 || tau_max > edge + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "window [{tau_min}, {tau_max}] must lie inside |tau| <= pi R/2 - delta = {edge}"
            )));
        }
        Ok(Self { r, n_theta, n_tau, tau_min, tau_max, delta })
    }

    /// Symmetric window `|tau| <= 0.8 pi R / 2`, `delta = 0.15 pi R / 2`.
    pub fn standard(r: f64, res: Resolution) -> Result<Self> {
        let (nq, nt) = res.dims();
        Self::with_dims(r, nq, nt)
    }

    pub fn with_dims(r: f64, n_theta: usize, n_tau: usize) -> Result<Self> {
        let half = 0.8 * PI * r / 2.0;
        Self::new(r, n_theta, n_tau, -half, half, 0.15 * PI * r / 2.0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_theta * self.n_tau
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn h_tau(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.n_tau - 1) as f64
    }

    #[inline]
    pub fn h_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    #[inline]
    pub fn tau(&self, k: usize) -> f64 {
        self.tau_min + k as f64 * self.h_tau()
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.h_theta()
    }

    #[inline]
    pub fn index(&self, k: usize, j: usize) -> usize {
        k * self.n_theta + j
    }

    /// `tau` quadrature weight. Uniform: test functions vanish at the
    /// window edges, where the trapezoid rule would halve the weight, and the
    /// wave operator spills into the margin rows where a halved weight would
    /// break the discrete integration by parts.
    pub fn tau_weight(&self, _k: usize) -> f64 {
        self.h_tau()
    }

    /// Closed `tau` interval in which a support must lie.
    pub fn admissible_tau(&self) -> (f64, f64) {
        let m = MARGIN as f64 * self.h_tau();
        (self.tau_min + m, self.tau_max - m)
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<i64> {
        let n = self.n_theta as i64;
        (0..n).map(|j| if j < n / 2 { j } else { j - n }).collect()
    }

    /// `tau` frequency of the discrete massless mode with angular number `n`:
    /// the root of `-D2[e^{i w tau}] = (n/R)^2 e^{i w tau}`.
    pub fn discrete_frequency(&self, n: i64) -> Result<f64> {
        discrete_frequency(n, self.r, self.h_tau())
    }

    pub fn same_as(&self, o: &Self) -> bool {
        self == o
    }
}

/// Symbol `-h^2 D2` of the stencil at `x = w h`.
fn stencil_symbol(x: f64) -> f64 {
    let mut s = D2_STENCIL[0];
    for (k, c) in D2_STENCIL.iter().enumerate().skip(1) {
        s += 2.0 * c * (k as f64 * x).cos();
    }
    -s
}

pub fn discrete_frequency(n: i64, r: f64, h: f64) -> Result<f64> {
    let target = (n as f64 * h / r).powi(2);
    if target == 0.0 {
        return Ok(0.0);
    }
    if target >= stencil_symbol(PI) {
        return Err(Error::Domain {
            what: "discrete_frequency",
            detail: format!("mode {n} is not resolved by the tau grid (n h / R = {})", n as f64 * h / r),
        });
    }
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if stencil_symbol(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) / h)
}

/// Quadrature weights of `d sigma = R / cos^2(tau/R) d tau d theta`:
/// uniform in `tau`, periodic trapezoid in `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureGrid {
    pub grid: GridSpec,
    /// Per-row weight; every point of row `k` carries `row[k]`.
    pub row: Vec<f64>,
}

impl MeasureGrid {
    pub fn new(grid: &GridSpec) -> Self {
        let r = grid.r;
        let row = (0..grid.n_tau)
            .map(|k| grid.tau_weight(k) * grid.h_theta() * r / (grid.tau(k) / r).cos().powi(2))
            .collect();
        Self { grid: *grid, row }
    }

    #[inline]
    pub fn weight(&self, k: usize, _j: usize) -> f64 {
        self.row[k]
    }

    /// Exact `int d sigma` over the window.
    pub fn analytic_volume(&self) -> f64 {
        let g = &self.grid;
        2.0 * PI * g.r * g.r * ((g.tau_max / g.r).tan() - (g.tau_min / g.r).tan())
    }

    /// Sum of the weights plus Euler-Maclaurin end corrections through
    /// `h^8`. The bare trapezoid sum is only second order for the constant
    /// function, which does not vanish at the window edges.
    pub fn corrected_volume(&self) -> f64 {
        const B: [f64; 4] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
        let g = &self.grid;
        let h = g.h_tau();
        let (first, last) = (self.row[0], self.row[g.n_tau - 1]);
        // trapezoid sum: halve the end rows
        let bare: f64 = (self.row.iter().sum::<f64>() - 0.5 * (first + last)) * g.n_theta as f64;
        let sec2 = |tau: f64| {
            let (_, c) = Taylor1::affine(tau / g.r, 1.0 / g.r, 8).sin_cos();
            c.mul(&c).recip().scale(g.r)
        };
        let (a, b) = (sec2(g.tau_min), sec2(g.tau_max));
        let mut corr = 0.0;
        for (m, bm) in B.iter().enumerate() {
            let k = 2 * (m + 1);
            corr += bm / crate::jet::factorial(k) * h.powi(k as i32) * (b.derivative(k - 1) - a.derivative(k - 1));
        }
        bare - 2.0 * PI * corr
    }
}

/// Forward FFT of every `tau` row: `out[k][n] = sum_j v[k][j] e^{-2 pi i j n / N}`.
pub fn row_fft(values: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let mut out = values.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(grid.n_theta);
    fft.process(&mut out);
    out
}

pub fn row_ifft(spectrum: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let mut out = spectrum.to_vec();
    let fft = FftPlanner::new().plan_fft_inverse(grid.n_theta);
    fft.process(&mut out);
    let s = 1.0 / grid.n_theta as f64;
    out.iter_mut().for_each(|v| *v *= s);
    out
}

/// Spectral `theta` derivative of order `order` (1 or 2). The Nyquist mode
/// is dropped for odd orders.
pub fn d_theta(values: &[Complex64], grid: &GridSpec, order: u32) -> Vec<Complex64> {
    let mut spec = row_fft(values, grid);
    let ns = grid.wavenumbers();
    let nyq = grid.n_theta as i64 / 2;
    for k in 0..grid.n_tau {
        for (j, &n) in ns.iter().enumerate() {
            let f = if order % 2 == 1 && n.abs() == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, n as f64).powu(order)
            };
            spec[grid.index(k, j)] *= f;
        }
    }
    row_ifft(&spec, grid)
}

/// Second `tau` derivative with the 9-point stencil; values beyond the grid
/// are taken as zero.
pub fn d2_tau(values: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let (nq, nt) = (grid.n_theta, grid.n_tau);
    let h2 = grid.h_tau().powi(2);
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for k in 0..nt {
        for j in 0..nq {
            let mut s = D2_STENCIL[0] * values[k * nq + j];
            for (m, c) in D2_STENCIL.iter().enumerate().skip(1) {
                if k + m < nt {
                    s += *c * values[(k + m) * nq + j];
                }
                if k >= m {
                    s += *c * values[(k - m) * nq + j];
                }
            }
            out[k * nq + j] = s / h2;
        }
    }
    out
}

/// First `tau` derivative, 8th-order central stencil with zero extension.
pub fn d1_tau(values: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let (nq, nt) = (grid.n_theta, grid.n_tau);
    let h = grid.h_tau();
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for k in 0..nt {
        for j in 0..nq {
            let mut s = Complex64::new(0.0, 0.0);
            for (m, c) in C.iter().enumerate() {
                let m = m + 1;
                if k + m < nt {
                    s += *c * values[(k + m) * nq + j];
                }
                if k >= m {
                    s -= *c * values[(k - m) * nq + j];
                }
            }
            out[k * nq + j] = s / h;
        }
    }
    out
}

/// Discrete wave operator `cos^2(tau/R) (D2_tau - R^-2 D2_theta)`.
pub fn box_discrete(values: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let dtt = d2_tau(values, grid);
    let dqq = d_theta(values, grid, 2);
    let r2 = grid.r * grid.r;
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for k in 0..grid.n_tau {
        let c2 = (grid.tau(k) / grid.r).cos().powi(2);
        for j in 0..grid.n_theta {
            let i = grid.index(k, j);
            out[i] = c2 * (dtt[i] - dqq[i] / r2);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::with_dims(1.0, 95, 128).is_err());
        assert!(GridSpec::with_dims(-1.0, 96, 128).is_err());
        assert!(GridSpec::new(1.0, 96, 128, -1.5, 1.5, 0.2).is_err());
        let g = GridSpec::standard(2.0, Resolution::Default).unwrap();
        assert_eq!((g.n_theta, g.n_tau), (96, 128));
        assert!((g.tau(g.n_tau - 1) - g.tau_max).abs() < 1e-14);
    }

    #[test]
    fn measure_matches_analytic_volume() {
        for r in [1.0, 2.0] {
            for res in [Resolution::Half, Resolution::Default, Resolution::Double] {
                let m = MeasureGrid::new(&GridSpec::standard(r, res).unwrap());
                let exact = m.analytic_volume();
                assert!(m.row.iter().all(|w| *w > 0.0));
                let rel = (m.corrected_volume() - exact).abs() / exact;
                let tol = if res == Resolution::Half { 1e-7 } else { 1e-10 };
                assert!(rel < tol, "R = {r}, {res:?}: {rel:e}");
            }
        }
    }

    #[test]
    fn discrete_frequency_approximates_n_over_r() {
        let g = GridSpec::standard(1.5, Resolution::Default).unwrap();
        for n in [1i64, 5, 20] {
            let w = g.discrete_frequency(n).unwrap();
            let rel = (w * g.r / n as f64 - 1.0).abs();
            assert!(rel < 1e-5, "n = {n}: {rel:e}");
        }
        assert!(g.discrete_frequency(-3).unwrap() > 0.0);
        assert!(discrete_frequency(1000, 1.0, 0.1).is_err());
    }

    #[test]
    fn summation_by_parts_is_exact() {
        let g = GridSpec::with_dims(1.0, 16, 40).unwrap();
        let m = MeasureGrid::new(&g);
        let mut f = vec![Complex64::new(0.0, 0.0); g.len()];
        for k in MARGIN..g.n_tau - MARGIN {
            for j in 0..g.n_theta {
                f[g.index(k, j)] = Complex64::new((k * 7 + j * 3) as f64 % 5.0 - 2.0, (k + j) as f64 % 3.0);
            }
        }
        let bf = box_discrete(&f, &g);
        let total: Complex64 = bf.iter().enumerate().map(|(i, v)| m.row[i / g.n_theta] * v).sum();
        assert!(total.norm() < 1e-9 * bf.iter().map(|v| v.norm()).sum::<f64>() * m.row[g.n_tau / 2]);
    }
}
