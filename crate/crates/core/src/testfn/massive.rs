//! Smeared pairing with the massive kernel via its angular mode functions.
//!
//! Each mode solves `psi'' + (n^2 + mu^2 R^2 / cos^2 t) psi = 0` in `t = tau/R`
//! and is selected by regularity at the Euclidean pole `t -> -i inf`, where
//! the equation reduces to the free one. The solution is integrated up the
//! imaginary axis to `t = 0` and then along the real line; the Wronskian
//! fixes the normalization, so that
//! `W_alpha = sum_n psi_n(t) conj(psi_n(t')) e^{i n (theta - theta')}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::MassParam;

use super::function::TestFunction;
use super::grid::{row_fft, GridSpec, MeasureGrid};

type State = (Complex64, Complex64);

fn rhs(z: Complex64, y: State, n2: f64, m2: f64) -> State {
    let c = z.cos();
    (y.1, -(n2 + m2 / (c * c)) * y.0)
}

/// RK4 along the straight segment `z0 -> z1`.
fn rk4(y: State, z0: Complex64, z1: Complex64, steps: usize, n2: f64, m2: f64) -> State {
    let dz = (z1 - z0) / steps as f64;
    let mut y = y;
    let mut z = z0;
    let add = |y: State, k: State, s: Complex64| (y.0 + s * k.0, y.1 + s * k.1);
    for _ in 0..steps {
        let k1 = rhs(z, y, n2, m2);
        let k2 = rhs(z + dz / 2.0, add(y, k1, dz / 2.0), n2, m2);
        let k3 = rhs(z + dz / 2.0, add(y, k2, dz / 2.0), n2, m2);
        let k4 = rhs(z + dz, add(y, k3, dz), n2, m2);
        y.0 += dz / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y.1 += dz / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        z += dz;
    }
    y
}

fn max_step(n: u64) -> f64 {
    if n == 0 {
        2e-3
    } else {
        2e-3f64.min(5e-3 / n as f64)
    }
}

fn steps_for(len: f64, n: u64) -> usize {
    ((len / max_step(n)).ceil() as usize).max(1)
}

/// Normalized mode function `psi_n` at the ascending times `ts`
/// (`|t| < pi/2`), for real `m2 = mu^2 R^2 >= 0`.
pub fn mode_function(n: u64, m2: f64, ts: &[f64]) -> Result<Vec<Complex64>> {
    if !(m2 >= 0.0 && m2.is_finite()) {
        return Err(Error::InvalidParameter(format!("mode equation needs real m2 >= 0, got {m2}")));
    }
    if ts.windows(2).any(|w| w[1] < w[0]) || ts.iter().any(|t| t.abs() >= PI / 2.0) {
        return Err(Error::InvalidParameter("times must ascend inside (-pi/2, pi/2)".into()));
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let y_max = if n == 0 { 20.0 } else { 20f64.min(30.0 / nf) };
    let start = Complex64::new(0.0, -y_max);
    let init = (Complex64::new(1.0, 0.0), Complex64::new(0.0, -nf));
    let origin = rk4(init, start, Complex64::new(0.0, 0.0), steps_for(y_max, n), n2, m2);
    let wr = (origin.0 * origin.1.conj()).im;
    if !(wr > 0.0) {
        return Err(Error::Domain {
            what: "mode_function",
            detail: format!("non-positive Wronskian {wr:e} for n = {n}"),
        });
    }
    let scale = 1.0 / (4.0 * PI * wr).sqrt();
    let Some(&first) = ts.first() else {
        return Ok(Vec::new());
    };
    let zero = Complex64::new(0.0, 0.0);
    let mut y = rk4(origin, zero, first.into(), steps_for(first.abs(), n), n2, m2);
    let mut out = Vec::with_capacity(ts.len());
    out.push(y.0 * scale);
    for w in ts.windows(2) {
        y = rk4(y, w[0].into(), w[1].into(), steps_for(w[1] - w[0], n), n2, m2);
        out.push(y.0 * scale);
    }
    Ok(out)
}

fn real_m2(mass: MassParam) -> Result<f64> {
    let m2 = mass.mu2r2();
    if m2.im.abs() > 1e-14 * m2.norm().max(1.0) || m2.re < 0.0 {
        return Err(Error::InvalidParameter(format!("mu^2 R^2 = {m2} is not a real non-negative mass")));
    }
    Ok(m2.re)
}

/// Mode functions sampled at the grid rows.
#[derive(Debug, Clone)]
pub struct MassiveModes {
    grid: GridSpec,
    measure: MeasureGrid,
    /// `psi[j][k]`, `j` in FFT order.
    psi: Vec<Vec<Complex64>>,
}

impl MassiveModes {
    pub fn new(grid: &GridSpec, mass: MassParam) -> Result<Self> {
        let m2 = real_m2(mass)?;
        let ts: Vec<f64> = (0..grid.n_tau).map(|k| grid.tau(k) / grid.r).collect();
        let ns = grid.wavenumbers();
        let max_n = ns.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0);
        let table = (0..=max_n).into_par_iter().map(|n| mode_function(n, m2, &ts)).collect::<Result<Vec<_>>>()?;
        let psi = ns.iter().map(|n| table[n.unsigned_abs() as usize].clone()).collect();
        Ok(Self { grid: *grid, measure: MeasureGrid::new(grid), psi })
    }

    /// `B_n(f) = int conj(psi_n) e^{-i n theta} f`.
    pub fn profile(&self, f: &TestFunction) -> Result<Vec<Complex64>> {
        let g = &self.grid;
        if !g.same_as(f.grid()) {
            return Err(Error::GridMismatch);
        }
        let nq = g.n_theta;
        let spec = row_fft(f.values(), g);
        let mut out = vec![Complex64::new(0.0, 0.0); nq];
        for k in 0..g.n_tau {
            let w = self.measure.row[k];
            for (j, o) in out.iter_mut().enumerate() {
                *o += w * self.psi[j][k].conj() * spec[k * nq + j];
            }
        }
        Ok(out)
    }

    /// `<f, g>_alpha = sum_n conj(B_n f) B_n g`.
    pub fn pair(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    pub fn gram(&self, basis: &[TestFunction]) -> Result<DMatrix<Complex64>> {
        let ps = basis.par_iter().map(|f| self.profile(f)).collect::<Result<Vec<_>>>()?;
        let n = ps.len();
        Ok(DMatrix::from_fn(n, n, |i, j| Self::pair(&ps[i], &ps[j])))
    }
}

pub fn pair_massive(f: &TestFunction, g: &TestFunction, mass: MassParam) -> Result<Complex64> {
    let m = MassiveModes::new(f.grid(), mass)?;
    Ok(MassiveModes::pair(&m.profile(f)?, &m.profile(g)?))
}

pub fn gram_massive(basis: &[TestFunction], mass: MassParam) -> Result<DMatrix<Complex64>> {
    let first = basis.first().ok_or_else(|| Error::InvalidParameter("empty basis".into()))?;
    MassiveModes::new(first.grid(), mass)?.gram(basis)
}
