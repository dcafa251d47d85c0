//! Truncated Fock representation over a finite one-particle Krein space:
//! ladder operators, fields, the charge and its gauge unitary, the
//! multiplicative metric and the physical-state projector.
//!
//! States are occupation vectors with total occupation at most `N`. The
//! ladder algebra `[b_i, b_j^+] = delta_ij` is exact on states with total
//! occupation at most `N - 1`; every identity below is therefore checked
//! only on a protected sector, see [`FockRep::sector_norm`].

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::KreinFrame;

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct FockRep {
    pub n_modes: usize,
    pub max_particles: usize,
    states: Vec<Vec<usize>>,
    totals: Vec<usize>,
    lower: Vec<CMat>,
    raise: Vec<CMat>,
}

fn enumerate(n_modes: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n_modes];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_total, &mut cur, &mut out);
    // sort by total occupation so that sectors are contiguous
    out.sort_by_key(|s| (s.iter().sum::<usize>(), std::cmp::Reverse(s.clone())));
    out
}

impl FockRep {
    pub fn new(n_modes: usize, max_particles: usize) -> Result<Self> {
        if n_modes == 0 || max_particles < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least one mode and a cutoff >= 3, got {n_modes} modes, N = {max_particles}"
            )));
        }
        let states = enumerate(n_modes, max_particles);
        let index: HashMap<Vec<usize>, usize> = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let totals: Vec<usize> = states.iter().map(|s| s.iter().sum()).collect();
        let dim = states.len();
        let mut lower = vec![CMat::zeros(dim, dim); n_modes];
        for (col, s) in states.iter().enumerate() {
            for (m, low) in lower.iter_mut().enumerate() {
                if s[m] > 0 {
                    let mut t = s.clone();
                    t[m] -= 1;
                    low[(index[&t], col)] = Complex64::new((s[m] as f64).sqrt(), 0.0);
                }
            }
        }
        let raise = lower.iter().map(|l| l.adjoint()).collect();
        Ok(Self { n_modes, max_particles, states, totals, lower, raise })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn occupation(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn lowering(&self, i: usize) -> &CMat {
        &self.lower[i]
    }

    pub fn raising(&self, i: usize) -> &CMat {
        &self.raise[i]
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.dim(), self.dim())
    }

    /// Frobenius norm of `op` restricted to input states with total
    /// occupation at most `level` (and all outputs).
    pub fn sector_norm(&self, op: &CMat, level: usize) -> f64 {
        let mut s = 0.0;
        for (col, &t) in self.totals.iter().enumerate() {
            if t <= level {
                s += op.column(col).norm_squared();
            }
        }
        s.sqrt()
    }

    /// Multiplicative extension `Gamma(M)`: `b_i^+ -> sum_j M_ji b_j^+`.
    pub fn second_quantize(&self, m: &CMat) -> Result<CMat> {
        if m.nrows() != self.n_modes || m.ncols() != self.n_modes {
            return Err(Error::Dimension { expected: self.n_modes, got: m.nrows() });
        }
        let created: Vec<CMat> = (0..self.n_modes)
            .map(|i| {
                (0..self.n_modes).fold(CMat::zeros(self.dim(), self.dim()), |acc, j| acc + &self.raise[j] * m[(j, i)])
            })
            .collect();
        let mut out = CMat::zeros(self.dim(), self.dim());
        for (col, s) in self.states.iter().enumerate() {
            let mut v = self.vacuum();
            let mut norm = 1.0;
            for (i, &n) in s.iter().enumerate() {
                for k in 1..=n {
                    v = &created[i] * v;
                    norm *= k as f64;
                }
            }
            out.set_column(col, &(v / Complex64::new(norm.sqrt(), 0.0)));
        }
        Ok(out)
    }
}

/// One-particle space in a Krein-orthonormal frame: the indefinite pairing
/// is `<x, y> = x^H eta y`.
#[derive(Debug, Clone)]
pub struct OneParticleSpace {
    pub eta: CMat,
    pub v0: CVec,
    pub h: CVec,
}

impl OneParticleSpace {
    pub fn from_frame(frame: &KreinFrame) -> Self {
        let n = frame.dim();
        let e = |i: usize| {
            let mut v = CVec::zeros(n);
            v[i] = Complex64::new(1.0, 0.0);
            v
        };
        Self { eta: frame.eta.clone(), v0: e(KreinFrame::V0), h: e(KreinFrame::H) }
    }

    pub fn dim(&self) -> usize {
        self.eta.nrows()
    }

    pub fn pair(&self, x: &CVec, y: &CVec) -> Complex64 {
        (x.adjoint() * &self.eta * y)[(0, 0)]
    }

    /// `int f = <v0, f>`.
    pub fn integral(&self, x: &CVec) -> Complex64 {
        self.pair(&self.v0, x)
    }

    /// Orthogonal projector onto `{x : <v0, x> = 0}`.
    pub fn physical_projector(&self) -> CMat {
        let w = &self.eta * &self.v0;
        let n = self.dim();
        CMat::identity(n, n) - (&w * w.adjoint()) / Complex64::new(w.norm_squared(), 0.0)
    }
}

/// Fock space over a one-particle Krein space.
#[derive(Debug, Clone)]
pub struct FockSystem {
    pub rep: FockRep,
    pub space: OneParticleSpace,
    /// `Gamma(eta)`.
    pub eta_fock: CMat,
}

/// `[a, b]`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

impl FockSystem {
    pub fn new(space: OneParticleSpace, max_particles: usize) -> Result<Self> {
        let rep = FockRep::new(space.dim(), max_particles)?;
        let eta_fock = rep.second_quantize(&space.eta)?;
        Ok(Self { rep, space, eta_fock })
    }

    fn check(&self, f: &CVec) -> Result<()> {
        if f.len() != self.space.dim() {
            return Err(Error::Dimension { expected: self.space.dim(), got: f.len() });
        }
        Ok(())
    }

    /// `a^+(f) = sum f_i b_i^+`.
    pub fn creation(&self, f: &CVec) -> Result<CMat> {
        self.check(f)?;
        Ok(f.iter()
            .enumerate()
            .fold(self.rep.identity() * Complex64::new(0.0, 0.0), |acc, (i, c)| acc + self.rep.raising(i) * *c))
    }

    /// `a(f) = sum conj((eta f)_i) b_i`, so that `[a(f), a^+(g)] = <f, g>`.
    pub fn annihilation(&self, f: &CVec) -> Result<CMat> {
        self.check(f)?;
        let ef = &self.space.eta * f;
        Ok(ef
            .iter()
            .enumerate()
            .fold(self.rep.identity() * Complex64::new(0.0, 0.0), |acc, (i, c)| acc + self.rep.lowering(i) * c.conj()))
    }

    pub fn field(&self, f: &CVec) -> Result<CMat> {
        Ok(self.creation(f)? + self.annihilation(f)?)
    }

    /// `phi_+(v0) = a^+(v0) / 2`.
    pub fn phi_plus(&self) -> CMat {
        self.creation(&self.space.v0).expect("v0 has the space dimension") * Complex64::new(0.5, 0.0)
    }

    /// `phi_-(v0) = a(v0) / 2`.
    pub fn phi_minus(&self) -> CMat {
        self.annihilation(&self.space.v0).expect("v0 has the space dimension") * Complex64::new(0.5, 0.0)
    }

    /// `Q = i k (a^+(v0) - a(v0))`.
    pub fn charge(&self, normalization: f64) -> CMat {
        let v = &self.space.v0;
        let d = self.creation(v).expect("dim") - self.annihilation(v).expect("dim");
        d * (I * normalization)
    }

    /// The `k` for which `[Q, phi(f)] = -i int f`, read off the vacuum
    /// matrix element for the probe `f` (which needs `int f != 0`).
    pub fn calibrate_charge(&self, f: &CVec) -> Result<f64> {
        let c = commutator(&self.charge(1.0), &self.field(f)?);
        let vac = self.rep.vacuum();
        let m = (vac.adjoint() * &c * &vac)[(0, 0)];
        let want = -I * self.space.integral(f);
        if m.norm() < 1e-14 || want.norm() < 1e-14 {
            return Err(Error::Degenerate("charge calibration needs a probe with nonzero integral".into()));
        }
        let k = want / m;
        if k.im.abs() > 1e-8 * k.norm() {
            return Err(Error::Degenerate(format!("calibration constant {k} is not real")));
        }
        Ok(k.re)
    }

    /// `e^{i lambda Q}` and a truncation-error estimate `(|lambda| |Q|)^4 / 4!`
    /// for identities read on the sectors protected by three levels.
    pub fn gauge_unitary(&self, lambda: f64, q: &CMat) -> (CMat, f64) {
        let u = (q * (I * lambda)).exp();
        let x = lambda.abs() * self.rep.sector_norm(q, self.rep.max_particles);
        (u, x.powi(4) / 24.0)
    }

    /// `Gamma(P)` for the one-particle physical projector.
    pub fn physical_projector(&self) -> Result<CMat> {
        self.rep.second_quantize(&self.space.physical_projector())
    }

    /// `<psi, eta_F psi>`.
    pub fn indef_norm(&self, psi: &CVec) -> Complex64 {
        (psi.adjoint() * &self.eta_fock * psi)[(0, 0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_space(n: usize) -> OneParticleSpace {
        // v0 = e0, h = e1, eta swaps them and is the identity elsewhere
        let mut eta = CMat::identity(n, n);
        eta[(0, 0)] = 0.0.into();
        eta[(1, 1)] = 0.0.into();
        eta[(0, 1)] = 1.0.into();
        eta[(1, 0)] = 1.0.into();
        let e = |i: usize| {
            let mut v = CVec::zeros(n);
            v[i] = 1.0.into();
            v
        };
        OneParticleSpace { eta, v0: e(0), h: e(1) }
    }

    fn real_vec(xs: &[f64]) -> CVec {
        CVec::from_iterator(xs.len(), xs.iter().map(|x| Complex64::new(*x, 0.0)))
    }

    #[test]
    fn dimension_and_ladder_algebra() {
        let rep = FockRep::new(6, 4).unwrap();
        assert_eq!(rep.dim(), 210);
        for i in 0..6 {
            for j in 0..6 {
                let c = commutator(rep.lowering(i), rep.raising(j));
                let want = if i == j { rep.identity() } else { rep.identity() * Complex64::new(0.0, 0.0) };
                assert!(rep.sector_norm(&(c - want), 3) < 1e-14);
            }
        }
        // the cutoff sector is where the algebra fails
        let c = commutator(rep.lowering(0), rep.raising(0)) - rep.identity();
        assert!(rep.sector_norm(&c, 4) > 1.0);
    }

    #[test]
    fn second_quantization_is_multiplicative() {
        let rep = FockRep::new(3, 4).unwrap();
        let a = CMat::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
        let b = CMat::from_fn(3, 3, |i, j| Complex64::new(1.0 / (1 + i + j) as f64, 0.05 * i as f64));
        let lhs = rep.second_quantize(&(&a * &b)).unwrap();
        let rhs = rep.second_quantize(&a).unwrap() * rep.second_quantize(&b).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((rep.second_quantize(&CMat::identity(3, 3)).unwrap() - rep.identity()).norm() < 1e-14);
    }

    #[test]
    fn two_point_function_and_charge() {
        let fs = FockSystem::new(swap_space(4), 4).unwrap();
        let f = real_vec(&[0.3, 0.8, -0.2, 0.5]);
        let g = real_vec(&[-0.1, 0.4, 0.7, 0.2]);
        let vac = fs.rep.vacuum();
        let two = (vac.adjoint() * fs.field(&f).unwrap() * fs.field(&g).unwrap() * &vac)[(0, 0)];
        assert!((two - fs.space.pair(&f, &g)).norm() < 1e-14);
        let k = fs.calibrate_charge(&f).unwrap();
        assert!((k - 0.5).abs() < 1e-14);
        let q = fs.charge(k);
        let c = commutator(&q, &fs.field(&g).unwrap()) + fs.rep.identity() * (I * fs.space.integral(&g));
        assert!(fs.rep.sector_norm(&c, 2) < 1e-14);
        let pv = fs.field(&fs.space.v0).unwrap();
        assert!(fs.rep.sector_norm(&commutator(&pv, &fs.field(&g).unwrap()), 2) < 1e-14);
    }

    #[test]
    fn gauge_unitary_properties() {
        let fs = FockSystem::new(swap_space(3), 5).unwrap();
        let q = fs.charge(0.5);
        let (u0, _) = fs.gauge_unitary(0.0, &q);
        assert!((u0 - fs.rep.identity()).norm() < 1e-15);
        let (u, _) = fs.gauge_unitary(0.01, &q);
        let uinv = (&q * (I * -0.01)).exp();
        let f = real_vec(&[0.2, 1.0, -0.4]);
        let phi = fs.field(&f).unwrap();
        let shifted = &u * &phi * &uinv - &phi - fs.rep.identity() * (fs.space.integral(&f) * 0.01);
        assert!(fs.rep.sector_norm(&shifted, 2) < 1e-8);
        let eu = u.adjoint() * &fs.eta_fock * &u - &fs.eta_fock;
        assert!(fs.rep.sector_norm(&eu, 3) < 1e-12);
    }

    #[test]
    fn physical_projector_is_positive() {
        let fs = FockSystem::new(swap_space(4), 4).unwrap();
        let p1 = fs.space.physical_projector();
        let restricted = &p1 * &fs.space.eta * &p1;
        let min = restricted.symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        assert!(min > -1e-12);
        // h is excluded, v0 survives
        assert!((&p1 * &fs.space.h).norm() < 1e-14);
        assert!((&p1 * &fs.space.v0 - &fs.space.v0).norm() < 1e-14);
        let p = fs.physical_projector().unwrap();
        assert!((&p * &p - &p).norm() < 1e-12);
    }
}
