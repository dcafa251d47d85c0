//! Krein inner product, the invariant null vector `v0 = -4 pi R^2 box h`, and
//! the metric operator relating the Krein product to the indefinite pairing.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DsPoint, GroupElement};
use crate::kernels::KernelConvention;
use crate::testfn::pairing::{construct_h, HConstruction, HParams, ModeBasis, Profile};
use crate::testfn::{integral, laplace_beltrami, transport, GridSpec, TestFunction};

/// Relative spectral cutoff used to regularize the Krein Gram matrix.
pub const RANK_CUTOFF: f64 = 1e-8;

/// A test function's pairing data together with its integral.
#[derive(Debug, Clone)]
pub struct KreinVector {
    pub profile: Profile,
    pub integral: Complex64,
}

#[derive(Debug, Clone)]
pub struct KreinContext {
    pub h: TestFunction,
    pub v0: TestFunction,
    pub conv: KernelConvention,
    pub construction: HConstruction,
    modes: ModeBasis,
    kh: KreinVector,
}

impl KreinContext {
    pub fn new(grid: &GridSpec, seed_center: &DsPoint, params: &HParams) -> Result<Self> {
        let construction = construct_h(grid, seed_center, params)?;
        let h = construction.h.clone();
        let r = grid.r;
        let v0 = laplace_beltrami(&h)?.scale((-4.0 * PI * r * r).into());
        let modes = ModeBasis::new(grid, params.conv)?;
        let kh = KreinVector { profile: modes.profile(&h)?, integral: integral(&h) };
        Ok(Self { h, v0, conv: params.conv, construction, modes, kh })
    }

    pub fn grid(&self) -> &GridSpec {
        self.h.grid()
    }

    pub fn modes(&self) -> &ModeBasis {
        &self.modes
    }

    pub fn vector(&self, f: &TestFunction) -> Result<KreinVector> {
        Ok(KreinVector { profile: self.modes.profile(f)?, integral: integral(f) })
    }

    /// `<f, g>`.
    pub fn indef(&self, f: &KreinVector, g: &KreinVector) -> Complex64 {
        self.modes.pair(&f.profile, &g.profile)
    }

    pub fn pair(&self, f: &TestFunction, g: &TestFunction) -> Result<Complex64> {
        Ok(self.indef(&self.vector(f)?, &self.vector(g)?))
    }

    /// `f0 = f - (int f) h` at the profile level.
    fn zero_part(&self, f: &KreinVector) -> Profile {
        let c = f.integral;
        let p = &f.profile;
        let q = &self.kh.profile;
        Profile {
            modes: p.modes.iter().zip(&q.modes).map(|(a, b)| a - c * b).collect(),
            integral: p.integral - c * q.integral,
            log_moment: p.log_moment - c * q.log_moment,
        }
    }

    /// `(f, g) = <f0, g0> + <f, h><h, g> + conj(int f) int g`.
    pub fn krein(&self, f: &KreinVector, g: &KreinVector) -> Complex64 {
        let (f0, g0) = (self.zero_part(f), self.zero_part(g));
        self.modes.pair(&f0, &g0) + self.indef(f, &self.kh) * self.indef(&self.kh, g) + f.integral.conj() * g.integral
    }

    pub fn krein_product(&self, f: &TestFunction, g: &TestFunction) -> Result<Complex64> {
        Ok(self.krein(&self.vector(f)?, &self.vector(g)?))
    }

    /// `((v0, f), <h, f>)`; the two agree for every `f`.
    pub fn functional_check(&self, f: &TestFunction) -> Result<(Complex64, Complex64)> {
        let kf = self.vector(f)?;
        let kv = self.vector(&self.v0)?;
        Ok((self.krein(&kv, &kf), self.indef(&self.kh, &kf)))
    }

    /// `|<f0, f0>| + |<h, f>|^2 + |int f|^2`; vanishes exactly on the
    /// null directions of the Krein product.
    pub fn nihil_norm(&self, f: &TestFunction) -> Result<f64> {
        let kf = self.vector(f)?;
        let f0 = self.zero_part(&kf);
        Ok(self.modes.pair(&f0, &f0).norm() + self.indef(&self.kh, &kf).norm_sqr() + kf.integral.norm_sqr())
    }

    /// Krein norm `(d, d)` of `d = alpha_g v0 - v0`.
    pub fn v0_invariance(&self, g: &GroupElement) -> Result<f64> {
        let d = transport(g, &self.v0)?.sub(&self.v0)?;
        Ok(self.krein_product(&d, &d)?.re)
    }

    /// `f -> f - (int f) h - <h, f0> v0`: projects into zero-integral
    /// functions Krein-orthogonal to `v0`.
    pub fn project_rest(&self, f: &TestFunction) -> Result<TestFunction> {
        let c = integral(f);
        let f0 = TestFunction::combination(&[(1.0.into(), f), (-c, &self.h)])?;
        let a = self.pair(&self.h, &f0)?;
        TestFunction::combination(&[(1.0.into(), &f0), (-a, &self.v0)])
    }
}

/// Pseudo-inverse of a Hermitian PSD matrix with a relative spectral cutoff;
/// also returns the retained rank.
pub fn hermitian_pinv(a: &DMatrix<Complex64>, rel_cutoff: f64) -> (DMatrix<Complex64>, usize) {
    let eig = a.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = a.nrows();
    let mut inv = DMatrix::zeros(n, n);
    let mut rank = 0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > rel_cutoff * top {
            rank += 1;
            let v = eig.eigenvectors.column(i);
            inv += (v * v.adjoint()) * Complex64::new(1.0 / l, 0.0);
        }
    }
    (inv, rank)
}

pub fn min_eigenvalue(a: &DMatrix<Complex64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(*v))
}

/// Frobenius norm, an upper bound for the spectral norm.
pub fn op_norm(a: &DMatrix<Complex64>) -> f64 {
    a.norm()
}

#[derive(Debug, Clone)]
pub struct GramPair {
    /// `[h, v0, rest...]`, the rest already projected.
    pub basis: Vec<TestFunction>,
    pub g_indef: DMatrix<Complex64>,
    pub g_krein: DMatrix<Complex64>,
    pub eta: DMatrix<Complex64>,
    pub rank: usize,
}

/// Deviations of `eta` from the expected block form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlockReport {
    /// `|eta[0..2, 0..2] - [[0, 1], [1, 0]]|` plus the off-block couplings.
    pub swap_error: f64,
    /// `|eta_rest - Pi|`, `Pi` the projector onto the regularized quotient.
    pub rest_identity_error: f64,
    /// `|eta^2 - Pi_full|`.
    pub eta_squared_error: f64,
    /// `|G_indef - G_krein eta|`.
    pub factorization_error: f64,
    pub rank: usize,
    pub dim: usize,
}

/// Assemble both Gram matrices over `[h, v0, projected extras]` and solve
/// `G_indef = G_krein eta`. Fails if the Krein Gram has fewer than
/// `dim - expected_nihil` retained directions.
pub fn krein_metric(ctx: &KreinContext, extras: &[TestFunction], expected_nihil: usize) -> Result<GramPair> {
    let mut basis = vec![ctx.h.clone(), ctx.v0.clone()];
    for f in extras {
        basis.push(ctx.project_rest(f)?);
    }
    let vs = basis.iter().map(|f| ctx.vector(f)).collect::<Result<Vec<_>>>()?;
    let n = vs.len();
    let herm = |f: &dyn Fn(usize, usize) -> Complex64| {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(f(i, i).re, 0.0);
            for j in i + 1..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    };
    let g_indef = herm(&|i, j| ctx.indef(&vs[i], &vs[j]));
    let g_krein = herm(&|i, j| ctx.krein(&vs[i], &vs[j]));
    let (pinv, rank) = hermitian_pinv(&g_krein, RANK_CUTOFF);
    let needed = n.saturating_sub(expected_nihil);
    if rank < needed {
        return Err(Error::IllConditioned { rank, needed });
    }
    let eta = &pinv * &g_indef;
    Ok(GramPair { basis, g_indef, g_krein, eta, rank })
}

impl GramPair {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `pinv(G_krein) G_krein`.
    pub fn quotient_projector(&self) -> DMatrix<Complex64> {
        let (pinv, _) = hermitian_pinv(&self.g_krein, RANK_CUTOFF);
        &pinv * &self.g_krein
    }

    pub fn block_report(&self) -> BlockReport {
        let n = self.dim();
        let one = Complex64::new(1.0, 0.0);
        let pi_full = self.quotient_projector();
        let mut swap = DMatrix::<Complex64>::zeros(n, n);
        swap[(0, 1)] = one;
        swap[(1, 0)] = one;
        let mut swap_err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i < 2 || j < 2 {
                    swap_err = swap_err.max((self.eta[(i, j)] - swap[(i, j)]).norm());
                }
            }
        }
        let rest_err = if n > 2 {
            let e = self.eta.view((2, 2), (n - 2, n - 2));
            let p = pi_full.view((2, 2), (n - 2, n - 2));
            (e - p).iter().fold(0.0f64, |m, v| m.max(v.norm()))
        } else {
            0.0
        };
        let sq = (&self.eta * &self.eta - &pi_full).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let fact = (&self.g_indef - &self.g_krein * &self.eta).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        BlockReport {
            swap_error: swap_err,
            rest_identity_error: rest_err,
            eta_squared_error: sq,
            factorization_error: fact / op_norm(&self.g_indef).max(1.0),
            rank: self.rank,
            dim: n,
        }
    }

    /// Krein-orthonormal frame by Gram-Schmidt in the order `v0, h, rest`,
    /// dropping directions whose Krein norm falls below the cutoff.
    pub fn frame(&self) -> Result<KreinFrame> {
        let n = self.dim();
        let g = &self.g_krein;
        let scale = (0..n).map(|i| g[(i, i)].re).fold(0.0f64, f64::max);
        let kprod = |a: &DVector<Complex64>, b: &DVector<Complex64>| (a.adjoint() * g * b)[(0, 0)];
        let mut cols: Vec<DVector<Complex64>> = Vec::new();
        let order = std::iter::once(1).chain(std::iter::once(0)).chain(2..n);
        for i in order {
            let mut v = DVector::zeros(n);
            v[i] = Complex64::new(1.0, 0.0);
            // two passes for stability
            for _ in 0..2 {
                for c in &cols {
                    let p = kprod(c, &v);
                    v -= c * p;
                }
            }
            let nn = kprod(&v, &v).re;
            if nn > RANK_CUTOFF * scale.max(1.0) {
                cols.push(v / Complex64::new(nn.sqrt(), 0.0));
            }
        }
        if cols.len() < 2 {
            return Err(Error::IllConditioned { rank: cols.len(), needed: 2 });
        }
        let coeffs = DMatrix::from_columns(&cols);
        let eta = coeffs.adjoint() * &self.g_indef * &coeffs;
        let gram = coeffs.adjoint() * g * &coeffs;
        Ok(KreinFrame { coeffs, eta, gram })
    }
}

/// Coefficient columns `C` over a [`GramPair`] basis with `C^H G_krein C = 1`.
/// Column 0 is `v0`, column 1 is `h`.
#[derive(Debug, Clone)]
pub struct KreinFrame {
    pub coeffs: DMatrix<Complex64>,
    /// `C^H G_indef C`, the metric operator in this frame.
    pub eta: DMatrix<Complex64>,
    /// `C^H G_krein C`.
    pub gram: DMatrix<Complex64>,
}

impl KreinFrame {
    pub const V0: usize = 0;
    pub const H: usize = 1;

    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    /// The frame vectors as test functions over `basis`.
    pub fn functions(&self, basis: &[TestFunction]) -> Result<Vec<TestFunction>> {
        (0..self.dim())
            .map(|i| {
                let terms: Vec<_> = basis.iter().enumerate().map(|(k, f)| (self.coeffs[(k, i)], f)).collect();
                TestFunction::combination(&terms)
            })
            .collect()
    }

    /// Frame coordinates of a basis-coefficient vector, `C^H G_krein x`.
    pub fn coordinates(&self, g_krein: &DMatrix<Complex64>, x: &DVector<Complex64>) -> DVector<Complex64> {
        self.coeffs.adjoint() * g_krein * x
    }
}

/// JSON export of a matrix as nested `[re, im]` pairs.
pub fn matrix_json(m: &DMatrix<Complex64>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    serde_json::json!(rows)
}

impl GramPair {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "g_indef": matrix_json(&self.g_indef),
            "g_krein": matrix_json(&self.g_krein),
            "eta": matrix_json(&self.eta),
            "rank": self.rank,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DsParams, GeneratorKind};
    use crate::testfn::{bump, Resolution};

    fn ctx(r: f64) -> KreinContext {
        let g = GridSpec::standard(r, Resolution::Default).unwrap();
        let p = DsPoint::from_conformal(0.0, 2.0, &DsParams::new(r).unwrap()).unwrap();
        KreinContext::new(&g, &p, &HParams::default()).unwrap()
    }

    fn pt(t: f64, q: f64) -> DsPoint {
        DsPoint::from_conformal(t, q, &DsParams::unit()).unwrap()
    }

    fn probes(c: &KreinContext) -> Vec<TestFunction> {
        let g = c.grid();
        vec![
            bump(g, &pt(0.1, 0.5), (0.7, 2.0), Complex64::new(1.0, 0.2)).unwrap(),
            bump(g, &pt(-0.1, 3.0), (0.6, 1.5), 0.8.into()).unwrap(),
            bump(g, &pt(0.0, 4.5), (0.8, 2.5), Complex64::new(-0.3, 1.0)).unwrap(),
        ]
    }

    #[test]
    fn krein_identities() {
        let c = ctx(1.0);
        assert!((c.krein_product(&c.h, &c.h).unwrap() - 1.0).norm() < 1e-10);
        assert!((c.krein_product(&c.v0, &c.v0).unwrap() - 1.0).norm() < 1e-6);
        assert!(c.krein_product(&c.v0, &c.h).unwrap().norm() < 1e-10);
        assert!(integral(&c.v0).norm() < 1e-9);
        assert!(c.pair(&c.v0, &c.v0).unwrap().norm() < 1e-10);
        for f in probes(&c) {
            let (lhs, rhs) = c.functional_check(&f).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
            let i = integral(&f);
            assert!((c.pair(&c.v0, &f).unwrap() - i).norm() < 1e-6 * (1.0 + i.norm()));
        }
    }

    #[test]
    fn nihil_directions() {
        let c = ctx(1.0);
        assert_eq!(c.nihil_norm(&TestFunction::zero(c.grid())).unwrap(), 0.0);
        assert!((c.nihil_norm(&c.v0).unwrap() - 1.0).abs() < 1e-6);
        let g = c.grid();
        let a = bump(g, &pt(0.0, 1.0), (0.6, 1.0), 1.0.into()).unwrap();
        let b = bump(g, &pt(0.05, 4.0), (0.6, 1.0), 1.0.into()).unwrap();
        let z = a.sub(&b.scale(integral(&a) / integral(&b))).unwrap();
        let nb = c.nihil_norm(&laplace_beltrami(&z).unwrap()).unwrap();
        assert!(nb < 1e-12, "{nb:e}");
    }

    #[test]
    fn two_element_metric_is_swap() {
        let c = ctx(1.0);
        let gp = krein_metric(&c, &[], 0).unwrap();
        let r = gp.block_report();
        assert!(r.swap_error < 1e-6 && r.eta_squared_error < 1e-6, "{r:?}");
    }

    #[test]
    fn metric_block_structure() {
        for r in [1.0, 2.0] {
            let c = ctx(r);
            let gp = krein_metric(&c, &probes(&c), 0).unwrap();
            let rep = gp.block_report();
            assert!(rep.swap_error < 1e-5 && rep.rest_identity_error < 1e-5 && rep.eta_squared_error < 1e-5, "{rep:?}");
            assert!(min_eigenvalue(&gp.g_krein) >= -1e-8 * op_norm(&gp.g_krein));
            // restriction identity on the rest block
            for i in 2..gp.dim() {
                for j in 2..gp.dim() {
                    assert!((gp.g_krein[(i, j)] - gp.g_indef[(i, j)]).norm() < 1e-10);
                }
            }
            let fr = gp.frame().unwrap();
            let id = DMatrix::<Complex64>::identity(fr.dim(), fr.dim());
            assert!((&fr.gram - &id).norm() < 1e-8);
            assert!((&fr.eta * &fr.eta - &id).norm() < 1e-6);
            assert!((fr.eta[(KreinFrame::V0, KreinFrame::H)] - 1.0).norm() < 1e-6);
        }
    }

    #[test]
    fn v0_is_invariant() {
        let c = ctx(1.0);
        assert!(c.v0_invariance(&GroupElement::identity()).unwrap().abs() < 1e-20);
        for g in [
            GroupElement::generator(GeneratorKind::Rotation, 1.0),
            GroupElement::generator(GeneratorKind::Boost01, 0.3),
            GroupElement::generator(GeneratorKind::Boost02, -0.2),
        ] {
            let d = c.v0_invariance(&g).unwrap();
            assert!(d.abs() < 1e-8, "{d:e}");
        }
    }

    #[test]
    fn v0_class_does_not_depend_on_seed() {
        let a = ctx(1.0);
        let g = a.grid();
        let b =
            KreinContext::new(g, &pt(0.05, 5.0), &HParams { w_tau: 0.7, w_theta: 1.8, ..HParams::default() }).unwrap();
        let d = b.v0.sub(&a.v0).unwrap();
        assert!(a.krein_product(&d, &d).unwrap().norm() < 1e-10);
    }
}
