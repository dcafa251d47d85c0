use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{DsPoint, GroupElement};

use super::generator::{check_margin, map_conformal, BumpSpec, Generator};
use super::grid::{box_discrete, GridSpec, MeasureGrid, MARGIN};

/// Grid-sampled compactly supported function on the chart window, with an
/// optional closed-form generator.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
    generator: Option<Generator>,
    is_real: bool,
}

impl TestFunction {
    pub fn zero(grid: &GridSpec) -> Self {
        Self { grid: *grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], generator: None, is_real: true }
    }

    pub fn from_generator(grid: &GridSpec, generator: Generator) -> Result<Self> {
        if let Some((lo, hi)) = generator.tau_support(grid.r) {
            let spread = (generator.laplacian_depth() * MARGIN) as f64 * grid.h_tau();
            let (a, b) = grid.admissible_tau();
            if lo - spread < a {
                return Err(Error::SupportEscape { boundary: "lower", tau: lo });
            }
            if hi + spread > b {
                return Err(Error::SupportEscape { boundary: "upper", tau: hi });
            }
        }
        let values = generator.sample(grid)?;
        check_margin(&values, grid, MARGIN)?;
        let is_real = generator.is_real();
        Ok(Self { grid: *grid, values, generator: Some(generator), is_real })
    }

    pub fn from_values(grid: &GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension { expected: grid.len(), got: values.len() });
        }
        check_margin(&values, grid, MARGIN)?;
        let is_real = values.iter().all(|v| v.im == 0.0);
        Ok(Self { grid: *grid, values, generator: None, is_real })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn at(&self, k: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(k, j)]
    }

    fn check_grid(&self, o: &Self) -> Result<()> {
        if self.grid.same_as(&o.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `sum c_i f_i`; keeps a generator when every term has one.
    pub fn combination(terms: &[(Complex64, &TestFunction)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidParameter("empty combination".into()))?.1;
        let grid = first.grid;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (c, f) in terms {
            first.check_grid(f)?;
            for (a, b) in values.iter_mut().zip(&f.values) {
                *a += c * b;
            }
        }
        let generator = terms
            .iter()
            .map(|(c, f)| f.generator.clone().map(|g| (*c, g)))
            .collect::<Option<Vec<_>>>()
            .map(Generator::Combination);
        let is_real = terms.iter().all(|(c, f)| c.im == 0.0 && f.is_real);
        Ok(Self { grid, values, generator, is_real })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Self::combination(&[(1.0.into(), self), (1.0.into(), o)])
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Self::combination(&[(1.0.into(), self), ((-1.0).into(), o)])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::combination(&[(c, self)]).expect("single term")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn norm_l1(&self) -> f64 {
        let m = MeasureGrid::new(&self.grid);
        self.values.iter().enumerate().map(|(i, v)| m.row[i / self.grid.n_theta] * v.norm()).sum()
    }

    /// Largest pointwise difference to `o`.
    pub fn max_diff(&self, o: &Self) -> Result<f64> {
        self.check_grid(o)?;
        Ok(self.values.iter().zip(&o.values).fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }
}

/// Smooth bump centred at `center` with half-widths `(w_tau, w_theta)`.
pub fn bump(grid: &GridSpec, center: &DsPoint, widths: (f64, f64), amplitude: Complex64) -> Result<TestFunction> {
    let spec =
        BumpSpec { tau_c: center.tau(), theta_c: center.theta(), w_tau: widths.0, w_theta: widths.1, amp: amplitude };
    TestFunction::from_generator(grid, Generator::bump(spec)?)
}

/// `int d sigma f`.
pub fn integral(f: &TestFunction) -> Complex64 {
    let g = f.grid();
    let m = MeasureGrid::new(g);
    (0..g.n_tau)
        .map(|k| {
            let row: Complex64 = f.values[g.index(k, 0)..g.index(k, 0) + g.n_theta].iter().sum();
            m.row[k] * row
        })
        .sum()
}

/// Wave operator. Applied discretely (spectral in `theta`, 9-point in `tau`);
/// generator-backed inputs keep a symbolic generator so that transport and
/// pointwise analytic evaluation remain available.
pub fn laplace_beltrami(f: &TestFunction) -> Result<TestFunction> {
    check_margin(f.values(), f.grid(), 2 * MARGIN)?;
    let values = box_discrete(f.values(), f.grid());
    Ok(TestFunction {
        grid: f.grid,
        values,
        generator: f.generator.clone().map(Generator::laplacian),
        is_real: f.is_real,
    })
}

/// `f = f0 + c h` with `c = int f`.
pub fn decompose(f: &TestFunction, h: &TestFunction) -> Result<(TestFunction, Complex64)> {
    let ih = integral(h);
    if (ih - 1.0).norm() > 1e-10 {
        return Err(Error::NotNormalized(format!("{ih}")));
    }
    let c = integral(f);
    Ok((TestFunction::combination(&[(1.0.into(), f), (-c, h)])?, c))
}

/// `alpha_g f (x) = f(g^{-1} x)`.
pub fn transport(g: &GroupElement, f: &TestFunction) -> Result<TestFunction> {
    if let Some(gen) = &f.generator {
        return TestFunction::from_generator(&f.grid, gen.transported(g));
    }
    let grid = f.grid;
    let g_inv = g.inverse();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k in 0..grid.n_tau {
        for j in 0..grid.n_theta {
            let (t, q) = map_conformal(&g_inv, grid.tau(k), grid.theta(j), grid.r);
            values[grid.index(k, j)] = bicubic(f, t, q);
        }
    }
    let out = TestFunction::from_values(&grid, values)?;
    Ok(TestFunction { is_real: f.is_real, ..out })
}

/// Keys cubic convolution kernel (a = -1/2).
fn keys(x: f64) -> f64 {
    let x = x.abs();
    if x < 1.0 {
        1.5 * x * x * x - 2.5 * x * x + 1.0
    } else if x < 2.0 {
        -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0
    } else {
        0.0
    }
}

/// Bicubic interpolation, periodic in `theta`, zero beyond the `tau` window.
pub fn bicubic(f: &TestFunction, tau: f64, theta: f64) -> Complex64 {
    let g = f.grid();
    let u = (tau - g.tau_min) / g.h_tau();
    let v = theta.rem_euclid(2.0 * std::f64::consts::PI) / g.h_theta();
    let (k0, j0) = (u.floor() as i64, v.floor() as i64);
    let mut acc = Complex64::new(0.0, 0.0);
    for dk in -1..=2 {
        let k = k0 + dk;
        if k < 0 || k >= g.n_tau as i64 {
            continue;
        }
        let wk = keys(u - k as f64);
        if wk == 0.0 {
            continue;
        }
        for dj in -1..=2 {
            let j = (j0 + dj).rem_euclid(g.n_theta as i64);
            let wj = keys(v - (j0 + dj) as f64);
            acc += wk * wj * f.at(k as usize, j as usize);
        }
    }
    acc
}
