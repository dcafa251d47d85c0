//! Two-point kernels: massive principal-series kernel, its renormalized
//! massless limit, the general-dimension form, the flat-case logarithm and
//! the epsilon boundary values.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lambda_conformal, DsParams, DsPoint};
use crate::quadrature::{richardson, Extrapolated};
use crate::specfun::{gamma_c, hyp2f1_log1, legendre_p_int};

/// Mass parameter `alpha`, with `mu^2 R^2 = alpha (1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassParam {
    alpha: Complex64,
}

impl MassParam {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !(alpha.re > 0.0 && alpha.re <= 0.5) || !alpha.im.is_finite() {
            return Err(Error::InvalidParameter(format!("need 0 < Re alpha <= 1/2, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn real(alpha: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0))
    }

    /// Principal series, `alpha = 1/2 - i nu`.
    pub fn from_nu(nu: f64) -> Result<Self> {
        Self::new(Complex64::new(0.5, -nu))
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn mu2r2(&self) -> Complex64 {
        self.alpha * (1.0 - self.alpha)
    }
}

/// Additive constant carried by the massless kernel. The two choices differ
/// by `ln 4 / (4 pi)`, which is invisible on zero-integral test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelConvention {
    /// `-(1/4pi) ln((1 + lambda)/2)`, the exact limit of the subtracted series.
    #[default]
    SeriesLimit,
    /// `-(1/4pi) ln(2 (1 + lambda))`, from `-(z - z')^2 / R^2 = 2 (1 + lambda)`.
    PaperClosedForm,
}

impl KernelConvention {
    /// Offset relative to the series-limit convention.
    pub fn offset(self) -> f64 {
        match self {
            KernelConvention::SeriesLimit => 0.0,
            KernelConvention::PaperClosedForm => -(4f64).ln() / (4.0 * PI),
        }
    }

    /// Constant `c` of the angular zero mode
    /// `(1/4pi)(c + ln cos t + ln cos t' - i(t - t'))` whose mode sum
    /// reproduces the closed form.
    pub fn zero_mode_constant(self) -> f64 {
        match self {
            KernelConvention::SeriesLimit => 4f64.ln(),
            KernelConvention::PaperClosedForm => 0.0,
        }
    }
}

impl std::str::FromStr for KernelConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" | "series_limit" => Ok(Self::SeriesLimit),
            "paper" | "paper_closed_form" => Ok(Self::PaperClosedForm),
            other => Err(Error::InvalidParameter(format!("unknown kernel convention {other:?}"))),
        }
    }
}

/// `Gamma(1 - alpha) Gamma(alpha) / (4 pi) F(1 - alpha, alpha; 1; (1 - lambda)/2)`.
pub fn massive_w(m: MassParam, lambda: Complex64) -> Result<Complex64> {
    let x = (1.0 - lambda) / 2.0;
    Ok(subtraction_constant(m)? * hyp2f1_log1(m.alpha, x)?)
}

/// The pole part `Gamma(1 - alpha) Gamma(alpha) / (4 pi)`.
pub fn subtraction_constant(m: MassParam) -> Result<Complex64> {
    let a = m.alpha;
    Ok(gamma_c(1.0 - a)? * gamma_c(a)? / (4.0 * PI))
}

/// Renormalized massless kernel as a function of the invariant.
pub fn massless_w(lambda: Complex64, conv: KernelConvention) -> Result<Complex64> {
    if lambda.im == 0.0 && lambda.re <= -1.0 {
        return Err(Error::OnCut(format!("{lambda}"), "W0"));
    }
    let w = -((1.0 + lambda) / 2.0).ln() / (4.0 * PI);
    Ok(w + conv.offset())
}

/// General-dimension principal-series kernel
/// `2 c e^{pi nu} pi^{d/2} / (R^{d-1} Gamma(d/2)) P(lambda)` with
/// `c = Gamma((d-1)/2 + i nu) Gamma((d-1)/2 - i nu) e^{-pi nu} / (2^{d+1} pi^d)`.
pub fn general_w(d: u32, nu: f64, lambda: Complex64, params: &DsParams) -> Result<Complex64> {
    Ok(general_w_prefactor(d, nu, params)? * legendre_p_int(d, nu, lambda)?)
}

/// Value of [`general_w`] at `lambda = 1`, where the Legendre factor is 1.
pub fn general_w_prefactor(d: u32, nu: f64, params: &DsParams) -> Result<Complex64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension d = {d} < 2")));
    }
    let df = d as f64;
    let h = (df - 1.0) / 2.0;
    // the e^{-pi nu} of c and the explicit e^{pi nu} cancel
    let c = gamma_c(Complex64::new(h, nu))? * gamma_c(Complex64::new(h, -nu))?
        / (2f64.powi(d as i32 + 1) * PI.powi(d as i32));
    let pref = 2.0 * PI.powf(df / 2.0) / (params.radius().powi(d as i32 - 1) * gamma_c((df / 2.0).into())?);
    Ok(c * pref)
}

/// `ln((1 - lambda)/(1 + lambda))`, principal branch. Cut along both
/// `(-inf, -1]` and `[1, inf)`.
pub fn flat_remark_f(lambda: Complex64) -> Result<Complex64> {
    if lambda.im == 0.0 && lambda.re.abs() >= 1.0 {
        return Err(Error::OnCut(format!("{lambda}"), "ln((1-l)/(1+l))"));
    }
    Ok(((1.0 - lambda) / (1.0 + lambda)).ln())
}

/// Decreasing sequence of imaginary time shifts used for boundary values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsLadder {
    pub levels: Vec<f64>,
}

impl EpsLadder {
    pub fn dyadic(eps0: f64, n: usize) -> Result<Self> {
        Self::new((0..n).map(|k| eps0 / 2f64.powi(k as i32)).collect())
    }

    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter("epsilon levels must be positive".into()));
        }
        if levels.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("epsilon levels must decrease".into()));
        }
        Ok(Self { levels })
    }
}

impl Default for EpsLadder {
    fn default() -> Self {
        Self::dyadic(1e-2, 4).expect("valid default ladder")
    }
}

/// Boundary value of `kernel(lambda)` with `tau -> tau - i eps` on the first
/// point and `tau' -> tau' + i eps` on the second, extrapolated to `eps = 0`.
pub fn boundary_value_with<K>(
    x: &DsPoint,
    xp: &DsPoint,
    ladder: &EpsLadder,
    tol: f64,
    kernel: K,
) -> Result<Extrapolated>
where
    K: Fn(Complex64) -> Result<Complex64>,
{
    if x.embedding() == xp.embedding() {
        return Err(Error::InvalidParameter("coincident points".into()));
    }
    let r = x.radius();
    let vals = ladder
        .levels
        .iter()
        .map(|&e| {
            let l =
                lambda_conformal(Complex64::new(x.tau(), -e), x.theta(), Complex64::new(xp.tau(), e), xp.theta(), r);
            kernel(l)
        })
        .collect::<Result<Vec<_>>>()?;
    let ex = richardson(&ladder.levels, &vals);
    if ex.error > 10.0 * tol {
        return Err(Error::Extrapolation { spread: ex.error, limit: 10.0 * tol });
    }
    Ok(ex)
}

pub fn boundary_value_w(x: &DsPoint, xp: &DsPoint, ladder: &EpsLadder, conv: KernelConvention) -> Result<Extrapolated> {
    boundary_value_with(x, xp, ladder, 1e-8, |l| massless_w(l, conv))
}

/// Boundary value of the massless kernel without extrapolation: `W0` at
/// `lambda +- i0`, the side read off the sign of `Im lambda` under the
/// `tau - i eps`, `tau' + i eps` shift. Only timelike pairs sit on the cut.
pub fn massless_boundary_value(x: &DsPoint, xp: &DsPoint, conv: KernelConvention) -> Result<Complex64> {
    let r = x.radius();
    let l = crate::geometry::lambda_real(x, xp);
    if l > -1.0 {
        return massless_w(Complex64::new(l, 0.0), conv);
    }
    let e = 1e-6 * r;
    let shifted = lambda_conformal(Complex64::new(x.tau(), -e), x.theta(), Complex64::new(xp.tau(), e), xp.theta(), r);
    if l == -1.0 || shifted.im == 0.0 {
        return Err(Error::OnCut(format!("{l}"), "W0 boundary value on the light cone"));
    }
    // signed zero selects the side of the logarithm's cut
    let side = Complex64::new(l, if shifted.im > 0.0 { 0.0 } else { -0.0 });
    Ok(-((1.0 + side) / 2.0).ln() / (4.0 * PI) + conv.offset())
}

/// `W(x, x') - W(x', x)`; equals `-i sgn(tau - tau') / 2` for timelike pairs
/// and vanishes for spacelike ones.
pub fn commutator_w(x: &DsPoint, xp: &DsPoint, ladder: &EpsLadder, conv: KernelConvention) -> Result<Complex64> {
    Ok(boundary_value_w(x, xp, ladder, conv)?.value - boundary_value_w(xp, x, ladder, conv)?.value)
}

/// Invariants at which the massless-limit residual is sampled.
pub const LIMIT_PROBES: [f64; 5] = [-0.9, -0.5, 0.0, 1.0, 3.0];

/// `max_lambda |W_alpha - C_alpha - W0|` over [`LIMIT_PROBES`].
pub fn limit_residual(alpha: f64) -> Result<f64> {
    let m = MassParam::real(alpha)?;
    let c = subtraction_constant(m)?;
    let mut worst = 0.0f64;
    for l in LIMIT_PROBES {
        let l = Complex64::new(l, 0.0);
        let r = massive_w(m, l)? - c - massless_w(l, KernelConvention::SeriesLimit)?;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// Least-squares fit `residual ~ C alpha^slope` in log-log coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub alphas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub slope: f64,
    pub constant: f64,
}

pub fn fit_limit(alphas: &[f64]) -> Result<LimitFit> {
    if alphas.len() < 2 {
        return Err(Error::InvalidParameter("need at least two alphas".into()));
    }
    let residuals = alphas.iter().map(|&a| limit_residual(a)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(LimitFit { alphas: alphas.to_vec(), residuals, slope, constant: (my - slope * mx).exp() })
}
