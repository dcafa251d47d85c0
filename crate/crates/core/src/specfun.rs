//! Complex special functions used by the two-point kernels.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn check_pole(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::GammaPole(z.re));
    }
    Ok(())
}

/// Lanczos series `A_g(z)` and the shifted base `z + g + 1/2` for `z - 1`.
fn lanczos_parts(z: Complex64) -> (Complex64, Complex64) {
    let zm = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += *c / (zm + k as f64);
    }
    (sum, zm + LANCZOS_G + 0.5)
}

/// Gamma function on the complex plane (Lanczos, g = 7, reflection for
/// `Re z < 1/2`).
pub fn gamma_c(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        let s = (PI * z).sin();
        return Ok(PI / (s * gamma_c(1.0 - z)?));
    }
    let (sum, t) = lanczos_parts(z);
    Ok((2.0 * PI).sqrt() * t.powc(z - 0.5) * (-t).exp() * sum)
}

/// `ln Gamma(z)` for `Re z >= 1/2`, continuous in `z` (not reduced mod 2 pi i).
pub fn ln_gamma_c(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        return Err(Error::Domain { what: "ln_gamma_c", detail: format!("Re z = {} < 1/2", z.re) });
    }
    let (sum, t) = lanczos_parts(z);
    Ok(0.5 * (2.0 * PI).ln() + (z - 0.5) * t.ln() - t + sum.ln())
}

/// Digamma function.
pub fn digamma_c(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        // psi(1 - z) - psi(z) = pi cot(pi z)
        let cot = (PI * z).cos() / (PI * z).sin();
        return Ok(digamma_c(1.0 - z)? - PI * cot);
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.norm() < 12.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    // Bernoulli numbers B_2k / 2k
    const B: [f64; 7] =
        [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0];
    let inv2 = 1.0 / (w * w);
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for b in B {
        series += b * pow;
        pow *= inv2;
    }
    Ok(acc + w.ln() - 0.5 / w - series)
}

/// Plain Gauss series `sum (a)_n (b)_n / ((c)_n n!) x^n`; caller guarantees
/// `|x| < 1`.
pub fn hyp2f1_series(a: Complex64, b: Complex64, c: Complex64, x: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0;
    for n in 0..5000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum
}

fn series_with_derivative(alpha: Complex64, x: Complex64) -> (Complex64, Complex64) {
    let (a, b) = (1.0 - alpha, alpha);
    let mut term = Complex64::new(1.0, 0.0);
    let mut f = term;
    let mut df = Complex64::new(0.0, 0.0);
    for n in 0..5000 {
        let nf = n as f64;
        // term_{n+1} = term_n (a+n)(b+n)/(n+1)^2 x
        let coef = (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0));
        df += term * coef * (nf + 1.0);
        term *= coef * x;
        f += term;
        if term.norm() <= 1e-18 * f.norm() && n > 4 {
            break;
        }
    }
    (f, df)
}

/// Which evaluation route [`hyp2f1_log1`] takes for a given argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypRoute {
    Series,
    Pfaff,
    LogConnection,
    TaylorContinuation,
}

pub const SERIES_RADIUS: f64 = 0.75;

pub fn hyp_route(x: Complex64) -> HypRoute {
    if x.norm() <= SERIES_RADIUS {
        HypRoute::Series
    } else if (1.0 - x).norm() <= SERIES_RADIUS {
        HypRoute::LogConnection
    } else if (x / (x - 1.0)).norm() <= SERIES_RADIUS {
        HypRoute::Pfaff
    } else {
        HypRoute::TaylorContinuation
    }
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if !(alpha.re > 0.0 && alpha.re < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < Re alpha < 1, got {alpha}")));
    }
    Ok(())
}

/// `F(1 - alpha, alpha; 1; x)` on the plane cut along `[1, inf)`.
pub fn hyp2f1_log1(alpha: Complex64, x: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    if x.im == 0.0 && x.re >= 1.0 {
        return Err(Error::OnCut(format!("{x}"), "F(1-a,a;1;x)"));
    }
    Ok(match hyp_route(x) {
        HypRoute::Series => hyp2f1_series(1.0 - alpha, alpha, 1.0.into(), x),
        HypRoute::LogConnection => hyp2f1_log_connection(alpha, x)?,
        HypRoute::Pfaff => hyp2f1_pfaff(alpha, x),
        HypRoute::TaylorContinuation => hyp2f1_taylor(alpha, x),
    })
}

/// Pfaff transformation `F(a,b;c;x) = (1-x)^{-a} F(a, c-b; c; x/(x-1))`.
pub fn hyp2f1_pfaff(alpha: Complex64, x: Complex64) -> Complex64 {
    let a = 1.0 - alpha;
    let z = x / (x - 1.0);
    (1.0 - x).powc(-a) * hyp2f1_series(a, a, 1.0.into(), z)
}

/// Connection formula around `x = 1` for the degenerate case `c = a + b`:
///
/// ```text
/// F(a,b;a+b;x) = G(a+b)/(G(a)G(b)) sum (a)_n (b)_n/(n!)^2
///                [2 psi(n+1) - psi(a+n) - psi(b+n) - ln(1-x)] (1-x)^n
/// ```
pub fn hyp2f1_log_connection(alpha: Complex64, x: Complex64) -> Result<Complex64> {
    let (a, b) = (1.0 - alpha, alpha);
    let y = 1.0 - x;
    let ln_y = y.ln();
    let mut psi1 = digamma_c(1.0.into())?;
    let mut psia = digamma_c(a)?;
    let mut psib = digamma_c(b)?;
    let mut coef = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..5000 {
        let nf = n as f64;
        let term = coef * (2.0 * psi1 - psia - psib - ln_y);
        sum += term;
        if n > 2 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
        coef *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0)) * y;
        psi1 += 1.0 / (nf + 1.0);
        psia += 1.0 / (a + nf);
        psib += 1.0 / (b + nf);
    }
    // G(1)/(G(1-alpha) G(alpha)) = sin(pi alpha)/pi
    Ok((PI * alpha).sin() / PI * sum)
}

/// Analytic continuation by Taylor re-expansion of the hypergeometric ODE
/// `x(1-x)F'' + (1-2x)F' - a b F = 0` along the ray from the origin.
pub fn hyp2f1_taylor(alpha: Complex64, x: Complex64) -> Complex64 {
    const ORDER: usize = 60;
    let ab = (1.0 - alpha) * alpha;
    let dir = x / x.norm();
    let mut z = dir * 0.5;
    let (mut f, mut df) = series_with_derivative(alpha, z);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); ORDER + 1];
    loop {
        let remaining = (x - z).norm();
        if remaining < 1e-15 {
            break;
        }
        let dist = z.norm().min((1.0 - z).norm());
        let step = (0.5 * dist).min(remaining);
        let p0 = z * (1.0 - z);
        let p1 = 1.0 - 2.0 * z;
        let q0 = p1;
        coeffs[0] = f;
        coeffs[1] = df;
        for k in 0..ORDER - 1 {
            let kf = k as f64;
            let num = (p1 * kf * (kf + 1.0) + q0 * (kf + 1.0)) * coeffs[k + 1]
                + (-kf * (kf - 1.0) - 2.0 * kf - ab) * coeffs[k];
            coeffs[k + 2] = -num / (p0 * (kf + 2.0) * (kf + 1.0));
        }
        let t = (x - z) / remaining * step;
        let (mut nf, mut ndf) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in (0..=ORDER).rev() {
            nf = nf * t + coeffs[k];
            if k >= 1 {
                ndf = ndf * t + coeffs[k] * k as f64;
            }
        }
        f = nf;
        df = ndf;
        z += t;
    }
    f
}

/// Legendre-type function through its Laplace integral
///
/// ```text
/// P(lambda) = G(d/2)/(sqrt(pi) G((d-1)/2)) int_0^pi (lambda + sqrt(lambda^2-1) cos t)^{-(d-1)/2 + i nu} sin^{d-2} t dt
/// ```
///
/// valid for `Re lambda > 0` as long as the segment `lambda +- sqrt(lambda^2-1)`
/// stays off the negative real axis.
pub fn legendre_p_int(d: u32, nu: f64, lambda: Complex64) -> Result<Complex64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension d = {d} < 2")));
    }
    if lambda.im == 0.0 && lambda.re <= -1.0 {
        return Err(Error::OnCut(format!("{lambda}"), "P^(d+1)"));
    }
    if lambda.re <= 0.0 {
        return Err(Error::Domain { what: "legendre_p_int", detail: format!("Re lambda = {} <= 0", lambda.re) });
    }
    let s = (lambda - 1.0).sqrt() * (lambda + 1.0).sqrt();
    // reject segments crossing the negative real axis
    let (lo, hi) = (lambda - s, lambda + s);
    if lo.im * hi.im < 0.0 {
        let t = lo.im / (lo.im - hi.im);
        let cross = lo + (hi - lo) * t;
        if cross.re <= 0.0 {
            return Err(Error::Domain {
                what: "legendre_p_int",
                detail: format!("integrand base crosses the negative axis at {cross}"),
            });
        }
    }
    let df = d as f64;
    let mu = Complex64::new(-(df - 1.0) / 2.0, nu);
    let weight_pow = (d - 2) as i32;
    let integrand = |t: f64| (mu * (lambda + s * t.cos()).ln()).exp() * t.sin().powi(weight_pow);
    let integral = integrate_adaptive(integrand, 0.0, PI, 1e-12)?;
    let norm = gamma_c((df / 2.0).into())? / (PI.sqrt() * gamma_c(((df - 1.0) / 2.0).into())?);
    Ok(norm * integral)
}
