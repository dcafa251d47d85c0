//! Truncated Taylor arithmetic in one and two variables, used for analytic
//! derivatives of closed-form test functions.

use num_complex::Complex64;

/// Taylor coefficients `c_k` of `f(x0 + d) = sum c_k d^k`, truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct Taylor1 {
    pub c: Vec<f64>,
}

impl Taylor1 {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Self { c }
    }

    /// The affine map `d -> x0 + slope d`.
    pub fn affine(x0: f64, slope: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order > 0 {
            c[1] = slope;
        }
        Self { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn add_const(&self, v: f64) -> Self {
        let mut r = self.clone();
        r.c[0] += v;
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Self { c }
    }

    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let mut b = vec![0.0; n];
        b[0] = 1.0 / self.c[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.c[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Self { c: b }
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Self { c: e }
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.c.len();
        let (mut s, mut co) = (vec![0.0; n], vec![0.0; n]);
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                ss += j as f64 * self.c[j] * co[k - j];
                cc -= j as f64 * self.c[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            co[k] = cc / k as f64;
        }
        (Self { c: s }, Self { c: co })
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * factorial(k)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Two-variable truncated Taylor polynomial in `(d_tau, d_theta)` with total
/// degree at most `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order: usize,
    c: Vec<Complex64>,
}

impl Jet2 {
    pub fn zero(order: usize) -> Self {
        Self { order, c: vec![Complex64::new(0.0, 0.0); (order + 1) * (order + 1)] }
    }

    #[inline]
    fn at(&self, a: usize, b: usize) -> Complex64 {
        self.c[a * (self.order + 1) + b]
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, v: Complex64) {
        let n = self.order + 1;
        self.c[a * n + b] = v;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `amp * t(d_tau) * q(d_theta)`.
    pub fn outer(t: &Taylor1, q: &Taylor1, amp: Complex64) -> Self {
        let order = t.order().min(q.order());
        let mut j = Self::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                j.set(a, b, amp * t.c[a] * q.c[b]);
            }
        }
        j
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order);
        let mut j = Self::zero(order);
        for a in 0..=order {
            for b in 0..=order - a {
                j.set(a, b, self.at(a, b));
            }
        }
        j
    }

    pub fn add_scaled(&mut self, s: Complex64, o: &Self) {
        let order = self.order.min(o.order);
        for a in 0..=order {
            for b in 0..=order - a {
                let v = self.at(a, b) + s * o.at(a, b);
                self.set(a, b, v);
            }
        }
    }

    pub fn d_tau(&self) -> Self {
        let mut j = Self::zero(self.order.saturating_sub(1));
        if self.order == 0 {
            return j;
        }
        for a in 0..self.order {
            for b in 0..self.order - a {
                j.set(a, b, self.at(a + 1, b) * (a + 1) as f64);
            }
        }
        j
    }

    pub fn d_theta(&self) -> Self {
        let mut j = Self::zero(self.order.saturating_sub(1));
        if self.order == 0 {
            return j;
        }
        for a in 0..self.order {
            for b in 0..self.order - a {
                j.set(a, b, self.at(a, b + 1) * (b + 1) as f64);
            }
        }
        j
    }

    /// Multiply by a function of `tau` alone.
    pub fn mul_tau(&self, t: &Taylor1) -> Self {
        let n = self.order.min(t.order());
        let mut j = Self::zero(n);
        for a in 0..=n {
            for b in 0..=n - a {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..=a {
                    s += self.at(a - i, b) * t.c[i];
                }
                j.set(a, b, s);
            }
        }
        j
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// Partial derivative `d_tau^a d_theta^b` at the expansion point.
    pub fn derivative(&self, a: usize, b: usize) -> Complex64 {
        self.at(a, b) * factorial(a) * factorial(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_affine_matches_derivatives() {
        let t = Taylor1::affine(0.3, 2.0, 6).exp();
        for k in 0..=6 {
            let want = 2f64.powi(k as i32) * 0.3f64.exp();
            assert!((t.derivative(k) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn recip_and_trig() {
        let x = Taylor1::affine(0.7, 1.0, 5);
        let (s, c) = x.sin_cos();
        let one = s.mul(&s).add(&c.mul(&c));
        assert!((one.c[0] - 1.0).abs() < 1e-15 && one.c[1..].iter().all(|v| v.abs() < 1e-14));
        let r = x.add_const(1.0).recip().mul(&x.add_const(1.0));
        assert!((r.c[0] - 1.0).abs() < 1e-15 && r.c[1..].iter().all(|v| v.abs() < 1e-14));
        // d^3/dx^3 cos at 0.7 = sin(0.7)
        assert!((c.derivative(3) - 0.7f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn jet2_derivatives_of_product() {
        // f = exp(2 tau) sin(theta)
        let (s, _) = Taylor1::affine(0.4, 1.0, 4).sin_cos();
        let j = Jet2::outer(&Taylor1::affine(0.1, 2.0, 4).exp(), &s, Complex64::new(1.0, 0.0));
        let e = 0.1f64.exp();
        assert!((j.derivative(2, 1).re - 4.0 * e * 0.4f64.cos()).abs() < 1e-13);
        assert!((j.d_tau().d_theta().derivative(1, 0).re - 4.0 * e * 0.4f64.cos()).abs() < 1e-13);
        let m = j.mul_tau(&Taylor1::affine(0.1, 1.0, 4));
        // d_tau (tau f) = f + tau f_tau
        let want = e * 0.4f64.sin() * (1.0 + 0.1 * 2.0);
        assert!((m.derivative(1, 0).re - want).abs() < 1e-13);
    }
}
