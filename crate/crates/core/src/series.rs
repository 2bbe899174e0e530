//! Truncated Taylor series arithmetic.
//!
//! Used to differentiate closed-form expressions exactly (the bump function,
//! coefficient time-jets, Leibniz division of jets). A [`Series`] of depth `d`
//! stores Taylor coefficients `c_0..=c_d`; the `q`-th derivative at the
//! expansion point is `q! * c_q`.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub coeffs: Vec<Complex64>,
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

impl Series {
    pub fn zero(depth: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); depth + 1] }
    }

    pub fn constant(c: Complex64, depth: usize) -> Self {
        let mut s = Self::zero(depth);
        s.coeffs[0] = c;
        s
    }

    /// The identity variable `x` expanded at `x0`.
    pub fn variable(x0: f64, depth: usize) -> Self {
        let mut s = Self::constant(Complex64::new(x0, 0.0), depth);
        if depth >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    /// Builds a series from derivative values `f(x0), f'(x0), ...`.
    pub fn from_derivatives(derivs: &[Complex64]) -> Self {
        Self {
            coeffs: derivs.iter().enumerate().map(|(q, d)| d / factorial(q)).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn derivative(&self, q: usize) -> Complex64 {
        self.coeffs.get(q).map_or(Complex64::new(0.0, 0.0), |c| c * factorial(q))
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..=self.depth()).map(|q| self.derivative(q)).collect()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn recip(&self) -> Self {
        let d = self.depth();
        let a0 = self.coeffs[0];
        let mut out = Self::zero(d);
        out.coeffs[0] = 1.0 / a0;
        for n in 1..=d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeffs[k] * out.coeffs[n - k];
            }
            out.coeffs[n] = -acc / a0;
        }
        out
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.recip()
    }

    pub fn exp(&self) -> Self {
        // f' = a' f  =>  n f_n = sum_{k=1}^n k a_k f_{n-k}
        let d = self.depth();
        let mut out = Self::zero(d);
        out.coeffs[0] = self.coeffs[0].exp();
        for n in 1..=d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                acc += self.coeffs[k] * out.coeffs[n - k] * k as f64;
            }
            out.coeffs[n] = acc / n as f64;
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: usize) -> Self {
        let mut out = Self::constant(Complex64::new(1.0, 0.0), self.depth());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let d = self.depth().min(rhs.depth());
        let mut out = Series::zero(d);
        for n in 0..=d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                acc += self.coeffs[k] * rhs.coeffs[n - k];
            }
            out.coeffs[n] = acc;
        }
        out
    }
}

/// Leibniz division of derivative jets: given `∂^q a(0)` and `∂^q c(0)`,
/// returns `∂^q (a / c)(0)` for `q = 0..len`.
pub fn divide_jets(num: &[Complex64], den: &[Complex64]) -> Vec<Complex64> {
    let n = Series::from_derivatives(num);
    let d = Series::from_derivatives(den);
    n.div(&d).derivatives()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn reciprocal_of_one_plus_t() {
        let jet = divide_jets(&[c(1.0), c(0.0), c(0.0), c(0.0)], &[c(1.0), c(1.0), c(0.0), c(0.0)]);
        let expect = [1.0, -1.0, 2.0, -6.0];
        for (a, b) in jet.iter().zip(expect) {
            assert!((a.re - b).abs() < 1e-14 && a.im.abs() < 1e-14);
        }
    }

    #[test]
    fn exp_matches_derivatives() {
        let x = Series::variable(0.3, 6).scale(c(2.0));
        let e = x.exp();
        for q in 0..=6 {
            let want = 2f64.powi(q as i32) * (0.6f64).exp();
            assert!((e.derivative(q).re - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(factorial(5), 120.0);
    }
}
