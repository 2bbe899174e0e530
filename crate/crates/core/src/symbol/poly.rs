//! Dense complex polynomials in one variable, ascending coefficients.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn zero() -> Self {
        Self(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Self(vec![c])
    }

    /// `a + b ζ`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self(vec![a, b])
    }

    pub fn trimmed(mut self, tol: f64) -> Self {
        while self.0.last().is_some_and(|c| c.norm() <= tol) {
            self.0.pop();
        }
        self
    }

    /// Degree after trimming exact zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| c.norm() > 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self(self.0.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self(out)
    }

    pub fn add_assign_scaled(&mut self, other: &Self, a: Complex64) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), Complex64::new(0.0, 0.0));
        }
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += y * a;
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::constant(Complex64::new(1.0, 0.0));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Product `∏ (ζ − r_i)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, r| acc.mul(&Self::linear(-r, Complex64::new(1.0, 0.0))))
    }

    /// Remainder of division by a monic polynomial of degree `d`, padded to length `d`.
    pub fn rem_monic(&self, divisor: &Self) -> Vec<Complex64> {
        let d = divisor.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() > d {
            for top in (d..r.len()).rev() {
                let q = r[top];
                if q.norm() == 0.0 {
                    continue;
                }
                for k in 0..=d {
                    r[top - d + k] -= q * divisor.0[k];
                }
            }
        }
        r.resize(d, Complex64::new(0.0, 0.0));
        r
    }

    pub fn coeff_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn remainder_is_evaluation_for_linear_divisor() {
        let p = Poly(vec![c(1.0, 2.0), c(-3.0, 0.0), c(0.5, 1.0), c(2.0, 0.0)]);
        let z = c(0.3, -1.2);
        let r = p.rem_monic(&Poly::from_roots(&[z]));
        assert!((r[0] - p.eval(z)).norm() < 1e-13);
    }

    #[test]
    fn quotient_identity() {
        let p = Poly(vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 1.0), c(1.0, 0.0), c(3.0, 0.0)]);
        let div = Poly::from_roots(&[c(0.0, 1.0), c(1.0, 2.0)]);
        let r = p.rem_monic(&div);
        // p − r vanishes at the divisor's roots
        for z in [c(0.0, 1.0), c(1.0, 2.0)] {
            let rz = Poly(r.clone()).eval(z);
            assert!((p.eval(z) - rz).norm() < 1e-12);
        }
    }
}
