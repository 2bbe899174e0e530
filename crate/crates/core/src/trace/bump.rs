//! The plateau bump `β` and the time integrals built from it.

use crate::error::{Error, Result};
use crate::series::Series;
use num_complex::Complex64;
use serde::Serialize;

/// Smooth even bump: `β = 1` on `[-1, 1]`, `β = 0` outside `(-2, 2)`, and
/// `β(τ) = S(2 − |τ|)` in between with `S(x) = f(x)/(f(x) + f(1 − x))`, `f(x) = e^{−1/x}`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct BumpFunction;

pub const PLATEAU: f64 = 1.0;
pub const SUPPORT: f64 = 2.0;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl BumpFunction {
    pub fn value(&self, tau: f64) -> f64 {
        self.jet(tau, 0)[0]
    }

    /// `β(τ), β'(τ), …, β^{(depth)}(τ)`.
    pub fn jet(&self, tau: f64, depth: usize) -> Vec<f64> {
        let a = tau.abs();
        let mut out = vec![0.0; depth + 1];
        if a <= PLATEAU {
            out[0] = 1.0;
            return out;
        }
        if a >= SUPPORT {
            return out;
        }
        // x = 2 − |τ| as a series in τ
        let sign = if tau > 0.0 { -1.0 } else { 1.0 };
        let x = &Series::constant(c(2.0), depth) + &Series::variable(tau, depth).scale(c(sign));
        let one = Series::constant(c(1.0), depth);
        let f = |s: &Series| (-&s.recip()).exp();
        let fx = f(&x);
        let fy = f(&(&one - &x));
        let s = fx.div(&(&fx + &fy));
        for (q, v) in out.iter_mut().enumerate() {
            *v = s.derivative(q).re;
        }
        out
    }

    /// `∂_τ^m (β(τ) τ^k)` at `τ`.
    pub fn weighted_derivative(&self, tau: f64, k: usize, m: usize) -> f64 {
        let beta = Series::from_derivatives(&self.jet(tau, m).into_iter().map(c).collect::<Vec<_>>());
        let poly = Series::variable(tau, m).powi(k);
        (&beta * &poly).derivative(m).re
    }
}

/// `∫_0^2 g` (the integrands below are even) split at the plateau edge.
fn integrate_half_line(g: impl Fn(f64) -> f64 + Copy) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in [(0.0, PLATEAU), (PLATEAU, SUPPORT)] {
        let rough = quadrature::integrate(g, a, b, 1e-8).integral.abs();
        let target = (1e-12 * rough).max(1e-300);
        let out = quadrature::integrate(g, a, b, target);
        if !(out.error_estimate <= 1e-10 * out.integral.abs().max(1e-300)) && out.integral != 0.0 {
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] stalled: estimate {} error {}",
                out.integral, out.error_estimate
            )));
        }
        total += out.integral;
    }
    Ok(total)
}

/// `c1 = ∫ |∂_τ^m(β τ^k)|² dτ` and `c2 = ∫ β² τ^{2k} dτ`.
pub fn bump_constants(k: usize, m: usize) -> Result<(f64, f64)> {
    let b = BumpFunction;
    let c1 = 2.0 * integrate_half_line(|t| b.weighted_derivative(t, k, m).powi(2))?;
    let c2 = 2.0 * integrate_half_line(|t| (b.value(t) * t.powi(k as i32)).powi(2))?;
    Ok((c1, c2))
}

/// Gram matrices `M_{kl} = ∫ β² τ^{k+l}` and `N_{kl} = ∫ ∂^m(βτ^k) ∂^m(βτ^l)`
/// for `k, l < r`. Odd `k + l` vanish by symmetry of the integrands.
#[derive(Debug, Clone)]
pub struct BumpGram {
    pub mass: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
    pub m: usize,
}

impl BumpGram {
    pub fn new(r: usize, m: usize) -> Result<Self> {
        let b = BumpFunction;
        let mut mass = vec![vec![0.0; r]; r];
        let mut stiffness = vec![vec![0.0; r]; r];
        for k in 0..r {
            for l in k..r {
                if (k + l) % 2 == 1 {
                    continue;
                }
                let mk = 2.0 * integrate_half_line(|t| b.value(t).powi(2) * t.powi((k + l) as i32))?;
                let nk = 2.0 * integrate_half_line(|t| b.weighted_derivative(t, k, m) * b.weighted_derivative(t, l, m))?;
                mass[k][l] = mk;
                mass[l][k] = mk;
                stiffness[k][l] = nk;
                stiffness[l][k] = nk;
            }
        }
        Ok(Self { mass, stiffness, m })
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_range() {
        let b = BumpFunction;
        for i in 0..=400 {
            let t = -2.5 + 5.0 * i as f64 / 400.0;
            let v = b.value(t);
            assert!((0.0..=1.0).contains(&v));
            if t.abs() <= 1.0 {
                assert_eq!(v, 1.0);
            }
            if t.abs() >= 2.0 {
                assert_eq!(v, 0.0);
            }
        }
        assert!((b.value(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let b = BumpFunction;
        for &t in &[1.2, 1.5, 1.8, -1.3] {
            let j = b.jet(t, 2);
            let h = 1e-5;
            let fd1 = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
            let fd2 = (b.value(t + h) - 2.0 * b.value(t) + b.value(t - h)) / (h * h);
            assert!((j[1] - fd1).abs() < 1e-8, "{t}");
            assert!((j[2] - fd2).abs() < 1e-4, "{t}");
        }
    }

    #[test]
    fn constant_brackets() {
        let (c1, c2) = bump_constants(0, 0).unwrap();
        assert!((2.0..=4.0).contains(&c1));
        assert_eq!(c1, c2);
        let (_, c2k1) = bump_constants(1, 0).unwrap();
        assert!(c2k1 >= 2.0 / 3.0);
        // ∫ β² = 2 + 2∫_0^1 S², and S(x) + S(1−x) = 1 forces ∫_0^1 S² ≥ 1/4
        assert!(c1 > 2.5 && c1 < 3.0);
    }

    #[test]
    fn gram_diagonal_matches_constants() {
        let g = BumpGram::new(3, 1).unwrap();
        for k in 0..3 {
            let (c1, c2) = bump_constants(k, 1).unwrap();
            assert!((g.stiffness[k][k] - c1).abs() < 1e-10 * c1);
            assert!((g.mass[k][k] - c2).abs() < 1e-10 * c2);
        }
    }
}
