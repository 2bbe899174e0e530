use super::SpectralField;
use crate::error::{Error, Result};
use crate::exec::sum_pairwise;
use crate::weights::{sandwich_bounds, InterpParam, PhiLogPower, WeightParams};
use serde::Serialize;

/// A positive Fourier multiplier on a grid, evaluated from `(|ξ′|², ξ_k)`.
pub trait Multiplier: Send + Sync {
    fn at(&self, xi_prime_sq: f64, xi_k: f64) -> f64;
}

impl Multiplier for WeightParams {
    #[inline]
    fn at(&self, xi_prime_sq: f64, xi_k: f64) -> f64 {
        self.eval_sq(xi_prime_sq, xi_k)
    }
}

/// Multiplier `m₀ ψ(m₁/m₀)` of the interpolation space `[X₀, X₁]_ψ` of a
/// pair whose generating operator is the multiplier `m₁/m₀`.
pub struct Interpolated<'a> {
    pub m0: &'a dyn Multiplier,
    pub m1: &'a dyn Multiplier,
    pub psi: &'a dyn InterpParam,
}

impl Multiplier for Interpolated<'_> {
    #[inline]
    fn at(&self, xi_prime_sq: f64, xi_k: f64) -> f64 {
        let a = self.m0.at(xi_prime_sq, xi_k);
        a * self.psi.eval(self.m1.at(xi_prime_sq, xi_k) / a)
    }
}

/// `(Σ m(ξ)² |ŵ(ξ)|²)^{1/2}`.
pub fn multiplier_norm(f: &SpectralField, m: &dyn Multiplier) -> Result<f64> {
    f.check_finite()?;
    let grid = &f.grid;
    Ok(sum_pairwise(f.coeffs.len(), |i| {
        let (sq, k) = grid.split_frequency(i);
        let w = m.at(sq, k);
        w * w * f.coeffs[i].norm_sqr()
    })
    .sqrt())
}

/// Norm of `f` in the surrogate of `H^μ` with `μ = μ_{s,φ}` on the field's grid.
pub fn hoermander_norm(f: &SpectralField, w: &WeightParams) -> Result<f64> {
    multiplier_norm(f, w)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub space: String,
    pub value: f64,
    pub grid: String,
}

pub fn norm_report(f: &SpectralField, w: &WeightParams) -> Result<NormReport> {
    Ok(NormReport {
        space: format!("H^(s={}, gamma={}; phi={})", w.s, w.gamma, w.phi),
        value: hoermander_norm(f, w)?,
        grid: f.grid.summary(),
    })
}

/// Interpolation norm of the pair `(m0, m1)` with parameter `ψ`.
pub fn interp_norm(f: &SpectralField, m0: &dyn Multiplier, m1: &dyn Multiplier, psi: &dyn InterpParam) -> Result<f64> {
    f.check_finite()?;
    let grid = &f.grid;
    // admissibility surrogate: the generating multiplier must be positive and finite
    for i in 0..f.coeffs.len() {
        let (sq, k) = grid.split_frequency(i);
        let (a, b) = (m0.at(sq, k), m1.at(sq, k));
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Numerical(format!("nonpositive multiplier at mode {:?}", grid.mode(i))));
        }
    }
    multiplier_norm(f, &Interpolated { m0, m1, psi })
}

/// ℓ² combination of component norms.
pub fn direct_sum_norm(components: &[(&SpectralField, &WeightParams)]) -> Result<f64> {
    if components.is_empty() {
        return Err(Error::Parameter("direct sum of zero components".into()));
    }
    let mut acc = 0.0;
    for (f, w) in components {
        acc += hoermander_norm(f, w)?.powi(2);
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub c0: f64,
    pub c1: f64,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// `middle − c0·lower` and `c1·upper − middle`; both nonnegative on pass.
    pub slack_low: f64,
    pub slack_high: f64,
    pub pass: bool,
}

/// Checks `c₀‖f‖_{s₀} ≤ ‖f‖_{s,φ} ≤ c₁‖f‖_{s₁}` with constants taken from
/// [`sandwich_bounds`] over every `ρ^{1/2}` occurring on the field's grid.
pub fn embedding_check(
    f: &SpectralField,
    s0: f64,
    s: f64,
    s1: f64,
    phi: &PhiLogPower,
    gamma: f64,
) -> Result<EmbeddingReport> {
    let w = WeightParams::new(s, gamma, phi.clone());
    let mut r_grid: Vec<f64> = (0..f.grid.len())
        .map(|i| {
            let (sq, k) = f.grid.split_frequency(i);
            w.rho(sq, k).sqrt()
        })
        .collect();
    r_grid.push(1.0);
    let (c0, c1) = sandwich_bounds(phi, s0, s, s1, &r_grid)?;
    let lower = hoermander_norm(f, &WeightParams::sobolev(s0, gamma))?;
    let middle = hoermander_norm(f, &w)?;
    let upper = hoermander_norm(f, &WeightParams::sobolev(s1, gamma))?;
    let slack_low = middle - c0 * lower;
    let slack_high = c1 * upper - middle;
    let tol = 1e-12 * middle.max(f64::MIN_POSITIVE);
    Ok(EmbeddingReport {
        c0,
        c1,
        lower,
        middle,
        upper,
        slack_low,
        slack_high,
        pass: slack_low >= -tol && slack_high >= -tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Axis, FrequencyGrid};
    use crate::weights::psi_from;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_unit_mode() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 4), Axis::new(2.0, 4)], true).unwrap();
        let w = WeightParams::new(3.5, 0.5, PhiLogPower::log_power(2.0));
        assert_eq!(hoermander_norm(&SpectralField::zeros(&g), &w).unwrap(), 0.0);
        let e0 = SpectralField::unit_mode(&g, &[0, 0]).unwrap();
        assert!((hoermander_norm(&e0, &w).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_mode_brute_force() {
        let l = 3.0;
        let g = FrequencyGrid::new(vec![Axis::new(l, 1)], false).unwrap();
        let f = SpectralField::from_fn(&g, |_| Complex64::new(1.0, 0.0));
        let w = WeightParams::sobolev(2.0, 1.0);
        let xi = 2.0 * PI / l;
        let mu = 1.0 + xi * xi; // rho^{s/2} with s = 2
        let expect = (2.0 * mu * mu + 1.0f64).sqrt();
        assert!((hoermander_norm(&f, &w).unwrap() - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn non_finite_rejected() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 1)], false).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.coeffs[1] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(hoermander_norm(&f, &WeightParams::sobolev(0.0, 1.0)), Err(Error::Input(_))));
    }

    #[test]
    fn pythagoras() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 2)], false).unwrap();
        let a = SpectralField::unit_mode(&g, &[0]).unwrap().scale(Complex64::new(3.0, 0.0));
        let b = SpectralField::unit_mode(&g, &[0]).unwrap().scale(Complex64::new(0.0, 4.0));
        let w = WeightParams::sobolev(1.0, 1.0);
        assert!((direct_sum_norm(&[(&a, &w), (&b, &w)]).unwrap() - 5.0).abs() < 1e-14);
        assert!(direct_sum_norm(&[]).is_err());
    }

    #[test]
    fn interpolation_reproduces_target_norm() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 6), Axis::new(1.0, 6)], true).unwrap();
        let f = SpectralField::random(&g, 3, |sq, k| 1.0 / (1.0 + sq + k.abs()));
        let phi = PhiLogPower::log_power(1.0);
        let psi = psi_from(0.0, 1.0, 2.0, phi.clone()).unwrap();
        let a = interp_norm(&f, &WeightParams::sobolev(0.0, 0.5), &WeightParams::sobolev(2.0, 0.5), &psi).unwrap();
        let b = hoermander_norm(&f, &WeightParams::new(1.0, 0.5, phi)).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn embedding_zero_field() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 2)], false).unwrap();
        let r = embedding_check(&SpectralField::zeros(&g), 1.0, 2.0, 3.0, &PhiLogPower::one(), 1.0).unwrap();
        assert!(r.pass && r.middle == 0.0);
        assert!(embedding_check(&SpectralField::zeros(&g), 2.0, 2.0, 2.0, &PhiLogPower::one(), 1.0).is_err());
    }
}
