//! Truncated Fourier surrogates of Hörmander spaces on model tori.
//!
//! A [`FrequencyGrid`] describes a product torus with per-axis period and
//! cutoff; a [`SpectralField`] stores one complex coefficient per mode.
//! Norms are weighted ℓ² sums over the modes (see [`norms`]).

mod fft;
pub mod io;
pub mod norms;

pub use fft::{from_physical, to_physical};
pub use norms::*;

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub period: f64,
    pub cutoff: usize,
}

impl Axis {
    pub fn new(period: f64, cutoff: usize) -> Self {
        Self { period, cutoff }
    }

    pub fn modes(&self) -> usize {
        2 * self.cutoff + 1
    }

    /// Angular frequency of mode `n`.
    pub fn frequency(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.period
    }
}

/// Product torus with truncated spectrum. When `time_axis` is set the last
/// axis carries the time-dual coordinate `ξ_k` of the anisotropic weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    axes: Vec<Axis>,
    time_axis: bool,
}

impl FrequencyGrid {
    pub fn new(axes: Vec<Axis>, time_axis: bool) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Parameter("grid needs at least one axis".into()));
        }
        if axes.iter().any(|a| a.cutoff == 0 || !(a.period > 0.0)) {
            return Err(Error::Parameter("cutoffs and periods must be positive".into()));
        }
        Ok(Self { axes, time_axis })
    }

    /// Isotropic spatial grid with equal period and cutoff on every axis.
    pub fn spatial(dim: usize, period: f64, cutoff: usize) -> Result<Self> {
        Self::new(vec![Axis::new(period, cutoff); dim], false)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn has_time_axis(&self) -> bool {
        self.time_axis
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::modes).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for i in (0..self.dim().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.axes[i + 1].modes();
        }
        s
    }

    pub fn mode(&self, mut idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            let m = self.axes[i].modes();
            out[i] = (idx % m) as i64 - self.axes[i].cutoff as i64;
            idx /= m;
        }
        out
    }

    pub fn index_of(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.dim() {
            return None;
        }
        let mut idx = 0;
        for (a, &n) in self.axes.iter().zip(mode) {
            if n.unsigned_abs() as usize > a.cutoff {
                return None;
            }
            idx = idx * a.modes() + (n + a.cutoff as i64) as usize;
        }
        Some(idx)
    }

    pub fn frequencies(&self, idx: usize) -> Vec<f64> {
        self.mode(idx).iter().zip(&self.axes).map(|(&n, a)| a.frequency(n)).collect()
    }

    /// `(|ξ′|², ξ_k)` for mode `idx`; `ξ_k = 0` on grids without a time axis.
    #[inline]
    pub fn split_frequency(&self, idx: usize) -> (f64, f64) {
        let mut rem = idx;
        let mut sq = 0.0;
        let mut xi_k = 0.0;
        let d = self.dim();
        for i in (0..d).rev() {
            let a = &self.axes[i];
            let m = a.modes();
            let n = (rem % m) as i64 - a.cutoff as i64;
            rem /= m;
            let f = a.frequency(n);
            if self.time_axis && i == d - 1 {
                xi_k = f;
            } else {
                sq += f * f;
            }
        }
        (sq, xi_k)
    }

    /// Grid with axis `axis` removed (restriction to a hyperplane).
    pub fn without_axis(&self, axis: usize) -> Result<Self> {
        if self.dim() < 2 {
            return Err(Error::Parameter("cannot drop the only axis".into()));
        }
        let mut axes = self.axes.clone();
        axes.remove(axis);
        let time_axis = self.time_axis && axis != self.dim() - 1;
        Self::new(axes, time_axis)
    }

    /// Same periods with every cutoff replaced by `cutoffs[i]`.
    pub fn with_cutoffs(&self, cutoffs: &[usize]) -> Result<Self> {
        let axes = self.axes.iter().zip(cutoffs).map(|(a, &c)| Axis::new(a.period, c)).collect();
        Self::new(axes, self.time_axis)
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = self.axes.iter().map(|a| format!("L={} N={}", a.period, a.cutoff)).collect();
        format!("[{}]{}", parts.join("; "), if self.time_axis { " (last axis time)" } else { "" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub grid: FrequencyGrid,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} coefficients for {} modes", coeffs.len(), grid.len())));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: &FrequencyGrid) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); grid.len()], grid: grid.clone() }
    }

    pub fn from_fn(grid: &FrequencyGrid, f: impl Fn(&[i64]) -> Complex64) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(&grid.mode(i))).collect();
        Self { grid: grid.clone(), coeffs }
    }

    /// Single mode with coefficient 1.
    pub fn unit_mode(grid: &FrequencyGrid, mode: &[i64]) -> Result<Self> {
        let mut f = Self::zeros(grid);
        let idx = grid.index_of(mode).ok_or_else(|| Error::Parameter(format!("mode {mode:?} outside grid")))?;
        f.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// Seeded complex Gaussian coefficients scaled by `decay(|ξ′|², ξ_k)`.
    pub fn random(grid: &FrequencyGrid, seed: u64, decay: impl Fn(f64, f64) -> f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..grid.len())
            .map(|i| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let (sq, k) = grid.split_frequency(i);
                Complex64::new(re, im) * decay(sq, k)
            })
            .collect();
        Self { grid: grid.clone(), coeffs }
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(i) = self.coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input(format!("non-finite coefficient at mode {:?}", self.grid.mode(i))));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{} vs {}", self.grid.summary(), other.grid.summary())));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(*a, *b)).collect();
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    pub fn add_assign_scaled(&mut self, other: &Self, a: Complex64) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{} vs {}", self.grid.summary(), other.grid.summary())));
        }
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
        Ok(())
    }

    /// Plain ℓ² norm of the coefficients.
    pub fn l2(&self) -> f64 {
        crate::exec::sum_pairwise(self.coeffs.len(), |i| self.coeffs[i].norm_sqr()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Applies `D^α` with `D_j = i ∂_j`; on `e^{iξx}` this multiplies by `∏ (−ξ_j)^{α_j}`.
    pub fn apply_d(&self, alpha: &[u32]) -> Result<Self> {
        if alpha.len() > self.grid.dim() {
            return Err(Error::Parameter(format!("multi-index {alpha:?} longer than grid dimension")));
        }
        if alpha.iter().all(|a| *a == 0) {
            return Ok(self.clone());
        }
        let coeffs = crate::exec::map_collect(self.coeffs.len(), |i| {
            let xi = self.grid.frequencies(i);
            let mut m = 1.0;
            for (a, x) in alpha.iter().zip(&xi) {
                m *= (-x).powi(*a as i32);
            }
            self.coeffs[i] * m
        });
        Ok(Self { grid: self.grid.clone(), coeffs })
    }

    /// Applies `∂_j^q` (plain derivative).
    pub fn partial(&self, axis: usize, q: u32) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|i| {
                let xi = self.grid.frequencies(i)[axis];
                self.coeffs[i] * Complex64::new(0.0, xi).powu(q)
            })
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Restriction to the hyperplane `x_axis = position`; exact for trigonometric polynomials.
    pub fn restrict(&self, axis: usize, position: f64) -> Result<Self> {
        let out_grid = self.grid.without_axis(axis)?;
        let a = self.grid.axes()[axis];
        let phases: Vec<Complex64> = (-(a.cutoff as i64)..=a.cutoff as i64)
            .map(|n| Complex64::from_polar(1.0, a.frequency(n) * position))
            .collect();
        let strides = self.grid.strides();
        let stride = strides[axis];
        let m = a.modes();
        let outer = self.grid.len() / (stride * m);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); out_grid.len()];
        for o in 0..outer {
            for inner in 0..stride {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, ph) in phases.iter().enumerate() {
                    acc += self.coeffs[o * stride * m + k * stride + inner] * ph;
                }
                coeffs[o * stride + inner] = acc;
            }
        }
        Self::new(out_grid, coeffs)
    }

    /// Evaluates the trigonometric polynomial at a point.
    pub fn eval_at(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.coeffs.len() {
            let xi = self.grid.frequencies(i);
            let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += self.coeffs[i] * Complex64::from_polar(1.0, phase);
        }
        acc
    }

    /// Re-expresses the field on a grid with different cutoffs (zero padding or truncation).
    pub fn resample(&self, grid: &FrequencyGrid) -> Result<Self> {
        if grid.dim() != self.grid.dim() || grid.has_time_axis() != self.grid.has_time_axis() {
            return Err(Error::GridMismatch("incompatible grid shape".into()));
        }
        let mut out = Self::zeros(grid);
        for i in 0..self.coeffs.len() {
            if let Some(j) = grid.index_of(&self.grid.mode(i)) {
                out.coeffs[j] = self.coeffs[i];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_roundtrip() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 2), Axis::new(2.0, 3), Axis::new(3.0, 1)], true).unwrap();
        assert_eq!(g.len(), 5 * 7 * 3);
        for i in 0..g.len() {
            assert_eq!(g.index_of(&g.mode(i)), Some(i));
        }
        let (sq, k) = g.split_frequency(g.index_of(&[1, -2, 1]).unwrap());
        assert!((sq - ((2.0 * PI).powi(2) + (2.0 * PI).powi(2))).abs() < 1e-12);
        assert!((k - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn restriction_of_sine() {
        // sin(x2) on a 2π-periodic axis restricted to x2 = π/2 gives 1.
        let g = FrequencyGrid::spatial(2, 2.0 * PI, 3).unwrap();
        let f = SpectralField::from_fn(&g, |n| match n {
            [0, 1] => Complex64::new(0.0, -0.5),
            [0, -1] => Complex64::new(0.0, 0.5),
            _ => Complex64::new(0.0, 0.0),
        });
        let r = f.restrict(1, PI / 2.0).unwrap();
        assert!((r.coeffs[r.grid.index_of(&[0]).unwrap()] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // ∂_2 sin = cos, equal to 1 at x2 = 0
        let d = f.partial(1, 1).restrict(1, 0.0).unwrap();
        assert!((d.eval_at(&[0.3]) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
}
