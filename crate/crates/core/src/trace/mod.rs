//! Cauchy-data traces `u ↦ (∂_t^k u|_{t=0})_{k<r}` and the explicit right
//! inverse `T₁ v = β(⟨ξ⟩^{2b} t) Σ_k v̂_k(ξ) t^k / k!`.
//!
//! Space-time fields keep an analytic time profile per term, so traces at
//! `t = 0` are exact. Sampling onto a time grid is available for norms.

mod bump;

pub use bump::{bump_constants, BumpFunction, BumpGram, PLATEAU, SUPPORT};

use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::series::{binomial, factorial};
use crate::spectral::{from_physical, Axis, FrequencyGrid, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Deepest time derivative served by analytic profiles.
pub const MAX_JET_DEPTH: usize = 32;

/// Time dependence of one term, applied per spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeProfile {
    /// `e^{rate t}`.
    Exp { rate: Complex64 },
    /// `β(⟨ξ⟩^{2b} t) t^power / power!`.
    Cutoff { power: usize, b: u32 },
}

/// `⟨ξ⟩^{2b} = (1 + |ξ|²)^b`.
pub fn anisotropic_scale(sq: f64, b: u32) -> f64 {
    (1.0 + sq).powi(b as i32)
}

impl TimeProfile {
    /// `∂_t^q` of the profile at `t` for spatial frequency `|ξ|² = sq`.
    pub fn derivative(&self, sq: f64, t: f64, q: usize) -> Complex64 {
        match *self {
            Self::Exp { rate } => rate.powu(q as u32) * (rate * t).exp(),
            Self::Cutoff { power, b } => {
                let lambda = anisotropic_scale(sq, b);
                let tau = lambda * t;
                if tau.abs() >= SUPPORT {
                    return Complex64::new(0.0, 0.0);
                }
                let beta = BumpFunction.jet(tau, q);
                let mut acc = 0.0;
                for (i, b) in beta.iter().enumerate() {
                    let j = q - i;
                    if j > power {
                        continue;
                    }
                    let mono = factorial(power) / factorial(power - j) * t.powi((power - j) as i32) / factorial(power);
                    acc += binomial(q, i) * lambda.powi(i as i32) * b * mono;
                }
                Complex64::new(acc, 0.0)
            }
        }
    }
}

/// Spatial coefficient fields each multiplied by a time profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub grid: FrequencyGrid,
    pub terms: Vec<(TimeProfile, SpectralField)>,
}

impl SpaceTimeField {
    pub fn zero(grid: &FrequencyGrid) -> Self {
        Self { grid: grid.clone(), terms: Vec::new() }
    }

    pub fn constant_in_time(field: SpectralField) -> Self {
        Self { grid: field.grid.clone(), terms: vec![(TimeProfile::Exp { rate: Complex64::new(0.0, 0.0) }, field)] }
    }

    pub fn push(&mut self, profile: TimeProfile, field: SpectralField) -> Result<()> {
        if field.grid != self.grid {
            return Err(Error::GridMismatch(format!("term on {} added to field on {}", field.grid.summary(), self.grid.summary())));
        }
        self.terms.push((profile, field));
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (p, f) in &other.terms {
            out.push(*p, f.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { grid: self.grid.clone(), terms: self.terms.iter().map(|(p, f)| (*p, f.scale(a))).collect() }
    }

    /// `∂_t^q u(·, t)` as a spatial field.
    pub fn time_derivative(&self, q: usize, t: f64) -> SpectralField {
        let coeffs = map_collect(self.grid.len(), |i| {
            let (sq, _) = self.grid.split_frequency(i);
            self.terms.iter().map(|(p, f)| f.coeffs[i] * p.derivative(sq, t, q)).sum()
        });
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    pub fn eval(&self, t: f64) -> SpectralField {
        self.time_derivative(0, t)
    }

    /// Projects the field onto a space-time grid whose last axis is `time`.
    /// Samples are taken at `t_j = j P / M` folded into `[−P/2, P/2)`, with `M = 2N + 1`.
    pub fn to_space_time(&self, time: Axis) -> Result<SpectralField> {
        let mut axes = self.grid.axes().to_vec();
        axes.push(time);
        let st_grid = FrequencyGrid::new(axes, true)?;
        let m = time.modes();
        let slices: Vec<SpectralField> = (0..m)
            .map(|j| {
                let mut t = j as f64 * time.period / m as f64;
                if t >= time.period / 2.0 {
                    t -= time.period;
                }
                self.eval(t)
            })
            .collect();
        // time-only DFT per spatial mode
        let tgrid = FrequencyGrid::new(vec![time], false)?;
        let per_mode: Vec<SpectralField> = map_collect(self.grid.len(), |i| {
            let samples: Vec<Complex64> = slices.iter().map(|s| s.coeffs[i]).collect();
            from_physical(&tgrid, &samples, &[m]).expect("sizes match by construction")
        });
        let mut out = SpectralField::zeros(&st_grid);
        for (i, f) in per_mode.iter().enumerate() {
            for (k, c) in f.coeffs.iter().enumerate() {
                out.coeffs[i * m + k] = *c;
            }
        }
        Ok(out)
    }
}

/// Cauchy data `(v_0, …, v_{r−1})` on a shared spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceVector {
    pub b: u32,
    pub components: Vec<SpectralField>,
}

impl TraceVector {
    pub fn new(b: u32, components: Vec<SpectralField>) -> Result<Self> {
        if b == 0 {
            return Err(Error::Parameter("b must be positive".into()));
        }
        let first = components.first().ok_or_else(|| Error::Parameter("trace vector needs r >= 1".into()))?;
        if components.iter().any(|c| c.grid != first.grid) {
            return Err(Error::GridMismatch("trace components on different grids".into()));
        }
        Ok(Self { b, components })
    }

    pub fn r(&self) -> usize {
        self.components.len()
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.components[0].grid
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }
}

/// `(∂_t^k u)|_{t=0}` for `k < r`.
pub fn trace_r(u: &SpaceTimeField, r: usize, b: u32) -> Result<TraceVector> {
    if r == 0 || r > MAX_JET_DEPTH {
        return Err(Error::Parameter(format!("trace depth {r} outside 1..={MAX_JET_DEPTH}")));
    }
    TraceVector::new(b, (0..r).map(|k| u.time_derivative(k, 0.0)).collect())
}

/// Right inverse of the trace: `T₁ v = β(⟨ξ⟩^{2b} t) Σ_k v̂_k t^k / k!`.
pub fn extend_t1(v: &TraceVector) -> SpaceTimeField {
    SpaceTimeField {
        grid: v.grid().clone(),
        terms: v
            .components
            .iter()
            .enumerate()
            .map(|(k, f)| (TimeProfile::Cutoff { power: k, b: v.b }, f.clone()))
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    /// `‖T₁ v‖²` in the norm `‖u‖² + Σ_j ‖∂_{x_j}^{2bm} u‖² + ‖∂_t^m u‖²`.
    pub lhs: f64,
    /// `Σ_k ‖v_k‖²_{H^{2bm − 2bk − b}}`.
    pub rhs: f64,
    pub constant: f64,
    /// `lhs / rhs`, zero for `v = 0`.
    pub ratio: f64,
    pub pass: bool,
}

/// Constant of the bound `‖T₁v‖² ≤ c Σ_k ‖v_k‖²`:
/// `c = r max_k (2 c2(k) + c1(k, m)) / (k!)²` (Cauchy–Schwarz over the `r` terms).
pub fn extension_constant(gram: &BumpGram, r: usize) -> f64 {
    (0..r)
        .map(|k| (2.0 * gram.mass[k][k] + gram.stiffness[k][k]) / factorial(k).powi(2))
        .fold(0.0, f64::max)
        * r as f64
}

/// Checks the extension bound at `s = 2bm`. The left side is evaluated
/// exactly per mode from the bump Gram matrices, integrating over `t ∈ ℝ`.
pub fn extension_bound_check(v: &TraceVector, m: usize) -> Result<ExtensionReport> {
    let r = v.r();
    let gram = BumpGram::new(r, m)?;
    extension_bound_with(v, m, &gram)
}

pub fn extension_bound_with(v: &TraceVector, m: usize, gram: &BumpGram) -> Result<ExtensionReport> {
    let r = v.r();
    if gram.mass.len() < r || gram.m != m {
        return Err(Error::Parameter("Gram matrices do not match the trace vector".into()));
    }
    let b = v.b;
    let grid = v.grid();
    let per_mode: Vec<(f64, f64)> = map_collect(grid.len(), |i| {
        let xi = grid.frequencies(i);
        let sq: f64 = xi.iter().map(|x| x * x).sum();
        let lambda = anisotropic_scale(sq, b);
        let spatial: f64 = xi.iter().map(|x| x.powi((4 * b as usize * m) as i32)).sum();
        let a: Vec<Complex64> = (0..r).map(|k| v.components[k].coeffs[i] / factorial(k)).collect();
        let mut mass = 0.0;
        let mut stiff = 0.0;
        for k in 0..r {
            for l in 0..r {
                let cross = (a[k] * a[l].conj()).re;
                let e = (k + l) as i32;
                mass += cross * lambda.powi(-e - 1) * gram.mass[k][l];
                stiff += cross * lambda.powi(2 * m as i32 - e - 1) * gram.stiffness[k][l];
            }
        }
        let rhs: f64 = (0..r)
            .map(|k| v.components[k].coeffs[i].norm_sqr() * lambda.powi(2 * m as i32 - 2 * k as i32 - 1))
            .sum();
        ((1.0 + spatial) * mass + stiff, rhs)
    });
    let lhs: f64 = per_mode.iter().map(|p| p.0).sum();
    let rhs: f64 = per_mode.iter().map(|p| p.1).sum();
    let constant = extension_constant(gram, r);
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(ExtensionReport { lhs, rhs, constant, ratio, pass: lhs <= constant * rhs * (1.0 + 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::spatial(1, 2.0 * PI, 8).unwrap()
    }

    #[test]
    fn exp_profile_traces() {
        // u = e^t sin x₁
        let g = grid();
        let sin = SpectralField::from_fn(&g, |n| match n {
            [1] => Complex64::new(0.0, -0.5),
            [-1] => Complex64::new(0.0, 0.5),
            _ => Complex64::new(0.0, 0.0),
        });
        let mut u = SpaceTimeField::zero(&g);
        u.push(TimeProfile::Exp { rate: Complex64::new(1.0, 0.0) }, sin.clone()).unwrap();
        let tr = trace_r(&u, 3, 1).unwrap();
        for c in &tr.components {
            assert!(c.max_abs_diff(&sin) < 1e-15);
        }
        assert!(trace_r(&u, MAX_JET_DEPTH + 1, 1).is_err());
    }

    #[test]
    fn extension_of_constant() {
        let g = grid();
        let c = SpectralField::from_fn(&g, |n| if n == [0] { Complex64::new(2.5, 0.0) } else { Complex64::new(0.0, 0.0) });
        let u = extend_t1(&TraceVector::new(1, vec![c.clone()]).unwrap());
        for &t in &[0.0, 0.5, 1.0, 1.5, 2.5] {
            let want = 2.5 * BumpFunction.value(t);
            assert!((u.eval(t).eval_at(&[0.3]).re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn right_inverse_on_random_data() {
        let g = grid();
        for b in [1, 2] {
            let v = TraceVector::new(b, (0..3).map(|k| SpectralField::random(&g, 7 + k, |_, _| 1.0)).collect()).unwrap();
            let back = trace_r(&extend_t1(&v), 3, b).unwrap();
            assert!(back.max_abs_diff(&v) <= 1e-12);
        }
    }

    #[test]
    fn cutoff_derivative_matches_differences() {
        let p = TimeProfile::Cutoff { power: 2, b: 1 };
        let sq = 0.7;
        for &t in &[0.2, 0.9, 1.1] {
            let h = 1e-5;
            let fd = (p.derivative(sq, t + h, 0) - p.derivative(sq, t - h, 0)).re / (2.0 * h);
            assert!((p.derivative(sq, t, 1).re - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn support_of_extension() {
        let g = grid();
        let v = TraceVector::new(1, vec![SpectralField::random(&g, 3, |_, _| 1.0)]).unwrap();
        let u = extend_t1(&v);
        // ⟨ξ⟩² ≥ 1 for every mode, so t ≥ 2 is outside every support
        assert!(u.eval(2.0).is_zero());
    }

    #[test]
    fn zero_trace_bound() {
        let g = grid();
        let rep = extension_bound_check(&TraceVector::new(1, vec![SpectralField::zeros(&g)]).unwrap(), 1).unwrap();
        assert!(rep.pass && rep.lhs == 0.0 && rep.ratio == 0.0);
    }
}
