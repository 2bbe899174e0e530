//! Regularity weights `μ_{s,φ}`, slowly varying log-power parameters and
//! interpolation parameters with functional argument.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::E;
use std::fmt;
use std::sync::Arc;

/// How iterated logarithms are shifted so that they are defined on `[1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogShift {
    /// `L₁(r) = ln(e − 1 + r)`, `L_{i+1}(r) = ln(e − 1 + L_i(r))`.
    /// Every level equals 1 at `r = 1`.
    #[default]
    Nested,
}

/// Slowly varying parameter `φ(r) = ∏ L_i(r)^{θ_i}` built from shifted
/// iterated logarithms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhiLogPower {
    #[serde(default)]
    pub theta: Vec<f64>,
    #[serde(default)]
    pub shift: LogShift,
}

impl PhiLogPower {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(theta: Vec<f64>) -> Self {
        Self { theta, shift: LogShift::Nested }
    }

    /// `φ(r) = ln(e−1+r)^θ`.
    pub fn log_power(theta: f64) -> Self {
        Self::new(vec![theta])
    }

    pub fn is_one(&self) -> bool {
        self.theta.iter().all(|t| *t == 0.0)
    }

    /// Concatenates exponent lists; the result is the pointwise product.
    pub fn concat(&self, other: &Self) -> Self {
        let mut theta = self.theta.clone();
        theta.extend_from_slice(&other.theta);
        Self::new(theta)
    }

    /// Evaluates without the domain check. Callers guarantee `r ≥ 1`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let mut acc = 1.0;
        let mut level = r;
        for &theta in &self.theta {
            level = (E - 1.0 + level).ln();
            if theta != 0.0 {
                acc *= level.powf(theta);
            }
        }
        acc
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        phi_eval(self, r)
    }
}

impl fmt::Display for PhiLogPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .theta
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != 0.0)
            .map(|(i, t)| format!("log{}^{}", if i == 0 { String::new() } else { format!("[{}]", i + 1) }, t))
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Evaluates `φ(r)` for `r ≥ 1`.
pub fn phi_eval(phi: &PhiLogPower, r: f64) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!("phi is defined on [1, inf), got r = {r}")));
    }
    Ok(phi.value(r))
}

/// Anisotropic weight `μ(ξ′, ξ_k) = ρ^{s/2} φ(ρ^{1/2})` with
/// `ρ = 1 + |ξ′|² + |ξ_k|^{2γ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub s: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub phi: PhiLogPower,
}

fn default_gamma() -> f64 {
    0.5
}

impl WeightParams {
    pub fn new(s: f64, gamma: f64, phi: PhiLogPower) -> Self {
        Self { s, gamma, phi }
    }

    pub fn sobolev(s: f64, gamma: f64) -> Self {
        Self::new(s, gamma, PhiLogPower::one())
    }

    /// Same anisotropy and `φ`, order shifted by `ds`.
    pub fn shifted(&self, ds: f64) -> Self {
        Self::new(self.s + ds, self.gamma, self.phi.clone())
    }

    #[inline]
    pub fn rho(&self, xi_prime_sq: f64, xi_k: f64) -> f64 {
        1.0 + xi_prime_sq + xi_k.abs().powf(2.0 * self.gamma)
    }

    #[inline]
    pub fn from_rho(&self, rho: f64) -> f64 {
        let base = if self.s == 0.0 { 1.0 } else { rho.powf(0.5 * self.s) };
        base * self.phi.value(rho.sqrt())
    }

    /// Weight at `(ξ′, ξ_k)` given `|ξ′|²` directly.
    #[inline]
    pub fn eval_sq(&self, xi_prime_sq: f64, xi_k: f64) -> f64 {
        self.from_rho(self.rho(xi_prime_sq, xi_k))
    }
}

/// Evaluates `μ_{s,φ}(ξ′, ξ_k)`.
pub fn mu_eval(w: &WeightParams, xi_prime: &[f64], xi_k: f64) -> f64 {
    let sq: f64 = xi_prime.iter().map(|x| x * x).sum();
    w.eval_sq(sq, xi_k)
}

/// A function usable as an interpolation parameter `ψ` on `(0, ∞)`.
pub trait InterpParam: Send + Sync {
    fn eval(&self, r: f64) -> f64;
}

/// Interpolation parameter
/// `ψ(r) = r^{(s−s₀)/(s₁−s₀)} φ(r^{1/(s₁−s₀)})` for `r ≥ 1`, `ψ(r) = φ(1)` below.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiParam {
    pub s0: f64,
    pub s: f64,
    pub s1: f64,
    pub phi: PhiLogPower,
}

impl PsiParam {
    pub fn theta(&self) -> f64 {
        (self.s - self.s0) / (self.s1 - self.s0)
    }
}

impl InterpParam for PsiParam {
    #[inline]
    fn eval(&self, r: f64) -> f64 {
        if r < 1.0 {
            return self.phi.value(1.0);
        }
        let span = self.s1 - self.s0;
        r.powf(self.theta()) * self.phi.value(r.powf(1.0 / span))
    }
}

pub fn psi_from(s0: f64, s: f64, s1: f64, phi: PhiLogPower) -> Result<PsiParam> {
    if !(s0 < s && s < s1) {
        return Err(Error::Parameter(format!("need s0 < s < s1, got ({s0}, {s}, {s1})")));
    }
    Ok(PsiParam { s0, s, s1, phi })
}

/// An arbitrary positive function on `(0, ∞)`, e.g. a member of the class of
/// Borel functions bounded on compacts with `1/ψ` bounded on rays.
#[derive(Clone)]
pub struct GenericInterpParam {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for GenericInterpParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericInterpParam").field("label", &self.label).finish()
    }
}

impl GenericInterpParam {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(f) }
    }

    /// `ψ(r) = r^θ`.
    pub fn power(theta: f64) -> Self {
        Self::new(format!("t^{theta}"), move |r| r.powf(theta))
    }

    pub fn from_psi(psi: PsiParam) -> Self {
        Self::new(format!("psi({},{},{};{})", psi.s0, psi.s, psi.s1, psi.phi), move |r| psi.eval(r))
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl InterpParam for GenericInterpParam {
    #[inline]
    fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }
}

/// Result of the sampled class-membership check. Heuristic: only the
/// sampled points are inspected.
#[derive(Debug, Clone, Serialize)]
pub struct ClassCheck {
    pub min_value: f64,
    pub max_reciprocal_on_ray: f64,
    pub pass: bool,
}

/// Samples `ψ` geometrically on `[1/radius, radius]` and checks positivity,
/// finiteness and boundedness of `1/ψ` on `[1, radius]`.
pub fn check_class_membership(psi: &dyn InterpParam, radius: f64, samples: usize) -> ClassCheck {
    let samples = samples.max(2);
    let lr = radius.ln();
    let mut min_value = f64::INFINITY;
    let mut max_recip = 0.0f64;
    let mut finite = true;
    for i in 0..samples {
        let x = -lr + 2.0 * lr * i as f64 / (samples - 1) as f64;
        let r = x.exp();
        let v = psi.eval(r);
        finite &= v.is_finite();
        min_value = min_value.min(v);
        if r >= 1.0 {
            max_recip = max_recip.max(1.0 / v);
        }
    }
    ClassCheck { min_value, max_reciprocal_on_ray: max_recip, pass: finite && min_value > 0.0 && max_recip.is_finite() }
}

/// Fitted growth constants of a weight: `μ(ξ)/μ(η) ≤ c (1+|ξ−η|)^l` on the sample.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthFit {
    pub c: f64,
    pub l: f64,
    /// Exponent fitted on the inner half of the sample, for the stability test.
    pub l_inner: f64,
    pub pass: bool,
}

/// Deterministic Halton points in `[-radius, radius]^dim`, origin first.
pub fn halton_points(dim: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    assert!(dim <= PRIMES.len(), "halton_points supports up to {} dims", PRIMES.len());
    let radical = |mut i: u64, base: u64| {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    };
    let mut pts = vec![vec![0.0; dim]];
    for i in 1..count as u64 {
        pts.push((0..dim).map(|d| radius * (2.0 * radical(i, PRIMES[d]) - 1.0)).collect());
    }
    pts
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn envelope_slope(samples: &[(f64, f64)]) -> f64 {
    const BINS: usize = 16;
    let xmax = samples.iter().map(|s| s.0).fold(0.0f64, f64::max);
    if xmax <= 0.0 {
        return 0.0;
    }
    let mut best = [f64::NEG_INFINITY; BINS];
    let mut at = [0.0; BINS];
    for &(x, y) in samples {
        let b = ((x / xmax) * BINS as f64).min(BINS as f64 - 1.0) as usize;
        if y > best[b] {
            best[b] = y;
            at[b] = x;
        }
    }
    let pts: Vec<(f64, f64)> = (0..BINS).filter(|&b| best[b].is_finite()).map(|b| (at[b], best[b])).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return 0.0;
    }
    (sxy / sxx).max(0.0)
}

/// Fits the admissibility constants of a weight over all pairs of `points`.
///
/// The exponent `l` is the least-squares slope of the binned upper envelope of
/// `log(μ(ξ)/μ(η))` against `log(1+|ξ−η|)`, using pairs no farther apart than
/// the sample radius; `c` is then the smallest constant making the bound hold
/// on every pair. The weight passes when the exponent fitted on the inner half
/// of the sample predicts the full one (no growth with radius).
pub fn verify_weight_growth(weight: &dyn Fn(&[f64]) -> f64, points: &[Vec<f64>]) -> Result<GrowthFit> {
    if points.len() < 2 {
        return Err(Error::Parameter("need at least two sample points".into()));
    }
    let values: Vec<f64> = points.iter().map(|p| weight(p)).collect();
    let radius = points.iter().map(|p| norm(p)).fold(0.0f64, f64::max);
    let mut all = Vec::new();
    let mut full = Vec::new();
    let mut inner = Vec::new();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let d: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
            let dist = norm(&d);
            let x = (1.0 + dist).ln();
            let y = (values[i] / values[j]).ln();
            all.push((x, y));
            if dist <= radius {
                full.push((x, y));
            }
            if dist <= 0.5 * radius && norm(&points[i]) <= 0.5 * radius && norm(&points[j]) <= 0.5 * radius {
                inner.push((x, y));
            }
        }
    }
    let l = envelope_slope(&full);
    let l_inner = envelope_slope(&inner);
    let log_c = all.iter().map(|(x, y)| y - l * x).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let c = log_c.exp();
    let pass = c.is_finite() && l.is_finite() && l <= 1.25 * l_inner + 0.25;
    Ok(GrowthFit { c, l, l_inner, pass })
}

/// Empirical constants with `c₀ r^{s₀−s} ≤ φ(r) ≤ c₁ r^{s₁−s}` on the grid.
pub fn sandwich_bounds(phi: &PhiLogPower, s0: f64, s: f64, s1: f64, r_grid: &[f64]) -> Result<(f64, f64)> {
    if !(s0 < s && s < s1) {
        return Err(Error::Parameter(format!("need s0 < s < s1, got ({s0}, {s}, {s1})")));
    }
    if r_grid.is_empty() {
        return Err(Error::Parameter("empty r grid".into()));
    }
    let mut c0 = f64::INFINITY;
    let mut c1 = 0.0f64;
    for &r in r_grid {
        let p = phi_eval(phi, r)?;
        c0 = c0.min(p * r.powf(s - s0));
        c1 = c1.max(p * r.powf(s - s1));
    }
    Ok((c0, c1))
}

/// Geometric grid of `n` points on `[1, r_max]`.
pub fn geometric_grid(r_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| (r_max.ln() * i as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularVariationReport {
    pub theta: f64,
    /// `(r, max_λ |ψ(λr)/ψ(r) − λ^θ|)` along the sequence.
    pub deviations: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Tests `ψ(λr)/ψ(r) → λ^θ` along an increasing `r` sequence: passes when the
/// deviation is nonincreasing and its last value is below `tol`.
pub fn check_regularly_varying(
    psi: &dyn InterpParam,
    theta: f64,
    lambdas: &[f64],
    r_sequence: &[f64],
    tol: f64,
) -> Result<RegularVariationReport> {
    if lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Parameter("lambdas must be positive".into()));
    }
    let deviations: Vec<(f64, f64)> = r_sequence
        .iter()
        .map(|&r| {
            let pr = psi.eval(r);
            let dev = lambdas
                .iter()
                .map(|&l| (psi.eval(l * r) / pr - l.powf(theta)).abs())
                .fold(0.0f64, f64::max);
            (r, dev)
        })
        .collect();
    let monotone = deviations.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    let last_ok = deviations.last().is_some_and(|d| d.1 <= tol);
    Ok(RegularVariationReport { theta, deviations, pass: monotone && last_ok })
}

/// `ω(t) = α(t) ψ(β(t)/α(t))`, the parameter produced by reiterated
/// interpolation. Fails if `α/β` is unbounded on the sampled ray `[1, 1e12]`.
pub fn reiteration_weight(
    alpha: Arc<dyn InterpParam>,
    beta: Arc<dyn InterpParam>,
    psi: Arc<dyn InterpParam>,
) -> Result<GenericInterpParam> {
    let mut max_ratio = 0.0f64;
    for r in geometric_grid(1e12, 241) {
        max_ratio = max_ratio.max(alpha.eval(r) / beta.eval(r));
    }
    if !max_ratio.is_finite() || max_ratio > 1e12 {
        return Err(Error::Parameter(format!("alpha/beta unbounded near infinity (sampled max {max_ratio:e})")));
    }
    Ok(GenericInterpParam::new("reiterated", move |t| {
        let a = alpha.eval(t);
        a * psi.eval(beta.eval(t) / a)
    }))
}
