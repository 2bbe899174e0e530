//! Compatibility conditions between the boundary data and the initial data.
//!
//! From the equation solved for `∂_t^κ u`, the initial jets `v_l = ∂_t^l u|_{t=0}`
//! follow recursively from `f` and `h`. Each boundary datum must then agree with
//! `∂_t^k B_j u|_{t=0}` on `Γ` for as many `k` as the regularity `s` resolves.

mod data;
mod jets;

pub use data::{read_data, write_data, BoundaryData, CauchyData, DataTuple, JetField};
pub use jets::{normalize_leading, CoefficientJet, SolvedForm, SpatialFactor, TermJet, LEADING_TOL};

use crate::error::{Error, Result};
use crate::series::binomial;
use crate::spectral::{Axis, SpectralField};
use crate::symbol::{BoundarySide, ParabolicProblem};
use crate::trace::{extend_t1, TraceVector};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;

/// Default absolute residual tolerance on unit-normalized data.
pub const RESIDUAL_TOL: f64 = 1e-8;
const LADDER_EPS: f64 = 1e-12;

/// Least integer `σ₀ ≥ 2m` with `σ₀ ≥ m_j + 1` for every boundary order.
pub fn sigma0(m: u32, orders: &[u32]) -> Result<u32> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    Ok(orders.iter().map(|mj| mj + 1).fold(2 * m, u32::max))
}

/// Whether `s` sits on `{σ₀ + r − 1/2 : r ≥ 1}`, where the data space is
/// defined by interpolation and the conditions are not evaluated.
pub fn on_ladder(s: f64, sigma0: u32) -> bool {
    let r = s - sigma0 as f64 + 0.5;
    r >= 1.0 - LADDER_EPS && (r - r.round()).abs() < LADDER_EPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionCount {
    pub count: usize,
    /// `s` sits exactly where a further condition switches on.
    pub at_jump: bool,
}

/// Number of integers `k ≥ 0` with `k < (s − m_j − 1/2 − b) / (2b)`.
pub fn condition_count(s: f64, b: u32, mj: u32) -> ConditionCount {
    let bound = (s - mj as f64 - 0.5 - b as f64) / (2.0 * b as f64);
    let at_jump = bound >= -LADDER_EPS && (bound - bound.round()).abs() < LADDER_EPS;
    let count = if bound <= 0.0 { 0 } else { bound.ceil() as usize };
    ConditionCount { count, at_jump }
}

/// Orders and counts governing the conditions of one problem.
#[derive(Debug, Clone, Serialize)]
pub struct CompatibilitySystem {
    pub sigma0: u32,
    pub kappa: u32,
    pub b: u32,
    pub orders: Vec<u32>,
}

impl CompatibilitySystem {
    pub fn new(problem: &ParabolicProblem) -> Result<Self> {
        let orders = problem.boundary_orders();
        Ok(Self { sigma0: sigma0(problem.m, &orders)?, kappa: problem.kappa(), b: problem.b, orders })
    }

    /// Index `r` of the interval `D_0 = (σ₀, σ₀ + 1/2)`, `D_r = (σ₀ + r − 1/2, σ₀ + r + 1/2)`
    /// containing `s`; `None` at or below `σ₀` and on the ladder.
    pub fn interval_of(&self, s: f64) -> Option<usize> {
        let s0 = self.sigma0 as f64;
        if s <= s0 || on_ladder(s, self.sigma0) {
            return None;
        }
        Some((s - s0 + 0.5).floor() as usize)
    }

    /// `q_{r,j} = ⌊(σ₀ + r − m_j − 1 − b) / (2b)⌋`: the last conditioned `k` for `s ∈ D_r`.
    pub fn q(&self, r: usize, j: usize) -> i64 {
        let num = self.sigma0 as i64 + r as i64 - self.orders[j] as i64 - 1 - self.b as i64;
        num.div_euclid(2 * self.b as i64)
    }

    pub fn counts(&self, s: f64) -> Vec<ConditionCount> {
        self.orders.iter().map(|&mj| condition_count(s, self.b, mj)).collect()
    }
}

/// Initial jets `v_0, …, v_upto` of the solution determined by `f` and `h`.
pub fn v_sequence(data: &DataTuple, solved: &SolvedForm, jets: &CoefficientJet, upto: usize) -> Result<Vec<SpectralField>> {
    let kappa = solved.kappa as usize;
    if data.h.h.len() != kappa {
        return Err(Error::Parameter(format!("{} initial fields for κ = {kappa}", data.h.h.len())));
    }
    let mut v: Vec<SpectralField> = data.h.h.iter().take(upto + 1).cloned().collect();
    for l in kappa..=upto {
        let j = l - kappa;
        if j > jets.depth {
            return Err(Error::Parameter(format!("v_{l} needs coefficient jets of depth {j}, have {}", jets.depth)));
        }
        let mut acc = SpectralField::zeros(&jets.grid);
        for term in &solved.terms {
            for q in 0..=j {
                let dv = v[term.beta as usize + q].apply_d(&term.alpha)?;
                let part = jets.apply(&term.jets[j - q], &dv)?;
                acc.add_assign_scaled(&part, Complex64::new(binomial(j, q), 0.0))?;
            }
        }
        for q in 0..=j {
            let part = jets.apply(&solved.f_scale[j - q], data.f.jet(q)?)?;
            acc.add_assign_scaled(&part, Complex64::new(binomial(j, q), 0.0))?;
        }
        v.push(acc);
    }
    Ok(v)
}

/// Highest `v` index used by `B_{j,k}`.
pub fn v_needed(jets: &CoefficientJet, j: usize, k: usize) -> usize {
    jets.boundary[j].iter().map(|t| t.beta as usize).max().unwrap_or(0) + k
}

/// `B_{j,k}(v) = Σ_q C(k,q) ∂_t^{k−q} b_j^{α,β}(·,0) D^α v_{β+q}`, restricted to one side of `Γ`.
pub fn b_jk_apply(
    problem: &ParabolicProblem,
    jets: &CoefficientJet,
    j: usize,
    k: usize,
    v: &[SpectralField],
    side: BoundarySide,
) -> Result<SpectralField> {
    let terms = jets.boundary.get(j).ok_or_else(|| Error::Parameter(format!("no boundary operator {j}")))?;
    if k > jets.depth {
        return Err(Error::Parameter(format!("B_{{{j},{k}}} needs coefficient jets of depth {k}")));
    }
    let mut acc = SpectralField::zeros(&jets.grid);
    for term in terms {
        for q in 0..=k {
            let idx = term.beta as usize + q;
            let vi = v.get(idx).ok_or_else(|| Error::Parameter(format!("v_{idx} missing for B_{{{j},{k}}}")))?;
            let part = jets.apply(&term.jets[k - q], &vi.apply_d(&term.alpha)?)?;
            acc.add_assign_scaled(&part, Complex64::new(binomial(k, q), 0.0))?;
        }
    }
    acc.restrict(problem.n - 1, problem.geometry.side_position(side))
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub j: usize,
    pub k: usize,
    /// ℓ² norm of `∂_t^k g_j − B_{j,k}(v)` over both boundary components.
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatReport {
    pub s: f64,
    pub sigma0: u32,
    pub rows: Vec<ResidualRow>,
    pub pass: bool,
}

impl CompatReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,residual,tol,pass\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:e},{:e},{}", r.j, r.k, r.residual, r.tol, r.pass);
        }
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

fn check_shape(data: &DataTuple, problem: &ParabolicProblem) -> Result<()> {
    if data.g.len() != problem.boundary.len() {
        return Err(Error::Parameter(format!("{} boundary data for {} operators", data.g.len(), problem.boundary.len())));
    }
    Ok(())
}

/// Residuals of every condition resolved at regularity `s`.
pub fn compat_residuals(data: &DataTuple, problem: &ParabolicProblem, jets: &CoefficientJet, s: f64, tol: f64) -> Result<CompatReport> {
    check_shape(data, problem)?;
    let sys = CompatibilitySystem::new(problem)?;
    if s <= sys.sigma0 as f64 || on_ladder(s, sys.sigma0) {
        return Err(Error::Domain(format!("s = {s} must exceed σ₀ = {} and avoid σ₀ + r − 1/2", sys.sigma0)));
    }
    let counts = sys.counts(s);
    residuals_for(data, problem, jets, &counts.iter().map(|c| c.count).collect::<Vec<_>>(), s, tol, sys.sigma0)
}

fn residuals_for(
    data: &DataTuple,
    problem: &ParabolicProblem,
    jets: &CoefficientJet,
    counts: &[usize],
    s: f64,
    tol: f64,
    sigma0: u32,
) -> Result<CompatReport> {
    let solved = normalize_leading(problem, jets)?;
    let upto = (0..counts.len()).filter(|&j| counts[j] > 0).map(|j| v_needed(jets, j, counts[j] - 1)).max();
    let v = match upto {
        Some(u) => v_sequence(data, &solved, jets, u.max(solved.kappa as usize - 1))?,
        None => Vec::new(),
    };
    let mut rows = Vec::new();
    for (j, &count) in counts.iter().enumerate() {
        for k in 0..count {
            let mut sq = 0.0;
            for side in problem.geometry.sides() {
                let b = b_jk_apply(problem, jets, j, k, &v, side)?;
                let g = data.g[j].side(side).jet(k)?;
                sq += b.sub(g)?.l2().powi(2);
            }
            let residual = sq.sqrt();
            rows.push(ResidualRow { j, k, residual, tol, pass: residual <= tol });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(CompatReport { s, sigma0, rows, pass })
}

/// Projector onto compatible data for `s ∈ D_r`: `g_j ↦ g_j + T(w_{j,0}, …, w_{j,q_{r,j}})`
/// with `w_{j,k} = B_{j,k}(v)|_Γ − ∂_t^k g_j|_Γ`. `f` and `h` are unchanged, so the map is idempotent.
/// When a boundary datum carries a space-time surrogate, `T(w)` is sampled onto its time axis.
pub fn project_q(data: &DataTuple, problem: &ParabolicProblem, jets: &CoefficientJet, s: f64) -> Result<DataTuple> {
    check_shape(data, problem)?;
    let sys = CompatibilitySystem::new(problem)?;
    let r = sys
        .interval_of(s)
        .ok_or_else(|| Error::Domain(format!("s = {s} lies in no interval D_r (σ₀ = {})", sys.sigma0)))?;
    let qs: Vec<i64> = (0..problem.boundary.len()).map(|j| sys.q(r, j)).collect();
    let mut out = data.clone();
    if qs.iter().all(|q| *q < 0) {
        return Ok(out);
    }
    let solved = normalize_leading(problem, jets)?;
    let upto = (0..qs.len())
        .filter(|&j| qs[j] >= 0)
        .map(|j| v_needed(jets, j, qs[j] as usize))
        .max()
        .unwrap_or(0)
        .max(solved.kappa as usize - 1);
    let v = v_sequence(data, &solved, jets, upto)?;
    for (j, &q) in qs.iter().enumerate() {
        if q < 0 {
            continue;
        }
        for side in problem.geometry.sides() {
            let g = out.g[j].side_mut(side);
            let mut w = Vec::with_capacity(q as usize + 1);
            for k in 0..=q as usize {
                let target = b_jk_apply(problem, jets, j, k, &v, side)?;
                w.push(target.sub(g.jet(k)?)?);
                g.jets[k] = target;
            }
            if let Some(st) = &mut g.space_time {
                let time: Axis = *st.grid.axes().last().expect("space-time grid has axes");
                let ext = extend_t1(&TraceVector::new(problem.b, w)?).to_space_time(time)?;
                *st = st.add(&ext.resample(&st.grid)?)?;
            }
        }
    }
    Ok(out)
}
