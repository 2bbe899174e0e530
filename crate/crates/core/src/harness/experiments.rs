//! Norm experiments on the model strip: two-sided ratio ensembles for `Λ` and
//! the local-versus-global refinement study.

use super::lambda::{apply_lambda_periodic, strip_grid};
use super::solver::{solve_model, AnalyticData, ModelConfig};
use crate::compatibility::{on_ladder, sigma0, DataTuple};
use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::spectral::{direct_sum_norm, from_physical, interp_norm, Axis, FrequencyGrid, SpectralField};
use crate::symbol::{BoundarySide, ParabolicProblem};
use crate::trace::BumpFunction;
use crate::weights::{GenericInterpParam, PhiLogPower, WeightParams};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;

/// The isomorphism constants are not known; ratios only show boundedness and stability.
pub const RATIO_NOTE: &str =
    "ratios are empirical two-sided bounds on a truncated grid; they do not estimate the operator norm";

/// Weighted components of the data space `𝒬` for regularity `s`.
fn data_components<'a>(data: &'a DataTuple, problem: &ParabolicProblem, s: f64, phi: &PhiLogPower) -> Result<Vec<(&'a SpectralField, WeightParams)>> {
    let gamma = 1.0 / (2.0 * problem.b as f64);
    let need = |f: &'a Option<SpectralField>| {
        f.as_ref().ok_or_else(|| Error::Input("data norms need space-time surrogates".into()))
    };
    let (b, m) = (problem.b as f64, problem.m as f64);
    let mut out = vec![(need(&data.f.space_time)?, WeightParams::new(s - 2.0 * m, gamma, phi.clone()))];
    for (op, g) in problem.boundary.iter().zip(&data.g) {
        let w = WeightParams::new(s - op.order as f64 - 0.5, gamma, phi.clone());
        out.push((need(&g.lower.space_time)?, w.clone()));
        out.push((need(&g.upper.space_time)?, w));
    }
    for (k, h) in data.h.h.iter().enumerate() {
        out.push((h, WeightParams::new(s - 2.0 * b * k as f64 - b, gamma, phi.clone())));
    }
    Ok(out)
}

/// `‖(f, g, h)‖_𝒬` as a direct sum of Hörmander norms.
pub fn data_norm(data: &DataTuple, problem: &ParabolicProblem, s: f64, phi: &PhiLogPower) -> Result<f64> {
    let comps = data_components(data, problem, s, phi)?;
    let refs: Vec<(&SpectralField, &WeightParams)> = comps.iter().map(|(f, w)| (*f, w)).collect();
    direct_sum_norm(&refs)
}

/// Norm used at ladder values `s`: each component is interpolated between its
/// weights at `s − ε` and `s + ε` with `ψ(r) = r^{1/2}`.
pub fn ladder_data_norm(data: &DataTuple, problem: &ParabolicProblem, s: f64, phi: &PhiLogPower, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!("ladder offset {eps} outside (0, 1/2)")));
    }
    let psi = GenericInterpParam::power(0.5);
    let mut acc = 0.0;
    for (f, w) in data_components(data, problem, s, phi)? {
        let n = interp_norm(f, &w.shifted(-eps), &w.shifted(eps), &psi)?;
        acc += n * n;
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone)]
pub struct IsoConfig {
    pub problem: ParabolicProblem,
    pub ensemble: usize,
    pub seed: u64,
    pub s_values: Vec<f64>,
    pub phis: Vec<PhiLogPower>,
    /// Cutoff of every axis at the base level; level `i` uses `base_cutoff · 2^i`.
    pub base_cutoff: usize,
    pub levels: usize,
    /// Period of the time axis of the space-time surrogate.
    pub time_period: f64,
    /// Offset used for ladder values of `s`.
    pub ladder_eps: f64,
}

impl IsoConfig {
    pub fn heat(ensemble: usize, seed: u64) -> Self {
        Self {
            problem: ParabolicProblem::heat_dirichlet(),
            ensemble,
            seed,
            s_values: vec![2.25, 2.75, 3.25],
            phis: vec![PhiLogPower::one(), PhiLogPower::log_power(1.0), PhiLogPower::log_power(-1.0)],
            base_cutoff: 6,
            levels: 2,
            time_period: 2.0,
            ladder_eps: 0.25,
        }
    }

    fn grid(&self, level: usize) -> Result<FrequencyGrid> {
        let c = self.base_cutoff << level;
        let spatial = strip_grid(&self.problem, &vec![c; self.problem.n])?;
        let mut axes = spatial.axes().to_vec();
        axes.push(Axis::new(self.time_period, c));
        FrequencyGrid::new(axes, true)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub s: f64,
    pub phi: String,
    pub level: usize,
    pub cutoff: usize,
    pub members: usize,
    pub excluded: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRow {
    pub s: f64,
    pub phi: String,
    pub spread_base: f64,
    pub spread_fine: f64,
    /// `max(a/b, b/a)` for the spreads of the first two levels.
    pub spread_change: f64,
    pub mean_change: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub seed: u64,
    pub ensemble: usize,
    pub rows: Vec<RatioRow>,
    pub refinement: Vec<RefinementRow>,
    pub max_spread: f64,
    pub max_spread_change: f64,
    pub note: &'static str,
}

impl RatioReport {
    /// Plot-ready ratio-versus-refinement series.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,phi,level,cutoff,members,excluded,min,max,mean,spread\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.s, r.phi, r.level, r.cutoff, r.members, r.excluded, r.min, r.max, r.mean, r.spread
            );
        }
        out
    }

    pub fn passes(&self, spread_bound: f64, change_bound: f64) -> bool {
        self.max_spread <= spread_bound && self.max_spread_change <= change_bound
    }
}

/// Ratios `‖Λu‖_𝒬 / ‖u‖` for an explicit ensemble; zero members are skipped and counted.
pub fn ensemble_ratios(problem: &ParabolicProblem, members: &[SpectralField], s: f64, phi: &PhiLogPower, ladder_eps: f64) -> Result<(Vec<f64>, usize)> {
    let s0 = sigma0(problem.m, &problem.boundary_orders())?;
    let gamma = 1.0 / (2.0 * problem.b as f64);
    let ladder = on_ladder(s, s0);
    let uw = WeightParams::new(s, gamma, phi.clone());
    let ratios: Vec<Result<Option<f64>>> = map_collect(members.len(), |i| {
        let u = &members[i];
        if u.is_zero() {
            return Ok(None);
        }
        let data = apply_lambda_periodic(u, problem, 0, uw.clone())?;
        let (num, den) = if ladder {
            let psi = GenericInterpParam::power(0.5);
            (ladder_data_norm(&data, problem, s, phi, ladder_eps)?, interp_norm(u, &uw.shifted(-ladder_eps), &uw.shifted(ladder_eps), &psi)?)
        } else {
            (data_norm(&data, problem, s, phi)?, crate::spectral::hoermander_norm(u, &uw)?)
        };
        let r = num / den;
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::Numerical(format!("ratio {r} for member {i}")));
        }
        Ok(Some(r))
    });
    let mut out = Vec::new();
    let mut excluded = 0;
    for r in ratios {
        match r? {
            Some(v) => out.push(v),
            None => excluded += 1,
        }
    }
    Ok((out, excluded))
}

/// Random smooth ensembles with amplitude `ρ^{−(s+2)/2}` on successively doubled grids.
pub fn isomorphism_ratio_experiment(cfg: &IsoConfig) -> Result<RatioReport> {
    let p = &cfg.problem;
    p.validate()?;
    let s0 = sigma0(p.m, &p.boundary_orders())?;
    if let Some(s) = cfg.s_values.iter().find(|s| **s <= s0 as f64) {
        return Err(Error::Domain(format!("s = {s} must exceed sigma0 = {s0}")));
    }
    if cfg.ensemble == 0 || cfg.levels == 0 {
        return Err(Error::Parameter("ensemble and level count must be positive".into()));
    }
    let gamma = 1.0 / (2.0 * p.b as f64);
    let mut rows = Vec::new();
    for level in 0..cfg.levels {
        let grid = cfg.grid(level)?;
        for &s in &cfg.s_values {
            let members: Vec<SpectralField> = (0..cfg.ensemble)
                .map(|i| {
                    SpectralField::random(&grid, cfg.seed.wrapping_add(i as u64), |sq, k| {
                        (1.0 + sq + k.abs().powf(2.0 * gamma)).powf(-(s + 2.0) / 2.0)
                    })
                })
                .collect();
            for phi in &cfg.phis {
                let (ratios, excluded) = ensemble_ratios(p, &members, s, phi, cfg.ladder_eps)?;
                if ratios.is_empty() {
                    return Err(Error::Numerical("every ensemble member vanished".into()));
                }
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let max = ratios.iter().copied().fold(0.0, f64::max);
                rows.push(RatioRow {
                    s,
                    phi: phi.to_string(),
                    level,
                    cutoff: cfg.base_cutoff << level,
                    members: ratios.len(),
                    excluded,
                    min,
                    max,
                    mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
                    spread: max / min,
                });
            }
        }
    }
    let per_level = cfg.s_values.len() * cfg.phis.len();
    let change = |a: f64, b: f64| (a / b).max(b / a);
    let refinement: Vec<RefinementRow> = if cfg.levels > 1 {
        (0..per_level)
            .map(|i| {
                let (a, b) = (&rows[i], &rows[i + per_level]);
                RefinementRow {
                    s: a.s,
                    phi: a.phi.clone(),
                    spread_base: a.spread,
                    spread_fine: b.spread,
                    spread_change: change(a.spread, b.spread),
                    mean_change: change(a.mean, b.mean),
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(RatioReport {
        seed: cfg.seed,
        ensemble: cfg.ensemble,
        max_spread: rows.iter().filter(|r| r.level == 0).map(|r| r.spread).fold(0.0, f64::max),
        max_spread_change: refinement.iter().map(|r| r.spread_change).fold(1.0, f64::max),
        rows,
        refinement,
        note: RATIO_NOTE,
    })
}

/// Product cutoff `χ(x₁, x₂, t) = χ₁(x₁) χ₂(x₂) χ_t(t)`. Spatial factors equal 1 only at
/// the interval center and decay over the whole half-width, which keeps their spectra short.
#[derive(Debug, Clone, Serialize)]
pub struct CutoffSpec {
    /// `None` means `χ₁ ≡ 1`.
    pub x1: Option<[f64; 2]>,
    pub x2: [f64; 2],
    /// `χ_t` is 1 for `t ≤ plateau · τ` and vanishes for `t ≥ 2 plateau · τ`.
    pub t_plateau: f64,
}

fn bump_on(interval: [f64; 2], x: f64) -> f64 {
    let c = 0.5 * (interval[0] + interval[1]);
    let half = 0.5 * (interval[1] - interval[0]);
    // β(1 + |y|) = S(1 − |y|) is smooth at y = 0 because S is flat at 1
    BumpFunction.value(1.0 + (x - c).abs() / half)
}

fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

impl CutoffSpec {
    fn validate(&self, width: f64, tau: f64) -> Result<()> {
        if !(self.x2[0] > 0.0 && self.x2[1] < width && self.x2[0] < self.x2[1]) {
            return Err(Error::Precondition(format!(
                "cutoff support [{}, {}] must stay inside (0, {width}) away from the boundary",
                self.x2[0], self.x2[1]
            )));
        }
        if let Some([a, b]) = self.x1 {
            if a >= b {
                return Err(Error::Parameter("empty x₁ cutoff interval".into()));
            }
        }
        if !(self.t_plateau > 0.0 && 2.0 * self.t_plateau < 1.0) || tau <= 0.0 {
            return Err(Error::Parameter("time cutoff must vanish before t = τ".into()));
        }
        Ok(())
    }

    fn value(&self, x: [f64; 2], t: f64, tau: f64) -> f64 {
        let c1 = self.x1.map_or(1.0, |i| bump_on(i, x[0]));
        c1 * bump_on(self.x2, x[1]) * BumpFunction.value(t / (self.t_plateau * tau))
    }

    /// Whether `x` lies in the closed support.
    fn covers(&self, x: [f64; 2], period: f64) -> bool {
        let in_x1 = self.x1.is_none_or(|[a, b]| {
            let c = 0.5 * (a + b);
            periodic_distance(x[0], c, period) <= 0.5 * (b - a)
        });
        in_x1 && x[1] >= self.x2[0] && x[1] <= self.x2[1]
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum SourceSpec {
    /// `c_h (|x − x₀|² + h²)^{−a/2}` cut off smoothly at radius `2 radius`; `c_h`
    /// matches the discrete mass to the continuum mass.
    PointSingularity { center: [f64; 2], exponent: f64, radius: f64 },
    /// Gaussian bump of the given width.
    Smooth { center: [f64; 2], width: f64 },
}

impl SourceSpec {
    fn center(&self) -> [f64; 2] {
        match self {
            Self::PointSingularity { center, .. } | Self::Smooth { center, .. } => *center,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalRegConfig {
    pub problem: ParabolicProblem,
    pub source: SourceSpec,
    /// Intervals in `x₂` per level; `x₁` uses the matching cutoff and `dt ≈ h`.
    pub levels: Vec<usize>,
    pub local: CutoffSpec,
    pub global: CutoffSpec,
    pub sigmas: Vec<f64>,
    pub phi: PhiLogPower,
    /// Ramp time of the source: `η(t) = 1 − β(1 + t/t_ramp)` is flat at `t = 0`.
    pub ramp: f64,
}

impl LocalRegConfig {
    /// Heat problem on the unit strip with the source centered at `(0, 1/2)`.
    pub fn heat(source: SourceSpec) -> Self {
        let problem = ParabolicProblem { tau: 0.5, ..ParabolicProblem::heat_dirichlet() };
        Self {
            problem,
            source,
            levels: vec![32, 64, 128],
            local: CutoffSpec { x1: Some([0.3, 0.7]), x2: [0.2, 0.8], t_plateau: 0.45 },
            global: CutoffSpec { x1: None, x2: [0.1, 0.9], t_plateau: 0.45 },
            sigmas: vec![3.0],
            phi: PhiLogPower::one(),
            ramp: 0.1,
        }
    }

    pub fn point_singularity(exponent: f64) -> Self {
        Self::heat(SourceSpec::PointSingularity { center: [0.0, 0.5], exponent, radius: 0.1 })
    }

    pub fn smooth() -> Self {
        Self::heat(SourceSpec::Smooth { center: [0.0, 0.5], width: 0.05 })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalRegularityReport {
    pub local_cutoff: CutoffSpec,
    pub global_cutoff: CutoffSpec,
    pub source: SourceSpec,
    pub levels: Vec<usize>,
    pub sigmas: Vec<f64>,
    /// `local[σ][level] = ‖χ u‖`.
    pub local: Vec<Vec<f64>>,
    pub global: Vec<Vec<f64>>,
    /// Relative change of the local norm between the last two levels, per σ.
    pub local_change: Vec<f64>,
    /// Relative change of the global norm between the last two levels, per σ.
    pub global_change: Vec<f64>,
    /// Ratio of consecutive global norms, per σ.
    pub global_growth: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl LocalRegularityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,intervals,local,global\n");
        for (i, s) in self.sigmas.iter().enumerate() {
            for (l, n) in self.levels.iter().enumerate() {
                let _ = writeln!(out, "{s},{n},{:.12e},{:.12e}", self.local[i][l], self.global[i][l]);
            }
        }
        out
    }

    /// Local norms settle within `stable` while global norms grow by at least `growth` per level.
    pub fn localized(&self, sigma_index: usize, stable: f64, growth: f64) -> bool {
        self.local_change[sigma_index] <= stable && self.global_growth[sigma_index].iter().all(|g| *g >= growth)
    }

    /// Both norms settle within `stable`.
    pub fn settled(&self, sigma_index: usize, stable: f64) -> bool {
        self.local_change[sigma_index] <= stable && self.global_change[sigma_index] <= stable
    }
}

fn eta(t: f64, ramp: f64) -> f64 {
    1.0 - BumpFunction.value(1.0 + t / ramp)
}

/// Spatial source profile on the solver grid of a level.
fn source_profile(spec: &SourceSpec, h: f64, cfg: &ModelConfig) -> Result<impl Fn([f64; 2]) -> f64 + Sync> {
    let period = cfg.period;
    let (kind, scale) = match *spec {
        SourceSpec::PointSingularity { center, exponent, radius } => {
            if !(exponent > 0.0 && exponent < 2.0) || radius <= 0.0 {
                return Err(Error::Parameter("need 0 < a < 2 and a positive radius".into()));
            }
            let raw = move |x: [f64; 2]| {
                let r2 = periodic_distance(x[0], center[0], period).powi(2) + (x[1] - center[1]).powi(2);
                (r2 + h * h).powf(-exponent / 2.0) * BumpFunction.value(r2.sqrt() / radius)
            };
            let continuum = quadrature::integrate(
                |r: f64| 2.0 * std::f64::consts::PI * r.powf(1.0 - exponent) * BumpFunction.value(r / radius),
                0.0,
                2.0 * radius,
                1e-10,
            )
            .integral;
            let (x1, x2) = (cfg.x1(), cfg.x2());
            let cell = (period / x1.len() as f64) * h;
            let discrete: f64 = x1.iter().flat_map(|a| x2.iter().map(move |b| raw([*a, *b]))).sum::<f64>() * cell;
            ((center, exponent, radius), continuum / discrete)
        }
        SourceSpec::Smooth { center, width } => ((center, -width, 0.0), 1.0),
    };
    Ok(move |x: [f64; 2]| {
        let (center, e, radius) = kind;
        let r2 = periodic_distance(x[0], center[0], period).powi(2) + (x[1] - center[1]).powi(2);
        if e < 0.0 {
            (-r2 / (2.0 * e * e)).exp()
        } else {
            scale * (r2 + h * h).powf(-e / 2.0) * BumpFunction.value(r2.sqrt() / radius)
        }
    })
}

/// Norms of `χ u` at each σ, from the solver samples on the periodic box
/// `[0, L) × [0, W) × [−τ, τ)` (zero extension to negative times).
fn cutoff_norms(rep: &super::solver::SampledSolution, chi: &CutoffSpec, sigmas: &[f64], b: u32, phi: &PhiLogPower) -> Result<Vec<f64>> {
    let cfg = &rep.config;
    let (x1, x2) = (cfg.x1(), cfg.x2());
    let (m1, n2, steps) = (x1.len(), cfg.intervals, cfg.steps);
    let nodes = n2 + 1;
    let nt = 2 * steps;
    let tau = cfg.tau;
    let grid = FrequencyGrid::new(
        vec![Axis::new(cfg.period, cfg.modes), Axis::new(cfg.width, (n2 - 1) / 2), Axis::new(2.0 * tau, steps - 1)],
        true,
    )?;
    let physical: Vec<Vec<Complex64>> = map_collect(steps + 1, |n| rep.physical(n));
    let mut samples = vec![Complex64::new(0.0, 0.0); m1 * n2 * nt];
    for (j, a) in x1.iter().enumerate() {
        for (i, bx) in x2.iter().take(n2).enumerate() {
            for k in steps..nt {
                let n = k - steps;
                let t = n as f64 * cfg.dt();
                let c = chi.value([*a, *bx], t, tau);
                if c != 0.0 {
                    samples[(j * n2 + i) * nt + k] = physical[n][j * nodes + i] * c;
                }
            }
        }
    }
    let field = from_physical(&grid, &samples, &[m1, n2, nt])?;
    let gamma = 1.0 / (2.0 * b as f64);
    sigmas.iter().map(|s| crate::spectral::hoermander_norm(&field, &WeightParams::new(*s, gamma, phi.clone()))).collect()
}

/// Solves with zero boundary and initial data across the refinement levels and compares
/// cutoff norms near and away from the source.
pub fn local_regularity_experiment(cfg: &LocalRegConfig) -> Result<LocalRegularityReport> {
    let p = &cfg.problem;
    let width = p.geometry.width();
    cfg.local.validate(width, p.tau)?;
    cfg.global.validate(width, p.tau)?;
    let period = p.geometry.periods()[0];
    if cfg.local.covers(cfg.source.center(), period) {
        return Err(Error::Precondition("the source center lies inside the local cutoff support".into()));
    }
    if cfg.levels.len() < 2 || cfg.levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("need at least two increasing refinement levels".into()));
    }
    if cfg.ramp <= 0.0 || cfg.ramp >= p.tau {
        return Err(Error::Parameter("ramp time must lie in (0, τ)".into()));
    }
    let s0 = sigma0(p.m, &p.boundary_orders())?;
    if let Some(s) = cfg.sigmas.iter().find(|s| **s <= s0 as f64) {
        return Err(Error::Domain(format!("σ = {s} must exceed sigma0 = {s0}")));
    }
    let mut local = vec![Vec::new(); cfg.sigmas.len()];
    let mut global = vec![Vec::new(); cfg.sigmas.len()];
    let mut warnings = Vec::new();
    for &n2 in &cfg.levels {
        let steps = ((p.tau * n2 as f64 / width).round() as usize).max(2);
        let model = ModelConfig::new(p, n2 / 2, n2, steps)?;
        let profile = source_profile(&cfg.source, model.h(), &model)?;
        let ramp = cfg.ramp;
        let zero = Complex64::new(0.0, 0.0);
        let data = AnalyticData {
            source: |x: [f64; 2], t: f64| Complex64::new(eta(t, ramp) * profile(x), 0.0),
            boundary: |_: usize, _: BoundarySide, _: f64, _: f64| zero,
            initial: |_: [f64; 2]| zero,
        };
        let rep = solve_model(&model, &data)?;
        warnings.extend(rep.warnings);
        let lo = cutoff_norms(&rep.solution, &cfg.local, &cfg.sigmas, p.b, &cfg.phi)?;
        let gl = cutoff_norms(&rep.solution, &cfg.global, &cfg.sigmas, p.b, &cfg.phi)?;
        for i in 0..cfg.sigmas.len() {
            local[i].push(lo[i]);
            global[i].push(gl[i]);
        }
    }
    let last_change = |v: &Vec<f64>| {
        let n = v.len();
        (v[n - 1] - v[n - 2]).abs() / v[n - 1].abs().max(f64::MIN_POSITIVE)
    };
    Ok(LocalRegularityReport {
        local_cutoff: cfg.local.clone(),
        global_cutoff: cfg.global.clone(),
        source: cfg.source.clone(),
        levels: cfg.levels.clone(),
        sigmas: cfg.sigmas.clone(),
        local_change: local.iter().map(last_change).collect(),
        global_change: global.iter().map(last_change).collect(),
        global_growth: global.iter().map(|v| v.windows(2).map(|w| w[1] / w[0]).collect()).collect(),
        local,
        global,
        warnings,
    })
}
