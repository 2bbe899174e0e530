//! Model strip solver for second-order (`b = m = 1`, `n = 2`) problems with constant
//! coefficients: Fourier modes in `x₁`, centered differences in `x₂`, Crank–Nicolson in `t`.

use super::lambda::LambdaImage;
use crate::error::{Error, Result};
use crate::exec::map_collect;
use crate::spectral::{from_physical, to_physical, Axis, FrequencyGrid, SpectralField};
use crate::symbol::{covering_sweep, BoundarySide, ParabolicProblem, Term};
use crate::trace::SpaceTimeField;
use num_complex::Complex64;
use serde::Serialize;

/// Pointwise problem data on the strip `[0, L) × [0, W]`.
pub trait ModelData: Sync {
    fn source(&self, x: [f64; 2], t: f64) -> Complex64;
    fn boundary(&self, j: usize, side: BoundarySide, x1: f64, t: f64) -> Complex64;
    fn initial(&self, x: [f64; 2]) -> Complex64;
}

/// Data given by closures.
pub struct AnalyticData<F, G, H> {
    pub source: F,
    pub boundary: G,
    pub initial: H,
}

impl<F, G, H> ModelData for AnalyticData<F, G, H>
where
    F: Fn([f64; 2], f64) -> Complex64 + Sync,
    G: Fn(usize, BoundarySide, f64, f64) -> Complex64 + Sync,
    H: Fn([f64; 2]) -> Complex64 + Sync,
{
    fn source(&self, x: [f64; 2], t: f64) -> Complex64 {
        (self.source)(x, t)
    }
    fn boundary(&self, j: usize, side: BoundarySide, x1: f64, t: f64) -> Complex64 {
        (self.boundary)(j, side, x1, t)
    }
    fn initial(&self, x: [f64; 2]) -> Complex64 {
        (self.initial)(x)
    }
}

fn eval_point(u: &SpaceTimeField, x: &[f64], t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (profile, f) in &u.terms {
        for (i, c) in f.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let xi = f.grid.frequencies(i);
            let sq: f64 = xi.iter().map(|v| v * v).sum();
            let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += c * profile.derivative(sq, t, 0) * Complex64::from_polar(1.0, phase);
        }
    }
    acc
}

impl ModelData for LambdaImage {
    fn source(&self, x: [f64; 2], t: f64) -> Complex64 {
        eval_point(&self.f, &x, t)
    }
    fn boundary(&self, j: usize, side: BoundarySide, x1: f64, t: f64) -> Complex64 {
        let s = usize::from(side == BoundarySide::Upper);
        eval_point(&self.g[j][s], &[x1], t)
    }
    fn initial(&self, x: [f64; 2]) -> Complex64 {
        self.h[0].eval_at(&x)
    }
}

/// Discretization of the strip problem.
#[derive(Debug, Clone, Serialize)]
pub struct ModelConfig {
    /// Fourier cutoff in `x₁` (`2N + 1` modes and collocation points).
    pub modes: usize,
    /// Intervals in `x₂`.
    pub intervals: usize,
    pub steps: usize,
    pub tau: f64,
    pub period: f64,
    pub width: f64,
    #[serde(skip)]
    ops: Operators,
}

#[derive(Debug, Clone, Default)]
struct Operators {
    a_t: Complex64,
    a11: Complex64,
    a12: Complex64,
    a22: Complex64,
    a1: Complex64,
    a2: Complex64,
    a0: Complex64,
    /// Boundary operator `b2 D₂ + b1 D₁ + b0`.
    b2: Complex64,
    b1: Complex64,
    b0: Complex64,
}

fn coeff_of(terms: &[Term], alpha: [u32; 2], beta: u32) -> Complex64 {
    terms.iter().filter(|t| t.alpha == alpha && t.beta == beta).map(|t| t.coeff.value(&[], 0.0)).sum()
}

impl ModelConfig {
    /// Checks that the problem fits the solver and satisfies the covering condition.
    pub fn new(problem: &ParabolicProblem, modes: usize, intervals: usize, steps: usize) -> Result<Self> {
        problem.validate()?;
        if problem.n != 2 || problem.b != 1 || problem.m != 1 {
            return Err(Error::Unsupported("the strip solver handles n = 2, b = m = 1".into()));
        }
        let all = problem.interior.iter().chain(&problem.boundary[0].terms);
        if !all.clone().all(|t| t.coeff.is_constant()) {
            return Err(Error::Unsupported("the strip solver needs constant coefficients".into()));
        }
        if all.clone().any(|t| !matches!(t.weighted_order(1), 0..=2)) {
            return Err(Error::Unsupported("unexpected term order".into()));
        }
        if modes == 0 || intervals < 2 || steps == 0 {
            return Err(Error::Parameter("need modes >= 1, intervals >= 2, steps >= 1".into()));
        }
        let sweep = covering_sweep(problem, 16, 1e-6)?;
        if !sweep.pass {
            return Err(Error::Precondition(format!(
                "covering condition fails on the {:?} side at xi={:?}, p={:?}",
                sweep.worst.side, sweep.worst.point.xi, sweep.worst.point.p
            )));
        }
        let i = &problem.interior;
        let bt = &problem.boundary[0].terms;
        let ops = Operators {
            a_t: coeff_of(i, [0, 0], 1),
            a11: coeff_of(i, [2, 0], 0),
            a12: coeff_of(i, [1, 1], 0),
            a22: coeff_of(i, [0, 2], 0),
            a1: coeff_of(i, [1, 0], 0),
            a2: coeff_of(i, [0, 1], 0),
            a0: coeff_of(i, [0, 0], 0),
            b2: coeff_of(bt, [0, 1], 0),
            b1: coeff_of(bt, [1, 0], 0),
            b0: coeff_of(bt, [0, 0], 0),
        };
        Ok(Self {
            modes,
            intervals,
            steps,
            tau: problem.tau,
            period: problem.geometry.periods()[0],
            width: problem.geometry.width(),
            ops,
        })
    }

    pub fn h(&self) -> f64 {
        self.width / self.intervals as f64
    }

    pub fn dt(&self) -> f64 {
        self.tau / self.steps as f64
    }

    pub fn points(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn x1(&self) -> Vec<f64> {
        (0..self.points()).map(|j| j as f64 * self.period / self.points() as f64).collect()
    }

    pub fn x2(&self) -> Vec<f64> {
        (0..=self.intervals).map(|i| i as f64 * self.h()).collect()
    }

    fn mode_grid(&self) -> FrequencyGrid {
        FrequencyGrid::new(vec![Axis::new(self.period, self.modes)], false).expect("positive period and cutoff")
    }
}

/// Solution values per time level, stored per `x₁` mode: `values[n][k * nodes + i]`.
#[derive(Debug, Clone)]
pub struct SampledSolution {
    pub config: ModelConfig,
    pub times: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

impl SampledSolution {
    pub fn nodes(&self) -> usize {
        self.config.intervals + 1
    }

    /// Physical samples at level `n`, indexed `[j * nodes + i]` for `(x₁_j, x₂_i)`.
    pub fn physical(&self, n: usize) -> Vec<Complex64> {
        let grid = self.config.mode_grid();
        let nodes = self.nodes();
        let m = self.config.points();
        let mut out = vec![Complex64::new(0.0, 0.0); m * nodes];
        for i in 0..nodes {
            let coeffs: Vec<Complex64> = (0..grid.len()).map(|k| self.values[n][k * nodes + i]).collect();
            let line = to_physical(&SpectralField { grid: grid.clone(), coeffs }, &[m]).expect("sizes match");
            for j in 0..m {
                out[j * nodes + i] = line[j];
            }
        }
        out
    }

    /// Discrete relative L² error against `exact` at level `n`.
    pub fn relative_l2_error(&self, n: usize, exact: impl Fn([f64; 2], f64) -> Complex64) -> f64 {
        let phys = self.physical(n);
        let (x1, x2) = (self.config.x1(), self.config.x2());
        let nodes = self.nodes();
        let (mut num, mut den) = (0.0, 0.0);
        for (j, a) in x1.iter().enumerate() {
            for (i, b) in x2.iter().enumerate() {
                let e = exact([*a, *b], self.times[n]);
                num += (phys[j * nodes + i] - e).norm_sqr();
                den += e.norm_sqr();
            }
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: SampledSolution,
    /// `max |B u(·,0) − g(·,0)|` over both boundary components, from the initial data.
    pub corner_mismatch: f64,
    pub warnings: Vec<String>,
}

/// Complex tridiagonal solve (Thomas algorithm) for `lo[i] x[i−1] + di[i] x[i] + up[i] x[i+1] = rhs[i]`.
fn thomas(lo: &[Complex64], di: &[Complex64], up: &[Complex64], rhs: &mut [Complex64]) -> Result<()> {
    let n = di.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = di[0];
    if beta.norm() == 0.0 {
        return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = up[i - 1] / beta;
        beta = di[i] - lo[i] * c[i - 1];
        if beta.norm() == 0.0 {
            return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
        }
        rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// Spatial operator for one `x₁` mode: `u_t = L u + S`, with `L` tridiagonal and the
/// boundary data entering `S` through `bc_lower g_lower + bc_upper g_upper` on the end rows.
struct ModeOperator {
    lo: Vec<Complex64>,
    di: Vec<Complex64>,
    up: Vec<Complex64>,
    /// `Some(c)`: the end row is the Dirichlet condition `c u = g`.
    dirichlet: Option<Complex64>,
    bc_lower: Complex64,
    bc_upper: Complex64,
    inv_at: Complex64,
}

impl ModeOperator {
    fn new(o: &Operators, xi: f64, nodes: usize, h: f64) -> Result<Self> {
        let i = Complex64::i();
        let c1 = o.a12 * (-xi) + o.a2;
        let c0 = o.a11 * xi * xi - o.a1 * xi + o.a0;
        let inv_at = 1.0 / o.a_t;
        let (h2, a22) = (h * h, o.a22);
        let mut lo = vec![(a22 / h2 + i * c1 / (2.0 * h)) * inv_at; nodes];
        let mut di = vec![(-2.0 * a22 / h2 - c0) * inv_at; nodes];
        let mut up = vec![(a22 / h2 - i * c1 / (2.0 * h)) * inv_at; nodes];
        let cb = o.b0 - o.b1 * xi;
        let (mut bc_lower, mut bc_upper) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let dirichlet = if o.b2.norm() == 0.0 {
            if cb.norm() < 1e-14 {
                return Err(Error::Singular(format!("boundary operator vanishes on x₁ frequency {xi}")));
            }
            Some(cb)
        } else {
            // i b2 u' + cb u = g  ⇒  u' = ag g + au u
            let ag = 1.0 / (i * o.b2);
            let au = -cb * ag;
            let n = nodes - 1;
            di[0] = (a22 * (-2.0 - 2.0 * h * au) / h2 - i * c1 * au - c0) * inv_at;
            up[0] = 2.0 * a22 / h2 * inv_at;
            bc_lower = (-2.0 * a22 * ag / h - i * c1 * ag) * inv_at;
            di[n] = (a22 * (-2.0 + 2.0 * h * au) / h2 - i * c1 * au - c0) * inv_at;
            lo[n] = 2.0 * a22 / h2 * inv_at;
            bc_upper = (2.0 * a22 * ag / h - i * c1 * ag) * inv_at;
            None
        };
        lo[0] = Complex64::new(0.0, 0.0);
        up[nodes - 1] = Complex64::new(0.0, 0.0);
        Ok(Self { lo, di, up, dirichlet, bc_lower, bc_upper, inv_at })
    }

    fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let n = u.len();
        (0..n)
            .map(|k| {
                let mut v = self.di[k] * u[k];
                if k > 0 {
                    v += self.lo[k] * u[k - 1];
                }
                if k + 1 < n {
                    v += self.up[k] * u[k + 1];
                }
                v
            })
            .collect()
    }

    fn source(&self, f: &[Complex64], g: (Complex64, Complex64)) -> Vec<Complex64> {
        let mut s: Vec<Complex64> = f.iter().map(|v| v * self.inv_at).collect();
        let n = s.len() - 1;
        s[0] += self.bc_lower * g.0;
        s[n] += self.bc_upper * g.1;
        s
    }

    /// One Crank–Nicolson step.
    fn step(&self, u: &[Complex64], dt: f64, s_old: &[Complex64], s_new: &[Complex64], g_new: (Complex64, Complex64)) -> Result<Vec<Complex64>> {
        let n = u.len();
        let lu = self.apply(u);
        let mut rhs: Vec<Complex64> = (0..n).map(|k| u[k] + 0.5 * dt * (lu[k] + s_old[k] + s_new[k])).collect();
        let one = Complex64::new(1.0, 0.0);
        let mut lo: Vec<Complex64> = self.lo.iter().map(|v| -0.5 * dt * v).collect();
        let mut di: Vec<Complex64> = self.di.iter().map(|v| one - 0.5 * dt * v).collect();
        let mut up: Vec<Complex64> = self.up.iter().map(|v| -0.5 * dt * v).collect();
        if let Some(cb) = self.dirichlet {
            let zero = Complex64::new(0.0, 0.0);
            di[0] = one;
            up[0] = zero;
            rhs[0] = g_new.0 / cb;
            di[n - 1] = one;
            lo[n - 1] = zero;
            rhs[n - 1] = g_new.1 / cb;
        }
        lo[0] = Complex64::new(0.0, 0.0);
        thomas(&lo, &di, &up, &mut rhs)?;
        Ok(rhs)
    }
}

/// `(f̂[k][i], ĝ_lower[k], ĝ_upper[k])` at one time level.
type LevelData = (Vec<Vec<Complex64>>, Vec<Complex64>, Vec<Complex64>);

/// Samples data at one time level and transforms in `x₁`.
fn sample_level(cfg: &ModelConfig, data: &dyn ModelData, t: f64) -> Result<LevelData> {
    let grid = cfg.mode_grid();
    let (x1, x2) = (cfg.x1(), cfg.x2());
    let m = cfg.points();
    let per_node: Vec<SpectralField> = map_collect(x2.len(), |i| {
        let samples: Vec<Complex64> = x1.iter().map(|a| data.source([*a, x2[i]], t)).collect();
        from_physical(&grid, &samples, &[m]).expect("sizes match")
    });
    let f: Vec<Vec<Complex64>> = (0..grid.len()).map(|k| per_node.iter().map(|p| p.coeffs[k]).collect()).collect();
    let side = |s: BoundarySide| -> Result<Vec<Complex64>> {
        let samples: Vec<Complex64> = x1.iter().map(|a| data.boundary(0, s, *a, t)).collect();
        Ok(from_physical(&grid, &samples, &[m])?.coeffs)
    };
    Ok((f, side(BoundarySide::Lower)?, side(BoundarySide::Upper)?))
}

/// Solves the strip problem. Incompatible corner data do not stop the solve;
/// they are reported as a warning.
pub fn solve_model(cfg: &ModelConfig, data: &dyn ModelData) -> Result<SolveReport> {
    let grid = cfg.mode_grid();
    let nodes = cfg.intervals + 1;
    let (h, dt) = (cfg.h(), cfg.dt());
    let ops: Vec<ModeOperator> = (0..grid.len())
        .map(|k| ModeOperator::new(&cfg.ops, grid.frequencies(k)[0], nodes, h))
        .collect::<Result<_>>()?;
    // initial data per mode
    let (x1, x2) = (cfg.x1(), cfg.x2());
    let m = cfg.points();
    let init_nodes: Vec<SpectralField> = map_collect(nodes, |i| {
        let samples: Vec<Complex64> = x1.iter().map(|a| data.initial([*a, x2[i]])).collect();
        from_physical(&grid, &samples, &[m]).expect("sizes match")
    });
    let mut u: Vec<Vec<Complex64>> = (0..grid.len()).map(|k| init_nodes.iter().map(|p| p.coeffs[k]).collect()).collect();
    let (mut f_old, mut gl_old, mut gu_old) = sample_level(cfg, data, 0.0)?;

    let corner_mismatch = (0..grid.len())
        .map(|k| {
            let op = &ops[k];
            let uk = &u[k];
            match op.dirichlet {
                Some(cb) => (cb * uk[0] - gl_old[k]).norm().max((cb * uk[nodes - 1] - gu_old[k]).norm()),
                None => {
                    let o = &cfg.ops;
                    let cb = o.b0 - o.b1 * grid.frequencies(k)[0];
                    let i = Complex64::i();
                    let d0 = (-3.0 * uk[0] + 4.0 * uk[1] - uk[2]) / (2.0 * h);
                    let dn = (3.0 * uk[nodes - 1] - 4.0 * uk[nodes - 2] + uk[nodes - 3]) / (2.0 * h);
                    (i * o.b2 * d0 + cb * uk[0] - gl_old[k]).norm().max((i * o.b2 * dn + cb * uk[nodes - 1] - gu_old[k]).norm())
                }
            }
        })
        .fold(0.0, f64::max);

    let flat = |u: &[Vec<Complex64>]| u.iter().flatten().copied().collect::<Vec<_>>();
    let mut values = vec![flat(&u)];
    let mut times = vec![0.0];
    for n in 1..=cfg.steps {
        let t = n as f64 * dt;
        let (f_new, gl_new, gu_new) = sample_level(cfg, data, t)?;
        let next: Vec<Result<Vec<Complex64>>> = map_collect(grid.len(), |k| {
            let op = &ops[k];
            let s_old = op.source(&f_old[k], (gl_old[k], gu_old[k]));
            let s_new = op.source(&f_new[k], (gl_new[k], gu_new[k]));
            op.step(&u[k], dt, &s_old, &s_new, (gl_new[k], gu_new[k]))
        });
        u = next.into_iter().collect::<Result<_>>()?;
        if u.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite solution at step {n}")));
        }
        values.push(flat(&u));
        times.push(t);
        f_old = f_new;
        gl_old = gl_new;
        gu_old = gu_new;
    }
    let mut warnings = Vec::new();
    if corner_mismatch > 1e-8 {
        warnings.push(format!(
            "initial and boundary data disagree at t = 0 (max mismatch {corner_mismatch:.3e}); expect a corner layer"
        ));
    }
    Ok(SolveReport { solution: SampledSolution { config: cfg.clone(), times, values }, corner_mismatch, warnings })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub intervals: Vec<usize>,
    pub errors: Vec<f64>,
    /// `log2(e_i / e_{i+1})` between consecutive levels.
    pub orders: Vec<f64>,
}

/// Manufactured heat solution `u = e^{−t} sin(2πx₁) sin(πx₂)` on the unit strip,
/// refined with `h = dt`.
pub fn heat_convergence_study(levels: &[usize], tau: f64) -> Result<ConvergenceStudy> {
    use std::f64::consts::PI;
    let problem = ParabolicProblem { tau, ..ParabolicProblem::heat_dirichlet() };
    let exact = |x: [f64; 2], t: f64| Complex64::new((-t).exp() * (2.0 * PI * x[0]).sin() * (PI * x[1]).sin(), 0.0);
    let data = AnalyticData {
        source: |x: [f64; 2], t: f64| exact(x, t) * (5.0 * PI * PI - 1.0),
        boundary: |_: usize, _: BoundarySide, _: f64, _: f64| Complex64::new(0.0, 0.0),
        initial: |x: [f64; 2]| exact(x, 0.0),
    };
    let mut errors = Vec::new();
    for &n in levels {
        let steps = (tau * n as f64).round().max(1.0) as usize;
        let cfg = ModelConfig::new(&problem, 4, n, steps)?;
        let rep = solve_model(&cfg, &data)?;
        let last = rep.solution.times.len() - 1;
        errors.push(rep.solution.relative_l2_error(last, exact));
    }
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ConvergenceStudy { intervals: levels.to_vec(), errors, orders })
}
