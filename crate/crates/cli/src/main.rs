//! `hkit`: command-line checks and experiments for parabolic boundary value problems.
//!
//! Exit status: 0 when the check passes, 1 when it fails with a witness,
//! 2 on usage, input or domain errors.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use hkit::compatibility::{compat_residuals, project_q, read_data, sigma0, write_data, CoefficientJet, CompatReport, DataTuple, RESIDUAL_TOL};
use hkit::exec::init_workers_from_env;
use hkit::harness::{
    apply_lambda_periodic, isomorphism_ratio_experiment, local_regularity_experiment, strip_grid, IsoConfig, LocalRegConfig,
};
use hkit::spectral::io::{read_field, write_field};
use hkit::spectral::{norm_report, Axis, FrequencyGrid, Interpolated, Multiplier, SpectralField};
use hkit::symbol::{covering_sweep, parse_problem, petrovskii_check, ParabolicProblem, SymbolPoint};
use hkit::trace::{extend_t1, extension_bound_check, trace_r, TraceVector};
use hkit::weights::{psi_from, PhiLogPower, WeightParams};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hkit", version, about = "Checks and norm experiments for 2b-parabolic initial-boundary value problems")]
#[command(after_help = "Set HKIT_THREADS to fix the worker count (1 runs sequentially).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for the JSON and CSV reports.
    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,
    /// Seed for random fields and ensembles.
    #[arg(long, global = true, default_value_t = 20_251_016)]
    seed: u64,
    /// Fourier cutoff of generated grids (coarsest level for refinement studies).
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Pass tolerance; each subcommand documents its default.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum of |A°| on the anisotropic unit sphere (default tol 1e-6).
    CheckParabolicity {
        problem: PathBuf,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// Worst relative Lopatinskii determinant over both boundary sides (default tol 1e-6).
    CheckCovering {
        problem: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Compatibility residuals at regularity `s` (default tol 1e-8).
    Compat {
        /// Problem description (JSON).
        problem: PathBuf,
        /// Regularity index; must avoid the jump points of the condition count.
        #[arg(long)]
        s: f64,
        /// Data directory; manufactured data from a random smooth solution when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Amplitude of seeded noise added to the boundary jets of manufactured data.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
    /// Projects data onto the compatible subspace and reports the residuals afterwards.
    ProjectQ {
        problem: PathBuf,
        #[arg(long)]
        s: f64,
        /// As for `compat`.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
    /// Hörmander norm of a field (random smooth field when `--field` is absent).
    Norm {
        problem: PathBuf,
        #[arg(long)]
        s: f64,
        /// Log-power exponents of φ, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi: Vec<f64>,
        /// Field stem: `<stem>.json` holds the grid, `<stem>.csv` the coefficients.
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Checks m₀ψ(m₁/m₀) = μ_{s,φ} over a frequency grid (default tol 1e-12).
    InterpVerify {
        problem: PathBuf,
        #[arg(long)]
        s0: f64,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        s1: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi: Vec<f64>,
    },
    /// Right inverse of the trace map and the extension bound on random trace vectors (default tol 1e-12).
    TraceVerify {
        problem: PathBuf,
        /// Number of time traces.
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 100)]
        count: u64,
    },
    /// Ratios ‖Λu‖/‖u‖ over random ensembles on two grid levels.
    IsoExperiment {
        problem: PathBuf,
        #[arg(long, default_value_t = 50)]
        ensemble: usize,
        /// Regularity indices; ladder values use the interpolation norm.
        #[arg(long, value_delimiter = ',', default_values_t = [2.25, 2.75, 3.25])]
        s: Vec<f64>,
        #[arg(long, default_value_t = 100.0)]
        max_spread: f64,
        #[arg(long, default_value_t = 2.0)]
        max_change: f64,
    },
    /// Local versus global norms of the solution under refinement.
    LocalReg {
        problem: PathBuf,
        /// Exponent `a` of the point singularity |x − x₀|^{−a}.
        #[arg(long, default_value_t = 1.8)]
        exponent: f64,
        /// Use a smooth source instead; both norms should then settle.
        #[arg(long)]
        smooth: bool,
        /// Number of refinement levels starting at `--modes` intervals (default 32).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

enum Verdict {
    Pass,
    Fail,
}

fn load_problem(path: &Path) -> Result<ParabolicProblem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_problem(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_report(cli: &Cli, name: &str, json: &impl Serialize, csv: &str) -> Result<()> {
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    std::fs::write(cli.out.join(format!("{name}.json")), serde_json::to_string_pretty(json)?)?;
    std::fs::write(cli.out.join(format!("{name}.csv")), csv)?;
    Ok(())
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn fmt_point(p: &SymbolPoint) -> String {
    format!("x={:?} t={} xi={:?} p={:.6}{:+.6}i", p.x, p.t, p.xi, p.p[0], p.p[1])
}

fn joined(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn gamma_of(p: &ParabolicProblem) -> f64 {
    1.0 / (2.0 * p.b as f64)
}

/// Space-time surrogate grid of the strip with every cutoff equal to `modes`.
fn space_time_grid(p: &ParabolicProblem, modes: usize) -> Result<FrequencyGrid> {
    let mut axes = strip_grid(p, &vec![modes; p.n])?.axes().to_vec();
    axes.push(Axis::new(8.0 * p.tau, modes));
    Ok(FrequencyGrid::new(axes, true)?)
}

/// Data from `--data`, or `Λu` for a seeded random smooth `u`, optionally perturbed on the boundary.
fn load_data(cli: &Cli, p: &ParabolicProblem, s: f64, data: &Option<PathBuf>, perturb: f64) -> Result<DataTuple> {
    let mut d = match data {
        Some(dir) => read_data(dir).with_context(|| format!("reading data from {}", dir.display()))?,
        None => {
            let grid = space_time_grid(p, cli.modes.unwrap_or(4))?;
            let u = SpectralField::random(&grid, cli.seed, |sq, k| (1.0 + sq + k * k).powf(-2.0));
            let depth = (s / (2.0 * p.b as f64)).ceil().max(0.0) as usize + 2;
            apply_lambda_periodic(&u, p, depth, WeightParams::sobolev(s, gamma_of(p)))
                .context("manufactured data need constant coefficients; pass --data otherwise")?
        }
    };
    if perturb != 0.0 {
        let mut seed = cli.seed.wrapping_add(1);
        for g in &mut d.g {
            for side in [&mut g.lower, &mut g.upper] {
                for jet in &mut side.jets {
                    seed = seed.wrapping_add(1);
                    *jet = jet.add(&SpectralField::random(&jet.grid, seed, |_, _| perturb))?;
                }
                side.space_time = None;
            }
        }
    }
    Ok(d)
}

fn jets_for(p: &ParabolicProblem, d: &DataTuple) -> Result<CoefficientJet> {
    let spatial = d.h.h.first().context("data carry no initial values")?.grid.clone();
    Ok(CoefficientJet::new(p, &spatial, d.f.depth())?)
}

fn print_compat(rep: &CompatReport) {
    for r in &rep.rows {
        println!("  j={} k={} residual {:.3e} {}", r.j, r.k, r.residual, if r.pass { "ok" } else { "FAIL" });
    }
}

#[derive(Serialize)]
struct InterpVerifyReport {
    s0: f64,
    s: f64,
    s1: f64,
    gamma: f64,
    phi: String,
    frequencies: usize,
    max_rel_err: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TraceSample {
    index: u64,
    inverse_err: f64,
    ratio: f64,
    constant: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TraceVerifyReport {
    b: u32,
    m: u32,
    r: usize,
    seed: u64,
    max_inverse_err: f64,
    max_ratio: f64,
    constant: f64,
    tol: f64,
    pass: bool,
    samples: Vec<TraceSample>,
}

fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::CheckParabolicity { problem, resolution } => {
            let p = load_problem(problem)?;
            let rep = petrovskii_check(&p, *resolution, cli.tol.unwrap_or(1e-6))?;
            let w = &rep.witness;
            let csv = format!(
                "min_abs,tol,pass,samples,x,t,xi,p_re,p_im\n{:.12e},{},{},{},{},{},{},{},{}\n",
                rep.min_abs, rep.tol, rep.pass, rep.samples, joined(&w.x), w.t, joined(&w.xi), w.p[0], w.p[1]
            );
            write_report(cli, "parabolicity", &rep, &csv)?;
            println!("min |A°| = {:.6} over {} samples at {}", rep.min_abs, rep.samples, fmt_point(w));
            Ok(verdict(rep.pass))
        }
        Command::CheckCovering { problem, resolution } => {
            let p = load_problem(problem)?;
            let sweep = covering_sweep(&p, *resolution, cli.tol.unwrap_or(1e-6))?;
            let w = &sweep.worst;
            let csv = format!(
                "side,x,t,xi,p_re,p_im,det_abs,det_rel,tol,pass\n{:?},{},{},{},{},{},{:.12e},{:.12e},{},{}\n",
                w.side, joined(&w.point.x), w.point.t, joined(&w.point.xi), w.point.p[0], w.point.p[1], w.det_abs, w.det_rel, w.tol, sweep.pass
            );
            write_report(cli, "covering", &sweep, &csv)?;
            println!(
                "worst relative determinant {:.6e} (|det| {:.3e}) on the {:?} side at {}",
                w.det_rel, w.det_abs, w.side, fmt_point(&w.point)
            );
            Ok(verdict(sweep.pass))
        }
        Command::Compat { problem, s, data, perturb } => {
            let p = load_problem(problem)?;
            let d = load_data(cli, &p, *s, data, *perturb)?;
            let rep = compat_residuals(&d, &p, &jets_for(&p, &d)?, *s, cli.tol.unwrap_or(RESIDUAL_TOL))?;
            write_report(cli, "compat", &rep, &rep.to_csv())?;
            println!("sigma0 = {}, {} conditions at s = {}", rep.sigma0, rep.rows.len(), rep.s);
            print_compat(&rep);
            Ok(verdict(rep.pass))
        }
        Command::ProjectQ { problem, s, data, perturb } => {
            let p = load_problem(problem)?;
            let d = load_data(cli, &p, *s, data, *perturb)?;
            let jets = jets_for(&p, &d)?;
            let tol = cli.tol.unwrap_or(RESIDUAL_TOL);
            let before = compat_residuals(&d, &p, &jets, *s, tol)?;
            let projected = project_q(&d, &p, &jets, *s)?;
            let after = compat_residuals(&projected, &p, &jets, *s, tol)?;
            write_data(&cli.out.join("projected"), &projected)?;
            write_report(cli, "project_q", &after, &after.to_csv())?;
            println!(
                "max residual {:.3e} before, {:.3e} after; data moved by {:.3e}; projected data in {}",
                before.max_residual(),
                after.max_residual(),
                projected.max_abs_diff(&d),
                cli.out.join("projected").display()
            );
            print_compat(&after);
            Ok(verdict(after.pass))
        }
        Command::Norm { problem, s, phi, field } => {
            let p = load_problem(problem)?;
            let w = WeightParams::new(*s, gamma_of(&p), PhiLogPower::new(phi.clone()));
            let f = match field {
                Some(stem) => read_field(stem).with_context(|| format!("reading field {}", stem.display()))?,
                None => {
                    let grid = space_time_grid(&p, cli.modes.unwrap_or(8))?;
                    let f = SpectralField::random(&grid, cli.seed, |sq, k| (1.0 + sq + k.abs().powf(2.0 * w.gamma)).powf(-(s + 2.0) / 2.0));
                    std::fs::create_dir_all(&cli.out)?;
                    write_field(&cli.out.join("norm_field"), &f)?;
                    f
                }
            };
            let rep = norm_report(&f, &w)?;
            let csv = format!("space,value,grid\n\"{}\",{:.15e},\"{}\"\n", rep.space, rep.value, rep.grid);
            write_report(cli, "norm", &rep, &csv)?;
            println!("{} norm {:.12e} on {}", rep.space, rep.value, rep.grid);
            Ok(Verdict::Pass)
        }
        Command::InterpVerify { problem, s0, s, s1, phi } => {
            let p = load_problem(problem)?;
            let gamma = gamma_of(&p);
            let phi = PhiLogPower::new(phi.clone());
            let psi = psi_from(*s0, *s, *s1, phi.clone())?;
            let (m0, m1) = (WeightParams::sobolev(*s0, gamma), WeightParams::sobolev(*s1, gamma));
            let target = WeightParams::new(*s, gamma, phi.clone());
            let interp = Interpolated { m0: &m0, m1: &m1, psi: &psi };
            let c = cli.modes.unwrap_or(20);
            let mut axes = strip_grid(&p, &vec![c; p.n])?.axes().to_vec();
            axes.push(Axis::new(p.tau, c));
            let grid = FrequencyGrid::new(axes, true)?;
            let max_rel_err = (0..grid.len())
                .map(|i| {
                    let (sq, k) = grid.split_frequency(i);
                    let want = target.eval_sq(sq, k);
                    (interp.at(sq, k) - want).abs() / want
                })
                .fold(0.0, f64::max);
            let tol = cli.tol.unwrap_or(1e-12);
            let rep = InterpVerifyReport {
                s0: *s0,
                s: *s,
                s1: *s1,
                gamma,
                phi: phi.to_string(),
                frequencies: grid.len(),
                max_rel_err,
                tol,
                pass: max_rel_err <= tol,
            };
            let csv = format!(
                "s0,s,s1,gamma,phi,frequencies,max_rel_err,tol,pass\n{},{},{},{},{},{},{:.6e},{},{}\n",
                rep.s0, rep.s, rep.s1, rep.gamma, rep.phi, rep.frequencies, rep.max_rel_err, rep.tol, rep.pass
            );
            write_report(cli, "interp_verify", &rep, &csv)?;
            println!("max relative error {:.3e} over {} frequencies", max_rel_err, grid.len());
            Ok(verdict(rep.pass))
        }
        Command::TraceVerify { problem, r, count } => {
            let p = load_problem(problem)?;
            if *r == 0 {
                bail!("need r >= 1");
            }
            let period = p.geometry.periods()[0];
            let grid = FrequencyGrid::spatial(p.n - 1, period, cli.modes.unwrap_or(32))?;
            let tol = cli.tol.unwrap_or(1e-12);
            let mut samples = Vec::new();
            for i in 0..*count {
                let comps = (0..*r as u64).map(|k| SpectralField::random(&grid, cli.seed.wrapping_add(i * 64 + k), |_, _| 1.0)).collect();
                let v = TraceVector::new(p.b, comps)?;
                let inverse_err = trace_r(&extend_t1(&v), *r, p.b)?.max_abs_diff(&v);
                let ext = extension_bound_check(&v, p.m as usize)?;
                samples.push(TraceSample { index: i, inverse_err, ratio: ext.ratio, constant: ext.constant, pass: ext.pass && inverse_err <= tol });
            }
            let rep = TraceVerifyReport {
                b: p.b,
                m: p.m,
                r: *r,
                seed: cli.seed,
                max_inverse_err: samples.iter().map(|s| s.inverse_err).fold(0.0, f64::max),
                max_ratio: samples.iter().map(|s| s.ratio).fold(0.0, f64::max),
                constant: samples.first().map_or(0.0, |s| s.constant),
                tol,
                pass: samples.iter().all(|s| s.pass),
                samples,
            };
            let mut csv = String::from("index,inverse_err,ratio,constant,pass\n");
            for s in &rep.samples {
                let _ = writeln!(csv, "{},{:.6e},{:.12e},{:.12e},{}", s.index, s.inverse_err, s.ratio, s.constant, s.pass);
            }
            write_report(cli, "trace_verify", &rep, &csv)?;
            println!(
                "max |trace(extend v) - v| {:.3e}, max extension ratio {:.6} (constant {:.6})",
                rep.max_inverse_err, rep.max_ratio, rep.constant
            );
            Ok(verdict(rep.pass))
        }
        Command::IsoExperiment { problem, ensemble, s, max_spread, max_change } => {
            let p = load_problem(problem)?;
            let mut cfg = IsoConfig::heat(*ensemble, cli.seed);
            cfg.problem = p;
            cfg.s_values = s.clone();
            if let Some(m) = cli.modes {
                cfg.base_cutoff = m;
            }
            let rep = isomorphism_ratio_experiment(&cfg)?;
            write_report(cli, "iso_experiment", &rep, &rep.to_csv())?;
            for r in &rep.refinement {
                println!(
                    "s={} phi={}: spread {:.3} -> {:.3} (change {:.3})",
                    r.s, r.phi, r.spread_base, r.spread_fine, r.spread_change
                );
            }
            println!("seed {}; {}", rep.seed, rep.note);
            Ok(verdict(rep.passes(*max_spread, *max_change)))
        }
        Command::LocalReg { problem, exponent, smooth, levels } => {
            let p = load_problem(problem)?;
            let mut cfg = if *smooth { LocalRegConfig::smooth() } else { LocalRegConfig::point_singularity(*exponent) };
            let s0 = sigma0(p.m, &p.boundary_orders())?;
            cfg.problem = ParabolicProblem { tau: cfg.problem.tau, ..p };
            cfg.sigmas = vec![s0 as f64 + 1.0];
            let base = cli.modes.unwrap_or(32);
            cfg.levels = (0..*levels).map(|i| base << i).collect();
            let rep = local_regularity_experiment(&cfg)?;
            write_report(cli, "local_reg", &rep, &rep.to_csv())?;
            println!("levels {:?}", rep.levels);
            println!("local  {:?} (last change {:.3})", rep.local[0], rep.local_change[0]);
            println!("global {:?} (growth {:?})", rep.global[0], rep.global_growth[0]);
            for w in &rep.warnings {
                println!("warning: {w}");
            }
            let tol = cli.tol.unwrap_or(0.10);
            Ok(verdict(if *smooth { rep.settled(0, tol) } else { rep.localized(0, tol, 2.0) }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_workers_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
