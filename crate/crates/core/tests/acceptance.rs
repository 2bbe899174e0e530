//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the process exits
//! nonzero if any fails.

use hkit::compatibility::{compat_residuals, condition_count, project_q, CoefficientJet, RESIDUAL_TOL};
use hkit::harness::{apply_lambda_periodic, heat_convergence_study, isomorphism_ratio_experiment, ladder_data_norm, local_regularity_experiment, IsoConfig, LocalRegConfig};
use hkit::spectral::{embedding_check, interp_norm, Axis, FrequencyGrid, Interpolated, SpectralField};
use hkit::symbol::{covering_sweep, petrovskii_check, BoundarySide, ParabolicProblem};
use hkit::trace::{extend_t1, extension_bound_check, trace_r, TraceVector};
use hkit::weights::{psi_from, GenericInterpParam, PhiLogPower, WeightParams};
use std::f64::consts::E;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

/// Name, check and optional wall-clock budget.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Independent weight: `ρ^{s/2} ∏ L_i(ρ^{1/2})^{θ_i}` with nested `L(r) = ln(e − 1 + r)`.
fn weight_oracle(s: f64, gamma: f64, theta: &[f64], sq: f64, k: f64) -> f64 {
    let rho = 1.0 + sq + k.abs().powf(2.0 * gamma);
    let mut level = rho.sqrt();
    let mut phi = 1.0;
    for t in theta {
        level = (E - 1.0 + level).ln();
        phi *= level.powf(*t);
    }
    rho.powf(s / 2.0) * phi
}

fn space_time_grid(c: usize) -> FrequencyGrid {
    FrequencyGrid::new(vec![Axis::new(1.0, c), Axis::new(2.0, c), Axis::new(2.0, c)], true).unwrap()
}

fn interpolation_weights() -> Outcome {
    let grid = FrequencyGrid::new(vec![Axis::new(1.0, 20), Axis::new(0.5, 20), Axis::new(0.25, 12)], true).unwrap();
    let combos: [(f64, f64, f64, f64, Vec<f64>); 6] = [
        (0.0, 1.0, 2.0, 0.5, vec![]),
        (1.0, 2.0, 3.0, 0.5, vec![1.0]),
        (1.0, 2.0, 3.0, 0.5, vec![-1.0]),
        (-1.0, 0.5, 4.0, 0.25, vec![2.0, -0.5]),
        (0.5, 3.25, 5.0, 0.5, vec![0.7]),
        (-2.0, -0.5, 1.5, 1.0, vec![-3.0, 1.0, 0.5]),
    ];
    let mut worst: f64 = 0.0;
    for (s0, s, s1, gamma, theta) in &combos {
        let phi = PhiLogPower::new(theta.clone());
        let psi = psi_from(*s0, *s, *s1, phi).unwrap();
        let (m0, m1) = (WeightParams::sobolev(*s0, *gamma), WeightParams::sobolev(*s1, *gamma));
        let interp = Interpolated { m0: &m0, m1: &m1, psi: &psi };
        for i in 0..grid.len() {
            let (sq, k) = grid.split_frequency(i);
            let want = weight_oracle(*s, *gamma, theta, sq, k);
            use hkit::spectral::Multiplier;
            worst = worst.max((interp.at(sq, k) - want).abs() / want);
        }
    }
    outcome(worst <= 1e-12, format!("{} frequencies x {} combos, max rel err {worst:.2e}", grid.len(), combos.len()))
}

fn geometric_mean() -> Outcome {
    let grid = space_time_grid(10);
    let mut pointwise: f64 = 0.0;
    for theta in [vec![], vec![1.0], vec![-1.0]] {
        for eps in [0.1, 0.25, 0.4] {
            for i in 0..grid.len() {
                let (sq, k) = grid.split_frequency(i);
                let lo = weight_oracle(2.5 - eps, 0.5, &theta, sq, k);
                let hi = weight_oracle(2.5 + eps, 0.5, &theta, sq, k);
                let mid = WeightParams::new(2.5, 0.5, PhiLogPower::new(theta.clone())).eval_sq(sq, k);
                pointwise = pointwise.max(((lo * hi).sqrt() - mid).abs() / mid);
            }
        }
    }
    let p = ParabolicProblem::heat_dirichlet();
    let psi = GenericInterpParam::power(0.5);
    let mut spread: f64 = 0.0;
    for seed in 0..10 {
        let u = SpectralField::random(&grid, 100 + seed, |sq, k| (1.0 + sq + k.abs()).powf(-2.5));
        let phi = PhiLogPower::log_power(if seed % 2 == 0 { 1.0 } else { -1.0 });
        let w = WeightParams::new(2.5, 0.5, phi.clone());
        let data = apply_lambda_periodic(&u, &p, 0, w.clone()).unwrap();
        let mut field_norms = Vec::new();
        let mut data_norms = Vec::new();
        for eps in [0.1, 0.25, 0.4] {
            field_norms.push(interp_norm(&u, &w.shifted(-eps), &w.shifted(eps), &psi).unwrap());
            data_norms.push(ladder_data_norm(&data, &p, 2.5, &phi, eps).unwrap());
        }
        for v in [field_norms, data_norms] {
            let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
            spread = spread.max((hi - lo) / lo);
        }
    }
    outcome(
        pointwise <= 1e-12 && spread <= 1e-10,
        format!("pointwise rel err {pointwise:.2e}, ladder-norm eps spread {spread:.2e}"),
    )
}

fn embedding_chain() -> Outcome {
    let grid = space_time_grid(8);
    let mut violations = 0;
    let mut checked = 0;
    for phi in [PhiLogPower::one(), PhiLogPower::log_power(1.0), PhiLogPower::log_power(-1.0)] {
        for seed in 0..100 {
            let u = SpectralField::random(&grid, 1000 + seed, |sq, k| (1.0 + sq + k.abs()).powf(-2.0));
            let rep = embedding_check(&u, 1.0, 2.0, 3.0, &phi, 0.5).unwrap();
            checked += 1;
            if !rep.pass {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations in {checked} checks"))
}

fn right_inverse() -> Outcome {
    let grid = FrequencyGrid::spatial(1, 2.0 * std::f64::consts::PI, 32).unwrap();
    let mut err: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut failures = 0;
    for r in 1..=3 {
        for b in [1u32, 2] {
            for seed in 0..100u64 {
                let comps = (0..r).map(|k| SpectralField::random(&grid, seed * 10 + k as u64, |_, _| 1.0)).collect();
                let v = TraceVector::new(b, comps).unwrap();
                let back = trace_r(&extend_t1(&v), r, b).unwrap();
                err = err.max(back.max_abs_diff(&v));
                for m in [1, r] {
                    let rep = extension_bound_check(&v, m).unwrap();
                    max_ratio = max_ratio.max(rep.ratio / rep.constant);
                    failures += usize::from(!rep.pass);
                }
            }
        }
    }
    outcome(
        err <= 1e-12 && failures == 0,
        format!("max |trace(extend v) - v| {err:.2e}, bound failures {failures}, max lhs/(c rhs) {max_ratio:.3}"),
    )
}

fn petrovskii() -> Outcome {
    let heat = petrovskii_check(&ParabolicProblem::heat_dirichlet(), 256, 1e-6).unwrap();
    let back = petrovskii_check(&ParabolicProblem::backward_heat(), 256, 1e-6).unwrap();
    let want = std::f64::consts::FRAC_1_SQRT_2;
    outcome(
        heat.pass && (heat.min_abs - want).abs() <= 1e-4 && !back.pass && back.min_abs <= 1e-6,
        format!(
            "heat min {:.6} (target {want:.6}), backward heat min {:.1e} at xi={:?} p={:?}",
            heat.min_abs, back.min_abs, back.witness.xi, back.witness.p
        ),
    )
}

fn covering() -> Outcome {
    let d = covering_sweep(&ParabolicProblem::heat_dirichlet(), 64, 0.1).unwrap();
    let n = covering_sweep(&ParabolicProblem::heat_neumann(), 64, 0.1).unwrap();
    let o = covering_sweep(&ParabolicProblem::heat_oblique(), 64, 0.1).unwrap();
    let w = &o.worst;
    let at_witness = w.point.xi == [1.0] && w.point.p == [0.0, 0.0];
    outcome(
        d.pass && n.pass && d.worst.det_rel >= 0.1 && n.worst.det_rel >= 0.1 && !o.pass && at_witness && w.det_abs <= 1e-10,
        format!(
            "dirichlet min {:.4}, neumann min {:.4}; oblique fails on {:?} side at xi={:?} p={:?} |det|={:.1e}",
            d.worst.det_rel, n.worst.det_rel, w.side, w.point.xi, w.point.p, w.det_abs
        ),
    )
}

fn compatibility() -> Outcome {
    let p = ParabolicProblem::heat_dirichlet();
    let grid = FrequencyGrid::new(vec![Axis::new(1.0, 4), Axis::new(2.0, 4), Axis::new(8.0, 4)], true).unwrap();
    let spatial = grid.without_axis(2).unwrap();
    let jets = CoefficientJet::new(&p, &spatial, 3).unwrap();
    let u = SpectralField::random(&grid, 17, |sq, k| (1.0 + sq + k * k).powf(-2.0));
    let data = apply_lambda_periodic(&u, &p, 3, WeightParams::sobolev(4.0, 0.5)).unwrap();
    let mut manufactured: f64 = 0.0;
    for s in [2.25, 3.0, 4.0, 5.25] {
        manufactured = manufactured.max(compat_residuals(&data, &p, &jets, s, RESIDUAL_TOL).unwrap().max_residual());
    }
    let s = 4.0;
    let mut bad = data.clone();
    for side in [BoundarySide::Lower, BoundarySide::Upper] {
        let g = bad.g[0].side_mut(side);
        for k in 0..2 {
            let noise = SpectralField::random(&g.jets[k].grid, 50 + k as u64, |_, _| 0.2);
            g.jets[k] = g.jets[k].add(&noise).unwrap();
        }
    }
    let injected = compat_residuals(&bad, &p, &jets, s, RESIDUAL_TOL).unwrap().max_residual();
    let fixed = project_q(&bad, &p, &jets, s).unwrap();
    let repaired = compat_residuals(&fixed, &p, &jets, s, RESIDUAL_TOL).unwrap().max_residual();
    let idem = project_q(&fixed, &p, &jets, s).unwrap().max_abs_diff(&fixed);
    let counts = (condition_count(2.6, 1, 0).count, condition_count(6.6, 1, 0).count);
    outcome(
        manufactured <= 1e-8 && injected > 1e-8 && repaired <= 1e-8 && idem <= 1e-10 && counts == (1, 3),
        format!(
            "manufactured {manufactured:.1e}, injected {injected:.1e} -> repaired {repaired:.1e}, idempotence {idem:.1e}, counts {counts:?}"
        ),
    )
}

fn isomorphism() -> Outcome {
    let cfg = IsoConfig::heat(50, 20_251_016);
    let rep = isomorphism_ratio_experiment(&cfg).unwrap();
    outcome(
        rep.passes(1e2, 2.0),
        format!("seed {}, max spread {:.3}, max spread change {:.3}", rep.seed, rep.max_spread, rep.max_spread_change),
    )
}

fn local_regularity() -> Outcome {
    let sing = local_regularity_experiment(&LocalRegConfig::point_singularity(1.8)).unwrap();
    let smooth = local_regularity_experiment(&LocalRegConfig::smooth()).unwrap();
    outcome(
        sing.localized(0, 0.10, 2.0) && smooth.settled(0, 0.10),
        format!(
            "singular: local {:?} (change {:.3}), global growth {:?}; smooth: local change {:.3}, global change {:.3}",
            sing.local[0].iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>(),
            sing.local_change[0],
            sing.global_growth[0].iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>(),
            smooth.local_change[0],
            smooth.global_change[0]
        ),
    )
}

fn solver() -> Outcome {
    let st = heat_convergence_study(&[16, 32, 64], 0.5).unwrap();
    outcome(
        st.orders.iter().all(|o| *o >= 1.9),
        format!("errors {:?}, orders {:?}", st.errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(), st.orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("interpolation weight exactness", interpolation_weights, Some(Duration::from_secs(1))),
        ("geometric mean and ladder norm", geometric_mean, None),
        ("embedding chain", embedding_chain, None),
        ("trace right inverse", right_inverse, None),
        ("petrovskii checker", petrovskii, Some(Duration::from_secs(5))),
        ("covering checker", covering, None),
        ("compatibility machinery", compatibility, None),
        ("isomorphism ratios", isomorphism, Some(Duration::from_secs(120))),
        ("local regularity", local_regularity, None),
        ("solver convergence", solver, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut out = run();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > *b {
                out.pass = false;
                out.detail.push_str(&format!("; over budget {b:?}"));
            }
        }
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} {name} [{:.2}s]: {}", i + 1, elapsed.as_secs_f64(), out.detail);
        failed += usize::from(!out.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
