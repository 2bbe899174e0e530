use hkit::compatibility::{compat_residuals, CoefficientJet, RESIDUAL_TOL};
use hkit::harness::{apply_lambda, apply_lambda_periodic, solve_model, strip_grid, AnalyticData, ModelConfig};
use hkit::spectral::{Axis, FrequencyGrid, SpectralField};
use hkit::symbol::{BoundarySide, ParabolicProblem};
use hkit::trace::{SpaceTimeField, TimeProfile};
use hkit::weights::WeightParams;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn manufactured(x: [f64; 2], t: f64) -> Complex64 {
    Complex64::new((-t).exp() * (2.0 * PI * x[0]).sin() * (PI * x[1]).sin(), 0.0)
}

/// `e^{−t} sin(2πx₁) sin(πx₂)` on the strip surrogate grid.
fn manufactured_field(p: &ParabolicProblem) -> SpaceTimeField {
    let grid = strip_grid(p, &[4, 4]).unwrap();
    let f = SpectralField::from_fn(&grid, |n| match n {
        [1, 1] | [-1, -1] => Complex64::new(-0.25, 0.0),
        [1, -1] | [-1, 1] => Complex64::new(0.25, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    let mut u = SpaceTimeField::zero(&grid);
    u.push(TimeProfile::Exp { rate: Complex64::new(-1.0, 0.0) }, f).unwrap();
    u
}

#[test]
fn solver_reference_resolution() {
    let p = ParabolicProblem { tau: 1.0, ..ParabolicProblem::heat_dirichlet() };
    let cfg = ModelConfig::new(&p, 64, 128, 256).unwrap();
    let data = AnalyticData {
        source: |x: [f64; 2], t: f64| manufactured(x, t) * (5.0 * PI * PI - 1.0),
        boundary: |_: usize, _: BoundarySide, _: f64, _: f64| Complex64::new(0.0, 0.0),
        initial: |x: [f64; 2]| manufactured(x, 0.0),
    };
    let rep = solve_model(&cfg, &data).unwrap();
    let err = rep.solution.relative_l2_error(256, manufactured);
    assert!(err <= 1e-4, "{err}");
    assert!(rep.warnings.is_empty());
}

#[test]
fn lambda_closed_forms() {
    let p = ParabolicProblem::heat_dirichlet();
    let u = manufactured_field(&p);
    let img = apply_lambda(&u, &p).unwrap();
    for &(x1, x2, t) in &[(0.1, 0.3, 0.0), (0.37, 0.8, 0.4), (0.9, 0.55, 1.0)] {
        let f = img.f.eval(t).eval_at(&[x1, x2]);
        assert!((f - manufactured([x1, x2], t) * (5.0 * PI * PI - 1.0)).norm() < 1e-8);
        for g in &img.g[0] {
            assert!(g.eval(t).eval_at(&[x1]).norm() < 1e-14);
        }
        assert!((img.h[0].eval_at(&[x1, x2]) - manufactured([x1, x2], 0.0)).norm() < 1e-14);
    }
}

#[test]
fn solver_recovers_lambda_preimage() {
    let p = ParabolicProblem { tau: 0.25, ..ParabolicProblem::heat_dirichlet() };
    let img = apply_lambda(&manufactured_field(&p), &p).unwrap();
    let mut errs = Vec::new();
    for n in [16, 32] {
        let rep = solve_model(&ModelConfig::new(&p, 4, n, n / 2).unwrap(), &img).unwrap();
        errs.push(rep.solution.relative_l2_error(n / 2, manufactured));
    }
    assert!(errs[1] < 1e-3 && errs[0] / errs[1] > 3.5, "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lambda_images_are_compatible(seed in 0u64..10_000, which in 0usize..3) {
        let p = [ParabolicProblem::heat_dirichlet(), ParabolicProblem::heat_neumann(), ParabolicProblem::heat_oblique()][which].clone();
        let grid = FrequencyGrid::new(vec![Axis::new(1.0, 3), Axis::new(2.0, 3), Axis::new(8.0, 3)], true).unwrap();
        let u = SpectralField::random(&grid, seed, |sq, k| (1.0 + sq + k * k).powf(-2.0));
        let data = apply_lambda_periodic(&u, &p, 3, WeightParams::sobolev(4.0, 0.5)).unwrap();
        let jets = CoefficientJet::new(&p, &grid.without_axis(2).unwrap(), 3).unwrap();
        for s in [2.25, 3.75, 5.25] {
            let rep = compat_residuals(&data, &p, &jets, s, RESIDUAL_TOL).unwrap();
            prop_assert!(rep.pass, "s={} residual {}", s, rep.max_residual());
        }
    }
}
