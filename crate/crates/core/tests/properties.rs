use approx::assert_relative_eq;
use hkit::exec::{with_execution, Execution};
use hkit::spectral::{hoermander_norm, interp_norm, Axis, FrequencyGrid, SpectralField};
use hkit::symbol::{covering_sweep, eval_a0, petrovskii_check, ParabolicProblem};
use hkit::weights::{mu_eval, psi_from, PhiLogPower, WeightParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> FrequencyGrid {
    FrequencyGrid::new(vec![Axis::new(1.0, 6), Axis::new(2.0, 6), Axis::new(2.0, 6)], true).unwrap()
}

proptest! {
    #[test]
    fn principal_symbol_is_homogeneous(
        xi in prop::array::uniform2(-3.0f64..3.0),
        p in prop::array::uniform2(-3.0f64..3.0),
        lambda in 0.1f64..4.0,
        which in 0usize..3,
    ) {
        let problem = [ParabolicProblem::heat_dirichlet(), ParabolicProblem::biharmonic_parabolic(), ParabolicProblem::backward_heat()][which].clone();
        let pc = Complex64::new(p[0], p[1]);
        let b = problem.b as i32;
        let base = eval_a0(&problem, &[0.0, 0.0], 0.0, &xi, pc);
        let scaled = eval_a0(&problem, &[0.0, 0.0], 0.0, &[lambda * xi[0], lambda * xi[1]], pc * lambda.powi(2 * b));
        let want = base * lambda.powi(2 * problem.m as i32);
        prop_assert!((scaled - want).norm() <= 1e-10 * want.norm().max(1e-300));
    }

    #[test]
    fn weight_is_monotone_in_order(s in -3.0f64..3.0, ds in 0.01f64..2.0, theta in -2.0f64..2.0, xi in 0.0f64..50.0, k in -50.0f64..50.0) {
        let phi = PhiLogPower::log_power(theta);
        let lo = mu_eval(&WeightParams::new(s, 0.5, phi.clone()), &[xi], k);
        let hi = mu_eval(&WeightParams::new(s + ds, 0.5, phi), &[xi], k);
        prop_assert!(lo > 0.0 && hi >= lo);
    }

    #[test]
    fn interpolated_norm_equals_weighted_norm(seed in 0u64..1000, theta in -1.5f64..1.5, t in 0.1f64..0.9) {
        let g = grid();
        let u = SpectralField::random(&g, seed, |sq, k| (1.0 + sq + k.abs()).powf(-1.5));
        let (s0, s1) = (0.5, 3.5);
        let s = s0 + t * (s1 - s0);
        let phi = PhiLogPower::log_power(theta);
        let psi = psi_from(s0, s, s1, phi.clone()).unwrap();
        let a = interp_norm(&u, &WeightParams::sobolev(s0, 0.5), &WeightParams::sobolev(s1, 0.5), &psi).unwrap();
        let b = hoermander_norm(&u, &WeightParams::new(s, 0.5, phi)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }
}

#[test]
fn execution_modes_agree() {
    let u = SpectralField::random(&grid(), 9, |sq, k| (1.0 + sq + k.abs()).powf(-2.0));
    let w = WeightParams::new(2.75, 0.5, PhiLogPower::log_power(1.0));
    let heat = ParabolicProblem::heat_neumann();
    let run = |mode| {
        with_execution(mode, || {
            let n = hoermander_norm(&u, &w).unwrap();
            let pet = petrovskii_check(&heat, 32, 1e-6).unwrap();
            let cov = covering_sweep(&heat, 16, 0.1).unwrap();
            (n, pet.min_abs, pet.witness.xi, cov.worst.det_rel, cov.worst.point.xi)
        })
    };
    let (a, b) = (run(Execution::Sequential), run(Execution::Parallel));
    assert_eq!(a, b);
    assert_relative_eq!(a.0, hoermander_norm(&u, &w).unwrap());
}
