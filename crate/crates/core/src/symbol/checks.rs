//! Petrovskii parabolicity and covering-condition checks.

use super::poly::Poly;
use super::problem::{BoundarySide, ParabolicProblem, Term};
use super::roots::{cluster_roots, poly_roots};
use crate::error::{Error, Result};
use crate::exec::{map_collect, min_by_index};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Roots with `Im ζ ≤ IMAG_TOL (1 + |ζ|)` count as real.
pub const IMAG_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-8;

fn principal_sum(terms: &[Term], order: u32, b: u32, x: &[f64], t: f64, xi: &[f64], p: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for term in terms.iter().filter(|tm| tm.weighted_order(b) == order) {
        let mut mono = p.powu(term.beta);
        for (a, v) in term.alpha.iter().zip(xi) {
            mono *= v.powi(*a as i32);
        }
        acc += term.coeff.value(x, t) * mono;
    }
    acc
}

/// Principal symbol `A°(x,t,ξ,p) = Σ_{|α|+2bβ=2m} a^{α,β}(x,t) ξ^α p^β`.
pub fn eval_a0(problem: &ParabolicProblem, x: &[f64], t: f64, xi: &[f64], p: Complex64) -> Complex64 {
    principal_sum(&problem.interior, 2 * problem.m, problem.b, x, t, xi, p)
}

/// Principal part of a boundary operator as a polynomial in `ζ`:
/// `Σ_{|α|+2bβ=order} b^{α,β} (ξ + ζν)^α p^β`.
#[allow(clippy::too_many_arguments)]
pub fn principal_in_zeta(terms: &[Term], order: u32, b: u32, x: &[f64], t: f64, xi: &[f64], nu: &[f64], p: Complex64) -> Poly {
    let mut out = Poly::zero();
    for term in terms.iter().filter(|tm| tm.weighted_order(b) == order) {
        let mut mono = Poly::constant(p.powu(term.beta));
        for ((a, xv), nv) in term.alpha.iter().zip(xi).zip(nu) {
            let lin = Poly::linear(Complex64::new(*xv, 0.0), Complex64::new(*nv, 0.0));
            mono = mono.mul(&lin.powi(*a));
        }
        out.add_assign_scaled(&mono, term.coeff.value(x, t));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolPoint {
    pub x: Vec<f64>,
    pub t: f64,
    pub xi: Vec<f64>,
    pub p: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct PetrovskiiReport {
    pub min_abs: f64,
    pub witness: SymbolPoint,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Points on the anisotropic unit sphere `|ξ|² + |p|^{1/b} = 1`, `Re p ≥ 0`.
/// `λ = |ξ|²` and `arg p` each take `resolution + 1` equispaced values, so the
/// sample contains `λ = 1/2` and `arg p = ±π/2` whenever `resolution` is even.
fn sphere_radial(resolution: usize, b: u32) -> Vec<(f64, Complex64)> {
    let mut out = Vec::new();
    for i in 0..=resolution {
        let lambda = i as f64 / resolution as f64;
        let modulus = (1.0 - lambda).powi(b as i32);
        if modulus == 0.0 {
            out.push((lambda, Complex64::new(0.0, 0.0)));
            continue;
        }
        for k in 0..=resolution {
            let arg = -PI / 2.0 + PI * k as f64 / resolution as f64;
            out.push((lambda, Complex64::from_polar(modulus, arg)));
        }
    }
    out
}

/// Unit directions in `R^dim`.
fn directions(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => vec![vec![]],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..resolution)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / resolution as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            // golden-spiral-like low-discrepancy cover via normalized Halton points
            let pts = crate::weights::halton_points(dim, 1.0, resolution * resolution + 1);
            pts.into_iter()
                .skip(1)
                .filter_map(|v| {
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    (n > 1e-9).then(|| v.iter().map(|x| x / n).collect())
                })
                .collect()
        }
    }
}

/// Minimizes `|A°|` over sampled `(x,t)` and the anisotropic sphere. By the
/// homogeneity `A°(λξ, λ^{2b}p) = λ^{2m} A°(ξ,p)` this decides Condition 1 on the sample.
pub fn petrovskii_check(problem: &ParabolicProblem, resolution: usize, tol: f64) -> Result<PetrovskiiReport> {
    if resolution < 8 {
        return Err(Error::Parameter("sphere resolution must be at least 8".into()));
    }
    let radial = sphere_radial(resolution, problem.b);
    let dirs = directions(problem.n, resolution);
    let points = problem.sample_points(4, 3);
    let per_point = radial.len() * dirs.len();
    let total = points.len() * per_point;
    // principal terms with coefficients frozen at each sample point
    let frozen: Vec<Vec<(&[u32], u32, Complex64)>> = points
        .iter()
        .map(|(x, t)| {
            let order = 2 * problem.m;
            problem
                .interior
                .iter()
                .filter(|tm| tm.weighted_order(problem.b) == order)
                .map(|tm| (tm.alpha.as_slice(), tm.beta, tm.coeff.value(x, *t)))
                .collect()
        })
        .collect();
    let decode = |i: usize| {
        let (pi, rest) = (i / per_point, i % per_point);
        let (ri, di) = (rest / dirs.len(), rest % dirs.len());
        let (lambda, p) = radial[ri];
        (pi, di, lambda.sqrt(), p)
    };
    let (imin, min_abs) = min_by_index(total, |i| {
        let (pi, di, r, p) = decode(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, beta, c) in &frozen[pi] {
            let mut mono = p.powu(*beta);
            for (a, d) in alpha.iter().zip(&dirs[di]) {
                mono *= (d * r).powi(*a as i32);
            }
            acc += c * mono;
        }
        acc.norm()
    })
    .ok_or_else(|| Error::Parameter("empty sample".into()))?;
    let decode = |i: usize| {
        let (pi, di, r, p) = decode(i);
        let xi: Vec<f64> = dirs[di].iter().map(|d| d * r).collect();
        (pi, xi, p)
    };
    let (pi, xi, p) = decode(imin);
    Ok(PetrovskiiReport {
        min_abs,
        witness: SymbolPoint { x: points[pi].0.clone(), t: points[pi].1, xi, p: [p.re, p.im] },
        samples: total,
        tol,
        pass: min_abs > tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RootSplit {
    pub zeta_plus: Vec<Complex64>,
    pub zeta_minus: Vec<Complex64>,
    /// Distinct roots with multiplicity (clustered within 1e-8).
    pub clusters: Vec<(Complex64, usize)>,
}

fn admissible(xi: &[f64], p: Complex64) -> Result<()> {
    if p.re < 0.0 {
        return Err(Error::Parameter(format!("need Re p >= 0, got {p}")));
    }
    if xi.iter().all(|v| *v == 0.0) && p.norm() == 0.0 {
        return Err(Error::Parameter("(xi, p) = 0 is excluded".into()));
    }
    Ok(())
}

/// Embeds tangential coordinates into `R^n` (normal axis last).
fn embed_tangent(xi_tangent: &[f64], n: usize) -> Vec<f64> {
    let mut xi = xi_tangent.to_vec();
    xi.resize(n, 0.0);
    xi
}

/// Splits the roots of `ζ ↦ A°(x,t,ξ+ζν,p)` into the upper and lower half-planes.
pub fn root_split(
    problem: &ParabolicProblem,
    side: BoundarySide,
    x: &[f64],
    t: f64,
    xi_tangent: &[f64],
    p: Complex64,
) -> Result<RootSplit> {
    admissible(xi_tangent, p)?;
    let n = problem.n;
    let xi = embed_tangent(xi_tangent, n);
    let nu = problem.geometry.inner_normal(side, n);
    let poly = principal_in_zeta(&problem.interior, 2 * problem.m, problem.b, x, t, &xi, &nu, p);
    if poly.degree() != Some(2 * problem.m as usize) {
        return Err(Error::RootOnRealAxis("principal symbol degenerates in the normal direction".into()));
    }
    let roots = poly_roots(&poly)?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for z in roots {
        if z.im.abs() <= IMAG_TOL * (1.0 + z.norm()) {
            return Err(Error::RootOnRealAxis(format!("root {z} at xi={xi_tangent:?}, p={p}")));
        }
        if z.im > 0.0 {
            plus.push(z);
        } else {
            minus.push(z);
        }
    }
    if plus.len() != problem.m as usize {
        return Err(Error::RootOnRealAxis(format!("{} roots above the axis, expected {}", plus.len(), problem.m)));
    }
    let sort = |v: &mut Vec<Complex64>| v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    sort(&mut plus);
    sort(&mut minus);
    let mut all = plus.clone();
    all.extend_from_slice(&minus);
    Ok(RootSplit { clusters: cluster_roots(&all, CLUSTER_TOL), zeta_plus: plus, zeta_minus: minus })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub side: BoundarySide,
    pub point: SymbolPoint,
    pub det_abs: f64,
    /// `|det| / ∏_j ‖B_j°‖`, the scale-free quantity compared against `tol`.
    pub det_rel: f64,
    pub tol: f64,
    pub pass: bool,
    /// Row `j`: coefficients of `B_j° mod ∏(ζ − ζ_j⁺)`, as `[re, im]`.
    pub remainders: Vec<Vec<[f64; 2]>>,
}

/// Lopatinskii determinant at one admissible boundary point.
pub fn covering_check(
    problem: &ParabolicProblem,
    side: BoundarySide,
    x: &[f64],
    t: f64,
    xi_tangent: &[f64],
    p: Complex64,
    tol: f64,
) -> Result<CoveringReport> {
    let split = root_split(problem, side, x, t, xi_tangent, p)?;
    let n = problem.n;
    let m = problem.m as usize;
    let xi = embed_tangent(xi_tangent, n);
    let nu = problem.geometry.inner_normal(side, n);
    let modulus = Poly::from_roots(&split.zeta_plus);
    let mut mat = DMatrix::<Complex64>::zeros(m, m);
    let mut scale = 1.0;
    let mut remainders = Vec::with_capacity(m);
    for (j, op) in problem.boundary.iter().enumerate() {
        let bj = principal_in_zeta(&op.terms, op.order, problem.b, x, t, &xi, &nu, p);
        let r = bj.rem_monic(&modulus);
        scale *= bj.coeff_norm();
        for (k, c) in r.iter().enumerate() {
            mat[(j, k)] = *c;
        }
        remainders.push(r.iter().map(|c| [c.re, c.im]).collect());
    }
    let det_abs = mat.determinant().norm();
    let det_rel = if scale > 0.0 { det_abs / scale } else { 0.0 };
    Ok(CoveringReport {
        side,
        point: SymbolPoint { x: x.to_vec(), t, xi: xi_tangent.to_vec(), p: [p.re, p.im] },
        det_abs,
        det_rel,
        tol,
        pass: det_rel > tol,
        remainders,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringSweep {
    pub worst: CoveringReport,
    pub min_det_abs: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Worst covering determinant over both boundary components, sampled `(x,t)`
/// and the anisotropic sphere in `(ξ_tangent, p)`.
/// `(side, x, t, ξ′, p)` of one covering sample.
type BoundarySample = (BoundarySide, Vec<f64>, f64, Vec<f64>, Complex64);

pub fn covering_sweep(problem: &ParabolicProblem, resolution: usize, tol: f64) -> Result<CoveringSweep> {
    if resolution < 8 {
        return Err(Error::Parameter("sphere resolution must be at least 8".into()));
    }
    let n = problem.n;
    let radial = sphere_radial(resolution, problem.b);
    let dirs = directions(n - 1, resolution);
    let mut samples: Vec<BoundarySample> = Vec::new();
    for side in problem.geometry.sides() {
        let pos = problem.geometry.side_position(side);
        let mut seen: Vec<(Vec<f64>, f64)> = Vec::new();
        for (mut x, t) in problem.sample_points(4, 3) {
            x[n - 1] = pos;
            if seen.iter().any(|(y, s)| *y == x && *s == t) {
                continue;
            }
            seen.push((x.clone(), t));
            for &(lambda, p) in radial.iter().rev() {
                for d in &dirs {
                    let xi: Vec<f64> = d.iter().map(|v| v * lambda.sqrt()).collect();
                    samples.push((side, x.clone(), t, xi, p));
                }
            }
        }
    }
    let reports: Vec<Result<CoveringReport>> = map_collect(samples.len(), |i| {
        let (side, x, t, xi, p) = &samples[i];
        covering_check(problem, *side, x, *t, xi, *p, tol)
    });
    let reports: Vec<CoveringReport> = reports.into_iter().collect::<Result<_>>()?;
    let min_rel = reports.iter().map(|r| r.det_rel).fold(f64::INFINITY, f64::min);
    // first sample within rounding of the minimum, so ties resolve in sweep order
    let worst = reports
        .iter()
        .find(|r| r.det_rel <= min_rel + 1e-13)
        .cloned()
        .ok_or_else(|| Error::Parameter("empty sample".into()))?;
    let min_det_abs = reports.iter().map(|r| r.det_abs).fold(f64::INFINITY, f64::min);
    Ok(CoveringSweep { pass: worst.det_rel > tol, worst, min_det_abs, samples: reports.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::problem::BoundaryOperator;

    #[test]
    fn heat_sphere_minimum() {
        let rep = petrovskii_check(&ParabolicProblem::heat_dirichlet(), 64, 1e-6).unwrap();
        assert!(rep.pass);
        assert!((rep.min_abs - 0.5f64.sqrt()).abs() < 1e-12, "{}", rep.min_abs);
    }

    #[test]
    fn backward_heat_witness() {
        let rep = petrovskii_check(&ParabolicProblem::backward_heat(), 64, 1e-6).unwrap();
        assert!(!rep.pass);
        assert!(rep.min_abs <= 1e-12);
        let w = &rep.witness;
        let xi2: f64 = w.xi.iter().map(|v| v * v).sum();
        assert!((xi2 - w.p[0]).abs() < 1e-12 && w.p[1].abs() < 1e-12);
    }

    #[test]
    fn heat_roots_at_p_zero() {
        let split = root_split(&ParabolicProblem::heat_dirichlet(), BoundarySide::Lower, &[0.0, 0.0], 0.0, &[1.0], Complex64::new(0.0, 0.0)).unwrap();
        assert!((split.zeta_plus[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((split.zeta_minus[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert_eq!(split.clusters.len(), 2);
    }

    #[test]
    fn origin_rejected() {
        let err = root_split(&ParabolicProblem::heat_dirichlet(), BoundarySide::Lower, &[0.0, 0.0], 0.0, &[0.0], Complex64::new(0.0, 0.0));
        assert!(matches!(err, Err(Error::Parameter(_))));
    }

    #[test]
    fn real_root_detected_for_backward_heat() {
        let p = ParabolicProblem::backward_heat();
        let err = root_split(&p, BoundarySide::Lower, &[0.0, 0.0], 0.0, &[1.0], Complex64::new(1.0, 0.0));
        assert!(matches!(err, Err(Error::RootOnRealAxis(_))));
    }

    #[test]
    fn dirichlet_and_neumann_cover() {
        for p in [ParabolicProblem::heat_dirichlet(), ParabolicProblem::heat_neumann()] {
            let sweep = covering_sweep(&p, 32, 0.1).unwrap();
            assert!(sweep.pass, "{}", sweep.worst.det_rel);
        }
    }

    #[test]
    fn oblique_fails_at_lower_positive_xi() {
        let sweep = covering_sweep(&ParabolicProblem::heat_oblique(), 32, 0.1).unwrap();
        assert!(!sweep.pass);
        let w = &sweep.worst;
        assert_eq!(w.side, BoundarySide::Lower);
        assert!((w.point.xi[0] - 1.0).abs() < 1e-15 && w.point.p == [0.0, 0.0]);
        assert!(w.det_abs <= 1e-10);
    }

    #[test]
    fn oblique_upper_side_mirror() {
        let p = ParabolicProblem::heat_oblique();
        let rep = covering_check(&p, BoundarySide::Upper, &[0.0, 1.0], 0.0, &[-1.0], Complex64::new(0.0, 0.0), 1e-3).unwrap();
        assert!(rep.det_abs < 1e-12);
    }

    #[test]
    fn biharmonic_dirichlet_covers() {
        let p = ParabolicProblem::biharmonic_parabolic();
        assert!(petrovskii_check(&p, 32, 1e-3).unwrap().pass);
        assert!(covering_sweep(&p, 16, 1e-3).unwrap().pass);
    }

    #[test]
    fn zero_boundary_operator_fails() {
        let op = BoundaryOperator { order: 0, terms: vec![Term::new(vec![0, 0], 0, crate::symbol::Coefficient::real(0.0))] };
        let sweep = covering_sweep(&ParabolicProblem::heat_with_boundary(op), 16, 1e-3).unwrap();
        assert!(!sweep.pass);
    }
}
