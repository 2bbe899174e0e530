//! Time jets of the coefficients at `t = 0` and the solved-for-`∂_t^κ` form.

use crate::error::{Error, Result};
use crate::series::Series;
use crate::spectral::{from_physical, to_physical, FrequencyGrid, SpectralField};
use crate::symbol::{Coefficient, ParabolicProblem, Term};
use num_complex::Complex64;

/// Smallest admissible `|a^{0,κ}|` on the grid.
pub const LEADING_TOL: f64 = 1e-12;

/// A coefficient jet entry `∂_t^q c(·, 0)`: a scalar when `c` is constant in
/// space, otherwise samples on the oversampled physical grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialFactor {
    Scalar(Complex64),
    Samples(Vec<Complex64>),
}

/// Jets of one operator term.
#[derive(Debug, Clone, PartialEq)]
pub struct TermJet {
    pub alpha: Vec<u32>,
    pub beta: u32,
    /// `jets[q] = ∂_t^q coeff(·, 0)`.
    pub jets: Vec<SpatialFactor>,
}

/// Coefficient jets of every interior and boundary term on a spatial grid.
#[derive(Debug, Clone)]
pub struct CoefficientJet {
    pub grid: FrequencyGrid,
    /// Physical grid for variable-coefficient products: `4N + 3` points per axis,
    /// enough to project products with catalog cosines of frequency up to `2N + 2` without aliasing.
    pub sizes: Vec<usize>,
    pub depth: usize,
    pub interior: Vec<TermJet>,
    pub boundary: Vec<Vec<TermJet>>,
}

fn physical_points(grid: &FrequencyGrid, sizes: &[usize]) -> Vec<Vec<f64>> {
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; sizes.len()];
            for a in (0..sizes.len()).rev() {
                let j = idx % sizes[a];
                idx /= sizes[a];
                x[a] = j as f64 * grid.axes()[a].period / sizes[a] as f64;
            }
            x
        })
        .collect()
}

impl CoefficientJet {
    pub fn new(problem: &ParabolicProblem, grid: &FrequencyGrid, depth: usize) -> Result<Self> {
        if grid.dim() != problem.n || grid.has_time_axis() {
            return Err(Error::GridMismatch(format!("need a spatial grid of dimension {}", problem.n)));
        }
        let sizes: Vec<usize> = grid.axes().iter().map(|a| 4 * a.cutoff + 3).collect();
        let points = physical_points(grid, &sizes);
        let jet_of = |t: &Term| -> TermJet {
            let jets = match &t.coeff {
                Coefficient::CosX { .. } => {
                    let per_point: Vec<Vec<Complex64>> = points.iter().map(|x| t.coeff.time_jet(x, depth)).collect();
                    (0..=depth).map(|q| SpatialFactor::Samples(per_point.iter().map(|j| j[q]).collect())).collect()
                }
                c => c.time_jet(&[], depth).into_iter().map(SpatialFactor::Scalar).collect(),
            };
            TermJet { alpha: t.alpha.clone(), beta: t.beta, jets }
        };
        Ok(Self {
            grid: grid.clone(),
            interior: problem.interior.iter().map(jet_of).collect(),
            boundary: problem.boundary.iter().map(|op| op.terms.iter().map(jet_of).collect()).collect(),
            sizes,
            depth,
        })
    }

    /// Multiplies a field by a jet entry, projecting back onto the grid.
    pub fn apply(&self, factor: &SpatialFactor, f: &SpectralField) -> Result<SpectralField> {
        match factor {
            SpatialFactor::Scalar(c) => Ok(f.scale(*c)),
            SpatialFactor::Samples(s) => {
                let mut phys = to_physical(f, &self.sizes)?;
                for (p, c) in phys.iter_mut().zip(s) {
                    *p *= c;
                }
                from_physical(&f.grid, &phys, &self.sizes)
            }
        }
    }

    fn npoints(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Pointwise series operation on two jets.
    fn combine(&self, a: &[SpatialFactor], b: &[SpatialFactor], op: impl Fn(&Series, &Series) -> Series) -> Vec<SpatialFactor> {
        let depth = a.len().min(b.len()) - 1;
        let at = |jets: &[SpatialFactor], p: Option<usize>| -> Series {
            let d: Vec<Complex64> = jets[..=depth]
                .iter()
                .map(|j| match (j, p) {
                    (SpatialFactor::Scalar(c), _) => *c,
                    (SpatialFactor::Samples(s), Some(p)) => s[p],
                    (SpatialFactor::Samples(_), None) => unreachable!("scalar path only for scalar jets"),
                })
                .collect();
            Series::from_derivatives(&d)
        };
        let scalar = |j: &[SpatialFactor]| j.iter().all(|f| matches!(f, SpatialFactor::Scalar(_)));
        if scalar(a) && scalar(b) {
            return op(&at(a, None), &at(b, None)).derivatives().into_iter().map(SpatialFactor::Scalar).collect();
        }
        let per_point: Vec<Vec<Complex64>> = (0..self.npoints()).map(|p| op(&at(a, Some(p)), &at(b, Some(p))).derivatives()).collect();
        (0..=depth).map(|q| SpatialFactor::Samples(per_point.iter().map(|d| d[q]).collect())).collect()
    }
}

/// `∂_t^κ u = Σ a₀^{α,β} D^α ∂_t^β u + f_scale · f`, as jets at `t = 0`.
#[derive(Debug, Clone)]
pub struct SolvedForm {
    pub kappa: u32,
    pub terms: Vec<TermJet>,
    pub f_scale: Vec<SpatialFactor>,
}

fn min_abs(f: &SpatialFactor) -> f64 {
    match f {
        SpatialFactor::Scalar(c) => c.norm(),
        SpatialFactor::Samples(s) => {
            // a real coefficient that changes sign vanishes between samples
            let real = s.iter().all(|c| c.im == 0.0);
            let pos = s.iter().any(|c| c.re > 0.0);
            let neg = s.iter().any(|c| c.re < 0.0);
            if real && pos && neg {
                return 0.0;
            }
            s.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
        }
    }
}

/// Divides the equation by the coefficient of `∂_t^κ`: `a₀ = −a / a^{0,κ}` and
/// `f_scale = 1 / a^{0,κ}`, with time jets from Leibniz division.
pub fn normalize_leading(problem: &ParabolicProblem, jets: &CoefficientJet) -> Result<SolvedForm> {
    let kappa = problem.kappa();
    let is_lead = |t: &TermJet| t.beta == kappa && t.alpha.iter().all(|a| *a == 0);
    let lead = jets
        .interior
        .iter()
        .find(|t| is_lead(t))
        .ok_or_else(|| Error::Parameter(format!("no ∂_t^{kappa} term in the interior operator")))?;
    let worst = min_abs(&lead.jets[0]);
    if !(worst > LEADING_TOL) {
        return Err(Error::Singular(format!("|a^(0,{kappa})| = {worst:e} on the grid")));
    }
    let one: Vec<SpatialFactor> = (0..=jets.depth)
        .map(|q| SpatialFactor::Scalar(Complex64::new(if q == 0 { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    let recip = jets.combine(&one, &lead.jets, |a, b| a.div(b));
    let mut terms = Vec::new();
    for t in jets.interior.iter().filter(|t| !is_lead(t)) {
        if t.beta >= kappa {
            return Err(Error::Parameter(format!("term with ∂_t^{} is not below the leading order", t.beta)));
        }
        let a0 = jets.combine(&t.jets, &recip, |a, b| -&(a * b));
        terms.push(TermJet { alpha: t.alpha.clone(), beta: t.beta, jets: a0 });
    }
    Ok(SolvedForm { kappa, terms, f_scale: recip })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Coefficient;

    fn scalar(f: &SpatialFactor) -> Complex64 {
        match f {
            SpatialFactor::Scalar(c) => *c,
            _ => panic!("expected a scalar jet"),
        }
    }

    fn grid() -> FrequencyGrid {
        FrequencyGrid::spatial(2, 2.0, 4).unwrap()
    }

    #[test]
    fn heat_solved_form() {
        let p = ParabolicProblem::heat_dirichlet();
        let s = normalize_leading(&p, &CoefficientJet::new(&p, &grid(), 2).unwrap()).unwrap();
        assert_eq!(scalar(&s.f_scale[0]).re, 1.0);
        for t in &s.terms {
            // ∂_t u = −D²u = +∂²u
            assert_eq!(scalar(&t.jets[0]).re, -1.0);
        }
    }

    #[test]
    fn scaled_time_derivative() {
        let mut p = ParabolicProblem::heat_dirichlet();
        p.interior[0].coeff = Coefficient::real(3.0);
        let s = normalize_leading(&p, &CoefficientJet::new(&p, &grid(), 1).unwrap()).unwrap();
        assert!((scalar(&s.f_scale[0]).re - 1.0 / 3.0).abs() < 1e-15);
        assert!((scalar(&s.terms[0].jets[0]).re + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn time_dependent_leading_coefficient() {
        let mut p = ParabolicProblem::heat_dirichlet();
        p.interior[0].coeff = Coefficient::PolyT([1.0, 1.0, 0.0, 0.0]);
        let s = normalize_leading(&p, &CoefficientJet::new(&p, &grid(), 3).unwrap()).unwrap();
        let got: Vec<f64> = s.f_scale.iter().map(|f| scalar(f).re).collect();
        for (a, b) in got.iter().zip([1.0, -1.0, 2.0, -6.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn vanishing_leading_coefficient() {
        let mut p = ParabolicProblem::heat_dirichlet();
        p.interior[0].coeff = Coefficient::CosX { c0: 0.5, c1: 1.0, axis: 0, freq: 1.0, period: 2.0 };
        let err = normalize_leading(&p, &CoefficientJet::new(&p, &grid(), 1).unwrap());
        assert!(matches!(err, Err(Error::Singular(_))));
    }

    #[test]
    fn variable_coefficient_product_is_projected() {
        let mut p = ParabolicProblem::heat_dirichlet();
        p.interior[1].coeff = Coefficient::CosX { c0: 0.0, c1: 1.0, axis: 0, freq: 1.0, period: 2.0 };
        let g = grid();
        let jets = CoefficientJet::new(&p, &g, 0).unwrap();
        // cos(π x₁) · 1 = cos(π x₁)
        let one = SpectralField::unit_mode(&g, &[0, 0]).unwrap();
        let out = jets.apply(&jets.interior[1].jets[0], &one).unwrap();
        let idx = g.index_of(&[1, 0]).unwrap();
        assert!((out.coeffs[idx].re - 0.5).abs() < 1e-14);
    }
}
