//! The map `Λ u = (A u, B_1 u, …, B_m u, u|_{t=0}, …, ∂_t^{κ−1} u|_{t=0})`.

use crate::compatibility::{BoundaryData, CauchyData, DataTuple, JetField};
use crate::error::{Error, Result};
use crate::spectral::{from_physical, to_physical, FrequencyGrid, SpectralField};
use crate::symbol::{BoundarySide, Coefficient, ParabolicProblem, Term};
use crate::trace::{SpaceTimeField, TimeProfile};
use crate::weights::WeightParams;
use num_complex::Complex64;

/// Multiplies by a time-independent coefficient, in physical space when it varies in `x`.
fn times_coefficient(c: &Coefficient, f: &SpectralField) -> Result<SpectralField> {
    match c {
        Coefficient::CosX { .. } => {
            let grid = &f.grid;
            let sizes: Vec<usize> = grid.axes().iter().map(|a| 4 * a.cutoff + 3).collect();
            let mut phys = to_physical(f, &sizes)?;
            let dim = sizes.len();
            for (idx, p) in phys.iter_mut().enumerate() {
                let mut rem = idx;
                let mut x = vec![0.0; dim];
                for a in (0..dim).rev() {
                    x[a] = (rem % sizes[a]) as f64 * grid.axes()[a].period / sizes[a] as f64;
                    rem /= sizes[a];
                }
                *p *= c.value(&x, 0.0);
            }
            from_physical(grid, &phys, &sizes)
        }
        c if c.is_time_independent() => Ok(f.scale(c.value(&[], 0.0))),
        _ => Err(Error::Unsupported("Λ on surrogates needs time-independent coefficients".into())),
    }
}

/// `Σ_terms c D^α ∂_t^β` applied to one exponential-in-time term `e^{λt} F`.
fn apply_terms_exp(terms: &[Term], rate: Complex64, f: &SpectralField) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(&f.grid);
    for t in terms {
        let d = f.apply_d(&t.alpha)?.scale(rate.powu(t.beta));
        acc = acc.add(&times_coefficient(&t.coeff, &d)?)?;
    }
    Ok(acc)
}

/// Image of `u` under `Λ`, kept analytic in time.
#[derive(Debug, Clone)]
pub struct LambdaImage {
    pub f: SpaceTimeField,
    /// `g[j] = [lower, upper]`.
    pub g: Vec<[SpaceTimeField; 2]>,
    pub h: Vec<SpectralField>,
}

impl LambdaImage {
    /// Data tuple with exact time jets up to `depth`.
    pub fn to_data(&self, depth: usize, weight: WeightParams) -> DataTuple {
        let jets = |u: &SpaceTimeField| JetField::from_jets((0..=depth).map(|q| u.time_derivative(q, 0.0)).collect());
        DataTuple {
            f: jets(&self.f),
            g: self.g.iter().map(|[lo, up]| BoundaryData { lower: jets(lo), upper: jets(up) }).collect(),
            h: CauchyData { h: self.h.clone() },
            weight,
        }
    }
}

/// `Λ u` for `u = Σ e^{λ_i t} F_i(x)` on the spatial torus surrogate of the strip.
/// Coefficients must not depend on `t`; `x`-dependent catalog coefficients are applied in physical space.
pub fn apply_lambda(u: &SpaceTimeField, problem: &ParabolicProblem) -> Result<LambdaImage> {
    if u.grid.dim() != problem.n || u.grid.has_time_axis() {
        return Err(Error::GridMismatch(format!("Λ needs a spatial grid of dimension {}", problem.n)));
    }
    let normal = problem.n - 1;
    let mut f = SpaceTimeField::zero(&u.grid);
    let bgrid = u.grid.without_axis(normal)?;
    let mut g: Vec<[SpaceTimeField; 2]> = problem.boundary.iter().map(|_| [SpaceTimeField::zero(&bgrid), SpaceTimeField::zero(&bgrid)]).collect();
    for (profile, field) in &u.terms {
        let TimeProfile::Exp { rate } = *profile else {
            return Err(Error::Unsupported("Λ acts on exponential time profiles only".into()));
        };
        f.push(*profile, apply_terms_exp(&problem.interior, rate, field)?)?;
        for (j, op) in problem.boundary.iter().enumerate() {
            let bu = apply_terms_exp(&op.terms, rate, field)?;
            for (s, side) in problem.geometry.sides().into_iter().enumerate() {
                g[j][s].push(*profile, bu.restrict(normal, problem.geometry.side_position(side))?)?;
            }
        }
    }
    let h = (0..problem.kappa() as usize).map(|k| u.time_derivative(k, 0.0)).collect();
    Ok(LambdaImage { f, g, h })
}

/// `Λ u` for a trigonometric polynomial `u` on the space-time torus (last axis time).
/// Data carry their space-time surrogates and exact jets up to `depth`.
pub fn apply_lambda_periodic(u: &SpectralField, problem: &ParabolicProblem, depth: usize, weight: WeightParams) -> Result<DataTuple> {
    let grid = &u.grid;
    if !grid.has_time_axis() || grid.dim() != problem.n + 1 {
        return Err(Error::GridMismatch(format!("Λ needs a space-time grid with {} spatial axes", problem.n)));
    }
    let t_axis = problem.n;
    let normal = problem.n - 1;
    let apply = |terms: &[Term]| -> Result<SpectralField> {
        let mut acc = SpectralField::zeros(grid);
        for t in terms {
            if !t.coeff.is_constant() {
                return Err(Error::Unsupported("periodic Λ needs constant coefficients".into()));
            }
            let d = u.partial(t_axis, t.beta).apply_d(&t.alpha)?;
            acc.add_assign_scaled(&d, t.coeff.value(&[], 0.0))?;
        }
        Ok(acc)
    };
    let f = JetField::from_space_time(apply(&problem.interior)?, depth)?;
    let mut g = Vec::with_capacity(problem.boundary.len());
    for op in &problem.boundary {
        let bu = apply(&op.terms)?;
        let side = |s: BoundarySide| -> Result<JetField> {
            JetField::from_space_time(bu.restrict(normal, problem.geometry.side_position(s))?, depth)
        };
        g.push(BoundaryData { lower: side(BoundarySide::Lower)?, upper: side(BoundarySide::Upper)? });
    }
    let h = (0..problem.kappa())
        .map(|k| u.partial(t_axis, k).restrict(t_axis, 0.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(DataTuple { f, g, h: CauchyData { h }, weight })
}

/// Spatial grid of the strip surrogate: tangential periods from the geometry,
/// normal period `2 × width` so both boundary components are interior to one cell.
pub fn strip_grid(problem: &ParabolicProblem, cutoffs: &[usize]) -> Result<FrequencyGrid> {
    use crate::spectral::Axis;
    if cutoffs.len() != problem.n {
        return Err(Error::Parameter(format!("need {} cutoffs", problem.n)));
    }
    let mut axes: Vec<Axis> = problem.geometry.periods().iter().zip(cutoffs).map(|(p, c)| Axis::new(*p, *c)).collect();
    axes.push(Axis::new(2.0 * problem.geometry.width(), cutoffs[problem.n - 1]));
    FrequencyGrid::new(axes, false)
}
