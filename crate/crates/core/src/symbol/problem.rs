//! Problem data: orders, coefficient catalog, operator terms and model geometry.

use crate::error::{Error, Result};
use crate::series::factorial;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// A coefficient function `c(x, t)` from the built-in catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(Complex64),
    /// `c0 + c1 t + c2 t² + c3 t³`.
    PolyT([f64; 4]),
    /// `c e^{rate t}`.
    ExpT { c: f64, rate: f64 },
    /// `c0 + c1 cos(2π freq x_axis / period)`.
    CosX { c0: f64, c1: f64, axis: usize, freq: f64, period: f64 },
}

impl Coefficient {
    pub fn constant(re: f64, im: f64) -> Self {
        Self::Constant(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Self::constant(re, 0.0)
    }

    pub fn value(&self, x: &[f64], t: f64) -> Complex64 {
        match *self {
            Self::Constant(c) => c,
            Self::PolyT(c) => Complex64::new(c[0] + t * (c[1] + t * (c[2] + t * c[3])), 0.0),
            Self::ExpT { c, rate } => Complex64::new(c * (rate * t).exp(), 0.0),
            Self::CosX { c0, c1, axis, freq, period } => {
                let xa = x.get(axis).copied().unwrap_or(0.0);
                Complex64::new(c0 + c1 * (2.0 * PI * freq * xa / period).cos(), 0.0)
            }
        }
    }

    /// `∂_t^q c(x, 0)` for `q = 0..=depth`, exact.
    pub fn time_jet(&self, x: &[f64], depth: usize) -> Vec<Complex64> {
        (0..=depth)
            .map(|q| match *self {
                Self::Constant(c) => {
                    if q == 0 {
                        c
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
                Self::PolyT(c) => Complex64::new(if q < 4 { c[q] * factorial(q) } else { 0.0 }, 0.0),
                Self::ExpT { c, rate } => Complex64::new(c * rate.powi(q as i32), 0.0),
                Self::CosX { .. } => {
                    if q == 0 {
                        self.value(x, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
            })
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_)) || matches!(self, Self::PolyT(c) if c[1..].iter().all(|v| *v == 0.0))
    }

    pub fn is_time_independent(&self) -> bool {
        match self {
            Self::Constant(_) | Self::CosX { .. } => true,
            Self::PolyT(c) => c[1..].iter().all(|v| *v == 0.0),
            Self::ExpT { rate, .. } => *rate == 0.0,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        match *self {
            Self::Constant(c) => Self::Constant(c * a),
            Self::PolyT(c) => Self::PolyT(c.map(|v| v * a)),
            Self::ExpT { c, rate } => Self::ExpT { c: c * a, rate },
            Self::CosX { c0, c1, axis, freq, period } => Self::CosX { c0: c0 * a, c1: c1 * a, axis, freq, period },
        }
    }
}

/// One term `a^{α,β}(x,t) D^α ∂_t^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub beta: u32,
    pub coeff: Coefficient,
}

impl Term {
    pub fn new(alpha: Vec<u32>, beta: u32, coeff: Coefficient) -> Self {
        Self { alpha, beta, coeff }
    }

    pub fn weighted_order(&self, b: u32) -> u32 {
        self.alpha.iter().sum::<u32>() + 2 * b * self.beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOperator {
    pub order: u32,
    pub terms: Vec<Term>,
}

/// Model geometry: `G = T^{n−1} × (0, width)`; the boundary `Γ` is the two
/// tori `x_n = 0` (lower) and `x_n = width` (upper).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Geometry {
    Strip {
        /// Periods of the tangential axes `x_1..x_{n−1}`.
        #[serde(default = "default_periods")]
        periods: Vec<f64>,
        #[serde(default = "default_width")]
        width: f64,
    },
}

fn default_periods() -> Vec<f64> {
    vec![1.0]
}

fn default_width() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySide {
    Lower,
    Upper,
}

impl Geometry {
    pub fn strip(period: f64, width: f64) -> Self {
        Self::Strip { periods: vec![period], width }
    }

    pub fn width(&self) -> f64 {
        match self {
            Self::Strip { width, .. } => *width,
        }
    }

    pub fn periods(&self) -> &[f64] {
        match self {
            Self::Strip { periods, .. } => periods,
        }
    }

    pub fn sides(&self) -> [BoundarySide; 2] {
        [BoundarySide::Lower, BoundarySide::Upper]
    }

    /// Position of the boundary component along the normal axis.
    pub fn side_position(&self, side: BoundarySide) -> f64 {
        match side {
            BoundarySide::Lower => 0.0,
            BoundarySide::Upper => self.width(),
        }
    }

    /// Unit interior normal at the component (an `n`-vector).
    pub fn inner_normal(&self, side: BoundarySide, n: usize) -> Vec<f64> {
        let mut nu = vec![0.0; n];
        nu[n - 1] = match side {
            BoundarySide::Lower => 1.0,
            BoundarySide::Upper => -1.0,
        };
        nu
    }
}

/// The initial-boundary value problem `Au = f`, `B_j u = g_j`, `∂_t^k u|_{t=0} = h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicProblem {
    pub n: usize,
    pub b: u32,
    pub m: u32,
    pub tau: f64,
    pub interior: Vec<Term>,
    pub boundary: Vec<BoundaryOperator>,
    pub geometry: Geometry,
}

impl ParabolicProblem {
    pub fn kappa(&self) -> u32 {
        self.m / self.b
    }

    pub fn boundary_orders(&self) -> Vec<u32> {
        self.boundary.iter().map(|op| op.order).collect()
    }

    /// Sample points `(x, t)` used by the symbol checks. Constant-coefficient
    /// problems need only one.
    pub fn sample_points(&self, per_axis: usize, time_points: usize) -> Vec<(Vec<f64>, f64)> {
        let constant = self.interior.iter().chain(self.boundary.iter().flat_map(|b| &b.terms)).all(|t| t.coeff.is_constant());
        if constant {
            return vec![(vec![0.0; self.n], 0.0)];
        }
        let per_axis = per_axis.max(1);
        let tp = time_points.max(1);
        let mut axes: Vec<Vec<f64>> = self
            .geometry
            .periods()
            .iter()
            .map(|p| (0..per_axis).map(|i| p * i as f64 / per_axis as f64).collect())
            .collect();
        let w = self.geometry.width();
        axes.push((0..=per_axis).map(|i| w * i as f64 / per_axis as f64).collect());
        let mut pts: Vec<Vec<f64>> = vec![vec![]];
        for ax in &axes {
            pts = pts.iter().flat_map(|p| ax.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
        }
        let times: Vec<f64> = if tp == 1 { vec![0.0] } else { (0..tp).map(|i| self.tau * i as f64 / (tp - 1) as f64).collect() };
        pts.into_iter().flat_map(|x| times.iter().map(move |t| (x.clone(), *t))).collect()
    }

    /// The term `a^{(0,…,0),κ}`.
    pub fn leading_term(&self) -> Option<&Term> {
        let kappa = self.kappa();
        self.interior.iter().find(|t| t.beta == kappa && t.alpha.iter().all(|a| *a == 0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!("need n >= 2, got {}", self.n)));
        }
        if self.b < 1 || self.m < self.b || !self.m.is_multiple_of(self.b) {
            return Err(Error::Parameter(format!("need m >= b >= 1 with m/b integer, got b={}, m={}", self.b, self.m)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Parameter("tau must be positive".into()));
        }
        if self.boundary.len() != self.m as usize {
            return Err(Error::Parameter(format!("expected {} boundary operators, got {}", self.m, self.boundary.len())));
        }
        if self.geometry.periods().len() != self.n - 1 {
            return Err(Error::Parameter("strip needs n-1 tangential periods".into()));
        }
        for t in &self.interior {
            if t.alpha.len() != self.n || t.weighted_order(self.b) > 2 * self.m {
                return Err(Error::Parameter(format!("interior term {:?}/{} exceeds order 2m or has wrong arity", t.alpha, t.beta)));
            }
        }
        for (j, op) in self.boundary.iter().enumerate() {
            for t in &op.terms {
                if t.alpha.len() != self.n || t.weighted_order(self.b) > op.order {
                    return Err(Error::Parameter(format!("boundary operator {} term {:?}/{} exceeds m_j", j + 1, t.alpha, t.beta)));
                }
            }
        }
        let lead = self.leading_term().ok_or_else(|| Error::Singular("no leading term a^{0,kappa}".into()))?;
        for (x, t) in self.sample_points(4, 3) {
            if lead.coeff.value(&x, t).norm() < 1e-12 {
                return Err(Error::Singular(format!("leading coefficient vanishes at x={x:?}, t={t}")));
            }
        }
        Ok(())
    }

    /// Heat operator `∂_t − Δ` on the unit strip with Dirichlet condition.
    pub fn heat_dirichlet() -> Self {
        Self::heat_with_boundary(BoundaryOperator { order: 0, terms: vec![Term::new(vec![0, 0], 0, Coefficient::real(1.0))] })
    }

    /// Heat operator with the Neumann-type condition `D_2 u = g`.
    pub fn heat_neumann() -> Self {
        Self::heat_with_boundary(BoundaryOperator { order: 1, terms: vec![Term::new(vec![0, 1], 0, Coefficient::real(1.0))] })
    }

    /// Heat operator with the degenerate oblique condition `D_2 u − i D_1 u = g`.
    pub fn heat_oblique() -> Self {
        Self::heat_with_boundary(BoundaryOperator {
            order: 1,
            terms: vec![Term::new(vec![0, 1], 0, Coefficient::real(1.0)), Term::new(vec![1, 0], 0, Coefficient::constant(0.0, -1.0))],
        })
    }

    pub fn heat_with_boundary(op: BoundaryOperator) -> Self {
        Self {
            n: 2,
            b: 1,
            m: 1,
            tau: 1.0,
            interior: vec![
                Term::new(vec![0, 0], 1, Coefficient::real(1.0)),
                Term::new(vec![2, 0], 0, Coefficient::real(1.0)),
                Term::new(vec![0, 2], 0, Coefficient::real(1.0)),
            ],
            boundary: vec![op],
            geometry: Geometry::strip(1.0, 1.0),
        }
    }

    /// Backward heat operator `∂_t + Δ` (not parabolic).
    pub fn backward_heat() -> Self {
        let mut p = Self::heat_dirichlet();
        p.interior[1].coeff = Coefficient::real(-1.0);
        p.interior[2].coeff = Coefficient::real(-1.0);
        p
    }

    /// `∂_t + Δ²` (b = m = 2) with Dirichlet data `u` and `D_2 u`.
    pub fn biharmonic_parabolic() -> Self {
        let c1 = Coefficient::real(1.0);
        Self {
            n: 2,
            b: 2,
            m: 2,
            tau: 1.0,
            interior: vec![
                Term::new(vec![0, 0], 1, c1.clone()),
                Term::new(vec![4, 0], 0, c1.clone()),
                Term::new(vec![2, 2], 0, Coefficient::real(2.0)),
                Term::new(vec![0, 4], 0, c1.clone()),
            ],
            boundary: vec![
                BoundaryOperator { order: 0, terms: vec![Term::new(vec![0, 0], 0, c1.clone())] },
                BoundaryOperator { order: 1, terms: vec![Term::new(vec![0, 1], 0, c1)] },
            ],
            geometry: Geometry::strip(1.0, 1.0),
        }
    }
}

// ---- JSON problem schema ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstValue {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, #[serde(default)] im: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Const {
        #[serde(rename = "const")]
        value: ConstValue,
    },
    Expr {
        expr: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    pub alpha: Vec<u32>,
    #[serde(default)]
    pub beta: u32,
    pub coeff: CoeffSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub mj: u32,
    pub terms: Vec<TermSpec>,
}

/// On-disk problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub n: usize,
    pub b: u32,
    pub m: u32,
    pub tau: f64,
    pub interior_terms: Vec<TermSpec>,
    pub boundary: Vec<BoundarySpec>,
    pub geometry: Geometry,
}

impl CoeffSpec {
    pub fn to_coefficient(&self) -> Result<Coefficient> {
        match self {
            Self::Const { value } => Ok(match *value {
                ConstValue::Real(re) => Coefficient::constant(re, 0.0),
                ConstValue::Pair([re, im]) | ConstValue::Parts { re, im } => Coefficient::constant(re, im),
            }),
            Self::Expr { expr, params } => {
                let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
                match expr.as_str() {
                    "affine_t" | "poly_t" => Ok(Coefficient::PolyT([get("c0", 0.0), get("c1", 0.0), get("c2", 0.0), get("c3", 0.0)])),
                    "exp_t" => Ok(Coefficient::ExpT { c: get("c", 1.0), rate: get("rate", 0.0) }),
                    "cos_x" => Ok(Coefficient::CosX {
                        c0: get("c0", 1.0),
                        c1: get("c1", 0.0),
                        axis: get("axis", 0.0) as usize,
                        freq: get("freq", 1.0),
                        period: get("period", 1.0),
                    }),
                    other => Err(Error::Input(format!("unknown coefficient expression '{other}'"))),
                }
            }
        }
    }

    fn from_coefficient(c: &Coefficient) -> Self {
        let params = |pairs: &[(&str, f64)]| pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        match *c {
            Coefficient::Constant(z) => Self::Const { value: ConstValue::Pair([z.re, z.im]) },
            Coefficient::PolyT(p) => Self::Expr { expr: "poly_t".into(), params: params(&[("c0", p[0]), ("c1", p[1]), ("c2", p[2]), ("c3", p[3])]) },
            Coefficient::ExpT { c, rate } => Self::Expr { expr: "exp_t".into(), params: params(&[("c", c), ("rate", rate)]) },
            Coefficient::CosX { c0, c1, axis, freq, period } => Self::Expr {
                expr: "cos_x".into(),
                params: params(&[("c0", c0), ("c1", c1), ("axis", axis as f64), ("freq", freq), ("period", period)]),
            },
        }
    }
}

fn terms_from(specs: &[TermSpec]) -> Result<Vec<Term>> {
    specs.iter().map(|t| Ok(Term::new(t.alpha.clone(), t.beta, t.coeff.to_coefficient()?))).collect()
}

fn terms_to(terms: &[Term]) -> Vec<TermSpec> {
    terms.iter().map(|t| TermSpec { alpha: t.alpha.clone(), beta: t.beta, coeff: CoeffSpec::from_coefficient(&t.coeff) }).collect()
}

impl ProblemFile {
    pub fn into_problem(&self) -> Result<ParabolicProblem> {
        let p = ParabolicProblem {
            n: self.n,
            b: self.b,
            m: self.m,
            tau: self.tau,
            interior: terms_from(&self.interior_terms)?,
            boundary: self
                .boundary
                .iter()
                .map(|b| Ok(BoundaryOperator { order: b.mj, terms: terms_from(&b.terms)? }))
                .collect::<Result<_>>()?,
            geometry: self.geometry.clone(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_problem(p: &ParabolicProblem) -> Self {
        Self {
            n: p.n,
            b: p.b,
            m: p.m,
            tau: p.tau,
            interior_terms: terms_to(&p.interior),
            boundary: p.boundary.iter().map(|b| BoundarySpec { mj: b.order, terms: terms_to(&b.terms) }).collect(),
            geometry: p.geometry.clone(),
        }
    }
}

pub fn parse_problem(json: &str) -> Result<ParabolicProblem> {
    let file: ProblemFile = serde_json::from_str(json)?;
    file.into_problem()
}

pub fn problem_to_json(p: &ParabolicProblem) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProblemFile::from_problem(p))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_problems_validate() {
        for p in [
            ParabolicProblem::heat_dirichlet(),
            ParabolicProblem::heat_neumann(),
            ParabolicProblem::heat_oblique(),
            ParabolicProblem::biharmonic_parabolic(),
        ] {
            p.validate().unwrap();
            let back = parse_problem(&problem_to_json(&p).unwrap()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn schema_variants() {
        let json = r#"{"n":2,"b":1,"m":1,"tau":1.0,
            "interior_terms":[{"alpha":[0,0],"beta":1,"coeff":{"const":3.0}},
                              {"alpha":[2,0],"coeff":{"const":[1.0,0.0]}},
                              {"alpha":[0,2],"coeff":{"expr":"affine_t","params":{"c0":1.0,"c1":0.5}}}],
            "boundary":[{"mj":0,"terms":[{"alpha":[0,0],"coeff":{"const":{"re":1.0}}}]}],
            "geometry":{"type":"strip","periods":[1.0],"width":1.0}}"#;
        let p = parse_problem(json).unwrap();
        assert_eq!(p.interior[0].coeff, Coefficient::real(3.0));
        assert_eq!(p.interior[2].coeff.time_jet(&[0.0, 0.0], 2)[1], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn invalid_orders_rejected() {
        let mut p = ParabolicProblem::heat_dirichlet();
        p.m = 2;
        assert!(p.validate().is_err());
        let mut p = ParabolicProblem::heat_dirichlet();
        p.n = 1;
        assert!(p.validate().is_err());
        let mut p = ParabolicProblem::heat_dirichlet();
        p.interior[0].coeff = Coefficient::real(0.0);
        assert!(matches!(p.validate(), Err(Error::Singular(_))));
        assert!(parse_problem(r#"{"n":2}"#).is_err());
    }
}
