//! Problem data and the symbol-level conditions: Petrovskii 2b-parabolicity
//! and the covering condition on the lateral boundary.

mod checks;
pub mod poly;
pub mod problem;
pub mod roots;

pub use checks::*;
pub use problem::{
    parse_problem, problem_to_json, BoundaryOperator, BoundarySide, Coefficient, Geometry, ParabolicProblem, ProblemFile, Term,
};
