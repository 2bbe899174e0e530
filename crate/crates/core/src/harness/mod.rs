//! Model-problem harness: the `Λ` map, a strip solver and the norm experiments.

mod experiments;
mod lambda;
mod solver;

pub use experiments::*;
pub use lambda::{apply_lambda, apply_lambda_periodic, strip_grid, LambdaImage};
pub use solver::{heat_convergence_study, solve_model, AnalyticData, ConvergenceStudy, ModelConfig, ModelData, SampledSolution, SolveReport};
