//! Verification toolkit for 2b-parabolic initial-boundary value problems in
//! anisotropic Hörmander spaces.
//!
//! Modules follow the structure of the problem:
//!
//! - [`weights`]: regularity weights `μ_{s,φ}`, log-power parameters `φ` and
//!   interpolation parameters `ψ`.
//! - [`spectral`]: truncated Fourier surrogates of the spaces and their norms.
//! - [`symbol`]: problem data, Petrovskii parabolicity and the covering
//!   (Lopatinskii) condition.
//! - [`compatibility`]: trace recurrences, compatibility residuals and the
//!   projector onto compatible data.
//! - [`trace`]: the Cauchy-data trace and its explicit right inverse.
//! - [`harness`]: the `Λ` map, a model strip solver and the norm experiments.
//!
//! Conventions: `D_j = i ∂/∂x_j`, so a term `a^{α,β} D^α ∂_t^β` has principal
//! symbol `a ξ^α p^β`. Time jets are stored as derivative values `∂_t^q(·)(0)`.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compatibility;
pub mod error;
pub mod exec;
pub mod harness;
pub mod series;
pub mod spectral;
pub mod symbol;
pub mod trace;
pub mod weights;

pub use error::{Error, Result};
