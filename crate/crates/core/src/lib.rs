//! Numerical solvers for a radially symmetric free-boundary model of tumor
//! growth coupling nutrient (σ), matrix-degrading enzymes (m) and
//! extracellular matrix density (E).
//!
//! - [`model`]: parameters, constitutive laws and the reaction term `Q`.
//! - [`singular_ivp`]: `x' = f(x,t) / ∫₀ᵗ g` solved on its C¹ branch.
//! - [`stationary`]: inward shooting and the stationary radius `R*`.
//! - [`timedep`]: time stepping on the fixed unit domain.
//! - [`cli`]: experiment commands writing CSV/JSON.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod interp;
pub mod model;
pub mod singular_ivp;
pub mod stationary;
pub mod timedep;
pub mod tridiag;

pub use model::{Constitutive, Model, ModelError, ModelParams, StandardLaws};
