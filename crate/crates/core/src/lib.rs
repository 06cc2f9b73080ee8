//! Lieb–Thirring constants for magnetic Schrödinger operators on tori:
//! the one-dimensional constants `K₁(α)`, `K₂(α)`, spectral Galerkin
//! assembly and eigensolves, and concrete checks of the inequalities.

// negated comparisons below are NaN-rejecting argument guards
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod numerics;
pub mod operator;
pub mod sampling;
pub mod spectrum;
pub mod sweep;
pub mod verify;

pub use constants::{ConstantsReport, Flux, K2Result};
pub use error::{ConstantsError, NumericsError, OperatorError, SpectrumError, VerifyError};
pub use numerics::{MaxResult, SeriesResult};
pub use operator::{
    AssembledOperator, MagneticPotential1D, Potential1D, Potential2D, PotentialMatrix1D,
    TorusGeometry,
};
pub use spectrum::SpectrumResult;
pub use verify::{LTVerdict, ScalarPotential, VerdictMeta};
