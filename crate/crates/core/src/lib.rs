//! Summation-integral operators of Szász-Mirakjan-Kantorovich type with a
//! parameter `a > 1`, their moments, statistical-convergence diagnostics and
//! pointwise error-bound certificates.

pub mod bounds;
pub mod catalog;
pub mod commands;
pub mod error;
pub mod function;
pub mod moments;
pub mod numeric;
pub mod operator;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
pub use function::{BivariateFunction, LipschitzHint, MixedLipschitzHint, ScalarFunction};
pub use operator::{
    apply, apply_bivariate, apply_kantorovich, BivariateParams, OperatorParams, QuadratureRule,
    TruncationPolicy,
};
