//! Numerical library for gradient statistics of correlated random
//! parameterized quantum circuits.
//!
//! - [`analytic`]: closed-form costs, derivative moments and bounds.
//! - [`dicke`]: exact collective-spin simulator in the symmetric subspace.
//! - [`statevec`]: full `2^n` statevector simulator and ring-of-disagrees QAOA.
//! - [`estimator`]: seeded Monte-Carlo and quadrature moment estimates.
//! - [`scaling`]: log-space least-squares fits and barren-plateau verdicts.

pub mod analytic;
pub mod dicke;
pub mod domain;
pub mod error;
pub mod estimator;
pub mod scaling;
pub mod special;
pub mod statevec;

pub use domain::{
    AngleDomain, AngleSample, CorrelationKind, CorrelationScheme, CostFamily, EstimateMethod, EstimateRecord,
    FamilyTag, Target,
};
pub use error::{Error, Result};
