//! Existence and smoothness of local times of anisotropic Gaussian random fields:
//! covariance models, threshold classification, criterion quadrature, Wiener-chaos
//! series and heat-kernel local-time estimators.

pub mod chaos;
pub mod criteria;
mod error;
pub mod fields;
pub mod localtime;
pub mod rng;

pub use error::{Error, Result};
pub use fields::{CovKernel, HurstVector, Rect};
