//! Covariance kernels of anisotropic Gaussian fields, exact sampling and empirical
//! certification of the local nondeterminism conditions.

mod conditions;
mod kernel;
mod linalg;
mod sample;

pub use conditions::{check_condition, separated_rects, Condition, ConditionReport, SamplingPlan};
pub use kernel::{
    cov_additive_fbm, cov_fbm, cov_fbsheet, stable_det, CovKernel, CustomFn, CustomKernel,
    HurstVector, KernelModel, PairCov, Rect,
};
pub use linalg::{cond_var, det_cov_pair, gram_matrix, Gram, JITTER_LADDER};
pub use sample::{sample_field, FieldSample, FieldSampler};

/// Which difference field a derived kernel describes.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivedKind {
    Collision,
    Intersection,
    /// Self-intersection on `I x J`.
    SelfIntersection {
        i: Rect,
        j: Rect,
    },
}

/// Builds the covariance of a collision, intersection or self-intersection field.
/// `second` is required for the first two kinds and ignored for the last.
pub fn derived_kernel(
    kind: DerivedKind,
    first: CovKernel,
    second: Option<CovKernel>,
) -> crate::Result<CovKernel> {
    let need = || crate::Error::InvalidScenario("a second base kernel is required".into());
    match kind {
        DerivedKind::Collision => CovKernel::collision(first, second.ok_or_else(need)?),
        DerivedKind::Intersection => Ok(CovKernel::intersection(first, second.ok_or_else(need)?)),
        DerivedKind::SelfIntersection { i, j } => CovKernel::self_intersection(first, i, j),
    }
}
