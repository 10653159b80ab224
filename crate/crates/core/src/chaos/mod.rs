//! Hermite polynomials, double factorials, the composition series and the chaos
//! smoothness functional `Φ`.

mod composition;
mod hermite;
mod phi;

pub use composition::{
    composition_coefficients, composition_lhs, composition_ratio_scan, composition_rhs,
    composition_sum_brute, ratio_grid, CompositionSum, RatioScan, Truncation, BRUTE_FORCE_MAX,
};
pub use hermite::{
    hermite, hermite_correlation, hermite_explicit, hermite_generating_partial,
    hermite_orthogonality_mc, log_double_factorial, McEstimate,
};
pub use phi::{phi_series, PhiOptions, PhiSeries, PHI_EPS_LADDER};
