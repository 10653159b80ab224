use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::criteria::quadrature::{IteratedRule, RuleOptions};
use crate::criteria::{linear_fit, pair_singular_set};
use crate::error::{Error, Result};
use crate::fields::CovKernel;

/// Default `ε` schedule for second-moment ladders.
pub const DEFAULT_EPS_LADDER: [f64; 5] = [0.5, 0.1, 0.02, 0.004, 0.0008];

/// Tuning of the pair quadrature behind the closed-form moments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PairQuadrature {
    pub nodes_per_piece: Option<usize>,
    /// Smallest grading scale; by default derived from `ε` and the Hurst range.
    pub finest: Option<f64>,
}

/// `E[p_{ε₁}(X(s) - y) p_{ε₂}(X(t) - y)]` for `d` independent coordinates.
pub fn pair_moment(
    kernel: &CovKernel,
    d: usize,
    y: &[f64],
    eps1: f64,
    eps2: f64,
    s: &[f64],
    t: &[f64],
) -> f64 {
    let p = kernel.pair(s, t);
    let det = eps1 * eps2 + eps1 * p.var_b + eps2 * p.var_a + p.det;
    let y2: f64 = y.iter().map(|v| v * v).sum();
    let df = d as f64;
    (-df * (2.0 * PI).ln() - 0.5 * df * det.ln() - y2 * (eps1 + eps2 + p.incr) / (2.0 * det)).exp()
}

fn check(d: usize, y: &[f64], eps: &[f64]) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    if !y.is_empty() && y.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: y.len(),
        });
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Domain(format!("eps = {e} must be positive")));
    }
    Ok(())
}

fn integrate_pairs<F>(kernel: &CovKernel, eps_min: f64, quad: &PairQuadrature, f: F) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let n = kernel.dim();
    let domain = kernel.domain().product(kernel.domain());
    let set = pair_singular_set(kernel)?;
    let h_min = kernel.hurst_range().map_or(0.5, |r| r.0);
    let scale = quad
        .finest
        .map(|f| 8.0 * f)
        .unwrap_or_else(|| eps_min.powf(0.5 / h_min))
        .clamp(1e-12, 1.0);
    let mut opts = RuleOptions::for_dim(2 * n, scale);
    if let Some(q) = quad.nodes_per_piece {
        opts.nodes_per_piece = q;
    }
    let rule = IteratedRule::new(&domain, &set, &[], opts)?;
    let out = rule.integrate(&|x: &[f64]| f(&x[..n], &x[n..]))?;
    Ok(out.values[0])
}

/// `E[L_ε(y)²]` from the Gaussian pair density, integrated over the parameter domain
/// squared.
pub fn second_moment_closed(
    kernel: &CovKernel,
    d: usize,
    y: &[f64],
    eps: f64,
    quad: &PairQuadrature,
) -> Result<f64> {
    check(d, y, &[eps])?;
    integrate_pairs(kernel, eps, quad, |s, t| {
        pair_moment(kernel, d, y, eps, eps, s, t)
    })
}

/// `E[(L_{ε₁}(y) - L_{ε₂}(y))²]`, clamped at zero.
pub fn cauchy_gap(
    kernel: &CovKernel,
    d: usize,
    y: &[f64],
    eps1: f64,
    eps2: f64,
    quad: &PairQuadrature,
) -> Result<f64> {
    check(d, y, &[eps1, eps2])?;
    if eps1 == eps2 {
        return Ok(0.0);
    }
    let v = integrate_pairs(kernel, eps1.min(eps2), quad, |s, t| {
        pair_moment(kernel, d, y, eps1, eps1, s, t) + pair_moment(kernel, d, y, eps2, eps2, s, t)
            - 2.0 * pair_moment(kernel, d, y, eps1, eps2, s, t)
    })?;
    Ok(v.max(0.0))
}

/// Values along an `ε` ladder with a power-law fit against `1/ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    /// Slope of `ln value` against `ln(1/ε)`.
    pub fitted_slope: f64,
    pub r_squared: f64,
    /// `|v_K - v_{K-1}| / v_K`.
    pub last_relative_change: f64,
}

impl LadderReport {
    fn new(eps: Vec<f64>, values: Vec<f64>) -> Self {
        let (xs, ys): (Vec<f64>, Vec<f64>) = eps
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v > 0.0)
            .map(|(e, v)| (-e.ln(), v.ln()))
            .unzip();
        let (fitted_slope, r_squared) = linear_fit(&xs, &ys);
        let k = values.len();
        let last_relative_change = if k >= 2 {
            ((values[k - 1] - values[k - 2]) / values[k - 1]).abs()
        } else {
            f64::NAN
        };
        Self {
            eps,
            values,
            fitted_slope,
            r_squared,
            last_relative_change,
        }
    }

    /// Every rung strictly above the previous one.
    pub fn increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }
}

/// [`second_moment_closed`] along a decreasing `ε` ladder.
pub fn moment_ladder(
    kernel: &CovKernel,
    d: usize,
    y: &[f64],
    eps: &[f64],
    quad: &PairQuadrature,
) -> Result<LadderReport> {
    let values = eps
        .iter()
        .map(|&e| second_moment_closed(kernel, d, y, e, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(LadderReport::new(eps.to_vec(), values))
}

/// `gap(ε, ε/2)` along a decreasing `ε` ladder.
pub fn gap_ladder(
    kernel: &CovKernel,
    d: usize,
    y: &[f64],
    eps: &[f64],
    quad: &PairQuadrature,
) -> Result<LadderReport> {
    let values = eps
        .iter()
        .map(|&e| cauchy_gap(kernel, d, y, e, 0.5 * e, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(LadderReport::new(eps.to_vec(), values))
}
