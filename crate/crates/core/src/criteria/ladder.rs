use serde::{Deserialize, Serialize};

use super::quadrature::{IteratedRule, RuleOptions, SingularSet};
use crate::error::{Error, Result};
use crate::fields::Rect;

/// Strictly decreasing excision radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub cutoffs: Vec<f64>,
}

impl Ladder {
    pub fn new(cutoffs: Vec<f64>) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::Domain("ladder needs at least one cutoff".into()));
        }
        if cutoffs.iter().any(|&c| !(c > 0.0 && c < 1.0))
            || cutoffs.windows(2).any(|w| !(w[1] < w[0]))
        {
            return Err(Error::Domain(
                "cutoffs must lie in (0,1) and decrease strictly".into(),
            ));
        }
        Ok(Self { cutoffs })
    }

    /// `δ_k = 2^{-k}` for `k = k0..=k1`.
    pub fn dyadic(k0: u32, k1: u32) -> Self {
        Self {
            cutoffs: (k0..=k1).map(|k| 0.5_f64.powi(k as i32)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cutoffs.is_empty()
    }
}

impl Default for Ladder {
    fn default() -> Self {
        Self::dyadic(3, 12)
    }
}

/// Thresholds used to label a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelPolicy {
    /// Convergent needs the last two relative increments below this.
    pub convergence_tol: f64,
    /// Divergent needs a log-log slope above this...
    pub exponent_threshold: f64,
    /// ...with a coefficient of determination above this...
    pub fit_threshold: f64,
    /// ...and increments that do not shrink faster than `δ^p` for `p` above this.
    /// Keeps slowly convergent ladders from being read as divergent.
    pub decay_guard: f64,
}

impl Default for LabelPolicy {
    fn default() -> Self {
        Self {
            convergence_tol: 0.01,
            exponent_threshold: 0.05,
            fit_threshold: 0.9,
            decay_guard: 0.1,
        }
    }
}

/// Evaluation budget for one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureBudget {
    /// Maximum number of innermost quadrature nodes.
    pub max_evals: u64,
    /// Gauss–Legendre nodes per piece; dimension-dependent default when absent.
    pub nodes_per_piece: Option<usize>,
    /// Grading anisotropy; taken from the kernel's Hurst range when absent.
    pub anisotropy: Option<f64>,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        Self {
            max_evals: 400_000_000,
            nodes_per_piece: None,
            anisotropy: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceDiagnosis {
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    /// Slope of `ln value` against `ln(1/δ)` over the deepest half of the ladder.
    pub fitted_exponent: f64,
    pub r_squared: f64,
    pub label: Label,
    /// `(v_k - v_{k-1}) / v_k` for `k ≥ 1`.
    pub relative_increments: Vec<f64>,
    /// Local decay rate `p` of the increments, `Δ_k ≈ δ_k^p`, from the last three rungs.
    pub increment_decay: Option<f64>,
    pub evaluations: u64,
    /// True when rungs had to be dropped to stay within the budget.
    pub budget_exceeded: bool,
}

/// Least-squares slope and `R²` of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

/// Applies the labelling rules to a computed ladder.
pub fn diagnose(cutoffs: &[f64], values: &[f64], policy: &LabelPolicy) -> DivergenceDiagnosis {
    let relative_increments: Vec<f64> = values
        .windows(2)
        .map(|w| {
            if w[1] > 0.0 {
                (w[1] - w[0]) / w[1]
            } else {
                0.0
            }
        })
        .collect();
    // Early rungs carry the regular part of the integral and bend logarithmic growth.
    let skip = values
        .len()
        .saturating_sub((values.len() + 1) / 2)
        .min(values.len().saturating_sub(3));
    let (xs, ys): (Vec<f64>, Vec<f64>) = cutoffs[skip..]
        .iter()
        .zip(&values[skip..])
        .filter(|(_, &v)| v > 0.0)
        .map(|(&c, &v)| (-(c.ln()), v.ln()))
        .unzip();
    let (fitted_exponent, r_squared) = linear_fit(&xs, &ys);
    let k = values.len();
    let increment_decay = (k >= 3).then(|| {
        let d1 = values[k - 2] - values[k - 3];
        let d2 = values[k - 1] - values[k - 2];
        let ratio = (cutoffs[k - 2] / cutoffs[k - 1]).ln();
        match (d1 > 0.0, d2 > 0.0) {
            (_, false) => f64::MAX,
            (false, true) => f64::MIN,
            (true, true) => (d1 / d2).ln() / ratio,
        }
    });
    let converged = k >= 3
        && relative_increments[k - 3..]
            .iter()
            .all(|&r| r < policy.convergence_tol);
    let grows = fitted_exponent > policy.exponent_threshold
        && r_squared > policy.fit_threshold
        && increment_decay.is_some_and(|p| p <= policy.decay_guard);
    let label = if converged {
        Label::Convergent
    } else if grows {
        Label::Divergent
    } else {
        Label::Inconclusive
    };
    DivergenceDiagnosis {
        cutoffs: cutoffs.to_vec(),
        values: values.to_vec(),
        fitted_exponent,
        r_squared,
        label,
        relative_increments,
        increment_decay,
        evaluations: 0,
        budget_exceeded: false,
    }
}

/// Integrates `f` over `domain` minus the `δ`-neighbourhood of `set` for every rung and
/// labels the ladder.
///
/// When the full ladder does not fit in the budget the deepest rungs are dropped and the
/// partial ladder is returned as Inconclusive; if not even one rung fits,
/// [`Error::BudgetExceeded`] is returned.
pub fn evaluate_criterion<F>(
    f: F,
    domain: &Rect,
    set: &SingularSet,
    ladder: &Ladder,
    budget: &QuadratureBudget,
    policy: &LabelPolicy,
) -> Result<DivergenceDiagnosis>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let m = domain.dim();
    let mut rungs = ladder.len();
    let mut needed = 0;
    while rungs > 0 {
        let cut = &ladder.cutoffs[..rungs];
        let opts = rule_options(m, cut[rungs - 1], budget);
        let rule = IteratedRule::new(domain, set, cut, opts)?;
        needed = rule.count();
        if needed <= budget.max_evals {
            let out = rule.integrate(&f)?;
            let mut diag = diagnose(cut, &out.values, policy);
            diag.evaluations = out.evaluations;
            if rungs < ladder.len() {
                diag.budget_exceeded = true;
                diag.label = Label::Inconclusive;
            }
            return Ok(diag);
        }
        rungs -= 1;
    }
    Err(Error::BudgetExceeded {
        budget: budget.max_evals,
        needed,
    })
}

pub(crate) fn rule_options(m: usize, finest_cutoff: f64, budget: &QuadratureBudget) -> RuleOptions {
    let mut opts = RuleOptions::for_dim(m, finest_cutoff);
    if let Some(q) = budget.nodes_per_piece {
        opts.nodes_per_piece = q;
    }
    if let Some(a) = budget.anisotropy {
        opts.anisotropy = a.max(1.0);
    }
    opts
}
