use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::composition::Truncation;
use crate::criteria::pair_singular_set;
use crate::criteria::quadrature::{IteratedRule, RuleOptions};
use crate::error::{Error, Result};
use crate::fields::CovKernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiOptions {
    /// Heat-kernel regularization added to both variances.
    pub eps: f64,
    pub truncation: Truncation,
    /// Gauss–Legendre nodes per mesh piece of the pair quadrature.
    pub nodes_per_piece: Option<usize>,
}

impl Default for PhiOptions {
    fn default() -> Self {
        Self {
            eps: 0.5,
            truncation: Truncation::default(),
            nodes_per_piece: None,
        }
    }
}

/// Default `ε` schedule for the `ε → 0` limit.
pub const PHI_EPS_LADDER: [f64; 4] = [0.5, 0.1, 0.02, 0.004];

/// Truncated chaos series of `Φ(u)` for the regularized local time at level 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSeries {
    pub d: usize,
    pub eps: f64,
    /// Chaos order `2n` of each term (odd orders vanish at level 0).
    pub orders: Vec<usize>,
    /// `2n E|F_{2n}|²`.
    pub terms: Vec<f64>,
    /// Partial sums of `terms`, i.e. of `Φ(1)`.
    pub partial_sums: Vec<f64>,
    pub truncation_n: usize,
    pub tail_estimate: f64,
    /// Largest `|R(s,t)| / (ab)` on the quadrature nodes.
    pub rho_max: f64,
    /// `Φ(1)` summed in closed form under the integral, on the same nodes.
    pub resummed: f64,
    pub nodes: usize,
}

impl PhiSeries {
    /// `Φ(u) = Σ 2n u^{2n-1} E|F_{2n}|²` over the retained terms.
    pub fn phi_at(&self, u: f64) -> f64 {
        self.orders
            .iter()
            .zip(&self.terms)
            .map(|(&k, &t)| t * u.powi(k as i32 - 1))
            .sum()
    }

    pub fn value(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

/// Computes the chaos series of `Φ(1)` for `L_ε(0)`.
///
/// Term `n` is `(2π)^{-d} ∫∫ 2n cₙ R^{2n} / (ab)^{2n+d}` with `a² = Var X(s) + ε`,
/// `b² = Var X(t) + ε` and `cₙ = [xⁿ](1-x)^{-d/2}`.
pub fn phi_series(kernel: &CovKernel, d: usize, opts: &PhiOptions) -> Result<PhiSeries> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    if !(opts.eps >= 0.0 && opts.eps.is_finite()) {
        return Err(Error::Domain(format!(
            "eps = {} must be nonnegative",
            opts.eps
        )));
    }
    let n = kernel.dim();
    let domain = kernel.domain().product(kernel.domain());
    let set = pair_singular_set(kernel)?;
    let h_min = kernel.hurst_range().map_or(0.5, |r| r.0);
    let scale = opts.eps.powf(0.5 / h_min).max(1e-9);
    let mut ro = RuleOptions::for_dim(2 * n, scale);
    if let Some(q) = opts.nodes_per_piece {
        ro.nodes_per_piece = q;
    }
    let rule = IteratedRule::new(&domain, &set, &[], ro)?;

    let norm = (2.0 * PI).powi(-(d as i32));
    let half = d as f64 / 2.0;
    let mut weights = Vec::new();
    let mut rho2 = Vec::new();
    let mut resummed = 0.0;
    rule.for_each_node(|x, w| {
        let (s, t) = x.split_at(n);
        let a2 = kernel.var(s) + opts.eps;
        let b2 = kernel.var(t) + opts.eps;
        let r = kernel.cov(s, t);
        let ab2 = a2 * b2;
        weights.push(w * norm * ab2.powf(-half));
        rho2.push(r * r / ab2);
        let gap = ab2 - r * r;
        resummed += w * norm * d as f64 * r * r * gap.powf(-(half + 1.0));
    });
    let rho2_max = rho2.iter().copied().fold(0.0, f64::max);
    let rho_max = rho2_max.sqrt();
    if !(rho_max < 1.0) {
        return Err(Error::SingularDomain { rho_max });
    }
    let w_total: f64 = weights.iter().sum();

    let mut pw = vec![1.0; rho2.len()];
    let (mut orders, mut terms, mut partial_sums) = (Vec::new(), Vec::new(), Vec::new());
    let (mut c, mut c_max_term) = (1.0, 0.0);
    let mut sum = 0.0_f64;
    let mut k = 0;
    let tail = |k: usize, last_majorant: f64| -> f64 {
        if k == 0 {
            return if rho2_max == 0.0 { 0.0 } else { f64::INFINITY };
        }
        let q = rho2_max * (1.0 + half / k as f64);
        if q < 1.0 {
            last_majorant * q / (1.0 - q)
        } else {
            f64::INFINITY
        }
    };
    let limit = match opts.truncation {
        Truncation::Fixed { n } => n,
        Truncation::Auto { max_terms, .. } => max_terms,
    };
    loop {
        if let Truncation::Auto { tol, .. } = opts.truncation {
            if k > 0 && tail(k, c_max_term) <= tol * sum.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        if k >= limit {
            if let Truncation::Auto { .. } = opts.truncation {
                return Err(Error::NotConverged(format!(
                    "chaos series needs more than {limit} terms (rho_max = {rho_max})"
                )));
            }
            break;
        }
        c *= (k as f64 + half) / (k as f64 + 1.0);
        k += 1;
        let mut acc = 0.0;
        for ((p, &r2), &w) in pw.iter_mut().zip(&rho2).zip(&weights) {
            *p *= r2;
            acc += w * *p;
        }
        let term = 2.0 * k as f64 * c * acc;
        c_max_term = 2.0 * k as f64 * c * rho2_max.powi(k as i32) * w_total;
        sum += term;
        orders.push(2 * k);
        terms.push(term);
        partial_sums.push(sum);
    }
    Ok(PhiSeries {
        d,
        eps: opts.eps,
        orders,
        terms,
        partial_sums,
        truncation_n: k,
        tail_estimate: tail(k, c_max_term),
        rho_max,
        resummed,
        nodes: rho2.len(),
    })
}
