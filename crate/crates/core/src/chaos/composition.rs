use serde::{Deserialize, Serialize};

use super::hermite::log_double_factorial;
use crate::error::{Error, Result};

/// How many terms of a series to sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Truncation {
    /// Exactly `n` terms; the tail bound is reported, never enforced.
    Fixed { n: usize },
    /// Stop once the tail bound falls below `tol` relative to the partial sum;
    /// `NotConverged` if that needs more than `max_terms`.
    Auto { tol: f64, max_terms: usize },
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Auto {
            tol: 1e-12,
            max_terms: 100_000,
        }
    }
}

/// `[xⁿ](1-x)^{-d/2}` for `n = 0..=n_max`, by `b_{n+1} = b_n (n + d/2)/(n + 1)`.
pub fn composition_coefficients(d: usize, n_max: usize) -> Vec<f64> {
    let half = d as f64 / 2.0;
    let mut b = Vec::with_capacity(n_max + 1);
    b.push(1.0);
    for n in 0..n_max {
        let next = b[n] * (n as f64 + half) / (n as f64 + 1.0);
        b.push(next);
    }
    b
}

/// `Σ_{k₁+…+k_d=n} Π (2kᵢ-1)!!/(2kᵢ)!!` by enumerating every composition.
pub fn composition_sum_brute(n: usize, d: usize) -> f64 {
    let a: Vec<f64> = (0..=n as u64)
        .map(|k| {
            let (odd, even) = log_double_factorial(k);
            (odd - even).exp()
        })
        .collect();
    fn walk(rem: usize, parts: usize, a: &[f64], acc: f64) -> f64 {
        if parts == 1 {
            return acc * a[rem];
        }
        (0..=rem)
            .map(|k| walk(rem - k, parts - 1, a, acc * a[k]))
            .sum()
    }
    if d == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    walk(n, d, &a, 1.0)
}

/// Largest `n` for which [`composition_lhs`] cross-checks against enumeration.
pub const BRUTE_FORCE_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionSum {
    pub x: f64,
    pub d: usize,
    pub value: f64,
    pub terms: usize,
    /// Geometric bound on the omitted tail.
    pub tail_bound: f64,
    /// The first `min(terms, 20)` terms summed from explicit compositions.
    pub brute_force_prefix: f64,
    /// The same prefix from the coefficient recurrence.
    pub recurrence_prefix: f64,
}

/// Geometric bound on `Σ_{n>N} 2n bₙ xⁿ` given the last included term.
fn tail(last_term: f64, x: f64, d: usize, n: usize) -> f64 {
    if n == 0 {
        return if x == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let q = x * (1.0 + d as f64 / (2.0 * n as f64));
    if q < 1.0 {
        last_term * q / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

/// `Σ_{n≥1} Σ_{k₁+…+k_d=n} 2n Π (2kᵢ-1)!!/(2kᵢ)!! xⁿ`.
pub fn composition_lhs(x: f64, d: usize, trunc: Truncation) -> Result<CompositionSum> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is not in [0,1)")));
    }
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    let half = d as f64 / 2.0;
    let (mut b, mut xp) = (1.0, 1.0);
    let (mut value, mut last) = (0.0_f64, 0.0);
    let mut recurrence_prefix = 0.0;
    let mut n = 0;
    let limit = match trunc {
        Truncation::Fixed { n } => n,
        Truncation::Auto { max_terms, .. } => max_terms,
    };
    loop {
        if let Truncation::Auto { tol, .. } = trunc {
            let t = tail(last, x, d, n);
            if n > 0 && t <= tol * value.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            if x == 0.0 && n > 0 {
                break;
            }
        }
        if n >= limit {
            if let Truncation::Auto { .. } = trunc {
                return Err(Error::NotConverged(format!(
                    "composition series at x = {x}, d = {d} needs more than {limit} terms"
                )));
            }
            break;
        }
        b *= (n as f64 + half) / (n as f64 + 1.0);
        xp *= x;
        n += 1;
        last = 2.0 * n as f64 * b * xp;
        value += last;
        if n <= BRUTE_FORCE_MAX {
            recurrence_prefix = value;
        }
    }
    let prefix = n.min(BRUTE_FORCE_MAX);
    let brute_force_prefix: f64 = (1..=prefix)
        .map(|k| 2.0 * k as f64 * composition_sum_brute(k, d) * x.powi(k as i32))
        .sum();
    if (brute_force_prefix - recurrence_prefix).abs() > 1e-10 * recurrence_prefix.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "composition enumeration {brute_force_prefix} disagrees with recurrence {recurrence_prefix}"
        )));
    }
    Ok(CompositionSum {
        x,
        d,
        value,
        terms: n,
        tail_bound: tail(last, x, d, n),
        brute_force_prefix,
        recurrence_prefix,
    })
}

/// `x (1-x)^{-(d/2+1)}`.
pub fn composition_rhs(x: f64, d: usize) -> f64 {
    x * (1.0 - x).powf(-(d as f64 / 2.0 + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub d: usize,
    pub xs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Ratio of [`composition_lhs`] to [`composition_rhs`] over a grid in `[0.01, 0.99]`.
pub fn composition_ratio_scan(d: usize, xs: &[f64]) -> Result<RatioScan> {
    if xs.is_empty() || xs.iter().any(|&x| !(0.01..=0.99).contains(&x)) {
        return Err(Error::Domain(
            "grid must be nonempty and inside [0.01, 0.99]".into(),
        ));
    }
    let ratios = xs
        .iter()
        .map(|&x| {
            composition_lhs(x, d, Truncation::default()).map(|s| s.value / composition_rhs(x, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioScan {
        d,
        xs: xs.to_vec(),
        ratios,
        min_ratio,
        max_ratio,
    })
}

/// `n` evenly spaced points of `[0.01, 0.99]`.
pub fn ratio_grid(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.5];
    }
    (0..n)
        .map(|i| (0.01 + 0.98 * i as f64 / (n - 1) as f64).min(0.99))
        .collect()
}
