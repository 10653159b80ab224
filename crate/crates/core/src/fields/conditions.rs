use serde::{Deserialize, Serialize};

use super::kernel::{CovKernel, HurstVector, Rect};
use super::linalg::cond_var;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
}

/// How tuples are drawn for [`check_condition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Number of quasi-random tuples.
    pub n_random: usize,
    /// Also test every tuple whose coordinates sit on rectangle corners.
    pub corners: bool,
    /// Start index into the quasi-random sequence.
    pub offset: u64,
    /// Ratios at or below this value count as violations of a lower bound.
    pub min_ratio: f64,
    /// Tuples whose right-hand side is below this value are skipped (0/0).
    pub rhs_floor: f64,
    /// Number of offending tuples kept in the report.
    pub max_reported: usize,
    /// `(I, J)` for (C4); defaults to the partially separated geometry for `S`.
    pub c4_rects: Option<(Rect, Rect)>,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            n_random: 10_000,
            corners: true,
            offset: 0,
            min_ratio: 1e-6,
            rhs_floor: 1e-12,
            max_reported: 32,
            c4_rects: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub n_pairs_tested: usize,
    /// Largest observed left/right ratio (estimate of the upper constant).
    pub best_upper_constant: Option<f64>,
    /// Smallest observed left/right ratio (estimate of the lower constant).
    pub best_lower_constant: Option<f64>,
    pub n_violations: usize,
    /// Offending tuples, each a list of points.
    pub violations: Vec<Vec<Vec<f64>>>,
    pub passed: bool,
}

/// Additive recurrence with the generalized golden ratio; low discrepancy in any dimension.
pub(crate) fn kronecker(dim: usize, k: u64) -> Vec<f64> {
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim)
        .map(|j| (0.5 + k as f64 * phi.powi(-(j as i32))).fract())
        .collect()
}

/// Default `(I, J)` inside `domain`: coordinates in `S` (1-based) are split into
/// `[0, (1-ε₀)/2]` and `[(1+ε₀)/2, 1]` of each side, the others are shared.
pub fn separated_rects(domain: &Rect, s: &[usize], eps0: f64) -> Result<(Rect, Rect)> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidScenario(format!(
            "separation gap {eps0} must lie in (0,1)"
        )));
    }
    let n = domain.dim();
    let (ilo, mut ihi, mut jlo, jhi) = (vec![0.0; n], vec![1.0; n], vec![0.0; n], vec![1.0; n]);
    for &j in s {
        if j == 0 || j > n {
            return Err(Error::InvalidScenario(format!(
                "separation index {j} outside 1..={n}"
            )));
        }
        ihi[j - 1] = 0.5 * (1.0 - eps0);
        jlo[j - 1] = 0.5 * (1.0 + eps0);
    }
    Ok((
        domain.map_unit(&Rect { lo: ilo, hi: ihi }),
        domain.map_unit(&Rect { lo: jlo, hi: jhi }),
    ))
}

fn pow2h(x: f64, h: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(2.0 * h)
    }
}

fn in_rect(r: &Rect, u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(j, x)| r.lo[j] + (r.hi[j] - r.lo[j]) * x)
        .collect()
}

/// Empirically certifies one of the weak local nondeterminism conditions.
///
/// The left/right ratio of the condition's inequality is computed on sampled tuples.
/// `s` holds the 1-based separation indices used by (C4).
pub fn check_condition(
    kernel: &CovKernel,
    condition: Condition,
    h: &HurstVector,
    plan: &SamplingPlan,
    s: &[usize],
) -> Result<ConditionReport> {
    let n = kernel.dim();
    if h.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.len(),
        });
    }
    let hs = h.as_slice();
    let in_s: Vec<bool> = (1..=n).map(|j| s.contains(&j)).collect();
    let (rects, v_kernel) = match condition {
        Condition::C4 => {
            let (i, j) = match &plan.c4_rects {
                Some(r) => r.clone(),
                None if s.is_empty() => (kernel.domain().clone(), kernel.domain().clone()),
                None => separated_rects(kernel.domain(), s, 0.2)?,
            };
            let v = CovKernel::self_intersection(kernel.clone(), i.clone(), j.clone())?;
            (vec![i.clone(), j.clone(), i, j], Some(v))
        }
        Condition::C3 => (vec![kernel.domain().clone(); 4], None),
        _ => (vec![kernel.domain().clone(); 2], None),
    };
    let k = rects.len();

    let mut tuples: Vec<Vec<Vec<f64>>> = Vec::new();
    if plan.corners && n * k <= 10 {
        for mask in 0u32..(1 << (n * k)) {
            let tuple = (0..k)
                .map(|p| {
                    (0..n)
                        .map(|j| {
                            if mask >> (p * n + j) & 1 == 1 {
                                rects[p].hi[j]
                            } else {
                                rects[p].lo[j]
                            }
                        })
                        .collect()
                })
                .collect();
            tuples.push(tuple);
        }
    }
    for idx in 0..plan.n_random as u64 {
        let u = kronecker(n * k, plan.offset + idx + 1);
        tuples.push(
            (0..k)
                .map(|p| in_rect(&rects[p], &u[p * n..(p + 1) * n]))
                .collect(),
        );
    }

    let mut ratios: Vec<f64> = Vec::with_capacity(tuples.len());
    let mut violations = Vec::new();
    let mut n_violations = 0;
    for tuple in &tuples {
        let (lhs, rhs) = match condition {
            Condition::C1 => {
                let (a, b) = (&tuple[0], &tuple[1]);
                let rhs: f64 = (0..n).map(|j| pow2h(a[j] - b[j], hs[j])).sum();
                (kernel.incr_var(a, b), rhs)
            }
            Condition::C2 => {
                let (a, b) = (&tuple[0], &tuple[1]);
                let rhs: f64 = (0..n)
                    .map(|j| pow2h(a[j] - b[j], hs[j]).min(pow2h(b[j], hs[j])))
                    .sum();
                (cond_var(kernel, b, std::slice::from_ref(a))?, rhs)
            }
            Condition::C3 => {
                let u = &tuple[0];
                let rhs: f64 = (0..n)
                    .map(|j| {
                        let mut m = pow2h(u[j], hs[j]);
                        for t in &tuple[1..] {
                            m = m.min(pow2h(u[j] - t[j], hs[j]));
                        }
                        m
                    })
                    .sum();
                (cond_var(kernel, u, &tuple[1..])?, rhs)
            }
            Condition::C4 => {
                let v = v_kernel.as_ref().expect("set above");
                let (sv, tv, s2, t2) = (&tuple[0], &tuple[1], &tuple[2], &tuple[3]);
                let rhs: f64 = (0..n)
                    .map(|j| {
                        if in_s[j] {
                            pow2h(tv[j] - t2[j], hs[j]) + pow2h(sv[j] - s2[j], hs[j])
                        } else {
                            pow2h(sv[j] - tv[j], hs[j])
                        }
                    })
                    .sum();
                let p: Vec<f64> = sv.iter().chain(tv.iter()).copied().collect();
                let q: Vec<f64> = s2.iter().chain(t2.iter()).copied().collect();
                (cond_var(v, &p, &[q])?, rhs)
            }
        };
        if rhs < plan.rhs_floor {
            continue;
        }
        let ratio = lhs / rhs;
        let bad = match condition {
            Condition::C4 => !ratio.is_finite(),
            _ => !ratio.is_finite() || ratio <= plan.min_ratio,
        };
        if bad {
            n_violations += 1;
            if violations.len() < plan.max_reported {
                violations.push(tuple.clone());
            }
        }
        if ratio.is_finite() {
            ratios.push(ratio);
        }
    }
    const NEED: usize = 100;
    if ratios.len() < NEED {
        return Err(Error::InsufficientSamples {
            got: ratios.len(),
            need: NEED,
        });
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let constant_ok = match condition {
        Condition::C1 => max.is_finite() && min > plan.min_ratio,
        Condition::C2 | Condition::C3 => min > plan.min_ratio,
        Condition::C4 => max.is_finite() && max > 0.0,
    };
    Ok(ConditionReport {
        condition,
        n_pairs_tested: ratios.len(),
        best_upper_constant: Some(max),
        best_lower_constant: Some(min),
        n_violations,
        violations,
        passed: n_violations == 0 && constant_ok,
    })
}
