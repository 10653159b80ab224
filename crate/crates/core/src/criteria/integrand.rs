use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{CovKernel, KernelModel, PairCov};

/// Integrand of one of the convergence criteria, evaluated on a pair of field parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Criterion {
    /// `|R(s,t)|^λ / det^{γ/2}`.
    Prop { gamma: f64, lambda: f64 },
    /// `exp(-|y|² σ²(s,t) / det) / det^{d/2}`.
    Existence { level: Vec<f64>, d: usize },
    /// `R(s,t)² / det^{(d+2)/2}`.
    Smoothness { d: usize },
}

impl Criterion {
    pub fn validate(&self) -> Result<()> {
        match self {
            Criterion::Prop { gamma, lambda } => {
                if !(*gamma > 0.0 && gamma.is_finite()) || !(*lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::Domain(format!(
                        "need gamma > 0 and lambda >= 0, got {gamma}, {lambda}"
                    )));
                }
            }
            Criterion::Existence { level, d } => {
                if *d == 0 {
                    return Err(Error::Domain("d must be positive".into()));
                }
                if !level.is_empty() && level.len() != *d {
                    return Err(Error::DimensionMismatch {
                        expected: *d,
                        got: level.len(),
                    });
                }
            }
            Criterion::Smoothness { d } => {
                if *d == 0 {
                    return Err(Error::Domain("d must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Value from the pair data; `+∞` where the determinant vanishes and nothing damps it.
    pub fn from_pair(&self, p: &PairCov) -> f64 {
        match self {
            Criterion::Prop { gamma, lambda } => {
                if p.det <= 0.0 {
                    return f64::INFINITY;
                }
                let num = if *lambda == 0.0 {
                    1.0
                } else {
                    p.cov.abs().powf(*lambda)
                };
                num * p.det.powf(-0.5 * gamma)
            }
            Criterion::Existence { level, d } => {
                let y2: f64 = level.iter().map(|y| y * y).sum();
                if p.det <= 0.0 {
                    return if y2 > 0.0 && p.incr > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    };
                }
                (-y2 * p.incr / p.det - 0.5 * *d as f64 * p.det.ln()).exp()
            }
            Criterion::Smoothness { d } => {
                if p.cov == 0.0 && p.det > 0.0 {
                    return 0.0;
                }
                if p.det <= 0.0 {
                    return f64::INFINITY;
                }
                p.cov * p.cov * p.det.powf(-0.5 * (*d as f64 + 2.0))
            }
        }
    }

    /// Evaluates at `x = (s, t)`, the two parameters concatenated.
    pub fn eval(&self, kernel: &CovKernel, x: &[f64]) -> f64 {
        let n = kernel.dim();
        self.from_pair(&kernel.pair(&x[..n], &x[n..]))
    }
}

fn checked(kernel: &CovKernel, criterion: &Criterion, s: &[f64], t: &[f64]) -> Result<f64> {
    let n = kernel.dim();
    for p in [s, t] {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    criterion.validate()?;
    let v = criterion.from_pair(&kernel.pair(s, t));
    if v.is_finite() {
        Ok(v)
    } else {
        let mut x = s.to_vec();
        x.extend_from_slice(t);
        Err(Error::SingularPoint(x))
    }
}

pub fn integrand_prop(
    kernel: &CovKernel,
    gamma: f64,
    lambda: f64,
    s: &[f64],
    t: &[f64],
) -> Result<f64> {
    checked(kernel, &Criterion::Prop { gamma, lambda }, s, t)
}

/// `y` is the level; an empty slice means the origin.
pub fn integrand_existence(
    kernel: &CovKernel,
    y: &[f64],
    d: usize,
    s: &[f64],
    t: &[f64],
) -> Result<f64> {
    checked(
        kernel,
        &Criterion::Existence {
            level: y.to_vec(),
            d,
        },
        s,
        t,
    )
}

pub fn integrand_smoothness(kernel: &CovKernel, d: usize, s: &[f64], t: &[f64]) -> Result<f64> {
    checked(kernel, &Criterion::Smoothness { d }, s, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelfVariant {
    /// `det_V^{-d/2}`.
    J,
    /// `Cov_V² det_V^{-(d+2)/2}`.
    K,
}

impl SelfVariant {
    pub fn criterion(self, d: usize) -> Criterion {
        match self {
            SelfVariant::J => Criterion::Existence {
                level: Vec::new(),
                d,
            },
            SelfVariant::K => Criterion::Smoothness { d },
        }
    }
}

/// Self-intersection integrand at `(s,t)` and `(s',t')`; `v_kernel` must be a
/// self-intersection kernel.
pub fn integrand_self(
    v_kernel: &CovKernel,
    d: usize,
    variant: SelfVariant,
    p: &[f64],
    q: &[f64],
) -> Result<f64> {
    if !matches!(v_kernel.model(), KernelModel::SelfIntersection(_)) {
        return Err(Error::Domain(
            "integrand_self needs a self-intersection kernel".into(),
        ));
    }
    checked(v_kernel, &variant.criterion(d), p, q)
}
