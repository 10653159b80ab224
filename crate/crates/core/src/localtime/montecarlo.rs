use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{CovKernel, FieldSampler, Rect};
use crate::rng::substream;

/// `p_ε(x) = (2πε)^{-d/2} exp(-|x|²/(2ε))` with `d = x.len()`.
pub fn heat_kernel(x: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let d = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    Ok((2.0 * PI * eps).powf(-0.5 * d) * (-r2 / (2.0 * eps)).exp())
}

/// Midpoint grid with `per_dim` cells along every side of the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub per_dim: usize,
}

impl GridSpec {
    /// 64 cells for one parameter, 24 per side otherwise.
    pub fn default_for(dim: usize) -> Self {
        Self {
            per_dim: if dim == 1 { 64 } else { 24 },
        }
    }
}

/// Cell midpoints of `domain` and the common cell volume.
pub fn grid_points(domain: &Rect, grid: &GridSpec) -> Result<(Vec<Vec<f64>>, f64)> {
    let m = grid.per_dim;
    if m == 0 {
        return Err(Error::Domain(
            "grid needs at least one cell per side".into(),
        ));
    }
    let dim = domain.dim();
    let total = m
        .checked_pow(dim as u32)
        .filter(|&t| t <= 1 << 22)
        .ok_or_else(|| Error::Domain(format!("grid of {m}^{dim} cells is too large")))?;
    let mut pts = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut p = vec![0.0; dim];
        for j in (0..dim).rev() {
            let k = rem % m;
            rem /= m;
            let w = (domain.hi[j] - domain.lo[j]) / m as f64;
            p[j] = domain.lo[j] + (k as f64 + 0.5) * w;
        }
        pts.push(p);
    }
    Ok((pts, domain.volume() / total as f64))
}

/// Monte Carlo estimate of `L_ε(x)` together with its empirical second moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LEpsEstimate {
    pub value: f64,
    pub replicate_values: Vec<f64>,
    pub standard_error: f64,
    /// Mean of the squared replicate values.
    pub second_moment: f64,
    pub second_moment_se: f64,
    pub grid: GridSpec,
    pub eps: f64,
    pub level: Vec<f64>,
    pub seed: u64,
    pub kernel_id: String,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Riemann-sum estimate of `∫ p_ε(X(s) - x) ds` over `replicates` independent fields.
///
/// Coordinate `i` of replicate `r` uses substream `r·d + i`, so the result does not
/// depend on the thread count.
pub fn l_eps_mc(
    kernel: &CovKernel,
    d: usize,
    level: &[f64],
    eps: f64,
    grid: &GridSpec,
    replicates: usize,
    seed: u64,
) -> Result<LEpsEstimate> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let level: Vec<f64> = if level.is_empty() {
        vec![0.0; d]
    } else {
        level.to_vec()
    };
    if level.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: level.len(),
        });
    }
    if replicates < 2 {
        return Err(Error::InsufficientSamples {
            got: replicates,
            need: 2,
        });
    }
    let (points, vol) = grid_points(kernel.domain(), grid)?;
    let sampler = FieldSampler::new(kernel, &points)?;
    let norm = (2.0 * PI * eps).powf(-0.5 * d as f64);
    let values: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut sq = vec![0.0; points.len()];
            let mut row = Vec::new();
            for (i, y) in level.iter().enumerate() {
                let mut rng = substream(seed, (r * d + i) as u64);
                sampler.sample_into(&mut rng, &mut row);
                for (acc, v) in sq.iter_mut().zip(&row) {
                    *acc += (v - y) * (v - y);
                }
            }
            sq.iter()
                .map(|s| norm * (-s / (2.0 * eps)).exp())
                .sum::<f64>()
                * vol
        })
        .collect();
    let (value, standard_error) = mean_se(&values);
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    let (second_moment, second_moment_se) = mean_se(&squares);
    Ok(LEpsEstimate {
        value,
        replicate_values: values,
        standard_error,
        second_moment,
        second_moment_se,
        grid: grid.clone(),
        eps,
        level,
        seed,
        kernel_id: kernel.id(),
    })
}
