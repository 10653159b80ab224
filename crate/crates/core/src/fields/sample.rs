use std::collections::BTreeMap;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::kernel::{CovKernel, KernelModel};
use super::linalg::gram_matrix;
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

/// `d` independent copies of a centered Gaussian field evaluated on a point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub points: Vec<Vec<f64>>,
    /// One row per coordinate field, one column per point.
    pub values: Vec<Vec<f64>>,
    pub seed: u64,
    pub kernel_id: String,
    /// Largest Gram jitter used by the factorizations.
    pub jitter: f64,
}

/// Exact sampler for a field on a fixed point list.
///
/// Difference fields (collision, intersection, self-intersection) are sampled from their
/// independent components instead of from their own, much larger and rank-deficient, Gram
/// matrices.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    n: usize,
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Direct {
        lower: Vec<f64>,
        jitter: f64,
    },
    Difference {
        first: Box<FieldSampler>,
        second: Option<Box<FieldSampler>>,
        ia: Vec<usize>,
        ib: Vec<usize>,
    },
}

fn dedupe(points: impl Iterator<Item = Vec<f64>>) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut uniq = Vec::new();
    let mut map = Vec::new();
    for p in points {
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        let next = uniq.len();
        let k = *index.entry(key).or_insert(next);
        if k == next {
            uniq.push(p);
        }
        map.push(k);
    }
    (uniq, map)
}

impl FieldSampler {
    pub fn new(kernel: &CovKernel, points: &[Vec<f64>]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != kernel.dim()) {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                got: p.len(),
            });
        }
        let n = points.len();
        let kind = match kernel.model() {
            KernelModel::Collision(a, b) => SamplerKind::Difference {
                first: Box::new(Self::new(a, points)?),
                second: Some(Box::new(Self::new(b, points)?)),
                ia: (0..n).collect(),
                ib: (0..n).collect(),
            },
            KernelModel::Intersection(a, b) => {
                let k = a.dim();
                let (ua, ia) = dedupe(points.iter().map(|p| p[..k].to_vec()));
                let (ub, ib) = dedupe(points.iter().map(|p| p[k..].to_vec()));
                SamplerKind::Difference {
                    first: Box::new(Self::new(a, &ua)?),
                    second: Some(Box::new(Self::new(b, &ub)?)),
                    ia,
                    ib,
                }
            }
            KernelModel::SelfIntersection(base) => {
                let k = base.dim();
                let all = points
                    .iter()
                    .map(|p| p[..k].to_vec())
                    .chain(points.iter().map(|p| p[k..].to_vec()));
                let (u, map) = dedupe(all);
                let (ia, ib) = (map[..n].to_vec(), map[n..].to_vec());
                SamplerKind::Difference {
                    first: Box::new(Self::new(base, &u)?),
                    second: None,
                    ia,
                    ib,
                }
            }
            _ => {
                let g = gram_matrix(kernel, points, 0.0)?;
                let mut lower = Vec::with_capacity(n * (n + 1) / 2);
                for i in 0..n {
                    for j in 0..=i {
                        lower.push(g.lower[(i, j)]);
                    }
                }
                SamplerKind::Direct {
                    lower,
                    jitter: g.jitter,
                }
            }
        };
        Ok(Self { n, kind })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Largest jitter used by any factorization inside the sampler.
    pub fn jitter(&self) -> f64 {
        match &self.kind {
            SamplerKind::Direct { jitter, .. } => *jitter,
            SamplerKind::Difference { first, second, .. } => first
                .jitter()
                .max(second.as_ref().map_or(0.0, |s| s.jitter())),
        }
    }

    /// Draws one realization into `out` (resized to the number of points).
    pub fn sample_into(&self, rng: &mut Stream, out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.n, 0.0);
        match &self.kind {
            SamplerKind::Direct { lower, .. } => {
                let z: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(rng)).collect();
                let mut row = 0;
                for (i, o) in out.iter_mut().enumerate() {
                    let l = &lower[row..row + i + 1];
                    *o = l.iter().zip(&z).map(|(a, b)| a * b).sum();
                    row += i + 1;
                }
            }
            SamplerKind::Difference {
                first,
                second,
                ia,
                ib,
            } => {
                let mut a = Vec::new();
                first.sample_into(rng, &mut a);
                let b = match second {
                    Some(s) => {
                        let mut b = Vec::new();
                        s.sample_into(rng, &mut b);
                        b
                    }
                    None => a.clone(),
                };
                for (k, o) in out.iter_mut().enumerate() {
                    *o = a[ia[k]] - b[ib[k]];
                }
            }
        }
    }
}

/// Samples `d` independent copies of the field on `points`; copy `i` uses substream `i`.
pub fn sample_field(
    kernel: &CovKernel,
    points: &[Vec<f64>],
    d: usize,
    seed: u64,
) -> Result<FieldSample> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    let sampler = FieldSampler::new(kernel, points)?;
    let values = (0..d)
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let mut row = Vec::new();
            sampler.sample_into(&mut rng, &mut row);
            row
        })
        .collect();
    Ok(FieldSample {
        points: points.to_vec(),
        values,
        seed,
        kernel_id: kernel.id(),
        jitter: sampler.jitter(),
    })
}
