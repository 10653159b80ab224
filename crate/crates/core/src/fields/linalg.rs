use nalgebra::{Cholesky, DMatrix};

use super::kernel::CovKernel;
use crate::error::{Error, Result};

/// Jitter values tried, in order, after the caller's own jitter fails.
pub const JITTER_LADDER: [f64; 7] = [1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Gram matrix together with its Cholesky factor.
#[derive(Debug, Clone)]
pub struct Gram {
    /// `R(p_i, p_j) + jitter·1{i=j}`.
    pub matrix: DMatrix<f64>,
    /// Lower-triangular factor of `matrix`.
    pub lower: DMatrix<f64>,
    /// Jitter actually used.
    pub jitter: f64,
}

fn check_point_dims(kernel: &CovKernel, points: &[Vec<f64>]) -> Result<()> {
    match points.iter().find(|p| p.len() != kernel.dim()) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: kernel.dim(),
            got: p.len(),
        }),
        None => Ok(()),
    }
}

fn raw_gram(kernel: &CovKernel, points: &[Vec<f64>]) -> DMatrix<f64> {
    let n = points.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = if i == j {
                kernel.var(&points[i])
            } else {
                kernel.cov(&points[i], &points[j])
            };
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Builds `R(p_i, p_j) + jitter·I` and factorizes it, escalating the jitter through
/// [`JITTER_LADDER`] when the factorization fails.
pub fn gram_matrix(kernel: &CovKernel, points: &[Vec<f64>], jitter: f64) -> Result<Gram> {
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::Domain(format!(
            "jitter {jitter} must be finite and nonnegative"
        )));
    }
    check_point_dims(kernel, points)?;
    let base = raw_gram(kernel, points);
    let n = points.len();
    let tries =
        std::iter::once(jitter).chain(JITTER_LADDER.iter().copied().filter(|&j| j > jitter));
    let mut last = jitter;
    for j in tries {
        last = j;
        let m = &base + DMatrix::identity(n, n) * j;
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Ok(Gram {
                matrix: m,
                lower: ch.l(),
                jitter: j,
            });
        }
    }
    Err(Error::NotPsd { jitter: last })
}

/// `Var(X(t) | X(g), g ∈ given)` as the Schur complement of the augmented Gram matrix.
///
/// Conditioning points that are linearly dependent on earlier ones are skipped, so
/// `given = {t}` and repeated points are handled exactly.
pub fn cond_var(kernel: &CovKernel, t: &[f64], given: &[Vec<f64>]) -> Result<f64> {
    if t.len() != kernel.dim() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dim(),
            got: t.len(),
        });
    }
    check_point_dims(kernel, given)?;
    let rtt = kernel.var(t);
    if given.is_empty() {
        return Ok(rtt.max(0.0));
    }
    if given.iter().any(|g| g.as_slice() == t) {
        return Ok(0.0);
    }
    let mut pts: Vec<&[f64]> = given.iter().map(|p| p.as_slice()).collect();
    pts.push(t);
    let m = pts.len();
    let a = |i: usize, j: usize| {
        if i == j {
            kernel.var(pts[i])
        } else {
            kernel.cov(pts[i], pts[j])
        }
    };
    let scale = (0..m).map(|i| a(i, i).abs()).fold(0.0, f64::max);
    let skip_tol = 1e-13 * scale;

    // Row-oriented Cholesky; only the row of `t` needs to be kept in full.
    let mut lower = vec![vec![0.0; m]; m];
    let mut active = vec![false; m];
    for j in 0..m {
        let mut d = a(j, j);
        for k in 0..j {
            if active[k] {
                d -= lower[j][k] * lower[j][k];
            }
        }
        if j == m - 1 {
            let clamp = 1e-12 * rtt + 64.0 * f64::EPSILON * scale;
            return if d >= 0.0 {
                Ok(d)
            } else if d >= -clamp {
                Ok(0.0)
            } else {
                Err(Error::Internal(format!(
                    "negative conditional variance {d:e} (R(t,t) = {rtt:e})"
                )))
            };
        }
        if d <= skip_tol {
            if d < -1e-8 * scale {
                return Err(Error::NotPsd { jitter: 0.0 });
            }
            continue;
        }
        active[j] = true;
        let piv = d.sqrt();
        lower[j][j] = piv;
        for i in j + 1..m {
            let mut v = a(i, j);
            for k in 0..j {
                if active[k] {
                    v -= lower[i][k] * lower[j][k];
                }
            }
            lower[i][j] = v / piv;
        }
    }
    unreachable!("loop returns at the last row")
}

/// `detCov(X(s), X(t)) = R(s,s) R(t,t) - R(s,t)^2`.
pub fn det_cov_pair(kernel: &CovKernel, s: &[f64], t: &[f64]) -> Result<f64> {
    for p in [s, t] {
        if p.len() != kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                got: p.len(),
            });
        }
    }
    Ok(kernel.pair(s, t).det)
}
