use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::substream;

/// Hermite polynomial normalized by `e^{zx - z²/2} = Σ zⁿ Hₙ(x)`, i.e. `Heₙ(x)/n!`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = (x * h1 - h0) / (k as f64 + 1.0);
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `Hₙ(x)` from the explicit expansion of `(-1)ⁿ/n! e^{x²/2} dⁿ/dxⁿ e^{-x²/2}`.
pub fn hermite_explicit(n: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=n / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let log_den =
            ln_gamma(k as f64 + 1.0) + ln_gamma((n - 2 * k) as f64 + 1.0) + k as f64 * 2f64.ln();
        sum += sign * x.powi((n - 2 * k) as i32) * (-log_den).exp();
    }
    sum
}

/// `Σ_{n ≤ terms} zⁿ Hₙ(x)`.
pub fn hermite_generating_partial(z: f64, x: f64, terms: usize) -> f64 {
    let (mut h0, mut h1) = (1.0, x);
    let mut sum = 1.0;
    let mut zp = 1.0;
    for k in 1..=terms {
        zp *= z;
        sum += zp * h1;
        let h2 = (x * h1 - h0) / (k as f64 + 1.0);
        h0 = h1;
        h1 = h2;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
}

/// Monte Carlo estimate of `E[Hₙ(ξ) Hₘ(η)]` for standard Gaussians with correlation `ρ`.
pub fn hermite_orthogonality_mc(
    n: usize,
    m: usize,
    rho: f64,
    replicates: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("correlation {rho} outside [-1,1]")));
    }
    if replicates < 2 {
        return Err(Error::InsufficientSamples {
            got: replicates,
            need: 2,
        });
    }
    const CHUNK: usize = 4096;
    let chunks = replicates.div_ceil(CHUNK);
    let c = (1.0 - rho * rho).max(0.0).sqrt();
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = substream(seed, ci as u64);
            let len = CHUNK.min(replicates - ci * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let xi: f64 = StandardNormal.sample(&mut rng);
                let zeta: f64 = StandardNormal.sample(&mut rng);
                let eta = rho * xi + c * zeta;
                let v = hermite(n, xi) * hermite(m, eta);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = parts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let r = replicates as f64;
    let mean = s / r;
    let var = ((s2 - r * mean * mean) / (r - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: mean,
        standard_error: (var / r).sqrt(),
    })
}

/// Exact value of `E[Hₙ(ξ) Hₘ(η)]`: zero off the diagonal, `ρⁿ/n!` on it.
pub fn hermite_correlation(n: usize, m: usize, rho: f64) -> f64 {
    if n != m {
        0.0
    } else if n <= 170 {
        rho.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>()
    } else {
        (n as f64 * rho.abs().ln() - ln_gamma(n as f64 + 1.0)).exp()
            * if rho < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 }
    }
}

/// `(ln (2k-1)!!, ln (2k)!!)`.
pub fn log_double_factorial(k: u64) -> (f64, f64) {
    // (28)!! < 2^53: exact products for small arguments.
    if k <= 14 {
        let odd: u64 = (1..=k).map(|i| 2 * i - 1).product();
        let even: u64 = (1..=k).map(|i| 2 * i).product();
        return ((odd as f64).ln(), (even as f64).ln());
    }
    let kf = k as f64;
    let ln2 = 2f64.ln();
    let even = kf * ln2 + ln_gamma(kf + 1.0);
    let odd = ln_gamma(2.0 * kf + 1.0) - even;
    (odd, even)
}
