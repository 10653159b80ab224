use serde::{Deserialize, Serialize};

use super::quadrature::integrate_adaptive;
use crate::error::{Error, Result};

/// Result of [`lemma1_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Eval {
    pub integral: f64,
    pub asymptotic: f64,
    pub ratio: f64,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Breakpoints `0, s, 2s, 4s, ..., 1` for an integrand that varies on the scale `s`.
fn graded_breaks(scale: f64, end: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = scale.min(end);
    while x < end {
        b.push(x);
        x *= 2.0;
    }
    b.push(end);
    b
}

/// `∫₀¹ dt / (A + t^α)^β` and its asymptotic form as `A → 0`.
pub fn lemma1_eval(alpha: f64, beta: f64, a: f64) -> Result<Lemma1Eval> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "need alpha, beta > 0, got {alpha}, {beta}"
        )));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("A = {a} is not in (0,1)")));
    }
    let breaks = graded_breaks(a.powf(1.0 / alpha), 1.0);
    let res = integrate_adaptive(
        |t| (a + t.powf(alpha)).powf(-beta),
        &breaks,
        0.0,
        1e-13,
        20_000,
    );
    let ab = alpha * beta;
    let asymptotic = if same(ab, 1.0) {
        (1.0 + a.powf(-1.0 / alpha)).ln()
    } else if ab > 1.0 {
        a.powf(-(beta - 1.0 / alpha))
    } else {
        1.0
    };
    Ok(Lemma1Eval {
        integral: res.value,
        asymptotic,
        ratio: res.value / asymptotic,
    })
}

/// Ratios of [`lemma1_eval`] along an `A` ladder and the band they span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Band {
    pub alpha: f64,
    pub beta: f64,
    pub a_values: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `C = max(max ratio, 1/min ratio)` over the whole ladder.
    pub constant: f64,
    /// Relative growth of `C` when the last rung is added.
    pub constant_growth: f64,
    /// Relative growth of `max/min` when the last rung is added.
    pub width_growth: f64,
    pub passed: bool,
}

/// Band check: `C` and the band width may grow by less than `tol` over the last rung.
pub fn lemma1_band(alpha: f64, beta: f64, a_values: &[f64], tol: f64) -> Result<Lemma1Band> {
    if a_values.len() < 2 {
        return Err(Error::Domain(
            "band check needs at least two values of A".into(),
        ));
    }
    let ratios = a_values
        .iter()
        .map(|&a| lemma1_eval(alpha, beta, a).map(|e| e.ratio))
        .collect::<Result<Vec<_>>>()?;
    let stats = |r: &[f64]| {
        let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = r.iter().copied().fold(f64::INFINITY, f64::min);
        (max.max(1.0 / min), max / min)
    };
    let k = ratios.len();
    let (c_prev, w_prev) = stats(&ratios[..k - 1]);
    let (constant, width) = stats(&ratios);
    let constant_growth = constant / c_prev - 1.0;
    let width_growth = width / w_prev - 1.0;
    let passed = constant.is_finite() && constant_growth < tol && width_growth < tol;
    Ok(Lemma1Band {
        alpha,
        beta,
        a_values: a_values.to_vec(),
        ratios,
        constant,
        constant_growth,
        width_growth,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma23 {
    /// `∫ (A + min|u-u_j|^α)^{-β}` against `n A^{-(β-1/α)}`, `αβ > 1`.
    L2i,
    /// Same integral against `n log(e + (r A^{-1/α} / n)^κ)`, `αβ = 1`.
    L2ii,
    /// `∫ min|u-u_j|^{-β}` against `n^β r^{1-β}`, `0 < β < 1`.
    L3i,
    /// `∫ log(e + M min|u-u_j|^{-β})` against `r log(e + M (r/n)^{-β})`, `0 < β < 1`.
    L3ii,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma23Params {
    pub lemma: Lemma23,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub a: f64,
    pub r: f64,
    pub m: f64,
    pub u_star: f64,
    pub points: Vec<f64>,
    /// Integrate over the ball intersected with this interval.
    pub window: Option<(f64, f64)>,
}

impl Lemma23Params {
    pub fn new(
        lemma: Lemma23,
        alpha: f64,
        beta: f64,
        u_star: f64,
        r: f64,
        points: Vec<f64>,
    ) -> Self {
        Self {
            lemma,
            alpha,
            beta,
            kappa: 0.5,
            a: 0.01,
            r,
            m: 1.0,
            u_star,
            points,
            window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma23Result {
    pub lhs: f64,
    pub rhs_bound: f64,
    pub constant_estimate: f64,
}

/// Evaluates the left side of one of the point-configuration bounds and the bound
/// without its constant.
pub fn lemma23_check(p: &Lemma23Params) -> Result<Lemma23Result> {
    let (alpha, beta) = (p.alpha, p.beta);
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Domain("alpha and beta must be positive".into()));
    }
    match p.lemma {
        Lemma23::L2i if !(alpha * beta > 1.0) || same(alpha * beta, 1.0) => {
            return Err(Error::RegimeMismatch(format!(
                "L2i needs alpha*beta > 1, got {}",
                alpha * beta
            )))
        }
        Lemma23::L2ii if !same(alpha * beta, 1.0) => {
            return Err(Error::RegimeMismatch(format!(
                "L2ii needs alpha*beta = 1, got {}",
                alpha * beta
            )))
        }
        Lemma23::L3i | Lemma23::L3ii if beta >= 1.0 => {
            return Err(Error::RegimeMismatch(format!(
                "L3 needs 0 < beta < 1, got {beta}"
            )))
        }
        _ => {}
    }
    if matches!(p.lemma, Lemma23::L2i | Lemma23::L2ii) && !(p.a > 0.0 && p.a < 1.0) {
        return Err(Error::Domain(format!("A = {} is not in (0,1)", p.a)));
    }
    if matches!(p.lemma, Lemma23::L2ii) && !(p.kappa > 0.0 && p.kappa < 1.0) {
        return Err(Error::Domain(format!(
            "kappa = {} is not in (0,1)",
            p.kappa
        )));
    }
    if matches!(p.lemma, Lemma23::L3ii) && !(p.m >= 0.0) {
        return Err(Error::Domain("M must be nonnegative".into()));
    }
    if !(p.r > 0.0 && p.r.is_finite()) {
        return Err(Error::Domain("radius must be positive".into()));
    }
    if p.points.is_empty() {
        return Err(Error::Domain("need at least one point".into()));
    }
    let mut pts = p.points.clone();
    pts.sort_by(|a, b| a.total_cmp(b));
    if pts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("points must be distinct".into()));
    }
    if pts.iter().any(|&u| (u - p.u_star).abs() > p.r) {
        return Err(Error::Domain("points must lie in the ball".into()));
    }
    let (mut lo, mut hi) = (p.u_star - p.r, p.u_star + p.r);
    if let Some((a, b)) = p.window {
        lo = lo.max(a);
        hi = hi.min(b);
        if !(lo < hi) {
            return Err(Error::Domain("window does not meet the ball".into()));
        }
    }

    // On the Voronoi cell of u_j the integrand depends only on w = |u - u_j|.
    let g = |w: f64| -> f64 {
        match p.lemma {
            Lemma23::L2i | Lemma23::L2ii => (p.a + w.powf(alpha)).powf(-beta),
            Lemma23::L3i => w.powf(-beta),
            Lemma23::L3ii => (std::f64::consts::E + p.m * w.powf(-beta)).ln(),
        }
    };
    let radial = |a: f64, b: f64| -> f64 {
        if !(b > a) {
            return 0.0;
        }
        match p.lemma {
            Lemma23::L3i => (b.powf(1.0 - beta) - a.powf(1.0 - beta)) / (1.0 - beta),
            Lemma23::L3ii => {
                // w = v², which removes the logarithmic singularity at w = 0.
                let (va, vb) = (a.sqrt(), b.sqrt());
                let breaks = graded_breaks(1e-3 * vb, vb);
                let breaks: Vec<f64> = breaks.into_iter().map(|v| v.max(va)).collect();
                integrate_adaptive(|v| 2.0 * v * g(v * v), &breaks, 0.0, 1e-12, 20_000).value
            }
            Lemma23::L2i | Lemma23::L2ii => {
                let breaks: Vec<f64> = graded_breaks(p.a.powf(1.0 / alpha), b)
                    .into_iter()
                    .map(|w| w.max(a))
                    .collect();
                integrate_adaptive(g, &breaks, 0.0, 1e-12, 20_000).value
            }
        }
    };
    let mut lhs = 0.0;
    for (j, &u) in pts.iter().enumerate() {
        let cl = if j == 0 { lo } else { 0.5 * (pts[j - 1] + u) }.max(lo);
        let ch = if j + 1 == pts.len() {
            hi
        } else {
            0.5 * (u + pts[j + 1])
        }
        .min(hi);
        if !(ch > cl) {
            continue;
        }
        // Distances covered on each side of u_j within [cl, ch].
        if cl < u {
            lhs += radial((u - ch).max(0.0), u - cl);
        }
        if ch > u {
            lhs += radial((cl - u).max(0.0), ch - u);
        }
    }
    let n = pts.len() as f64;
    let rhs_bound = match p.lemma {
        Lemma23::L2i => n * p.a.powf(-(beta - 1.0 / alpha)),
        Lemma23::L2ii => {
            n * (std::f64::consts::E + (p.r / n * p.a.powf(-1.0 / alpha)).powf(p.kappa)).ln()
        }
        Lemma23::L3i => n.powf(beta) * p.r.powf(1.0 - beta),
        Lemma23::L3ii => p.r * (std::f64::consts::E + p.m * (p.r / n).powf(-beta)).ln(),
    };
    Ok(Lemma23Result {
        lhs,
        rhs_bound,
        constant_estimate: lhs / rhs_bound,
    })
}

/// Largest constant estimate over random configurations, per number of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma23Scan {
    pub lemma: Lemma23,
    pub alpha: f64,
    pub beta: f64,
    pub n_values: Vec<usize>,
    pub max_constants: Vec<f64>,
    /// Ratio of the last two maxima; near or below 1 when the constant does not grow with `n`.
    pub doubling_ratio: f64,
}

/// Draws `configs` random configurations (centre, radius, `A` or `M`, distinct points)
/// for every `n` in `n_values` and records the largest constant estimate.
pub fn lemma23_scan(
    lemma: Lemma23,
    alpha: f64,
    beta: f64,
    n_values: &[usize],
    configs: usize,
    seed: u64,
) -> Result<Lemma23Scan> {
    use rand::RngExt;
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(Error::Domain("point counts must be positive".into()));
    }
    let mut max_constants = Vec::with_capacity(n_values.len());
    for (idx, &n) in n_values.iter().enumerate() {
        let mut rng = crate::rng::substream(seed, idx as u64);
        let mut worst: f64 = 0.0;
        for _ in 0..configs {
            let u_star = rng.random_range(-1.0..1.0);
            let r = 10f64.powf(rng.random_range(-2.0..0.3));
            let mut points: Vec<f64> = (0..n)
                .map(|_| u_star + r * rng.random_range(-1.0..1.0))
                .collect();
            points.sort_by(|a, b| a.total_cmp(b));
            points.dedup();
            let mut p = Lemma23Params::new(lemma, alpha, beta, u_star, r, points);
            p.a = 10f64.powf(rng.random_range(-6.0..-1.0));
            p.m = 10f64.powf(rng.random_range(-3.0..3.0));
            worst = worst.max(lemma23_check(&p)?.constant_estimate);
        }
        max_constants.push(worst);
    }
    let k = max_constants.len();
    let doubling_ratio = if k >= 2 {
        max_constants[k - 1] / max_constants[k - 2]
    } else {
        1.0
    };
    Ok(Lemma23Scan {
        lemma,
        alpha,
        beta,
        n_values: n_values.to_vec(),
        max_constants,
        doubling_ratio,
    })
}
