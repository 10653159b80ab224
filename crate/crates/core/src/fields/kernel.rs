use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anisotropy index `H = (H_1, ..., H_N)` with every entry in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HurstVector(Vec<f64>);

impl HurstVector {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Domain(
                "Hurst vector must have at least one entry".into(),
            ));
        }
        if let Some(bad) = h.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::Domain(format!("Hurst index {bad} is not in (0,1)")));
        }
        Ok(Self(h))
    }

    pub fn uniform(h: f64, n: usize) -> Result<Self> {
        Self::new(vec![h; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Q = Σ 1/H_j`.
    pub fn q_sum(&self) -> f64 {
        self.0.iter().map(|h| 1.0 / h).sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl TryFrom<Vec<f64>> for HurstVector {
    type Error = Error;
    fn try_from(h: Vec<f64>) -> Result<Self> {
        Self::new(h)
    }
}

impl From<HurstVector> for Vec<f64> {
    fn from(h: HurstVector) -> Self {
        h.0
    }
}

/// Axis-aligned rectangle `Π [lo_j, hi_j]` inside `[0,1]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::Domain(
                "rectangle must have at least one side".into(),
            ));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(0.0 <= *a && a < b && *b <= 1.0) {
                return Err(Error::Domain(format!(
                    "side [{a}, {b}] is not a subinterval of [0,1]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn cube(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn product(&self, other: &Rect) -> Rect {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        Rect { lo, hi }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Affine image of `unit` (a rectangle of the unit cube) inside `self`.
    pub fn map_unit(&self, unit: &Rect) -> Rect {
        let lo = (0..self.dim())
            .map(|j| self.lo[j] + (self.hi[j] - self.lo[j]) * unit.lo[j])
            .collect();
        let hi = (0..self.dim())
            .map(|j| self.lo[j] + (self.hi[j] - self.lo[j]) * unit.hi[j])
            .collect();
        Rect { lo, hi }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, "x")?;
            }
            write!(f, "[{},{}]", self.lo[j], self.hi[j])?;
        }
        Ok(())
    }
}

pub type CustomFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// User-supplied covariance evaluator. Registered programmatically only.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub eval: CustomFn,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum KernelModel {
    Fbm {
        h: f64,
    },
    FbSheet(HurstVector),
    AdditiveFbm(HurstVector),
    Custom(CustomKernel),
    /// `Z(t) = X^H(t) - X^K(t)` with independent components.
    Collision(Box<CovKernel>, Box<CovKernel>),
    /// `U(s,t) = X^H(s) - X^K(t)`; parameters are concatenated.
    Intersection(Box<CovKernel>, Box<CovKernel>),
    /// `V(s,t) = X(s) - X(t)`; parameters are concatenated.
    SelfIntersection(Box<CovKernel>),
}

/// Second-order data of a pair of field values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCov {
    pub var_a: f64,
    pub var_b: f64,
    pub cov: f64,
    /// `E[(X(a) - X(b))^2]`.
    pub incr: f64,
    /// `Var(a) Var(b) - Cov(a,b)^2`, clamped at zero.
    pub det: f64,
}

impl PairCov {
    pub fn from_parts(var_a: f64, var_b: f64, incr: f64) -> Self {
        let var_a = var_a.max(0.0);
        let var_b = var_b.max(0.0);
        let incr = incr.max(0.0);
        Self {
            var_a,
            var_b,
            cov: 0.5 * (var_a + var_b - incr),
            incr,
            det: stable_det(var_a, var_b, incr),
        }
    }
}

/// `va vb - c^2` for `c = (va + vb - incr)/2`, factored as
/// `(incr - (√va-√vb)^2)((√va+√vb)^2 - incr)/4` to avoid cancellation near the diagonal.
pub fn stable_det(va: f64, vb: f64, incr: f64) -> f64 {
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    let (ra, rb) = (va.sqrt(), vb.sqrt());
    let sum = ra + rb;
    if sum == 0.0 {
        return 0.0;
    }
    let diff = (va - vb) / sum;
    let f1 = incr - diff * diff;
    let f2 = sum * sum - incr;
    (0.25 * f1 * f2).max(0.0)
}

/// Covariance function on a rectangle, together with its model metadata.
#[derive(Debug, Clone)]
pub struct CovKernel {
    model: KernelModel,
    domain: Rect,
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Hurst index {h} is not in (0,1)")))
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("parameter {x} is not in [0,1]")))
    }
}

#[inline]
fn pow2h(x: f64, h: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(2.0 * h)
    }
}

#[inline]
fn fbm_raw(s: f64, t: f64, h: f64) -> f64 {
    0.5 * (pow2h(s, h) + pow2h(t, h) - pow2h((s - t).abs(), h))
}

/// Fractional Brownian motion covariance `(s^{2h} + t^{2h} - |s-t|^{2h}) / 2`.
pub fn cov_fbm(s: f64, t: f64, h: f64) -> Result<f64> {
    check_h(h)?;
    check_unit(s)?;
    check_unit(t)?;
    Ok(fbm_raw(s, t, h))
}

fn check_dims(s: &[f64], t: &[f64], h: &HurstVector) -> Result<()> {
    if s.len() != h.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            got: s.len(),
        });
    }
    if t.len() != h.len() {
        return Err(Error::DimensionMismatch {
            expected: h.len(),
            got: t.len(),
        });
    }
    s.iter().chain(t).try_for_each(|&x| check_unit(x))
}

/// Fractional Brownian sheet covariance `Π_j cov_fbm(s_j, t_j, h_j)`.
pub fn cov_fbsheet(s: &[f64], t: &[f64], h: &HurstVector) -> Result<f64> {
    check_dims(s, t, h)?;
    Ok(s.iter()
        .zip(t)
        .zip(h.as_slice())
        .map(|((&a, &b), &hj)| fbm_raw(a, b, hj))
        .product())
}

/// Additive fractional Brownian motion covariance `Σ_j cov_fbm(s_j, t_j, h_j)`.
pub fn cov_additive_fbm(s: &[f64], t: &[f64], h: &HurstVector) -> Result<f64> {
    check_dims(s, t, h)?;
    Ok(s.iter()
        .zip(t)
        .zip(h.as_slice())
        .map(|((&a, &b), &hj)| fbm_raw(a, b, hj))
        .sum())
}

impl CovKernel {
    pub fn fbm(h: f64) -> Result<Self> {
        check_h(h)?;
        Ok(Self {
            model: KernelModel::Fbm { h },
            domain: Rect::unit(1),
        })
    }

    pub fn fbsheet(h: HurstVector) -> Self {
        let n = h.len();
        Self {
            model: KernelModel::FbSheet(h),
            domain: Rect::unit(n),
        }
    }

    pub fn additive_fbm(h: HurstVector) -> Self {
        let n = h.len();
        Self {
            model: KernelModel::AdditiveFbm(h),
            domain: Rect::unit(n),
        }
    }

    pub fn custom(name: impl Into<String>, domain: Rect, eval: CustomFn) -> Self {
        Self {
            model: KernelModel::Custom(CustomKernel {
                name: name.into(),
                eval,
            }),
            domain,
        }
    }

    /// Restricts the kernel to a sub-rectangle of its current domain.
    pub fn with_domain(mut self, domain: Rect) -> Result<Self> {
        if domain.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: domain.dim(),
            });
        }
        self.domain = domain;
        Ok(self)
    }

    /// Covariance of the collision field `X^H(t) - X^K(t)`.
    pub fn collision(a: CovKernel, b: CovKernel) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        let domain = a.domain.clone();
        Ok(Self {
            model: KernelModel::Collision(Box::new(a), Box::new(b)),
            domain,
        })
    }

    /// Covariance of the intersection field `X^H(s) - X^K(t)` on `I_a x I_b`.
    pub fn intersection(a: CovKernel, b: CovKernel) -> Self {
        let domain = a.domain.product(&b.domain);
        Self {
            model: KernelModel::Intersection(Box::new(a), Box::new(b)),
            domain,
        }
    }

    /// Covariance of `V(s,t) = X(s) - X(t)` on `I x J`.
    pub fn self_intersection(base: CovKernel, i: Rect, j: Rect) -> Result<Self> {
        for r in [&i, &j] {
            if r.dim() != base.dim() {
                return Err(Error::DimensionMismatch {
                    expected: base.dim(),
                    got: r.dim(),
                });
            }
        }
        let domain = i.product(&j);
        Ok(Self {
            model: KernelModel::SelfIntersection(Box::new(base)),
            domain,
        })
    }

    pub fn model(&self) -> &KernelModel {
        &self.model
    }

    pub fn domain(&self) -> &Rect {
        &self.domain
    }

    /// Parameter dimension of the field.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Range of Hurst indices governing the kernel's local regularity, if known.
    pub fn hurst_range(&self) -> Option<(f64, f64)> {
        match &self.model {
            KernelModel::Fbm { h } => Some((*h, *h)),
            KernelModel::FbSheet(h) | KernelModel::AdditiveFbm(h) => Some((h.min(), h.max())),
            KernelModel::Custom(_) => None,
            KernelModel::Collision(a, b) | KernelModel::Intersection(a, b) => {
                let (a0, a1) = a.hurst_range()?;
                let (b0, b1) = b.hurst_range()?;
                Some((a0.min(b0), a1.max(b1)))
            }
            KernelModel::SelfIntersection(base) => base.hurst_range(),
        }
    }

    /// Human-readable identifier recorded in samples and reports.
    pub fn id(&self) -> String {
        let fmt_h = |h: &HurstVector| {
            let parts: Vec<String> = h.as_slice().iter().map(|x| x.to_string()).collect();
            format!("[{}]", parts.join(","))
        };
        let model = match &self.model {
            KernelModel::Fbm { h } => format!("fbm(h={h})"),
            KernelModel::FbSheet(h) => format!("fbsheet(h={})", fmt_h(h)),
            KernelModel::AdditiveFbm(h) => format!("additive_fbm(h={})", fmt_h(h)),
            KernelModel::Custom(c) => format!("custom({})", c.name),
            KernelModel::Collision(a, b) => format!("collision({}, {})", a.id(), b.id()),
            KernelModel::Intersection(a, b) => format!("intersection({}, {})", a.id(), b.id()),
            KernelModel::SelfIntersection(b) => format!("self_intersection({})", b.id()),
        };
        format!("{model}@{}", self.domain)
    }

    /// `R(a, b)`.
    pub fn cov(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.model {
            KernelModel::Fbm { h } => fbm_raw(a[0], b[0], *h),
            KernelModel::FbSheet(h) => a
                .iter()
                .zip(b)
                .zip(h.as_slice())
                .map(|((&x, &y), &hj)| fbm_raw(x, y, hj))
                .product(),
            KernelModel::AdditiveFbm(h) => a
                .iter()
                .zip(b)
                .zip(h.as_slice())
                .map(|((&x, &y), &hj)| fbm_raw(x, y, hj))
                .sum(),
            KernelModel::Custom(c) => (c.eval)(a, b),
            KernelModel::Collision(x, y) => x.cov(a, b) + y.cov(a, b),
            KernelModel::Intersection(x, y) => {
                let n = x.dim();
                x.cov(&a[..n], &b[..n]) + y.cov(&a[n..], &b[n..])
            }
            KernelModel::SelfIntersection(x) => {
                let n = x.dim();
                let (s, t) = a.split_at(n);
                let (s2, t2) = b.split_at(n);
                0.5 * (x.incr_var(s, t2) + x.incr_var(t, s2)
                    - x.incr_var(s, s2)
                    - x.incr_var(t, t2))
            }
        }
    }

    /// `R(a, a)`.
    pub fn var(&self, a: &[f64]) -> f64 {
        match &self.model {
            KernelModel::Fbm { h } => pow2h(a[0], *h),
            KernelModel::FbSheet(h) => a
                .iter()
                .zip(h.as_slice())
                .map(|(&x, &hj)| pow2h(x, hj))
                .product(),
            KernelModel::AdditiveFbm(h) => a
                .iter()
                .zip(h.as_slice())
                .map(|(&x, &hj)| pow2h(x, hj))
                .sum(),
            KernelModel::Custom(c) => (c.eval)(a, a),
            KernelModel::Collision(x, y) => x.var(a) + y.var(a),
            KernelModel::Intersection(x, y) => {
                let n = x.dim();
                x.var(&a[..n]) + y.var(&a[n..])
            }
            KernelModel::SelfIntersection(x) => {
                let (s, t) = a.split_at(x.dim());
                x.incr_var(s, t)
            }
        }
    }

    /// Increment variance `E[(X(a) - X(b))^2]`, evaluated without cancellation where the
    /// model allows it.
    pub fn incr_var(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.model {
            KernelModel::SelfIntersection(_) => self.incr_with(a, b, self.var(a), self.var(b)),
            _ => self.incr_with(a, b, f64::NAN, f64::NAN),
        }
    }

    // `va`/`vb` are only consulted by models without a direct formula.
    fn incr_with(&self, a: &[f64], b: &[f64], va: f64, vb: f64) -> f64 {
        match &self.model {
            KernelModel::Fbm { h } => pow2h((a[0] - b[0]).abs(), *h),
            KernelModel::AdditiveFbm(h) => a
                .iter()
                .zip(b)
                .zip(h.as_slice())
                .map(|((&x, &y), &hj)| pow2h((x - y).abs(), hj))
                .sum(),
            KernelModel::Collision(x, y) => x.incr_var(a, b) + y.incr_var(a, b),
            KernelModel::Intersection(x, y) => {
                let n = x.dim();
                x.incr_var(&a[..n], &b[..n]) + y.incr_var(&a[n..], &b[n..])
            }
            KernelModel::SelfIntersection(x) => {
                let n = x.dim();
                let (s, t) = a.split_at(n);
                let (s2, t2) = b.split_at(n);
                x.incr_var(s, s2) + x.incr_var(t, t2) - x.incr_var(s, t2) - x.incr_var(t, s2)
                    + va
                    + vb
            }
            KernelModel::FbSheet(_) | KernelModel::Custom(_) => {
                let va = if va.is_nan() { self.var(a) } else { va };
                let vb = if vb.is_nan() { self.var(b) } else { vb };
                va + vb - 2.0 * self.cov(a, b)
            }
        }
    }

    /// Variances, covariance, increment variance and determinant of `(X(a), X(b))`.
    pub fn pair(&self, a: &[f64], b: &[f64]) -> PairCov {
        let va = self.var(a);
        let vb = self.var(b);
        PairCov::from_parts(va, vb, self.incr_with(a, b, va, vb))
    }
}
