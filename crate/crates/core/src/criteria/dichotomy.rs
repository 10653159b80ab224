use serde::{Deserialize, Serialize};

use super::classify::{threshold_classify, Scenario, ScenarioKind, Separation, Tri, Verdict};
use super::integrand::Criterion;
use super::ladder::{
    evaluate_criterion, DivergenceDiagnosis, Label, LabelPolicy, Ladder, QuadratureBudget,
};
use super::quadrature::{Class, ClassKind, Component, SingularSet};
use crate::error::{Error, Result};
use crate::fields::{separated_rects, CovKernel, HurstVector, KernelModel, Rect};

/// Base field used for a Hurst vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseModel {
    /// Fractional Brownian motion for `N = 1`, the sheet otherwise.
    #[default]
    Auto,
    Fbm,
    FbSheet,
    AdditiveFbm,
}

/// Parameter domain of the sheet. Near the coordinate axes the sheet's increments
/// degenerate and the criteria pick up a divergence unrelated to the thresholds.
pub const SHEET_DOMAIN: (f64, f64) = (0.5, 1.0);

/// Base kernel of one Hurst vector on its default domain.
pub fn base_kernel(h: &HurstVector, model: BaseModel) -> Result<CovKernel> {
    let n = h.len();
    match model {
        BaseModel::Auto if n == 1 => CovKernel::fbm(h.as_slice()[0]),
        BaseModel::Fbm => {
            if n != 1 {
                return Err(Error::InvalidScenario(
                    "fbm needs a one-entry Hurst vector".into(),
                ));
            }
            CovKernel::fbm(h.as_slice()[0])
        }
        BaseModel::Auto | BaseModel::FbSheet => CovKernel::fbsheet(h.clone())
            .with_domain(Rect::cube(SHEET_DOMAIN.0, SHEET_DOMAIN.1, n)?),
        BaseModel::AdditiveFbm => Ok(CovKernel::additive_fbm(h.clone())),
    }
}

/// Field whose local time the scenario is about, and the rectangles for self-intersections.
pub fn scenario_kernel(scenario: &Scenario, model: BaseModel) -> Result<CovKernel> {
    scenario.validate()?;
    match &scenario.kind {
        ScenarioKind::LocalTime { h, .. } => base_kernel(h, model),
        ScenarioKind::Collision { h, k } => {
            CovKernel::collision(base_kernel(h, model)?, base_kernel(k, model)?)
        }
        ScenarioKind::Intersection { h, k } => Ok(CovKernel::intersection(
            base_kernel(h, model)?,
            base_kernel(k, model)?,
        )),
        ScenarioKind::SelfIntersection { h, separation } => {
            let base = base_kernel(h, model)?;
            let domain = base.domain().clone();
            let (i, j) = match separation {
                Separation::WellSeparated { eps0 } => {
                    let all: Vec<usize> = (1..=h.len()).collect();
                    separated_rects(&domain, &all, *eps0)?
                }
                Separation::PartiallySeparated { s, eps0, .. } => {
                    separated_rects(&domain, s, *eps0)?
                }
                Separation::NotSeparated => (domain.clone(), domain),
            };
            CovKernel::self_intersection(base, i, j)
        }
    }
}

fn shift(classes: &[Class], by: usize) -> Vec<Class> {
    classes
        .iter()
        .map(|c| Class {
            kind: c.kind,
            members: c.members.iter().map(|i| i + by).collect(),
        })
        .collect()
}

fn merge(a: &[Class], b: &[Class]) -> Vec<Class> {
    let mut out = a.to_vec();
    for c in b {
        match c.kind {
            ClassKind::Zero => {
                if let Some(z) = out.iter_mut().find(|x| x.kind == ClassKind::Zero) {
                    for &m in &c.members {
                        if !z.members.contains(&m) {
                            z.members.push(m);
                        }
                    }
                    z.members.sort_unstable();
                    continue;
                }
                out.push(c.clone());
            }
            ClassKind::Free => out.push(c.clone()),
        }
    }
    out
}

fn product(a: &[Vec<Class>], b: &[Vec<Class>], offset: usize) -> Vec<Vec<Class>> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(merge(x, &shift(y, offset)));
        }
    }
    out
}

/// Components of `{p : Var X(p) = 0}` in the kernel's coordinates.
pub fn zero_variance_set(kernel: &CovKernel) -> Vec<Vec<Class>> {
    let n = kernel.dim();
    match kernel.model() {
        KernelModel::Fbm { .. } => vec![vec![Class::zero(vec![0])]],
        KernelModel::AdditiveFbm(_) => vec![vec![Class::zero((0..n).collect())]],
        KernelModel::FbSheet(_) | KernelModel::Custom(_) => {
            (0..n).map(|j| vec![Class::zero(vec![j])]).collect()
        }
        KernelModel::Collision(a, b) => product(&zero_variance_set(a), &zero_variance_set(b), 0),
        KernelModel::Intersection(a, b) => {
            product(&zero_variance_set(a), &zero_variance_set(b), a.dim())
        }
        KernelModel::SelfIntersection(base) => {
            let m = base.dim();
            let mut out = vec![(0..m)
                .map(|j| Class::free(vec![j, m + j]))
                .collect::<Vec<_>>()];
            let z = zero_variance_set(base);
            out.extend(product(&z, &z, m));
            out
        }
    }
}

/// Where the pair determinant of `kernel` vanishes, over `x = (p, p')`, restricted to the
/// pair domain.
pub fn pair_singular_set(kernel: &CovKernel) -> Result<SingularSet> {
    let n = kernel.dim();
    let mut comps = vec![Component::new(
        (0..n).map(|i| Class::free(vec![i, n + i])).collect(),
    )];
    if let KernelModel::SelfIntersection(base) = kernel.model() {
        // V(s,t) = -V(t,s).
        let m = base.dim();
        let mut swap: Vec<Class> = (0..m).map(|j| Class::free(vec![j, n + m + j])).collect();
        swap.extend((0..m).map(|j| Class::free(vec![m + j, n + j])));
        comps.push(Component::new(swap));
    }
    for z in zero_variance_set(kernel) {
        comps.push(Component::new(z.clone()));
        comps.push(Component::new(shift(&z, n)));
    }
    let domain = kernel.domain().product(kernel.domain());
    Ok(SingularSet::new(2 * n, comps)?.restricted_to(&domain))
}

/// Ladder used by [`verify_dichotomy`] for an `m`-dimensional criterion. Low-dimensional
/// criteria can afford deep ladders, which slowly convergent cases need.
pub fn default_ladder(m: usize) -> Ladder {
    match m {
        0..=2 => Ladder::dyadic(3, 30),
        3..=4 => Ladder::dyadic(3, 17),
        _ => Ladder::dyadic(3, 9),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyOptions {
    pub model: BaseModel,
    pub budget: QuadratureBudget,
    pub policy: LabelPolicy,
    /// Overrides [`default_ladder`].
    pub ladder: Option<Ladder>,
    /// Criteria of higher dimension are not integrated.
    pub max_dim: usize,
    /// Only integrate criteria whose verdict comes from an equivalence.
    pub iff_only: bool,
    /// Rungs that may be appended when a ladder is still settling geometrically just
    /// above the convergence tolerance. Zero keeps the ladder as given.
    pub max_extra_rungs: usize,
}

impl Default for DichotomyOptions {
    fn default() -> Self {
        Self {
            model: BaseModel::Auto,
            budget: QuadratureBudget::default(),
            policy: LabelPolicy::default(),
            ladder: None,
            max_dim: 4,
            iff_only: false,
            max_extra_rungs: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    /// Label and verdict match.
    Agree,
    /// Label contradicts an equivalence; a genuine failure.
    Disagree,
    /// Label contradicts a one-sided verdict, or the verdict is Unknown.
    Informative,
    /// The ladder was not conclusive.
    Inconclusive,
    /// The criterion was not integrated.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionCheck {
    pub criterion: Criterion,
    pub dim: usize,
    pub diagnosis: Option<DivergenceDiagnosis>,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub scenario: Scenario,
    pub kernel_id: String,
    pub verdict: Verdict,
    pub exists: CriterionCheck,
    pub smooth: CriterionCheck,
}

impl DichotomyReport {
    /// No equivalence is contradicted.
    pub fn consistent(&self) -> bool {
        self.exists.agreement != Agreement::Disagree && self.smooth.agreement != Agreement::Disagree
    }
}

impl Agreement {
    /// Compares a ladder label with a classifier verdict; `iff` marks an equivalence.
    pub fn of(verdict: Tri, iff: bool, label: Label) -> Self {
        agreement(verdict, iff, label)
    }
}

fn agreement(verdict: Tri, iff: bool, label: Label) -> Agreement {
    let expected = match verdict {
        Tri::Yes => Label::Convergent,
        Tri::No => Label::Divergent,
        Tri::Unknown => {
            return if label == Label::Inconclusive {
                Agreement::Inconclusive
            } else {
                Agreement::Informative
            }
        }
    };
    if label == Label::Inconclusive {
        Agreement::Inconclusive
    } else if label == expected {
        Agreement::Agree
    } else if iff {
        Agreement::Disagree
    } else {
        Agreement::Informative
    }
}

/// Longer ladder for a diagnosis that is Inconclusive only because its relative increments,
/// shrinking by a steady factor, have not yet dropped below the tolerance. The number of
/// extra rungs is read off that factor; `None` if more than `max_extra` would be needed.
pub fn ladder_extension(
    diag: &DivergenceDiagnosis,
    policy: &LabelPolicy,
    max_extra: usize,
) -> Option<Ladder> {
    let inc = &diag.relative_increments;
    let k = inc.len();
    if diag.label != Label::Inconclusive || diag.budget_exceeded || k < 3 || max_extra == 0 {
        return None;
    }
    let (a, b, c) = (inc[k - 3], inc[k - 2], inc[k - 1]);
    if !(c > 0.0 && c < b && b < a) {
        return None;
    }
    let r = c / b;
    if (b / a - r).abs() > 0.1 {
        return None;
    }
    // Rungs until the increment drops below tol, plus one so the last two both do.
    let below = ((policy.convergence_tol / c).ln() / r.ln()).ceil().max(1.0) as usize;
    let extra = below + 1;
    if extra > max_extra {
        return None;
    }
    let cut = &diag.cutoffs;
    let step = cut[cut.len() - 1] / cut[cut.len() - 2];
    let mut cutoffs = cut.clone();
    for _ in 0..extra {
        cutoffs.push(cutoffs[cutoffs.len() - 1] * step);
    }
    Ladder::new(cutoffs).ok()
}

/// Criteria for existence and smoothness of the scenario's local time.
pub fn scenario_criteria(scenario: &Scenario) -> (Criterion, Criterion) {
    let d = scenario.d;
    (
        Criterion::Existence {
            level: scenario.level(),
            d,
        },
        Criterion::Smoothness { d },
    )
}

/// Runs the classifier and the matching criterion ladders and compares them.
pub fn verify_dichotomy(scenario: &Scenario, opts: &DichotomyOptions) -> Result<DichotomyReport> {
    let verdict = threshold_classify(scenario)?;
    let kernel = scenario_kernel(scenario, opts.model)?;
    let set = pair_singular_set(&kernel)?;
    let domain = kernel.domain().product(kernel.domain());
    let m = domain.dim();
    let ladder = opts.ladder.clone().unwrap_or_else(|| default_ladder(m));
    let mut budget = opts.budget.clone();
    if budget.anisotropy.is_none() {
        budget.anisotropy = kernel.hurst_range().map(|(lo, hi)| hi / lo);
    }
    let (ce, cs) = scenario_criteria(scenario);
    let run = |c: Criterion, tri: Tri, iff: bool| -> Result<CriterionCheck> {
        if m > opts.max_dim || (opts.iff_only && !iff) {
            return Ok(CriterionCheck {
                criterion: c,
                dim: m,
                diagnosis: None,
                agreement: Agreement::Skipped,
            });
        }
        let f = |x: &[f64]| c.eval(&kernel, x);
        let mut diag = evaluate_criterion(f, &domain, &set, &ladder, &budget, &opts.policy)?;
        if let Some(longer) = ladder_extension(&diag, &opts.policy, opts.max_extra_rungs) {
            diag = evaluate_criterion(f, &domain, &set, &longer, &budget, &opts.policy)?;
        }
        let agreement = agreement(tri, iff, diag.label);
        Ok(CriterionCheck {
            criterion: c,
            dim: m,
            diagnosis: Some(diag),
            agreement,
        })
    };
    let exists = run(ce, verdict.exists_l2, verdict.exists_is_iff())?;
    let smooth = run(cs, verdict.smooth_d1, verdict.smooth_is_iff())?;
    Ok(DichotomyReport {
        scenario: scenario.clone(),
        kernel_id: kernel.id(),
        verdict,
        exists,
        smooth,
    })
}
