//! Integral criteria, their numerical evaluation, and the threshold classifier.

mod classify;
mod dichotomy;
mod integrand;
mod ladder;
mod lemmas;
pub mod quadrature;

pub use classify::{
    strictly_greater, threshold_classify, Clause, Scenario, ScenarioKind, Separation, Tri, Verdict,
};
pub use dichotomy::{
    base_kernel, default_ladder, ladder_extension, pair_singular_set, scenario_criteria,
    scenario_kernel, verify_dichotomy, zero_variance_set, Agreement, BaseModel, CriterionCheck,
    DichotomyOptions, DichotomyReport, SHEET_DOMAIN,
};
pub use integrand::{
    integrand_existence, integrand_prop, integrand_self, integrand_smoothness, Criterion,
    SelfVariant,
};
pub use ladder::{
    diagnose, evaluate_criterion, linear_fit, DivergenceDiagnosis, Label, LabelPolicy, Ladder,
    QuadratureBudget,
};
pub use lemmas::{
    lemma1_band, lemma1_eval, lemma23_check, lemma23_scan, Lemma1Band, Lemma1Eval, Lemma23,
    Lemma23Params, Lemma23Result, Lemma23Scan,
};
pub use quadrature::{integrate_adaptive, Class, ClassKind, Component, SingularSet};
