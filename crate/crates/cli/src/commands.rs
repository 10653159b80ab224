//! The five commands. Each fills in any default that depends on the scenario, runs
//! the library, and renders its report.

use ltlab_core::chaos::{
    composition_coefficients, composition_ratio_scan, composition_sum_brute, phi_series,
    ratio_grid, PhiOptions, PhiSeries, RatioScan, Truncation, BRUTE_FORCE_MAX,
};
use ltlab_core::criteria::{
    default_ladder, evaluate_criterion, ladder_extension, lemma1_band, lemma23_check, lemma23_scan,
    pair_singular_set, scenario_criteria, scenario_kernel, strictly_greater, threshold_classify,
    verify_dichotomy, Agreement, Clause, Criterion, CriterionCheck, DichotomyOptions,
    DivergenceDiagnosis, Label, LabelPolicy, Ladder, Lemma1Band, Lemma23, Lemma23Params,
    Lemma23Result, Lemma23Scan, QuadratureBudget, Scenario, ScenarioKind, Tri, Verdict,
};
use ltlab_core::localtime::{cauchy_gap, l_eps_mc, second_moment_closed, GridSpec, PairQuadrature};
use serde::{Deserialize, Serialize};

use crate::config::{ChaosMode, CommandName, CriterionArg, LemmaArg, Settings};
use crate::report::{
    render, KeyValueRow, LadderRow, LemmaRow, PhiRow, RatioRow, SimulateRow, Tabular,
};
use crate::CliError;

type Rendered = (String, Option<CliError>);

pub fn dispatch(name: CommandName, s: &mut Settings) -> Result<Rendered, CliError> {
    match name {
        CommandName::Classify => classify(s),
        CommandName::Criterion => criterion(s),
        CommandName::Simulate => simulate(s),
        CommandName::Chaos => match s.mode.unwrap_or(ChaosMode::Phi) {
            ChaosMode::Phi => chaos_phi(s),
            ChaosMode::Composition => chaos_composition(s),
        },
        CommandName::Lemmas => lemmas(s),
    }
}

// ---------------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Citation {
    pub anchor: String,
    pub statement: String,
    pub iff: bool,
}

impl From<Clause> for Citation {
    fn from(c: Clause) -> Self {
        Self {
            anchor: c.anchor().into(),
            statement: c.statement().into(),
            iff: c.is_iff(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub scenario: Scenario,
    pub verdict: Verdict,
    pub exists_citation: Option<Citation>,
    pub smooth_citation: Option<Citation>,
}

impl Tabular for ClassifyResult {
    type Row = KeyValueRow;
    fn rows(&self) -> Vec<KeyValueRow> {
        let kv = |k: &str, v: String| KeyValueRow {
            key: k.into(),
            value: v,
        };
        let mut rows = vec![
            kv("exists_l2", format!("{:?}", self.verdict.exists_l2)),
            kv("smooth_d1", format!("{:?}", self.verdict.smooth_d1)),
            kv(
                "exists_clause",
                self.exists_citation
                    .as_ref()
                    .map_or(String::new(), |c| c.anchor.clone()),
            ),
            kv(
                "smooth_clause",
                self.smooth_citation
                    .as_ref()
                    .map_or(String::new(), |c| c.anchor.clone()),
            ),
        ];
        rows.extend(
            self.verdict
                .threshold_values
                .iter()
                .map(|(k, v)| kv(k, v.to_string())),
        );
        rows.extend(
            self.verdict
                .justification
                .iter()
                .map(|j| kv("justification", j.clone())),
        );
        rows
    }
}

pub fn classify_scenario(scenario: &Scenario) -> Result<ClassifyResult, CliError> {
    let verdict = threshold_classify(scenario)?;
    Ok(ClassifyResult {
        scenario: scenario.clone(),
        exists_citation: verdict.exists_clause.map(Citation::from),
        smooth_citation: verdict.smooth_clause.map(Citation::from),
        verdict,
    })
}

fn classify(s: &mut Settings) -> Result<Rendered, CliError> {
    let result = classify_scenario(&s.scenario()?)?;
    Ok((render(s, result)?, None))
}

// ---------------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub criterion: Criterion,
    pub dim: usize,
    /// Classifier verdict the label is compared with.
    pub expected: Tri,
    pub iff: bool,
    pub agreement: Agreement,
    pub diagnosis: Option<DivergenceDiagnosis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub scenario: Scenario,
    pub kernel_id: String,
    pub verdict: Verdict,
    pub checks: Vec<CheckReport>,
    pub consistent: bool,
}

impl Tabular for CriterionResult {
    type Row = LadderRow;
    fn rows(&self) -> Vec<LadderRow> {
        let mut rows = Vec::new();
        for c in &self.checks {
            let Some(d) = &c.diagnosis else { continue };
            for (i, (&cutoff, &value)) in d.cutoffs.iter().zip(&d.values).enumerate() {
                rows.push(LadderRow {
                    criterion: c.name.clone(),
                    rung: i,
                    cutoff,
                    value,
                    relative_increment: i.checked_sub(1).map(|j| d.relative_increments[j]),
                    label: format!("{:?}", d.label),
                });
            }
        }
        rows
    }
}

fn check_report(name: &str, c: CriterionCheck, expected: Tri, iff: bool) -> CheckReport {
    CheckReport {
        name: name.into(),
        criterion: c.criterion,
        dim: c.dim,
        expected,
        iff,
        agreement: c.agreement,
        diagnosis: c.diagnosis,
    }
}

fn criterion(s: &mut Settings) -> Result<Rendered, CliError> {
    let scenario = s.scenario()?;
    let model = s.model();
    let verdict = threshold_classify(&scenario)?;
    let kernel = scenario_kernel(&scenario, model)?;
    let m = 2 * kernel.dim();
    let cutoffs = s
        .ladder
        .get_or_insert_with(|| default_ladder(m).cutoffs)
        .clone();
    let ladder = Ladder::new(cutoffs)?;
    let budget = QuadratureBudget {
        max_evals: s.max_evals.unwrap_or(QuadratureBudget::default().max_evals),
        nodes_per_piece: None,
        anisotropy: kernel.hurst_range().map(|(lo, hi)| hi / lo),
    };
    let policy = LabelPolicy::default();
    let max_dim = s.max_dim.unwrap_or(4);

    let checks = match s.criterion.unwrap_or(CriterionArg::Auto) {
        CriterionArg::Auto => {
            let opts = DichotomyOptions {
                model,
                budget,
                policy,
                ladder: Some(ladder),
                max_dim,
                iff_only: false,
                ..Default::default()
            };
            let r = verify_dichotomy(&scenario, &opts)?;
            vec![
                check_report(
                    "existence",
                    r.exists,
                    verdict.exists_l2,
                    verdict.exists_is_iff(),
                ),
                check_report(
                    "smoothness",
                    r.smooth,
                    verdict.smooth_d1,
                    verdict.smooth_is_iff(),
                ),
            ]
        }
        which => {
            let (ce, cs) = scenario_criteria(&scenario);
            let (name, crit, expected, iff) = match which {
                CriterionArg::Existence => {
                    ("existence", ce, verdict.exists_l2, verdict.exists_is_iff())
                }
                CriterionArg::Smoothness => {
                    ("smoothness", cs, verdict.smooth_d1, verdict.smooth_is_iff())
                }
                _ => {
                    let (gamma, lambda) = (s.gamma.unwrap_or(1.0), s.lambda.unwrap_or(0.0));
                    // The power criterion converges exactly when sum 1/H_j exceeds gamma.
                    let expected = match &scenario.kind {
                        ScenarioKind::LocalTime { h, .. } => {
                            if strictly_greater(h.q_sum(), gamma) {
                                Tri::Yes
                            } else {
                                Tri::No
                            }
                        }
                        _ => Tri::Unknown,
                    };
                    (
                        "prop",
                        Criterion::Prop { gamma, lambda },
                        expected,
                        expected != Tri::Unknown,
                    )
                }
            };
            crit.validate()?;
            if m > max_dim {
                let check = CriterionCheck {
                    criterion: crit,
                    dim: m,
                    diagnosis: None,
                    agreement: Agreement::Skipped,
                };
                vec![check_report(name, check, expected, iff)]
            } else {
                let set = pair_singular_set(&kernel)?;
                let domain = kernel.domain().product(kernel.domain());
                let f = |x: &[f64]| crit.eval(&kernel, x);
                let mut diag = evaluate_criterion(f, &domain, &set, &ladder, &budget, &policy)?;
                if let Some(longer) =
                    ladder_extension(&diag, &policy, DichotomyOptions::default().max_extra_rungs)
                {
                    diag = evaluate_criterion(f, &domain, &set, &longer, &budget, &policy)?;
                }
                let agreement = Agreement::of(expected, iff, diag.label);
                let check = CriterionCheck {
                    criterion: crit,
                    dim: m,
                    diagnosis: Some(diag),
                    agreement,
                };
                vec![check_report(name, check, expected, iff)]
            }
        }
    };
    let consistent = checks.iter().all(|c| c.agreement != Agreement::Disagree);
    let failure = (!consistent).then(|| {
        let names: Vec<&str> = checks
            .iter()
            .filter(|c| c.agreement == Agreement::Disagree)
            .map(|c| c.name.as_str())
            .collect();
        CliError::Failed(format!(
            "criterion label contradicts an equivalence: {}",
            names.join(", ")
        ))
    });
    let result = CriterionResult {
        scenario,
        kernel_id: kernel.id(),
        verdict,
        checks,
        consistent,
    };
    Ok((render(s, result)?, failure))
}

// ---------------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRung {
    pub eps: f64,
    pub seed: u64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub mc_second_moment: f64,
    pub mc_second_moment_se: f64,
    pub closed_second_moment: f64,
    /// `(MC - closed) / SE` for the second moment.
    pub z: f64,
    pub within_3se: bool,
    /// Closed-form `gap(eps, eps/2)`.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    ConsistentWithExistence,
    ConsistentWithNonExistence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub scenario: Scenario,
    pub kernel_id: String,
    pub grid: GridSpec,
    pub replicates: usize,
    pub rungs: Vec<SimulationRung>,
    pub mc_agrees_with_closed_form: bool,
    /// Relative change of the closed-form second moment over the last two rungs.
    pub moment_last_relative_change: f64,
    pub gaps_decreasing: bool,
    pub signal: Signal,
    pub classifier: Tri,
    pub agreement: Agreement,
}

impl Tabular for SimulateResult {
    type Row = SimulateRow;
    fn rows(&self) -> Vec<SimulateRow> {
        self.rungs
            .iter()
            .map(|r| SimulateRow {
                eps: r.eps,
                seed: r.seed,
                mc_mean: r.mc_mean,
                mc_se: r.mc_se,
                mc_second_moment: r.mc_second_moment,
                mc_second_moment_se: r.mc_second_moment_se,
                closed_second_moment: r.closed_second_moment,
                z: r.z,
                gap: r.gap,
            })
            .collect()
    }
}

fn simulate(s: &mut Settings) -> Result<Rendered, CliError> {
    let scenario = s.scenario()?;
    let kernel = scenario_kernel(&scenario, s.model())?;
    let grid = GridSpec {
        per_dim: *s
            .grid
            .get_or_insert(GridSpec::default_for(kernel.dim()).per_dim),
    };
    let replicates = s.replicates.unwrap_or(2000);
    let seed = s.seed.unwrap_or(crate::config::DEFAULT_SEED);
    let ladder = s.eps_ladder.clone().unwrap_or_default();
    if ladder.is_empty() || ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(CliError::Config(
            "--eps-ladder must be nonempty and strictly decreasing".into(),
        ));
    }
    let level = scenario.level();
    let quad = PairQuadrature::default();
    let mut rungs = Vec::with_capacity(ladder.len());
    for (k, &eps) in ladder.iter().enumerate() {
        let rung_seed = seed.wrapping_add(k as u64);
        let mc = l_eps_mc(
            &kernel, scenario.d, &level, eps, &grid, replicates, rung_seed,
        )?;
        let closed = second_moment_closed(&kernel, scenario.d, &level, eps, &quad)?;
        let gap = cauchy_gap(&kernel, scenario.d, &level, eps, 0.5 * eps, &quad)?;
        let z = (mc.second_moment - closed) / mc.second_moment_se;
        rungs.push(SimulationRung {
            eps,
            seed: rung_seed,
            mc_mean: mc.value,
            mc_se: mc.standard_error,
            mc_second_moment: mc.second_moment,
            mc_second_moment_se: mc.second_moment_se,
            closed_second_moment: closed,
            z,
            within_3se: z.abs() <= 3.0,
            gap,
        });
    }
    let k = rungs.len();
    let moment_last_relative_change = if k >= 2 {
        ((rungs[k - 1].closed_second_moment - rungs[k - 2].closed_second_moment)
            / rungs[k - 1].closed_second_moment)
            .abs()
    } else {
        f64::NAN
    };
    let gaps: Vec<f64> = rungs.iter().map(|r| r.gap).collect();
    let gaps_decreasing = k >= 2 && gaps.windows(2).all(|w| w[1] < w[0]);
    let signal = if gaps_decreasing {
        Signal::ConsistentWithExistence
    } else if k >= 2 && gaps[k - 1] >= gaps[0] {
        Signal::ConsistentWithNonExistence
    } else {
        Signal::Inconclusive
    };
    let classifier = threshold_classify(&scenario)?.exists_l2;
    let label = match signal {
        Signal::ConsistentWithExistence => Label::Convergent,
        Signal::ConsistentWithNonExistence => Label::Divergent,
        Signal::Inconclusive => Label::Inconclusive,
    };
    // Numerical ladders are evidence, never proof: a mismatch is informative only.
    let agreement = Agreement::of(classifier, false, label);
    let result = SimulateResult {
        scenario,
        kernel_id: kernel.id(),
        grid,
        replicates,
        mc_agrees_with_closed_form: rungs.iter().all(|r| r.within_3se),
        rungs,
        moment_last_relative_change,
        gaps_decreasing,
        signal,
        classifier,
        agreement,
    };
    Ok((render(s, result)?, None))
}

// ---------------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiLadderRung {
    pub eps: f64,
    pub value: f64,
    pub terms: usize,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiResult {
    pub scenario: Scenario,
    pub kernel_id: String,
    pub series: PhiSeries,
    /// Last partial sum, i.e. the truncated `Phi(1)`.
    pub value: f64,
    /// The truncated series comes with a finite tail bound.
    pub bounded: bool,
    pub ladder: Option<Vec<PhiLadderRung>>,
}

impl Tabular for PhiResult {
    type Row = PhiRow;
    fn rows(&self) -> Vec<PhiRow> {
        let p = &self.series;
        p.orders
            .iter()
            .zip(&p.terms)
            .zip(&p.partial_sums)
            .map(|((&order, &term), &partial_sum)| PhiRow {
                order,
                term,
                partial_sum,
            })
            .collect()
    }
}

fn chaos_phi(s: &mut Settings) -> Result<Rendered, CliError> {
    let scenario = s.scenario()?;
    if scenario.level().iter().any(|&y| y != 0.0) {
        return Err(CliError::Scenario(
            "the chaos series is only available at level 0".into(),
        ));
    }
    let kernel = scenario_kernel(&scenario, s.model())?;
    let truncation = s
        .trunc_n
        .map_or_else(Truncation::default, |n| Truncation::Fixed { n });
    let opts = |eps: f64| PhiOptions {
        eps,
        truncation,
        nodes_per_piece: None,
    };
    let series = phi_series(&kernel, scenario.d, &opts(s.eps.unwrap_or(0.5)))?;
    let ladder = match &s.eps_ladder {
        Some(l) => Some(
            l.iter()
                .map(|&eps| {
                    phi_series(&kernel, scenario.d, &opts(eps)).map(|p| PhiLadderRung {
                        eps,
                        value: p.value(),
                        terms: p.terms.len(),
                        tail_estimate: p.tail_estimate,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let result = PhiResult {
        bounded: series.tail_estimate.is_finite(),
        value: series.value(),
        scenario,
        kernel_id: kernel.id(),
        series,
        ladder,
    };
    Ok((render(s, result)?, None))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionResult {
    pub d: usize,
    pub scan: RatioScan,
    /// Largest relative difference between enumerated and recurrence coefficients.
    pub composition_max_error: f64,
    /// The ratio when it is constant over the grid.
    pub exact_ratio: Option<f64>,
}

impl Tabular for CompositionResult {
    type Row = RatioRow;
    fn rows(&self) -> Vec<RatioRow> {
        self.scan
            .xs
            .iter()
            .zip(&self.scan.ratios)
            .map(|(&x, &ratio)| RatioRow {
                d: self.d,
                x,
                ratio,
            })
            .collect()
    }
}

pub fn composition_max_error(d: usize) -> f64 {
    composition_coefficients(d, BRUTE_FORCE_MAX)
        .iter()
        .enumerate()
        .map(|(n, &b)| (composition_sum_brute(n, d) - b).abs() / b.max(1.0))
        .fold(0.0, f64::max)
}

pub fn composition_result(d: usize, points: usize) -> Result<CompositionResult, CliError> {
    let scan = composition_ratio_scan(d, &ratio_grid(points))?;
    let exact_ratio =
        (scan.max_ratio - scan.min_ratio <= 1e-8 * scan.max_ratio).then_some(scan.max_ratio);
    Ok(CompositionResult {
        d,
        composition_max_error: composition_max_error(d),
        scan,
        exact_ratio,
    })
}

fn chaos_composition(s: &mut Settings) -> Result<Rendered, CliError> {
    let result = composition_result(s.d.unwrap_or(2), s.points.unwrap_or(99))?;
    Ok((render(s, result)?, None))
}

// ---------------------------------------------------------------------------------

/// Pairs `(alpha, beta)` covering the three regimes of the one-dimensional estimate.
pub const LEMMA1_CASES: [(f64, f64); 5] =
    [(2.0, 1.0), (1.0, 1.0), (2.0, 0.25), (3.0, 0.5), (0.5, 2.0)];

/// Band tolerance for the one-dimensional estimate.
pub const LEMMA1_TOL: f64 = 0.05;

/// Ratio of the last two scan maxima allowed for the point-configuration estimates.
pub const DOUBLING_TOL: f64 = 1.05;

fn lemma23_default(l: Lemma23) -> (f64, f64) {
    match l {
        Lemma23::L2i => (2.0, 1.0),
        Lemma23::L2ii => (2.0, 0.5),
        Lemma23::L3i | Lemma23::L3ii => (1.0, 0.5),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedCheck {
    pub params: Lemma23Params,
    pub result: Lemma23Result,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmasResult {
    pub lemma1: Vec<Lemma1Band>,
    pub configurations: Vec<Lemma23Scan>,
    pub fixed: Option<FixedCheck>,
    pub composition: Vec<CompositionResult>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl Tabular for LemmasResult {
    type Row = LemmaRow;
    fn rows(&self) -> Vec<LemmaRow> {
        let mut rows = Vec::new();
        for b in &self.lemma1 {
            let case = format!("alpha={} beta={}", b.alpha, b.beta);
            for (&a, &r) in b.a_values.iter().zip(&b.ratios) {
                rows.push(LemmaRow {
                    lemma: "l1".into(),
                    case: case.clone(),
                    x: a,
                    value: r,
                });
            }
        }
        for sc in &self.configurations {
            let case = format!("alpha={} beta={}", sc.alpha, sc.beta);
            let lemma = format!("{:?}", sc.lemma).to_lowercase();
            for (&n, &c) in sc.n_values.iter().zip(&sc.max_constants) {
                rows.push(LemmaRow {
                    lemma: lemma.clone(),
                    case: case.clone(),
                    x: n as f64,
                    value: c,
                });
            }
        }
        for c in &self.composition {
            for (&x, &r) in c.scan.xs.iter().zip(&c.scan.ratios) {
                rows.push(LemmaRow {
                    lemma: "l8".into(),
                    case: format!("d={}", c.d),
                    x,
                    value: r,
                });
            }
        }
        rows
    }
}

fn lemmas(s: &mut Settings) -> Result<Rendered, CliError> {
    let which = s.lemma.unwrap_or(LemmaArg::All);
    let single = which != LemmaArg::All;
    let pick = |default: (f64, f64)| -> (f64, f64) {
        if single {
            (s.alpha.unwrap_or(default.0), s.beta.unwrap_or(default.1))
        } else {
            default
        }
    };
    let a_values = s.a.clone().unwrap_or_default();
    let n_values = s.n_values.clone().unwrap_or_default();
    let configs = s.configs.unwrap_or(1000);
    let seed = s.seed.unwrap_or(crate::config::DEFAULT_SEED);
    let mut failures = Vec::new();

    let mut lemma1 = Vec::new();
    if matches!(which, LemmaArg::All | LemmaArg::L1) {
        let cases = if single && (s.alpha.is_some() || s.beta.is_some()) {
            vec![pick(LEMMA1_CASES[0])]
        } else {
            LEMMA1_CASES.to_vec()
        };
        for (al, be) in cases {
            let band = lemma1_band(al, be, &a_values, LEMMA1_TOL)?;
            if !band.passed {
                failures.push(format!("l1 alpha={al} beta={be}: band not stable"));
            }
            lemma1.push(band);
        }
    }

    let regimes: Vec<Lemma23> = match which {
        LemmaArg::All => vec![Lemma23::L2i, Lemma23::L2ii, Lemma23::L3i, Lemma23::L3ii],
        LemmaArg::L2i => vec![Lemma23::L2i],
        LemmaArg::L2ii => vec![Lemma23::L2ii],
        LemmaArg::L3i => vec![Lemma23::L3i],
        LemmaArg::L3ii => vec![Lemma23::L3ii],
        LemmaArg::L1 | LemmaArg::L8 => Vec::new(),
    };
    let mut configurations = Vec::new();
    let mut fixed = None;
    for l in regimes {
        let (al, be) = pick(lemma23_default(l));
        if l == Lemma23::L3ii && s.m.is_some() {
            let mut params = Lemma23Params::new(l, al, be, 0.0, 1.0, vec![-0.5, 0.5]);
            params.m = s.m.unwrap_or(1.0);
            let result = lemma23_check(&params)?;
            fixed = Some(FixedCheck { params, result });
        }
        let scan = lemma23_scan(l, al, be, &n_values, configs, seed)?;
        let finite = scan.max_constants.iter().all(|c| c.is_finite() && *c > 0.0);
        if !finite || !(scan.doubling_ratio < DOUBLING_TOL) {
            failures.push(format!(
                "{l:?}: constants grow with n (doubling ratio {})",
                scan.doubling_ratio
            ));
        }
        configurations.push(scan);
    }

    let mut composition = Vec::new();
    if matches!(which, LemmaArg::All | LemmaArg::L8) {
        for d in 1..=3 {
            let r = composition_result(d, s.points.unwrap_or(99))?;
            if !(r.scan.min_ratio > 0.0 && r.scan.max_ratio.is_finite()) {
                failures.push(format!("l8 d={d}: band not finite"));
            }
            if d == 2 && r.exact_ratio.is_none_or(|v| (v - 2.0).abs() > 1e-8) {
                failures.push("l8 d=2: ratio is not the constant 2".into());
            }
            composition.push(r);
        }
    }

    let passed = failures.is_empty();
    let failure = (!passed).then(|| CliError::Failed(failures.join("; ")));
    let result = LemmasResult {
        lemma1,
        configurations,
        fixed,
        composition,
        failures,
        passed,
    };
    Ok((render(s, result)?, failure))
}
