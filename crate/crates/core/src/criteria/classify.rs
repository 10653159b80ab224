use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::HurstVector;

/// How the two parameter rectangles of a self-intersection are placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Separation {
    /// Separated in every direction; `eps0` is the gap used by the default geometry.
    WellSeparated { eps0: f64 },
    /// Separated exactly in the 1-based directions `s`. With `assume_c4` the caller
    /// asserts the extra conditional-variance bound that makes the threshold sharp.
    PartiallySeparated {
        s: Vec<usize>,
        eps0: f64,
        assume_c4: bool,
    },
    /// `I = J`.
    NotSeparated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Local time at `level` (empty means the origin).
    LocalTime {
        h: HurstVector,
        level: Vec<f64>,
    },
    Collision {
        h: HurstVector,
        k: HurstVector,
    },
    Intersection {
        h: HurstVector,
        k: HurstVector,
    },
    SelfIntersection {
        h: HurstVector,
        separation: Separation,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub d: usize,
}

impl Scenario {
    pub fn local_time(h: HurstVector, d: usize) -> Self {
        Self {
            kind: ScenarioKind::LocalTime {
                h,
                level: Vec::new(),
            },
            d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidScenario("d must be positive".into()));
        }
        match &self.kind {
            ScenarioKind::LocalTime { level, .. } => {
                if !level.is_empty() && level.len() != self.d {
                    return Err(Error::InvalidScenario(format!(
                        "level has {} entries but d = {}",
                        level.len(),
                        self.d
                    )));
                }
                if level.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidScenario("level must be finite".into()));
                }
            }
            ScenarioKind::Collision { h, k } => {
                if h.len() != k.len() {
                    return Err(Error::InvalidScenario(
                        "collision needs H and K of equal length".into(),
                    ));
                }
            }
            ScenarioKind::Intersection { .. } => {}
            ScenarioKind::SelfIntersection { h, separation } => match separation {
                Separation::WellSeparated { eps0 } => check_gap(*eps0)?,
                Separation::NotSeparated => {}
                Separation::PartiallySeparated { s, eps0, .. } => {
                    check_gap(*eps0)?;
                    let n = h.len();
                    let mut sorted = s.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != s.len() || s.iter().any(|&j| j == 0 || j > n) {
                        return Err(Error::InvalidScenario(format!(
                            "S must hold distinct indices in 1..={n}"
                        )));
                    }
                    if s.is_empty() || s.len() == n {
                        return Err(Error::InvalidScenario(
                            "S must be a nonempty proper subset".into(),
                        ));
                    }
                }
            },
        }
        Ok(())
    }

    /// Level at which the local time is taken (zero except for plain local times).
    pub fn level(&self) -> Vec<f64> {
        match &self.kind {
            ScenarioKind::LocalTime { level, .. } if !level.is_empty() => level.clone(),
            _ => vec![0.0; self.d],
        }
    }
}

fn check_gap(eps0: f64) -> Result<()> {
    if eps0 > 0.0 && eps0 < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidScenario(format!(
            "separation gap {eps0} must lie in (0,1)"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

/// Theorem clauses used by the classifier, keyed by a stable anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    LocalTimeExists,
    LocalTimeSmoothAtOrigin,
    LocalTimeSmoothOffOrigin,
    CollisionExists,
    CollisionSmooth,
    IntersectionExists,
    IntersectionSmooth,
    WellSeparatedExists,
    WellSeparatedSmooth,
    PartialExistsSufficient,
    PartialExistsNecessary,
    PartialSmoothSufficient,
    PartialSmoothNecessary,
    PartialExistsSharp,
    PartialSmoothSharp,
    NotSeparatedExists,
    NotSeparatedSmoothSufficient,
    NotSeparatedSmoothNecessary,
    SmoothImpliesExists,
}

impl Clause {
    pub fn anchor(self) -> &'static str {
        match self {
            Clause::LocalTimeExists => "localtime.exists.iff",
            Clause::LocalTimeSmoothAtOrigin => "localtime.smooth.origin.iff",
            Clause::LocalTimeSmoothOffOrigin => "localtime.smooth.level.sufficient",
            Clause::CollisionExists => "collision.exists.iff",
            Clause::CollisionSmooth => "collision.smooth.iff",
            Clause::IntersectionExists => "intersection.exists.iff",
            Clause::IntersectionSmooth => "intersection.smooth.iff",
            Clause::WellSeparatedExists => "self.well.exists.iff",
            Clause::WellSeparatedSmooth => "self.well.smooth.iff",
            Clause::PartialExistsSufficient => "self.partial.exists.sufficient",
            Clause::PartialExistsNecessary => "self.partial.exists.necessary",
            Clause::PartialSmoothSufficient => "self.partial.smooth.sufficient",
            Clause::PartialSmoothNecessary => "self.partial.smooth.necessary",
            Clause::PartialExistsSharp => "self.partial.exists.iff_c4",
            Clause::PartialSmoothSharp => "self.partial.smooth.iff_c4",
            Clause::NotSeparatedExists => "self.none.exists.iff",
            Clause::NotSeparatedSmoothSufficient => "self.none.smooth.sufficient",
            Clause::NotSeparatedSmoothNecessary => "self.none.smooth.necessary",
            Clause::SmoothImpliesExists => "d1_subset_l2",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Clause::LocalTimeExists => "local time in L2 iff sum_inv_H > d",
            Clause::LocalTimeSmoothAtOrigin => "local time at 0 in D1 iff sum_inv_H > d+2",
            Clause::LocalTimeSmoothOffOrigin => "local time at x != 0 in D1 if sum_inv_H > d+2",
            Clause::CollisionExists => "collision local time in L2 iff sum 1/min(H_j,K_j) > d",
            Clause::CollisionSmooth => "collision local time in D1 iff sum 1/min(H_j,K_j) > d+2",
            Clause::IntersectionExists => {
                "intersection local time in L2 iff sum_inv_H + sum_inv_K > d"
            }
            Clause::IntersectionSmooth => {
                "intersection local time in D1 iff sum_inv_H + sum_inv_K > d+2"
            }
            Clause::WellSeparatedExists => "well separated: in L2 iff 2 sum_inv_H > d",
            Clause::WellSeparatedSmooth => "well separated: in D1 iff 2 sum_inv_H > d+2",
            Clause::PartialExistsSufficient => "partially separated: in L2 if 2 sum_S + sum_Sc > d",
            Clause::PartialExistsNecessary => "partially separated: not in L2 if 2 sum_inv_H <= d",
            Clause::PartialSmoothSufficient => {
                "partially separated: in D1 if 2 sum_S + sum_Sc > d+2"
            }
            Clause::PartialSmoothNecessary => {
                "partially separated: not in D1 if 2 sum_inv_H <= d+2"
            }
            Clause::PartialExistsSharp => {
                "partially separated under (C4): in L2 iff 2 sum_S + sum_Sc > d"
            }
            Clause::PartialSmoothSharp => {
                "partially separated under (C4): in D1 iff 2 sum_S + sum_Sc > d+2"
            }
            Clause::NotSeparatedExists => "not separated: in L2 iff sum_inv_H > d",
            Clause::NotSeparatedSmoothSufficient => "not separated: in D1 if sum_inv_H > d+2",
            Clause::NotSeparatedSmoothNecessary => {
                "not separated: not in D1 if sum_inv_H <= max((d+2)/2, 2d/3)"
            }
            Clause::SmoothImpliesExists => "D1 is contained in L2",
        }
    }

    /// Whether the clause is an equivalence.
    pub fn is_iff(self) -> bool {
        matches!(
            self,
            Clause::LocalTimeExists
                | Clause::LocalTimeSmoothAtOrigin
                | Clause::CollisionExists
                | Clause::CollisionSmooth
                | Clause::IntersectionExists
                | Clause::IntersectionSmooth
                | Clause::WellSeparatedExists
                | Clause::WellSeparatedSmooth
                | Clause::PartialExistsSharp
                | Clause::PartialSmoothSharp
                | Clause::NotSeparatedExists
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub exists_l2: Tri,
    pub smooth_d1: Tri,
    /// One line per clause used: `anchor: statement (substituted values)`.
    pub justification: Vec<String>,
    pub threshold_values: BTreeMap<String, f64>,
    /// Clause that decided `exists_l2`, if any.
    pub exists_clause: Option<Clause>,
    /// Clause that decided `smooth_d1`, if any.
    pub smooth_clause: Option<Clause>,
}

impl Verdict {
    pub fn exists_is_iff(&self) -> bool {
        self.exists_clause.is_some_and(Clause::is_iff)
    }

    pub fn smooth_is_iff(&self) -> bool {
        self.smooth_clause.is_some_and(Clause::is_iff)
    }
}

/// Strict `a > b`; values within a relative `1e-12` count as equal, and equality is not
/// "greater".
pub fn strictly_greater(a: f64, b: f64) -> bool {
    a > b + 1e-12 * b.abs().max(1.0)
}

struct Builder {
    justification: Vec<String>,
    values: BTreeMap<String, f64>,
}

impl Builder {
    fn cite(&mut self, clause: Clause, detail: String) {
        self.justification.push(format!(
            "{}: {} ({detail})",
            clause.anchor(),
            clause.statement()
        ));
    }

    /// Applies `lhs > rhs` as an equivalence.
    fn iff(&mut self, clause: Clause, lhs: f64, rhs: f64) -> (Tri, Option<Clause>) {
        let yes = strictly_greater(lhs, rhs);
        self.cite(
            clause,
            format!("{} {} {}", fmt(lhs), if yes { ">" } else { "<=" }, fmt(rhs)),
        );
        (if yes { Tri::Yes } else { Tri::No }, Some(clause))
    }
}

fn fmt(x: f64) -> String {
    let r = (x * 1e6).round() / 1e6;
    format!("{r}")
}

/// Classifies a scenario with the strict-inequality thresholds.
pub fn threshold_classify(scenario: &Scenario) -> Result<Verdict> {
    scenario.validate()?;
    let d = scenario.d as f64;
    let mut b = Builder {
        justification: Vec::new(),
        values: BTreeMap::new(),
    };
    b.values.insert("d".into(), d);
    b.values.insert("d_plus_2".into(), d + 2.0);

    let (exists, smooth) = match &scenario.kind {
        ScenarioKind::LocalTime { h, level } => {
            let q = h.q_sum();
            b.values.insert("sum_inv_H".into(), q);
            let e = b.iff(Clause::LocalTimeExists, q, d);
            let at_origin = level.iter().all(|&x| x == 0.0);
            let s = if at_origin {
                b.iff(Clause::LocalTimeSmoothAtOrigin, q, d + 2.0)
            } else if strictly_greater(q, d + 2.0) {
                b.cite(
                    Clause::LocalTimeSmoothOffOrigin,
                    format!("{} > {}", fmt(q), fmt(d + 2.0)),
                );
                (Tri::Yes, Some(Clause::LocalTimeSmoothOffOrigin))
            } else {
                (Tri::Unknown, None)
            };
            (e, s)
        }
        ScenarioKind::Collision { h, k } => {
            let q: f64 = h
                .as_slice()
                .iter()
                .zip(k.as_slice())
                .map(|(a, c)| 1.0 / a.min(*c))
                .sum();
            b.values.insert("sum_inv_min_HK".into(), q);
            (
                b.iff(Clause::CollisionExists, q, d),
                b.iff(Clause::CollisionSmooth, q, d + 2.0),
            )
        }
        ScenarioKind::Intersection { h, k } => {
            let q = h.q_sum() + k.q_sum();
            b.values.insert("sum_inv_H".into(), h.q_sum());
            b.values.insert("sum_inv_K".into(), k.q_sum());
            b.values.insert("sum_inv_HK".into(), q);
            (
                b.iff(Clause::IntersectionExists, q, d),
                b.iff(Clause::IntersectionSmooth, q, d + 2.0),
            )
        }
        ScenarioKind::SelfIntersection { h, separation } => {
            let q = h.q_sum();
            b.values.insert("sum_inv_H".into(), q);
            b.values.insert("two_sum_inv_H".into(), 2.0 * q);
            match separation {
                Separation::WellSeparated { .. } => (
                    b.iff(Clause::WellSeparatedExists, 2.0 * q, d),
                    b.iff(Clause::WellSeparatedSmooth, 2.0 * q, d + 2.0),
                ),
                Separation::PartiallySeparated { s, assume_c4, .. } => {
                    let hs = h.as_slice();
                    let sep: f64 = (1..=hs.len())
                        .map(|j| {
                            if s.contains(&j) {
                                2.0 / hs[j - 1]
                            } else {
                                1.0 / hs[j - 1]
                            }
                        })
                        .sum();
                    b.values.insert("sep_sum".into(), sep);
                    if *assume_c4 {
                        (
                            b.iff(Clause::PartialExistsSharp, sep, d),
                            b.iff(Clause::PartialSmoothSharp, sep, d + 2.0),
                        )
                    } else {
                        let e = partial_rule(
                            &mut b,
                            sep,
                            2.0 * q,
                            d,
                            Clause::PartialExistsSufficient,
                            Clause::PartialExistsNecessary,
                        );
                        let s = partial_rule(
                            &mut b,
                            sep,
                            2.0 * q,
                            d + 2.0,
                            Clause::PartialSmoothSufficient,
                            Clause::PartialSmoothNecessary,
                        );
                        (e, s)
                    }
                }
                Separation::NotSeparated => {
                    let bound = ((d + 2.0) / 2.0).max(2.0 * d / 3.0);
                    b.values.insert("max_bound".into(), bound);
                    let e = b.iff(Clause::NotSeparatedExists, q, d);
                    let s = if strictly_greater(q, d + 2.0) {
                        b.cite(
                            Clause::NotSeparatedSmoothSufficient,
                            format!("{} > {}", fmt(q), fmt(d + 2.0)),
                        );
                        (Tri::Yes, Some(Clause::NotSeparatedSmoothSufficient))
                    } else if !strictly_greater(q, bound) {
                        b.cite(
                            Clause::NotSeparatedSmoothNecessary,
                            format!("{} <= {}", fmt(q), fmt(bound)),
                        );
                        (Tri::No, Some(Clause::NotSeparatedSmoothNecessary))
                    } else {
                        b.justification.push(format!(
                            "gap: {} < sum_inv_H = {} <= {}; neither smoothness clause applies",
                            fmt(bound),
                            fmt(q),
                            fmt(d + 2.0)
                        ));
                        (Tri::Unknown, None)
                    };
                    (e, s)
                }
            }
        }
    };

    let (exists_l2, exists_clause) = exists;
    let (mut smooth_d1, mut smooth_clause) = smooth;
    if exists_l2 == Tri::No && smooth_d1 != Tri::No {
        b.cite(Clause::SmoothImpliesExists, "existence fails".into());
        smooth_d1 = Tri::No;
        smooth_clause = Some(Clause::SmoothImpliesExists);
    }
    Ok(Verdict {
        exists_l2,
        smooth_d1,
        justification: b.justification,
        threshold_values: b.values,
        exists_clause,
        smooth_clause,
    })
}

fn partial_rule(
    b: &mut Builder,
    sep: f64,
    two_q: f64,
    threshold: f64,
    sufficient: Clause,
    necessary: Clause,
) -> (Tri, Option<Clause>) {
    if strictly_greater(sep, threshold) {
        b.cite(sufficient, format!("{} > {}", fmt(sep), fmt(threshold)));
        (Tri::Yes, Some(sufficient))
    } else if !strictly_greater(two_q, threshold) {
        b.cite(necessary, format!("{} <= {}", fmt(two_q), fmt(threshold)));
        (Tri::No, Some(necessary))
    } else {
        b.justification.push(format!(
            "gap: sep_sum = {} <= {} < 2 sum_inv_H = {}; sharp only under (C4)",
            fmt(sep),
            fmt(threshold),
            fmt(two_q)
        ));
        (Tri::Unknown, None)
    }
}
