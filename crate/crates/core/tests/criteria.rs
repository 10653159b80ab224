use std::f64::consts::SQRT_2;

use approx::assert_relative_eq;
use ltlab_core::criteria::quadrature::{IteratedRule, RuleOptions};
use ltlab_core::criteria::*;
use ltlab_core::{CovKernel, Error, HurstVector, Rect};

fn hv(h: &[f64]) -> HurstVector {
    HurstVector::new(h.to_vec()).unwrap()
}

fn self_scenario(h: &[f64], separation: Separation, d: usize) -> Scenario {
    Scenario {
        kind: ScenarioKind::SelfIntersection {
            h: hv(h),
            separation,
        },
        d,
    }
}

fn classify(s: &Scenario) -> (Tri, Tri) {
    let v = threshold_classify(s).unwrap();
    (v.exists_l2, v.smooth_d1)
}

// --- threshold classifier ---------------------------------------------------------

#[test]
fn classify_worked_examples() {
    use Tri::*;
    assert_eq!(classify(&Scenario::local_time(hv(&[0.5]), 1)), (Yes, No));
    let coll = Scenario {
        kind: ScenarioKind::Collision {
            h: hv(&[0.4]),
            k: hv(&[0.6]),
        },
        d: 2,
    };
    assert_eq!(classify(&coll), (Yes, No));
    assert_eq!(
        classify(&self_scenario(&[0.25], Separation::NotSeparated, 1)),
        (Yes, Yes)
    );
    assert_eq!(
        classify(&self_scenario(&[0.3], Separation::NotSeparated, 2)),
        (Yes, Unknown)
    );
    assert_eq!(
        classify(&self_scenario(&[0.9], Separation::NotSeparated, 3)),
        (No, No)
    );
}

#[test]
fn equality_at_threshold_is_no() {
    let v = threshold_classify(&Scenario::local_time(hv(&[0.5]), 2)).unwrap();
    assert_eq!(v.exists_l2, Tri::No);
    assert!(v.exists_is_iff());
    let v = threshold_classify(&Scenario::local_time(hv(&[0.5, 0.5]), 4)).unwrap();
    assert_eq!(v.exists_l2, Tri::No);
    // 2 + 2 = 4 = d
    let i = Scenario {
        kind: ScenarioKind::Intersection {
            h: hv(&[0.5]),
            k: hv(&[0.5]),
        },
        d: 4,
    };
    assert_eq!(classify(&i), (Tri::No, Tri::No));
}

#[test]
fn threshold_values_and_justification() {
    let v = threshold_classify(&self_scenario(&[0.3], Separation::NotSeparated, 2)).unwrap();
    assert_relative_eq!(v.threshold_values["sum_inv_H"], 1.0 / 0.3);
    assert_relative_eq!(v.threshold_values["max_bound"], 2.0);
    assert_eq!(v.threshold_values["d_plus_2"], 4.0);
    assert!(v.justification.iter().any(|j| j.starts_with("gap:")));
    assert_eq!(v.smooth_clause, None);
    assert_eq!(v.exists_clause, Some(Clause::NotSeparatedExists));

    let v = threshold_classify(&Scenario::local_time(hv(&[0.5]), 1)).unwrap();
    assert_eq!(v.justification.len(), 2);
    assert!(v.justification[0].starts_with(Clause::LocalTimeExists.anchor()));
}

#[test]
fn off_origin_smoothness_is_one_sided() {
    let mut s = Scenario::local_time(hv(&[0.25, 0.25]), 2);
    if let ScenarioKind::LocalTime { level, .. } = &mut s.kind {
        *level = vec![1.0, 1.0];
    }
    // 8 > 4: smooth everywhere
    assert_eq!(classify(&s), (Tri::Yes, Tri::Yes));
    let mut s = Scenario::local_time(hv(&[0.25]), 2);
    if let ScenarioKind::LocalTime { level, .. } = &mut s.kind {
        *level = vec![1.0, 1.0];
    }
    // 4 > 2 but 4 = d + 2; only the origin clause is an equivalence
    assert_eq!(classify(&s), (Tri::Yes, Tri::Unknown));
}

#[test]
fn partially_separated_rules() {
    let part = |s: Vec<usize>, assume_c4| Separation::PartiallySeparated {
        s,
        eps0: 0.2,
        assume_c4,
    };
    // sep = 4 + 2 = 6 > 4; smooth needs > 6: gap since 2 sum = 8 > 6
    assert_eq!(
        classify(&self_scenario(&[0.5, 0.5], part(vec![1], false), 4)),
        (Tri::Yes, Tri::Unknown)
    );
    assert_eq!(
        classify(&self_scenario(&[0.5, 0.5], part(vec![1], true), 4)),
        (Tri::Yes, Tri::No)
    );
    // 2 sum = 8 <= 9
    assert_eq!(
        classify(&self_scenario(&[0.5, 0.5], part(vec![1], false), 9)),
        (Tri::No, Tri::No)
    );
    // S = {2}: sep = 2 + 4 = 6 <= 7 < 8
    assert_eq!(
        classify(&self_scenario(&[0.5, 0.5], part(vec![2], false), 7)),
        (Tri::Unknown, Tri::No)
    );
}

#[test]
fn smooth_implies_exists() {
    for h in [0.1, 0.25, 0.4, 0.6, 0.9] {
        for d in 1..8 {
            for sep in [
                Separation::NotSeparated,
                Separation::WellSeparated { eps0: 0.2 },
            ] {
                let v = threshold_classify(&self_scenario(&[h], sep, d)).unwrap();
                if v.smooth_d1 == Tri::Yes {
                    assert_eq!(v.exists_l2, Tri::Yes);
                }
            }
        }
    }
}

#[test]
fn invalid_scenarios() {
    let bad = [
        Scenario::local_time(hv(&[0.5]), 0),
        Scenario {
            kind: ScenarioKind::Collision {
                h: hv(&[0.5]),
                k: hv(&[0.5, 0.5]),
            },
            d: 1,
        },
        self_scenario(
            &[0.5, 0.5],
            Separation::PartiallySeparated {
                s: vec![],
                eps0: 0.2,
                assume_c4: false,
            },
            2,
        ),
        self_scenario(
            &[0.5, 0.5],
            Separation::PartiallySeparated {
                s: vec![1, 2],
                eps0: 0.2,
                assume_c4: false,
            },
            2,
        ),
        self_scenario(
            &[0.5, 0.5],
            Separation::PartiallySeparated {
                s: vec![3],
                eps0: 0.2,
                assume_c4: false,
            },
            2,
        ),
        self_scenario(&[0.5], Separation::WellSeparated { eps0: 1.5 }, 2),
    ];
    for s in &bad {
        assert!(
            matches!(threshold_classify(s), Err(Error::InvalidScenario(_))),
            "{s:?}"
        );
    }
}

// --- integrands ---------------------------------------------------------------------

#[test]
fn prop_integrand_examples() {
    let k = CovKernel::fbm(0.5).unwrap();
    let v = integrand_prop(&k, 1.0, 0.0, &[0.25], &[1.0]).unwrap();
    assert_relative_eq!(v, 0.1875_f64.powf(-0.5), epsilon = 1e-12);
    assert_relative_eq!(v, 2.3094, epsilon = 1e-4);
    let det = k.pair(&[0.3], &[0.8]).det;
    assert_relative_eq!(
        integrand_prop(&k, 1.7, 0.0, &[0.3], &[0.8]).unwrap(),
        det.powf(-0.85),
        epsilon = 1e-12
    );
    assert!(matches!(
        integrand_prop(&k, 1.0, 0.0, &[0.4], &[0.4]),
        Err(Error::SingularPoint(_))
    ));
    assert!(matches!(
        integrand_prop(&k, 0.0, 0.0, &[0.4], &[0.6]),
        Err(Error::Domain(_))
    ));
}

#[test]
fn existence_integrand_examples() {
    let k = CovKernel::fbm(0.5).unwrap();
    assert_relative_eq!(
        integrand_existence(&k, &[0.0], 1, &[0.25], &[1.0]).unwrap(),
        2.3094,
        epsilon = 1e-4
    );
    let plain = integrand_existence(&k, &[0.0, 0.0], 2, &[0.3], &[0.7]).unwrap();
    let damped = integrand_existence(&k, &[3.0, 3.0], 2, &[0.3], &[0.7]).unwrap();
    assert!(damped < plain);
    assert!(damped > 0.0);
    assert!(integrand_existence(&k, &[0.0], 1, &[0.5], &[0.5]).is_err());
    assert!(matches!(
        integrand_existence(&k, &[0.0], 1, &[0.5, 0.1], &[0.5]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn smoothness_integrand_examples() {
    let k = CovKernel::fbm(0.5).unwrap();
    let v = integrand_smoothness(&k, 1, &[0.25], &[1.0]).unwrap();
    assert_relative_eq!(v, 0.0625 / 0.1875_f64.powf(1.5), epsilon = 1e-12);
    assert_relative_eq!(v, 0.7698, epsilon = 1e-4);
    for (s, t, d) in [(0.25, 1.0, 1), (0.1, 0.6, 2), (0.7, 0.2, 3)] {
        assert_relative_eq!(
            integrand_smoothness(&k, d, &[s], &[t]).unwrap(),
            integrand_prop(&k, d as f64 + 2.0, 2.0, &[s], &[t]).unwrap(),
            max_relative = 1e-12
        );
    }
    // Independent coordinates: zero covariance, positive determinant.
    let z = CovKernel::custom(
        "white",
        Rect::unit(1),
        std::sync::Arc::new(|s: &[f64], t: &[f64]| if s == t { 1.0 } else { 0.0 }),
    );
    assert_eq!(integrand_smoothness(&z, 2, &[0.2], &[0.9]).unwrap(), 0.0);
}

#[test]
fn self_integrand_matches_direct_covariance_algebra() {
    let b = CovKernel::fbm(0.5).unwrap();
    let v = CovKernel::self_intersection(b, Rect::unit(1), Rect::unit(1)).unwrap();
    let (s, t, s2, t2) = (0.2, 0.6, 0.4, 1.0);
    // BM: Cov(B_a - B_b, B_c - B_e) from min(·,·)
    let m = |a: f64, c: f64| a.min(c);
    let c = |a: f64, b: f64, c_: f64, e: f64| m(a, c_) - m(a, e) - m(b, c_) + m(b, e);
    let (va, vb, cab) = (c(s, t, s, t), c(s2, t2, s2, t2), c(s, t, s2, t2));
    let det = va * vb - cab * cab;
    let j = integrand_self(&v, 1, SelfVariant::J, &[s, t], &[s2, t2]).unwrap();
    assert_relative_eq!(j, det.powf(-0.5), max_relative = 1e-12);
    let kk = integrand_self(&v, 1, SelfVariant::K, &[s, t], &[s2, t2]).unwrap();
    assert_relative_eq!(kk, cab * cab * det.powf(-1.5), max_relative = 1e-12);

    assert!(matches!(
        integrand_self(&v, 1, SelfVariant::J, &[s, t], &[s, t]),
        Err(Error::SingularPoint(_))
    ));
    assert!(matches!(
        integrand_self(&v, 1, SelfVariant::J, &[0.5, 0.5], &[s2, t2]),
        Err(Error::SingularPoint(_))
    ));
    let base = CovKernel::fbm(0.5).unwrap();
    assert!(integrand_self(&base, 1, SelfVariant::J, &[0.1], &[0.2]).is_err());
}

// --- quadrature ---------------------------------------------------------------------

#[test]
fn adaptive_quadrature_handles_endpoint_singularity() {
    let r = integrate_adaptive(|x: f64| x.powf(-0.5), &[0.0, 1.0], 1e-12, 1e-12, 2000);
    assert_relative_eq!(r.value, 2.0, epsilon = 1e-8);
    let r = integrate_adaptive(
        |x: f64| (x - 0.3).abs().powf(-0.5),
        &[0.0, 0.3, 1.0],
        1e-12,
        1e-12,
        4000,
    );
    // x - 0.3 is only resolved to ~1e-16 near the break, which costs ~2√h of mass.
    assert_relative_eq!(
        r.value,
        2.0 * 0.3_f64.sqrt() + 2.0 * 0.7_f64.sqrt(),
        epsilon = 1e-5
    );
    assert!(r.value.is_finite());
}

#[test]
fn iterated_rule_integrates_polynomials_exactly() {
    let domain = Rect::unit(2);
    let set = SingularSet::empty(2);
    let rule = IteratedRule::new(&domain, &set, &[], RuleOptions::for_dim(2, 0.1)).unwrap();
    let out = rule.integrate(&|x: &[f64]| x[0] * x[0] * x[1]).unwrap();
    assert_relative_eq!(out.values[0], 1.0 / 6.0, epsilon = 1e-13);
    let mut w = 0.0;
    rule.for_each_node(|_, wt| w += wt);
    assert_relative_eq!(w, 1.0, epsilon = 1e-13);
}

#[test]
fn excised_diagonal_area() {
    // Max-norm neighbourhood of the diagonal: removes a band of half-width δ.
    let domain = Rect::unit(2);
    let set = SingularSet::new(2, vec![Component::new(vec![Class::free(vec![0, 1])])]).unwrap();
    let cuts = [0.25, 0.125, 0.0625];
    // Kinks of the outer integrand at x = 2δ must fall on piece boundaries.
    let opts = RuleOptions {
        uniform_pieces: 16,
        ..RuleOptions::for_dim(2, 0.0625)
    };
    let rule = IteratedRule::new(&domain, &set, &cuts, opts).unwrap();
    let out = rule.integrate(&|_: &[f64]| 1.0).unwrap();
    for (v, d) in out.values.iter().zip(cuts) {
        let expected = (1.0 - 2.0 * d) * (1.0 - 2.0 * d);
        assert_relative_eq!(*v, expected, epsilon = 1e-12);
    }
}

#[test]
fn ladder_validation() {
    assert!(Ladder::new(vec![]).is_err());
    assert!(Ladder::new(vec![0.5, 0.5]).is_err());
    assert!(Ladder::new(vec![0.5, 1.5]).is_err());
    assert!(Ladder::new(vec![0.5, 0.25]).is_ok());
    assert_eq!(Ladder::default().cutoffs.len(), 10);
    assert_eq!(Ladder::default().cutoffs[0], 0.125);
}

#[test]
fn diagnose_labels() {
    let policy = LabelPolicy::default();
    let cuts: Vec<f64> = (3..13).map(|k| 0.5_f64.powi(k)).collect();
    let conv: Vec<f64> = cuts.iter().map(|d| 2.0 - d).collect();
    assert_eq!(diagnose(&cuts, &conv, &policy).label, Label::Convergent);
    let power: Vec<f64> = cuts.iter().map(|d| d.powf(-0.5)).collect();
    let diag = diagnose(&cuts, &power, &policy);
    assert_eq!(diag.label, Label::Divergent);
    assert_relative_eq!(diag.fitted_exponent, 0.5, epsilon = 1e-10);
    let log: Vec<f64> = cuts.iter().map(|d| (1.0 / d).ln()).collect();
    assert_eq!(diagnose(&cuts, &log, &policy).label, Label::Divergent);
    // Too short to judge.
    assert_eq!(
        diagnose(&cuts[..2], &power[..2], &policy).label,
        Label::Inconclusive
    );
}

#[test]
fn linear_fit_recovers_slope() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let y = [1.0, 3.0, 5.0, 7.0];
    let (slope, r2) = linear_fit(&x, &y);
    assert_relative_eq!(slope, 2.0, epsilon = 1e-14);
    assert_relative_eq!(r2, 1.0, epsilon = 1e-14);
}

fn criterion_label(kernel: &CovKernel, c: Criterion) -> DivergenceDiagnosis {
    let set = pair_singular_set(kernel).unwrap();
    let domain = kernel.domain().product(kernel.domain());
    let ladder = default_ladder(domain.dim());
    evaluate_criterion(
        |x| c.eval(kernel, x),
        &domain,
        &set,
        &ladder,
        &QuadratureBudget::default(),
        &LabelPolicy::default(),
    )
    .unwrap()
}

#[test]
fn brownian_existence_criterion_converges_in_one_dimension() {
    let k = CovKernel::fbm(0.5).unwrap();
    let diag = criterion_label(
        &k,
        Criterion::Existence {
            level: vec![],
            d: 1,
        },
    );
    assert_eq!(diag.label, Label::Convergent);
    assert!(diag.values.windows(2).all(|w| w[1] >= w[0]));
    // ∫∫ |t-s|^{-1/2} min(s,t)^{-1/2} ds dt = 2π
    assert_relative_eq!(
        *diag.values.last().unwrap(),
        2.0 * std::f64::consts::PI,
        max_relative = 1e-3
    );
}

#[test]
fn brownian_existence_criterion_diverges_in_three_dimensions() {
    let k = CovKernel::fbm(0.5).unwrap();
    let diag = criterion_label(
        &k,
        Criterion::Existence {
            level: vec![],
            d: 3,
        },
    );
    assert_eq!(diag.label, Label::Divergent);
    assert!(diag.fitted_exponent > 0.05 && diag.r_squared > 0.9);
}

#[test]
fn prop_criterion_boundary_and_interior() {
    let k = CovKernel::fbm(0.5).unwrap();
    assert_eq!(
        criterion_label(
            &k,
            Criterion::Prop {
                gamma: 2.0,
                lambda: 0.0
            }
        )
        .label,
        Label::Divergent
    );
    assert_eq!(
        criterion_label(
            &k,
            Criterion::Prop {
                gamma: 1.5,
                lambda: 0.0
            }
        )
        .label,
        Label::Convergent
    );
    assert_eq!(
        criterion_label(&k, Criterion::Smoothness { d: 1 }).label,
        Label::Divergent
    );
}

#[test]
fn budget_exceeded_without_a_single_rung() {
    let k = CovKernel::fbm(0.5).unwrap();
    let set = pair_singular_set(&k).unwrap();
    let domain = k.domain().product(k.domain());
    let budget = QuadratureBudget {
        max_evals: 10,
        ..Default::default()
    };
    let c = Criterion::Existence {
        level: vec![],
        d: 1,
    };
    let err = evaluate_criterion(
        |x| c.eval(&k, x),
        &domain,
        &set,
        &Ladder::default(),
        &budget,
        &LabelPolicy::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { budget: 10, .. }));
}

#[test]
fn partial_ladder_is_inconclusive() {
    let k = CovKernel::fbm(0.5).unwrap();
    let set = pair_singular_set(&k).unwrap();
    let domain = k.domain().product(k.domain());
    let c = Criterion::Existence {
        level: vec![],
        d: 1,
    };
    let full = evaluate_criterion(
        |x| c.eval(&k, x),
        &domain,
        &set,
        &Ladder::default(),
        &QuadratureBudget::default(),
        &LabelPolicy::default(),
    )
    .unwrap();
    let budget = QuadratureBudget {
        max_evals: full.evaluations - 1,
        ..Default::default()
    };
    let diag = evaluate_criterion(
        |x| c.eval(&k, x),
        &domain,
        &set,
        &Ladder::default(),
        &budget,
        &LabelPolicy::default(),
    )
    .unwrap();
    assert!(diag.budget_exceeded);
    assert_eq!(diag.label, Label::Inconclusive);
    assert!(diag.values.len() < full.values.len());
}

// --- lemmas -------------------------------------------------------------------------

#[test]
fn lemma1_exact_cases() {
    let e = lemma1_eval(1.0, 1.0, 0.01).unwrap();
    assert_relative_eq!(e.integral, 101f64.ln(), epsilon = 1e-10);
    assert_relative_eq!(e.ratio, 1.0, epsilon = 1e-10);
    let a: f64 = 1e-4;
    let e = lemma1_eval(2.0, 1.0, a).unwrap();
    assert_relative_eq!(
        e.integral,
        a.powf(-0.5) * a.powf(-0.5).atan(),
        max_relative = 1e-10
    );
    assert_relative_eq!(e.asymptotic, 100.0, epsilon = 1e-10);
    assert_relative_eq!(e.ratio, 1.5607, epsilon = 1e-4);
    // Approaches 2 like A^{1/4}.
    let e = lemma1_eval(2.0, 0.25, 1e-16).unwrap();
    assert_relative_eq!(e.integral, 2.0, epsilon = 1e-3);
    assert!(e.integral < 2.0);
    assert!(lemma1_eval(0.0, 1.0, 0.1).is_err());
}

#[test]
fn lemma1_bands_are_bounded() {
    let a: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    for (al, be) in [(2.0, 1.0), (1.0, 1.0), (2.0, 0.25), (3.0, 0.5), (0.5, 2.0)] {
        let b = lemma1_band(al, be, &a, 0.05).unwrap();
        assert!(b.passed, "({al},{be}): {b:?}");
        assert!(b.constant.is_finite() && b.constant >= 1.0);
    }
}

#[test]
fn lemma23_exact_cases() {
    let mut p = Lemma23Params::new(Lemma23::L3i, 1.0, 0.5, 0.5, 1.0, vec![0.5]);
    p.window = Some((0.0, 1.0));
    let r = lemma23_check(&p).unwrap();
    assert_relative_eq!(r.lhs, 2.0 * SQRT_2, epsilon = 1e-8);
    assert_relative_eq!(r.rhs_bound, 1.0, epsilon = 1e-14);
    assert_relative_eq!(r.constant_estimate, 2.0 * SQRT_2, epsilon = 1e-8);

    let mut p = Lemma23Params::new(Lemma23::L3ii, 1.0, 0.5, 0.2, 0.7, vec![0.1, 0.4]);
    p.m = 0.0;
    let r = lemma23_check(&p).unwrap();
    assert_relative_eq!(r.lhs, 1.4, epsilon = 1e-12);
    assert_relative_eq!(r.constant_estimate, 2.0, epsilon = 1e-12);

    // One point at the centre reduces L2i to a doubled Lemma-1 integral.
    let p = Lemma23Params::new(Lemma23::L2i, 2.0, 1.0, 0.0, 1.0, vec![0.0]);
    let r = lemma23_check(&p).unwrap();
    let one_side = lemma1_eval(2.0, 1.0, p.a).unwrap().integral;
    assert_relative_eq!(r.lhs, 2.0 * one_side, max_relative = 1e-8);
    assert!(r.constant_estimate.is_finite());
}

#[test]
fn lemma23_regime_mismatch() {
    let p = Lemma23Params::new(Lemma23::L2i, 1.0, 0.5, 0.0, 1.0, vec![0.0]);
    assert!(matches!(lemma23_check(&p), Err(Error::RegimeMismatch(_))));
    let p = Lemma23Params::new(Lemma23::L2ii, 2.0, 1.0, 0.0, 1.0, vec![0.0]);
    assert!(matches!(lemma23_check(&p), Err(Error::RegimeMismatch(_))));
    let p = Lemma23Params::new(Lemma23::L3i, 1.0, 1.5, 0.0, 1.0, vec![0.0]);
    assert!(matches!(lemma23_check(&p), Err(Error::RegimeMismatch(_))));
}

#[test]
fn lemma23_constants_are_stable_under_doubling() {
    let ns = [1, 2, 4, 8, 16, 32];
    for (l, al, be) in [
        (Lemma23::L2i, 2.0, 1.0),
        (Lemma23::L2ii, 2.0, 0.5),
        (Lemma23::L3i, 1.0, 0.5),
        (Lemma23::L3ii, 1.0, 0.5),
    ] {
        let s = lemma23_scan(l, al, be, &ns, 1000, 3).unwrap();
        assert!(
            s.max_constants.iter().all(|c| c.is_finite() && *c > 0.0),
            "{s:?}"
        );
        assert!(s.doubling_ratio < 1.05, "{l:?}: {s:?}");
    }
}

// --- classifier against quadrature -----------------------------------------------

#[test]
fn dichotomy_brownian_local_time() {
    let opts = DichotomyOptions::default();
    for (d, exists) in [(1, Label::Convergent), (2, Label::Divergent)] {
        let r = verify_dichotomy(&Scenario::local_time(hv(&[0.5]), d), &opts).unwrap();
        assert!(r.consistent(), "{r:?}");
        assert_eq!(r.exists.diagnosis.as_ref().unwrap().label, exists);
        assert_eq!(r.exists.agreement, Agreement::Agree);
        assert_eq!(r.smooth.agreement, Agreement::Agree);
    }
}

#[test]
fn dichotomy_sheet_in_three_dimensions() {
    let r = verify_dichotomy(
        &Scenario::local_time(hv(&[0.5, 0.5]), 3),
        &DichotomyOptions::default(),
    )
    .unwrap();
    assert_eq!(r.verdict.exists_l2, Tri::Yes);
    assert_eq!(r.exists.agreement, Agreement::Agree);
    assert_eq!(r.smooth.agreement, Agreement::Agree);
    assert_eq!(r.exists.dim, 4);
}

#[test]
fn dichotomy_skips_large_dimensions() {
    let opts = DichotomyOptions {
        max_dim: 2,
        ..Default::default()
    };
    let r = verify_dichotomy(&Scenario::local_time(hv(&[0.5, 0.5]), 3), &opts).unwrap();
    assert_eq!(r.exists.agreement, Agreement::Skipped);
    assert!(r.exists.diagnosis.is_none());
}

#[test]
fn singular_sets_of_scenarios() {
    let k = CovKernel::fbm(0.5).unwrap();
    let set = pair_singular_set(&k).unwrap();
    assert_eq!(set.dim, 2);
    assert_eq!(set.distance(&[0.3, 0.3]), 0.0);
    assert_eq!(set.distance(&[0.0, 0.7]), 0.0);
    assert!(set.distance(&[0.2, 0.7]) > 0.0);
    // The sheet is used on a domain away from the axes.
    let s = base_kernel(&hv(&[0.5, 0.5]), BaseModel::Auto).unwrap();
    assert_eq!(
        s.domain(),
        &Rect::cube(SHEET_DOMAIN.0, SHEET_DOMAIN.1, 2).unwrap()
    );
}
