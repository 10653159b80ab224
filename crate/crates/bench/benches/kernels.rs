use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ltlab_core::chaos::{composition_ratio_scan, hermite, phi_series, ratio_grid, PhiOptions};
use ltlab_core::criteria::{
    evaluate_criterion, lemma1_eval, pair_singular_set, scenario_criteria, scenario_kernel,
    threshold_classify, BaseModel, LabelPolicy, Ladder, QuadratureBudget, Scenario,
};
use ltlab_core::fields::{gram_matrix, sample_field};
use ltlab_core::localtime::{l_eps_mc, second_moment_closed, GridSpec, PairQuadrature};
use ltlab_core::{CovKernel, HurstVector};

fn grid(n: usize) -> Vec<Vec<f64>> {
    (1..=n).map(|i| vec![i as f64 / n as f64]).collect()
}

fn fields(c: &mut Criterion) {
    let k = CovKernel::fbm(0.3).unwrap();
    let pts = grid(128);
    c.bench_function("gram_128", |b| {
        b.iter(|| gram_matrix(&k, black_box(&pts), 0.0).unwrap())
    });
    c.bench_function("sample_fbm_128x2", |b| {
        b.iter(|| sample_field(&k, black_box(&pts), 2, 7).unwrap())
    });
}

fn criteria(c: &mut Criterion) {
    let s = Scenario::local_time(HurstVector::new(vec![0.5, 0.5]).unwrap(), 3);
    c.bench_function("classify", |b| {
        b.iter(|| threshold_classify(black_box(&s)).unwrap())
    });
    c.bench_function("lemma1_eval", |b| {
        b.iter(|| lemma1_eval(2.0, 0.25, black_box(1e-4)).unwrap())
    });

    let bm = Scenario::local_time(HurstVector::new(vec![0.5]).unwrap(), 1);
    let kernel = scenario_kernel(&bm, BaseModel::Auto).unwrap();
    let set = pair_singular_set(&kernel).unwrap();
    let domain = kernel.domain().product(kernel.domain());
    let (ce, _) = scenario_criteria(&bm);
    let (ladder, budget, policy) = (
        Ladder::dyadic(3, 12),
        QuadratureBudget::default(),
        LabelPolicy::default(),
    );
    c.bench_function("existence_ladder_bm_2d", |b| {
        b.iter(|| {
            evaluate_criterion(
                |x| ce.eval(&kernel, x),
                &domain,
                &set,
                &ladder,
                &budget,
                &policy,
            )
            .unwrap()
        })
    });
}

fn chaos(c: &mut Criterion) {
    c.bench_function("hermite_10", |b| b.iter(|| hermite(10, black_box(1.3))));
    let xs = ratio_grid(99);
    c.bench_function("composition_scan_d3", |b| {
        b.iter(|| composition_ratio_scan(3, black_box(&xs)).unwrap())
    });
    let k = CovKernel::fbm(0.5).unwrap();
    c.bench_function("phi_bm_d2", |b| {
        b.iter(|| phi_series(&k, 2, &PhiOptions::default()).unwrap())
    });
}

fn localtime(c: &mut Criterion) {
    let k = CovKernel::fbm(0.5).unwrap();
    let q = PairQuadrature::default();
    c.bench_function("second_moment_closed", |b| {
        b.iter(|| second_moment_closed(&k, 1, &[], black_box(0.01), &q).unwrap())
    });
    let mut g = c.benchmark_group("mc");
    g.sample_size(10);
    g.bench_function("l_eps_mc_grid64_1000", |b| {
        b.iter(|| l_eps_mc(&k, 1, &[], 0.1, &GridSpec { per_dim: 64 }, 1000, 3).unwrap())
    });
    g.finish();
}

criterion_group!(benches, fields, criteria, chaos, localtime);
criterion_main!(benches);
