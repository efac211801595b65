use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use eq_scm::dsl::{self, ModelSource};
use eq_scm::equilibrium::{derive_equilibrium, mean_trajectory};
use eq_scm::scm::{build_scm, NoiseTransform};
use eq_scm::ssa::Simulator;
use eq_scm::{eval_stochastic, Query, SpeciesId};
use eq_scm_bench::{builtin_model, scaled};

fn ssa(c: &mut Criterion) {
    let mut g = c.benchmark_group("ssa_end_state");
    for name in ["mapk-exp1", "igf"] {
        let sim = Simulator::new(&builtin_model(name)).unwrap();
        let mut seed = 0u64;
        g.bench_function(name, |b| {
            b.iter(|| {
                seed += 1;
                black_box(sim.end_state(100.0, seed))
            })
        });
    }
    g.finish();
}

fn equilibrium(c: &mut Criterion) {
    let igf = builtin_model("igf");
    c.bench_function("derive_equilibrium/igf", |b| {
        b.iter(|| derive_equilibrium(black_box(&igf)).unwrap().mean_vector().unwrap())
    });
    let mapk = builtin_model("mapk-exp1");
    c.bench_function("rk4_mean_trajectory/mapk-exp1", |b| {
        b.iter(|| mean_trajectory(black_box(&mapk), 100.0, 0.01).unwrap())
    });
}

fn parse(c: &mut Criterion) {
    let text = dsl::serialize(&builtin_model("igf")).text;
    c.bench_function("parse/igf", |b| {
        b.iter(|| dsl::load(&ModelSource::new(black_box(text.as_str()), "igf")).unwrap())
    });
}

fn counterfactual(c: &mut Criterion) {
    let model = derive_equilibrium(&builtin_model("mapk-exp1")).unwrap();
    let obs: BTreeMap<SpeciesId, f64> = [("K3", 50.0), ("K2", 71.0), ("K", 88.0)]
        .into_iter()
        .map(|(k, v)| (SpeciesId::new(k), v))
        .collect();
    let mut g = c.benchmark_group("counterfactual_1000");
    g.throughput(Throughput::Elements(1000));
    for transform in [NoiseTransform::GaussianReparam, NoiseTransform::BinomialInverseCdf] {
        let scm = build_scm(&model, transform).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(transform), &scm, |b, scm| {
            b.iter(|| scm.counterfactual(&obs, ("K3", 25.0), "K", 1000, 7).unwrap())
        });
    }
    g.finish();
}

fn stochastic_eval(c: &mut Criterion) {
    let net = builtin_model("mapk-exp1");
    let rates_prime = scaled(&net, "act:K3:E1", 1.0 / 3.0);
    let query = Query::new("K3", "K");
    let seeds: Vec<u64> = (0..50).collect();
    let mut g = c.benchmark_group("eval_stochastic");
    g.sample_size(10);
    g.bench_function("mapk-exp1/50_pairs", |b| {
        b.iter(|| eval_stochastic(&net, &net.rates(), &rates_prime, 100.0, &query, &seeds, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, ssa, equilibrium, parse, counterfactual, stochastic_eval);
criterion_main!(benches);
