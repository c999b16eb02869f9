use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};
use ezpath::{circumnavigate, plan, standard_specs, Scenario, ScenarioFile, Threat};

fn golden(n_nodes: usize) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/golden.json");
    let mut s = ScenarioFile::load(&path).unwrap().to_scenario();
    s.options.n_nodes = n_nodes;
    s
}

fn planner(c: &mut Criterion) {
    let mut group = c.benchmark_group("plan/golden");
    group.sample_size(20);
    for n in [30, 100] {
        let s = golden(n);
        group.bench_function(format!("{n} nodes"), |b| {
            b.iter(|| plan(black_box(&s)).unwrap())
        });
    }
    group.finish();

    let s = golden(100);
    let Threat::Pursuer(p) = &s.threats[0] else {
        unreachable!("golden threat is a pursuer")
    };
    let specs = standard_specs(p);
    c.bench_function("circumnav/standard baselines", |b| {
        b.iter(|| {
            specs
                .iter()
                .map(|spec| {
                    circumnavigate(s.agent.start, s.agent.goal, p.position, spec, s.agent.speed)
                        .unwrap()
                        .t_f
                })
                .sum::<f64>()
        })
    });
}

criterion_group!(benches, planner);
criterion_main!(benches);
