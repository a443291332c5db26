use criterion::{criterion_group, criterion_main, Criterion};

use wgqed::config::Config;
use wgqed::sweep::{run_sweep_sequential, SweepPlan};

fn plan() -> SweepPlan {
    let cfg = Config::from_toml_str(
        r#"
medium = "direct"
n = 2
m = 4
omega_q = 1.0
u = 1.05
jx = 0.01
gamma_l = 0.02
gamma_r = 0.02
omega_p_grid = { start = 0.9, stop = 1.1, points = 41 }
i_in_grid = [1.5e-4, 0.01]
methods = ["THLE", "MQCA"]
"#,
    )
    .expect("bench config");
    SweepPlan::from_config(&cfg).expect("bench plan")
}

fn sweep(c: &mut Criterion) {
    let plan = plan();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| run_sweep_sequential(&plan)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| wgqed::sweep::run_sweep_parallel(&plan)));
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
