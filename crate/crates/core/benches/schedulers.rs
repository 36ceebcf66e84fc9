//! Scheduler benchmarks: per-PRB solver costs, and a full TTI with the
//! data-parallel map versus a single worker.
//!
//! Run `cargo bench` for the parallel build and
//! `cargo bench --no-default-features` for the sequential fallback.

use criterion::{criterion_group, criterion_main, Criterion};

use coordsched::sim::schedule_tti;
use coordsched::{
    build_subproblem, cs_greedy, decode_decision, evaluate_decision, generate_drop,
    generate_reports, inlp_oracle_decision, noncoop_prb_slice, solve_exact, ConnectionMatrix,
    CsiTable, GreedyConfig, PfState, SchedulerKind, SimConfig,
};

struct Workload {
    config: SimConfig,
    conn: ConnectionMatrix,
    table: CsiTable,
    state: PfState,
}

/// Desk-scale instance: 3 macro BSs, 30 UEs, 10 PRBs, both strongest
/// interferers reported. The PF state is warmed with a few TTIs of the
/// baseline so metrics are not all equal.
fn workload() -> Workload {
    let mut config = SimConfig::synthetic(SchedulerKind::CsIlp, 3, 30, 10, 2);
    config.seed = 2024;
    let drop = generate_drop(&config, 0).expect("drop generation");
    let table = generate_reports(
        &drop.scenario,
        &drop.conn,
        &drop.interferers,
        &config.rate_mapper().expect("rate mapper"),
    )
    .expect("report table");
    let mut state =
        PfState::from_avgs(vec![config.avg_floor; 30], config.beta, config.avg_floor)
            .expect("pf state");
    for _ in 0..10 {
        let decision =
            schedule_tti(SchedulerKind::NoncoopPfs, 1, &table, &drop.conn, &state).expect("tti");
        let result = evaluate_decision(&drop.conn, &table, &decision, &state).expect("evaluate");
        state.update_avg_throughput(&result.realized_rate).expect("update");
    }
    Workload { config, conn: drop.conn, table, state }
}

fn bench_per_prb(c: &mut Criterion) {
    let w = workload();
    let ga = GreedyConfig::new(3, 1).expect("greedy config");
    let gg = GreedyConfig::new(3, 2).expect("greedy config");
    let mut group = c.benchmark_group("per_prb");
    group.bench_function("noncoop_pfs", |b| {
        b.iter(|| noncoop_prb_slice(&w.table, &w.conn, &w.state, 0))
    });
    group.bench_function("cs_ga", |b| b.iter(|| cs_greedy(&w.table, &w.conn, &w.state, 0, &ga)));
    group.bench_function("cs_gg_m2", |b| b.iter(|| cs_greedy(&w.table, &w.conn, &w.state, 0, &gg)));
    group.bench_function("cs_ilp", |b| {
        b.iter(|| {
            let problem = build_subproblem(&w.conn, &w.table, &w.state, 0);
            let solution = solve_exact(&problem);
            decode_decision(&problem, &solution).expect("decode")
        })
    });
    group.bench_function("joint_brute_force", |b| {
        b.iter(|| inlp_oracle_decision(&w.table, &w.conn, &w.state, 0).expect("oracle"))
    });
    group.finish();
}

fn bench_full_tti(c: &mut Criterion) {
    let w = workload();
    let mut group = c.benchmark_group("full_tti");
    group.bench_function("cs_ilp_ambient", |b| {
        b.iter(|| schedule_tti(SchedulerKind::CsIlp, 1, &w.table, &w.conn, &w.state).expect("tti"))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("cs_ilp_one_worker", |b| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool");
        b.iter(|| {
            pool.install(|| {
                schedule_tti(SchedulerKind::CsIlp, 1, &w.table, &w.conn, &w.state).expect("tti")
            })
        })
    });
    group.finish();
    let _ = &w.config;
}

criterion_group!(benches, bench_per_prb, bench_full_tti);
criterion_main!(benches);
