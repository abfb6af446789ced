//! A miniature Monte Carlo benchmark over three schemes, printing the
//! aggregate table. The full protocol (n = 500, 10,000 test points) runs
//! through the `wsvm benchmark` subcommand; this one is sized to finish in
//! about a minute.
//!
//! Run with: cargo run --release --example benchmark_small

use wsvm::commands::{format_aggregate_table, init_workers, run_benchmark, BenchmarkConfig};
use wsvm::train::FitOptions;
use wsvm::SchemeKind;

fn main() -> wsvm::Result<()> {
    init_workers(0);
    let cfg = BenchmarkConfig {
        example: 3,
        schemes: vec![SchemeKind::Baseline1, SchemeKind::Pairwise, SchemeKind::OneVsAll],
        runs: 2,
        n: 150,
        test_n: 2000,
        seed: 42,
        fit: FitOptions {
            m_override: Some(10),
            lambda_override: Some(vec![1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0]),
            ..FitOptions::default()
        },
        out_json: None,
        out_csv: None,
        verbose: true,
    };
    let report = run_benchmark(&cfg)?;
    println!("{}", format_aggregate_table(&report));
    println!("per-run selected hyperparameters:");
    for run in &report.per_run {
        let pairs: Vec<String> =
            run.selected.iter().map(|s| format!("{}→({:.0e},{:.2})", s.task, s.lambda, s.sigma)).collect();
        println!("  run {} {}: {}", run.run, run.eval.scheme, pairs.join(" "));
    }
    Ok(())
}
