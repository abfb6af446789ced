//! Baseline learning end to end: pick the reference class, train the K-1
//! ladders with per-task tuning, and read out class probabilities.
//!
//! Uses a reduced hyperparameter grid so it finishes in seconds; drop the
//! overrides for the full protocol.
//!
//! Run with: cargo run --release --example baseline_learning

use wsvm::data::{gen_example1, stratified_split, SplitSpec};
use wsvm::metrics::{l1_error, test_error};
use wsvm::schemes::classify_max_prob;
use wsvm::train::{fit_scheme, FitOptions};
use wsvm::SchemeKind;

fn main() -> wsvm::Result<()> {
    wsvm::commands::init_workers(0);
    let (pool, oracle) = gen_example1(400, 11)?;
    let split = SplitSpec::new(0.5, 0.5, 0.0, false, 3)?;
    let (train, tune, _) = stratified_split(&pool, &split)?;

    let opts = FitOptions {
        m_override: Some(8),
        lambda_override: Some(vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0]),
        ..FitOptions::default()
    };

    for scheme in [SchemeKind::Baseline1, SchemeKind::Baseline2] {
        let fitted = fit_scheme(&train, &tune, scheme, None, &opts)?;
        let choice = fitted.model.baseline.as_ref().unwrap();
        println!(
            "{}: k* = {} (diagnostics {:?}), fitted {} ladders in {:.1}s",
            scheme.label(),
            choice.k_star,
            choice.diagnostics.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
            fitted.model.ladders.len(),
            fitted.fit_seconds
        );
        for report in &fitted.reports {
            println!("  task {}: selected (lambda, sigma) = {:?}", report.task, report.selected);
        }

        let (test, _) = gen_example1(2000, 99)?;
        let estimates = fitted.model.probs_batch(test.features())?;
        let p_hat: Vec<Vec<f64>> = estimates.iter().map(|e| e.probs.clone()).collect();
        let p_true: Vec<Vec<f64>> = test.features().rows().map(|x| oracle.probs(x)).collect();
        let labels: Vec<usize> = estimates.iter().map(classify_max_prob).collect();
        println!(
            "  test L1 = {:.1}, TE1 = {:.1} (x100)",
            100.0 * l1_error(&p_true, &p_hat)?,
            100.0 * test_error(test.labels(), &labels)?
        );
    }
    Ok(())
}
