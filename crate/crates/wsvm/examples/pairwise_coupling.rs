//! Pairwise coupling: train every class pair, pick a per-point baseline by
//! vote, and couple the conditional probabilities into a K-vector.
//!
//! Run with: cargo run --release --example pairwise_coupling

use wsvm::data::{gen_example3, stratified_split, SplitSpec};
use wsvm::metrics::{l1_error, test_error};
use wsvm::train::{fit_scheme, FitOptions};
use wsvm::SchemeKind;

fn main() -> wsvm::Result<()> {
    wsvm::commands::init_workers(0);
    let (pool, oracle) = gen_example3(400, 5)?;
    let split = SplitSpec::new(0.5, 0.5, 0.0, false, 1)?;
    let (train, tune, _) = stratified_split(&pool, &split)?;

    let opts = FitOptions {
        m_override: Some(8),
        lambda_override: Some(vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0]),
        ..FitOptions::default()
    };
    let fitted = fit_scheme(&train, &tune, SchemeKind::Pairwise, None, &opts)?;
    println!("trained {} pair ladders (K = 5)", fitted.model.ladders.len());

    // a full pairwise table exists at every point
    let x = [0.5, -1.0];
    let table = fitted.model.table_at(&x)?.unwrap();
    println!("pairwise table at ({}, {}):", x[0], x[1]);
    for j in 1..=5 {
        let row: Vec<String> = (1..=5)
            .map(|j2| if j == j2 { "  -  ".into() } else { format!("{:.3}", table.get(j, j2)) })
            .collect();
        println!("  q({j}|{j},*) = [{}]", row.join(", "));
    }
    let est = fitted.model.probs(&x)?;
    println!("coupled probabilities: {:?}", est.probs.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());

    let (test, _) = gen_example3(2000, 77)?;
    let pred = fitted.model.predict(test.features())?;
    let p_true: Vec<Vec<f64>> = test.features().rows().map(|x| oracle.probs(x)).collect();
    let p_hat: Vec<Vec<f64>> = pred.probs.iter().map(|e| e.probs.clone()).collect();
    println!(
        "test L1 = {:.1}, TE1 = {:.1}, TE2 = {:.1} (x100)",
        100.0 * l1_error(&p_true, &p_hat)?,
        100.0 * test_error(test.labels(), &pred.labels_max_prob)?,
        100.0 * test_error(test.labels(), pred.labels_max_vote.as_ref().unwrap())?
    );
    Ok(())
}
