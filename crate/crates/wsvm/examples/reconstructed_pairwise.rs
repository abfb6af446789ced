//! Pairwise coupling reconstructed from baseline ladders: the K-1 trained
//! conditionals against k* algebraically induce every other pair, so the
//! full-table estimator costs no extra training.
//!
//! Run with: cargo run --release --example reconstructed_pairwise

use wsvm::data::{gen_example1, stratified_split, SplitSpec};
use wsvm::schemes::reconstruct_pairwise;
use wsvm::train::{fit_scheme, FitOptions};
use wsvm::SchemeKind;

fn main() -> wsvm::Result<()> {
    wsvm::commands::init_workers(0);
    let (pool, _) = gen_example1(300, 4)?;
    let split = SplitSpec::new(0.5, 0.5, 0.0, false, 9)?;
    let (train, tune, _) = stratified_split(&pool, &split)?;

    let opts = FitOptions {
        m_override: Some(8),
        lambda_override: Some(vec![1e-3, 1e-2, 1e-1]),
        ..FitOptions::default()
    };
    let b1 = fit_scheme(&train, &tune, SchemeKind::Baseline1, None, &opts)?;
    let bp1 = fit_scheme(&train, &tune, SchemeKind::BaselinePairwise1, None, &opts)?;
    println!("B1 and BP1 share the same {} ladders; only the readout differs", b1.model.ladders.len());

    let x = [0.7, 0.2];
    let k_star = b1.model.baseline.as_ref().unwrap().k_star;
    let q: Vec<f64> = b1
        .model
        .ladders
        .iter()
        .map(|l| l.pairwise_prob(&x))
        .collect::<wsvm::Result<_>>()?;
    println!("baseline conditionals against k* = {k_star}: {:?}", q.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("reconstructed q(1|1,2) from the first two = {:.4}", reconstruct_pairwise(q[0], q[1])?);

    let pb = b1.model.probs(&x)?;
    let pbp = bp1.model.probs(&x)?;
    println!("B1  probabilities: {:?}", pb.probs.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("BP1 probabilities: {:?}", pbp.probs.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("BP1 additionally yields a max-vote label: {:?}", bp1.model.table_at(&x)?.is_some());
    Ok(())
}
