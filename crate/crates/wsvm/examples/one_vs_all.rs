//! One-vs-all learning: one ladder per class against the pooled rest; the
//! ladder readout is the class probability directly. Raw estimates need not
//! sum to one; pass `normalize_ova` for a simplex point.
//!
//! Run with: cargo run --release --example one_vs_all

use wsvm::data::{gen_example3, stratified_split, SplitSpec};
use wsvm::train::{fit_scheme, FitOptions};
use wsvm::SchemeKind;

fn main() -> wsvm::Result<()> {
    wsvm::commands::init_workers(0);
    let (pool, _) = gen_example3(300, 21)?;
    let split = SplitSpec::new(0.5, 0.5, 0.0, false, 2)?;
    let (train, tune, _) = stratified_split(&pool, &split)?;

    let opts = FitOptions {
        m_override: Some(8),
        lambda_override: Some(vec![1e-3, 1e-2, 1e-1]),
        ..FitOptions::default()
    };
    let raw = fit_scheme(&train, &tune, SchemeKind::OneVsAll, None, &opts)?;
    let normalized = {
        let opts = FitOptions { normalize_ova: true, ..opts };
        fit_scheme(&train, &tune, SchemeKind::OneVsAll, None, &opts)?
    };

    for x in [[0.0, 0.0], [3.0, -2.0], [-4.0, 4.0]] {
        let a = raw.model.probs(&x)?;
        let b = normalized.model.probs(&x)?;
        let sum: f64 = a.probs.iter().sum();
        println!(
            "x = ({:>4.1}, {:>4.1})  raw {:?} (sum {:.3})  normalized {:?}",
            x[0],
            x[1],
            a.probs.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
            sum,
            b.probs.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
        );
        assert!(!a.normalized);
        assert!(b.normalized);
    }
    Ok(())
}
