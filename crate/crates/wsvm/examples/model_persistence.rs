//! Save a fitted model as a versioned JSON bundle and reload it; the bundle
//! is self-contained and reproduces in-memory predictions bit for bit.
//!
//! Run with: cargo run --release --example model_persistence

use wsvm::data::{gen_example1, stratified_split, SplitSpec};
use wsvm::model::ModelBundle;
use wsvm::train::{fit_scheme, FitOptions};
use wsvm::SchemeKind;

fn main() -> wsvm::Result<()> {
    wsvm::commands::init_workers(0);
    let (pool, _) = gen_example1(240, 31)?;
    let split = SplitSpec::new(0.5, 0.5, 0.0, false, 6)?;
    let (train, tune, _) = stratified_split(&pool, &split)?;
    let opts = FitOptions {
        m_override: Some(6),
        lambda_override: Some(vec![1e-3, 1e-2, 1e-1]),
        ..FitOptions::default()
    };
    let fitted = fit_scheme(&train, &tune, SchemeKind::Baseline1, None, &opts)?;

    let dir = std::env::temp_dir().join("wsvm_bundle_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("model.json");
    ModelBundle::from_model(&fitted.model).save(&path)?;
    println!("saved bundle to {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());

    let reloaded = ModelBundle::load(&path)?.into_model()?;
    let (test, _) = gen_example1(200, 77)?;
    let a = fitted.model.probs_batch(test.features())?;
    let b = reloaded.probs_batch(test.features())?;
    let identical = a
        .iter()
        .zip(&b)
        .all(|(x, y)| x.probs.iter().zip(&y.probs).all(|(u, v)| u.to_bits() == v.to_bits()));
    println!("round-trip predictions bit-identical: {identical}");
    assert!(identical);
    Ok(())
}
