//! Hyperparameter selection for one binary task under both criteria: GKL
//! against the known conditionals and its label-based proxy EGKL.
//!
//! Run with: cargo run --release --example tune_criteria

use wsvm::data::{gen_example1, stratified_split, SplitSpec};
use wsvm::ladder::{BinaryTask, WeightGrid};
use wsvm::solver::SolveOptions;
use wsvm::tuning::{tune_task, TuneCriterion, TuneGrid};

fn main() -> wsvm::Result<()> {
    wsvm::commands::init_workers(0);
    let (pool, oracle) = gen_example1(400, 15)?;
    let split = SplitSpec::new(0.5, 0.5, 0.0, false, 8)?;
    let (train, tune, _) = stratified_split(&pool, &split)?;
    let truth: Vec<Vec<f64>> = tune.features().rows().map(|x| oracle.probs(x)).collect();

    let task = BinaryTask::pair(&train, 1, 4)?;
    let weight_grid = WeightGrid::uniform(8)?;
    let lambdas = vec![1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0];
    let sigma_m = wsvm::kernel::median_sigma(&train)?;
    let sigmas: Vec<f64> = (1..=6).map(|i| i as f64 * sigma_m / 4.0).collect();

    for criterion in [TuneCriterion::Egkl, TuneCriterion::Gkl] {
        let grid = TuneGrid::new(lambdas.clone(), sigmas.clone(), criterion)?;
        let (ladder, report) =
            tune_task(&train, &tune, &task, &weight_grid, &grid, Some(&truth), &SolveOptions::default())?;
        let best = report.scores.iter().filter_map(|s| s.score).fold(f64::INFINITY, f64::min);
        println!(
            "{criterion:?}: selected (lambda, sigma) = ({:.0e}, {:.3}), best score {best:.4}, {} candidates scored",
            report.selected.0,
            report.selected.1,
            report.scores.iter().filter(|s| s.score.is_some()).count(),
        );
        println!("  ladder q̂ at a few points:");
        for x in [[0.0, 0.0], [1.2, 0.8], [-1.5, 0.3]] {
            println!("    q(1|1,4)({:>4.1}, {:>4.1}) = {:.3}", x[0], x[1], ladder.pairwise_prob(&x)?);
        }
    }
    Ok(())
}
