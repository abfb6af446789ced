//! Hyperparameter selection: grid search over (λ, σ) per binary task,
//! scored by the generalized Kullback-Leibler loss against known
//! conditionals (GKL) or its label-based empirical proxy (EGKL).

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::kernel::{gram, gram_square, median_sigma, KernelSpec};
use crate::ladder::{prob_from_values, BinaryTask, ClassifierLadder, WeightGrid};
use crate::solver::{solve, solve_warm, DecisionFunction, SolveOptions, WeightedBinaryProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuneCriterion {
    Gkl,
    Egkl,
}

impl std::str::FromStr for TuneCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gkl" => Ok(TuneCriterion::Gkl),
            "egkl" => Ok(TuneCriterion::Egkl),
            other => Err(Error::InvalidParameter(format!("unknown criterion {other:?}"))),
        }
    }
}

/// Candidate (λ, σ) values plus the selection criterion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TuneGrid {
    pub lambdas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub criterion: TuneCriterion,
}

impl TuneGrid {
    pub fn new(mut lambdas: Vec<f64>, mut sigmas: Vec<f64>, criterion: TuneCriterion) -> Result<Self> {
        if lambdas.is_empty() || sigmas.is_empty() {
            return Err(Error::EmptyInput("tuning grid".into()));
        }
        if lambdas.iter().chain(&sigmas).any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be positive".into()));
        }
        // Ascending order pins the tie-break to (smaller λ, then smaller σ).
        lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lambdas.dedup();
        sigmas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sigmas.dedup();
        Ok(Self { lambdas, sigmas, criterion })
    }

    /// The default grid: σ ∈ {σ_M/4, ..., 6σ_M/4} around the median
    /// cross-class distance, and the 33-value λ ladder interleaving
    /// {1, 5.5}×10^k from 1e-8 up to 1e+8.
    pub fn default_for(dataset: &LabeledDataset, criterion: TuneCriterion) -> Result<Self> {
        let sigma_m = median_sigma(dataset)?;
        Ok(Self {
            lambdas: default_lambda_ladder(),
            sigmas: (1..=6).map(|i| i as f64 * sigma_m / 4.0).collect(),
            criterion,
        })
    }
}

/// The interleaved {1, 5.5}×10^k ladder spanning 1e-8 to 1e+8, ascending;
/// 33 values.
pub fn default_lambda_ladder() -> Vec<f64> {
    let mut out = Vec::with_capacity(33);
    for k in -8..=7 {
        out.push(10f64.powi(k));
        out.push(5.5 * 10f64.powi(k));
    }
    out.push(1e8);
    out
}

/// Generalized KL loss between true and estimated conditionals,
/// mean over points of q log(q/q̂) + (1-q) log((1-q)/(1-q̂)).
pub fn gkl(q_true: &[f64], q_hat: &[f64]) -> Result<f64> {
    if q_true.len() != q_hat.len() {
        return Err(Error::DimensionMismatch(q_true.len(), q_hat.len()));
    }
    if q_true.is_empty() {
        return Err(Error::EmptyInput("gkl inputs".into()));
    }
    let mut total = 0.0;
    for (&q, &qh) in q_true.iter().zip(q_hat) {
        if !(qh > 0.0 && qh < 1.0) {
            return Err(Error::InvalidParameter(format!("estimate {qh} outside (0, 1)")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("true conditional {q} outside (0, 1)")));
        }
        total += q * (q / qh).ln() + (1.0 - q) * ((1.0 - q) / (1.0 - qh)).ln();
    }
    Ok(total / q_true.len() as f64)
}

/// Empirical GKL proxy from ±1 labels:
/// -(1/2n) Σ [(1+R)log q̂ + (1-R)log(1-q̂)].
pub fn egkl(labels_pm: &[f64], q_hat: &[f64]) -> Result<f64> {
    if labels_pm.len() != q_hat.len() {
        return Err(Error::DimensionMismatch(labels_pm.len(), q_hat.len()));
    }
    if labels_pm.is_empty() {
        return Err(Error::EmptyInput("egkl inputs".into()));
    }
    let mut total = 0.0;
    for (&r, &qh) in labels_pm.iter().zip(q_hat) {
        if !(qh > 0.0 && qh < 1.0) {
            return Err(Error::InvalidParameter(format!("estimate {qh} outside (0, 1)")));
        }
        total += (1.0 + r) * qh.ln() + (1.0 - r) * (1.0 - qh).ln();
    }
    Ok(-total / (2.0 * labels_pm.len() as f64))
}

/// Score of one grid candidate, or the failure that stopped it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TuneScore {
    pub lambda: f64,
    pub sigma: f64,
    pub score: Option<f64>,
    pub error: Option<String>,
}

/// Full scored grid for one task and the selected pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TuneReport {
    pub task: String,
    pub criterion: TuneCriterion,
    pub scores: Vec<TuneScore>,
    pub selected: (f64, f64),
}

/// One trained rung inside the tuning sweep: its coefficients and its
/// decision values at the tuning task points.
struct RungFit {
    coeffs: Vec<f64>,
    intercept: f64,
    fvals: Vec<f64>,
}

/// Select (λ, σ) for one binary task: train the ladder on the training split
/// for every candidate, score its conditionals on the tuning split, and take
/// the minimizer (ties: smaller λ, then smaller σ). Returns the ladder
/// trained at the selected pair.
///
/// The grid is traversed as independent (σ, π) units, each sweeping λ from
/// the largest value down with warm starts (the dual box does not depend on
/// λ, so the previous solution stays feasible). The sweep order is fixed, so
/// results do not depend on scheduling.
///
/// `truth_tune` supplies the true class probabilities at the tuning points
/// (row-aligned) and is required for the GKL criterion.
pub fn tune_task(
    train: &LabeledDataset,
    tune: &LabeledDataset,
    task: &BinaryTask,
    weight_grid: &WeightGrid,
    grid: &TuneGrid,
    truth_tune: Option<&[Vec<f64>]>,
    solve_opts: &SolveOptions,
) -> Result<(ClassifierLadder, TuneReport)> {
    // Task membership on the tuning split.
    let tune_idx: Vec<usize> =
        (0..tune.n()).filter(|&i| task.signed_label(tune.labels()[i]).is_some()).collect();
    if tune_idx.is_empty() {
        return Err(Error::InvalidInput(format!("tuning split has no points for task {}", task.name())));
    }
    let tune_points = tune.features().select(&tune_idx);
    let tune_signed: Vec<f64> =
        tune_idx.iter().map(|&i| task.signed_label(tune.labels()[i]).unwrap()).collect();
    let has_both_sides = tune_signed.iter().any(|&r| r > 0.0) && tune_signed.iter().any(|&r| r < 0.0);
    if grid.criterion == TuneCriterion::Egkl && !has_both_sides {
        return Err(Error::InvalidInput(format!(
            "EGKL needs tuning points on both sides of task {}",
            task.name()
        )));
    }
    let q_true: Option<Vec<f64>> = match grid.criterion {
        TuneCriterion::Egkl => None,
        TuneCriterion::Gkl => {
            let probs = truth_tune.ok_or_else(|| {
                Error::InvalidInput("GKL tuning needs true class probabilities for the tuning split".into())
            })?;
            if probs.len() != tune.n() {
                return Err(Error::DimensionMismatch(probs.len(), tune.n()));
            }
            Some(
                tune_idx
                    .iter()
                    .map(|&i| {
                        let p = &probs[i];
                        match task.negative {
                            crate::ladder::NegativeSide::Label(k) => {
                                p[task.positive - 1] / (p[task.positive - 1] + p[k - 1])
                            }
                            crate::ladder::NegativeSide::Rest => p[task.positive - 1],
                        }
                    })
                    .collect(),
            )
        }
    };

    // Training-side task data; one training Gram and one tune×train kernel
    // block per sigma, shared across all lambdas and rungs.
    let support = Arc::new(train.features().select(&task.train_indices));
    let signed: Vec<f64> = task
        .train_indices
        .iter()
        .map(|&i| task.signed_label(train.labels()[i]).expect("task indices are task members"))
        .collect();
    let grams: Vec<(KernelSpec, Arc<crate::kernel::GramMatrix>, crate::kernel::GramMatrix)> = grid
        .sigmas
        .iter()
        .map(|&sigma| {
            let spec = KernelSpec::rbf(sigma)?;
            Ok((spec, Arc::new(gram_square(&support, &spec)?), gram(&tune_points, &support, &spec)?))
        })
        .collect::<Result<_>>()?;

    // λ sweeps, one per (σ, rung) unit.
    let pis = weight_grid.interior().to_vec();
    let units: Vec<(usize, usize)> =
        (0..grid.sigmas.len()).flat_map(|si| (0..pis.len()).map(move |pi| (si, pi))).collect();
    let lambdas_desc: Vec<f64> = grid.lambdas.iter().rev().cloned().collect();
    let n_tune = tune_points.n();

    let sweeps: Vec<Vec<std::result::Result<RungFit, String>>> = units
        .par_iter()
        .map(|&(si, pi_idx)| {
            let (spec, gram_tr, cross) = &grams[si];
            let pi = pis[pi_idx];
            let weights: Vec<f64> = signed.iter().map(|&r| if r > 0.0 { 1.0 - pi } else { pi }).collect();
            let mut warm: Option<Vec<f64>> = None;
            let mut out: Vec<std::result::Result<RungFit, String>> = Vec::with_capacity(lambdas_desc.len());
            for &lambda in &lambdas_desc {
                let attempt = WeightedBinaryProblem::new(
                    support.clone(),
                    *spec,
                    gram_tr.clone(),
                    signed.clone(),
                    weights.clone(),
                    lambda,
                )
                .and_then(|problem| match &warm {
                    Some(a) => solve_warm(&problem, solve_opts, a),
                    None => solve(&problem, solve_opts),
                });
                match attempt {
                    Ok((f, sol)) => {
                        let fvals: Vec<f64> = (0..n_tune)
                            .map(|p| f.evaluate_with_kernel_row(cross.row(p)))
                            .collect();
                        warm = Some(sol.alphas);
                        out.push(Ok(RungFit { coeffs: f.coeffs, intercept: f.intercept, fvals }));
                    }
                    Err(e) => out.push(Err(e.to_string())),
                }
            }
            // store by ascending lambda to match the candidate order
            out.reverse();
            out
        })
        .collect();

    // Score every candidate; lambdas ascend in the outer loop so the strict
    // minimum keeps the (smaller λ, then smaller σ) tie-break.
    let unit_index = |si: usize, pi_idx: usize| si * pis.len() + pi_idx;
    let mut scores = Vec::with_capacity(grid.lambdas.len() * grid.sigmas.len());
    let mut selected: Option<(f64, f64, f64)> = None;
    for (li, &lambda) in grid.lambdas.iter().enumerate() {
        for (si, &sigma) in grid.sigmas.iter().enumerate() {
            let mut failure: Option<String> = None;
            for pi_idx in 0..pis.len() {
                if let Err(e) = &sweeps[unit_index(si, pi_idx)][li] {
                    failure = Some(format!("rung at pi={}: {e}", pis[pi_idx]));
                    break;
                }
            }
            let score = match failure {
                Some(msg) => TuneScore { lambda, sigma, score: None, error: Some(msg) },
                None => {
                    let mut values = vec![0.0; pis.len()];
                    let mut q_hat = Vec::with_capacity(n_tune);
                    for p in 0..n_tune {
                        for pi_idx in 0..pis.len() {
                            values[pi_idx] =
                                sweeps[unit_index(si, pi_idx)][li].as_ref().unwrap().fvals[p];
                        }
                        q_hat.push(prob_from_values(weight_grid, &values));
                    }
                    let s = match grid.criterion {
                        TuneCriterion::Egkl => egkl(&tune_signed, &q_hat),
                        TuneCriterion::Gkl => gkl(q_true.as_ref().unwrap(), &q_hat),
                    };
                    match s {
                        Ok(v) => TuneScore { lambda, sigma, score: Some(v), error: None },
                        Err(e) => TuneScore { lambda, sigma, score: None, error: Some(e.to_string()) },
                    }
                }
            };
            if let Some(v) = score.score {
                let better = match selected {
                    None => true,
                    Some((_, _, best)) => v < best,
                };
                if better {
                    selected = Some((lambda, sigma, v));
                }
            }
            scores.push(score);
        }
    }

    let (lambda, sigma, _) = selected.ok_or_else(|| {
        let first = scores.iter().find_map(|s| s.error.clone()).unwrap_or_else(|| "empty grid".into());
        Error::InvalidInput(format!("all candidates failed for task {}: {first}", task.name()))
    })?;

    // Assemble the winning ladder from the stored rungs.
    let si = grid.sigmas.iter().position(|&s| s == sigma).unwrap();
    let li = grid.lambdas.iter().position(|&l| l == lambda).unwrap();
    let spec = grams[si].0;
    let rungs: Vec<DecisionFunction> = (0..pis.len())
        .map(|pi_idx| {
            let fit = sweeps[unit_index(si, pi_idx)][li].as_ref().unwrap();
            DecisionFunction {
                support: support.clone(),
                kernel: spec,
                coeffs: fit.coeffs.clone(),
                intercept: fit.intercept,
            }
        })
        .collect();
    let ladder = ClassifierLadder {
        positive: task.positive,
        negative: task.negative,
        grid: weight_grid.clone(),
        rungs,
        lambda,
        kernel: spec,
    };
    let report =
        TuneReport { task: task.name(), criterion: grid.criterion, scores, selected: (lambda, sigma) };
    Ok((ladder, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_example1;

    #[test]
    fn gkl_identity_is_zero() {
        let q = [0.2, 0.5, 0.9];
        assert_eq!(gkl(&q, &q).unwrap(), 0.0);
    }

    #[test]
    fn gkl_hand_value() {
        let v = gkl(&[0.5], &[0.25]).unwrap();
        assert!((v - 0.1438410362258904).abs() < 1e-12);
    }

    #[test]
    fn gkl_nonnegative() {
        let qs = [0.05, 0.3, 0.5, 0.7, 0.95];
        for &q in &qs {
            for &qh in &qs {
                let v = gkl(&[q], &[qh]).unwrap();
                if (q - qh).abs() < 1e-15 {
                    assert!(v.abs() < 1e-14);
                } else {
                    assert!(v > 0.0);
                }
            }
        }
    }

    #[test]
    fn egkl_hand_values() {
        assert!((egkl(&[1.0], &[0.8]).unwrap() - 0.2231435513142097).abs() < 1e-12);
        assert!((egkl(&[-1.0], &[0.5]).unwrap() - 0.6931471805599453).abs() < 1e-12);
    }

    #[test]
    fn egkl_balanced_minimized_at_half() {
        let labels = [1.0, -1.0, 1.0, -1.0];
        let at = |q: f64| egkl(&labels, &[q; 4]).unwrap();
        let center = at(0.5);
        for q in [0.3, 0.45, 0.55, 0.7] {
            assert!(at(q) > center);
        }
    }

    #[test]
    fn egkl_rejects_boundary_estimates() {
        assert!(egkl(&[1.0], &[1.0]).is_err());
        assert!(egkl(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn lambda_ladder_shape() {
        let l = default_lambda_ladder();
        assert_eq!(l.len(), 33);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert!(l.contains(&5.5e-8));
        assert!(l.contains(&1e-8));
        assert_eq!(*l.last().unwrap(), 1e8);
        // one {1, 5.5} pair per decade below the top
        for k in -8..=7 {
            assert!(l.contains(&10f64.powi(k)));
            assert!(l.contains(&(5.5 * 10f64.powi(k))));
        }
    }

    #[test]
    fn default_grid_shape() {
        let (ds, _) = gen_example1(60, 5).unwrap();
        let g = TuneGrid::default_for(&ds, TuneCriterion::Egkl).unwrap();
        assert_eq!(g.sigmas.len(), 6);
        assert_eq!(g.lambdas.len(), 33);
        assert_eq!(g.lambdas.len() * g.sigmas.len(), 198);
        let sigma_m = crate::kernel::median_sigma(&ds).unwrap();
        assert!((g.sigmas[0] - sigma_m / 4.0).abs() < 1e-12);
        assert!((g.sigmas[5] - 6.0 * sigma_m / 4.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_grid_from_known_median() {
        // sigma_m = 4 → {1, 2, 3, 4, 5, 6}
        let ds = crate::data::LabeledDataset::from_rows(&[vec![0.0], vec![4.0]], &[1, 2]).unwrap();
        let g = TuneGrid::default_for(&ds, TuneCriterion::Egkl).unwrap();
        let expect = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        for (a, b) in g.sigmas.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_candidate_is_selected() {
        let (train, _) = gen_example1(60, 1).unwrap();
        let (tune, _) = gen_example1(60, 2).unwrap();
        let task = BinaryTask::pair(&train, 1, 2).unwrap();
        let wg = WeightGrid::uniform(4).unwrap();
        let grid = TuneGrid::new(vec![0.01], vec![1.3], TuneCriterion::Egkl).unwrap();
        let (ladder, report) = tune_task(&train, &tune, &task, &wg, &grid, None, &SolveOptions::default()).unwrap();
        assert_eq!(report.selected, (0.01, 1.3));
        assert_eq!(report.scores.len(), 1);
        assert!(report.scores[0].score.is_some());
        assert_eq!(ladder.lambda, 0.01);
    }

    #[test]
    fn selection_is_deterministic_under_ties() {
        // constant estimates arise for degenerate grids; scores tie, so the
        // smaller lambda then smaller sigma must win
        let (train, _) = gen_example1(40, 3).unwrap();
        let (tune, _) = gen_example1(40, 4).unwrap();
        let task = BinaryTask::pair(&train, 1, 2).unwrap();
        let wg = WeightGrid::uniform(2).unwrap();
        let grid = TuneGrid::new(vec![1e6, 1e7], vec![2.0, 3.0], TuneCriterion::Egkl).unwrap();
        let (_, report) = tune_task(&train, &tune, &task, &wg, &grid, None, &SolveOptions::default()).unwrap();
        let best = report.scores.iter().filter_map(|s| s.score).fold(f64::INFINITY, f64::min);
        let tied: Vec<_> = report
            .scores
            .iter()
            .filter(|s| s.score.is_some() && (s.score.unwrap() - best).abs() < 1e-15)
            .collect();
        if tied.len() > 1 {
            assert_eq!(report.selected, (tied[0].lambda, tied[0].sigma));
        }
        let rerun = tune_task(&train, &tune, &task, &wg, &grid, None, &SolveOptions::default()).unwrap().1;
        assert_eq!(rerun.selected, report.selected);
    }
}
