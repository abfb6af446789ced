//! Fitting a scheme end to end: task decomposition, per-task (λ, σ)
//! selection on the tuning split, and assembly into a [`SchemeModel`].

use std::time::Instant;

use rayon::prelude::*;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::kernel::median_sigma;
use crate::ladder::{BinaryTask, WeightGrid};
use crate::model::SchemeModel;
use crate::schemes::{select_baseline_b1, select_baseline_b2, BaselineChoice, SchemeKind, VoteRule};
use crate::solver::SolveOptions;
use crate::tuning::{default_lambda_ladder, tune_task, TuneCriterion, TuneGrid, TuneReport};

/// Knobs for one fit. Defaults follow the standard protocol: EGKL tuning,
/// M = ⌊√n⌋, σ grid around the median cross-class distance, the 33-value λ
/// ladder, raw one-vs-all probabilities.
#[derive(Clone, Debug)]
pub struct FitOptions {
    pub criterion: TuneCriterion,
    pub m_override: Option<usize>,
    pub lambda_override: Option<Vec<f64>>,
    pub sigma_override: Option<Vec<f64>>,
    pub solve: SolveOptions,
    pub normalize_ova: bool,
    pub vote_rule: VoteRule,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            criterion: TuneCriterion::Egkl,
            m_override: None,
            lambda_override: None,
            sigma_override: None,
            solve: SolveOptions::default(),
            normalize_ova: false,
            vote_rule: VoteRule::GtHalf,
        }
    }
}

/// A trained model with its tuning reports and wall-clock fit time.
#[derive(Clone, Debug)]
pub struct FittedScheme {
    pub model: SchemeModel,
    pub reports: Vec<TuneReport>,
    pub fit_seconds: f64,
}

/// The binary tasks a scheme trains.
pub fn scheme_tasks(dataset: &LabeledDataset, kind: SchemeKind, baseline: Option<&BaselineChoice>) -> Result<Vec<BinaryTask>> {
    let k = dataset.num_classes();
    match kind {
        SchemeKind::Pairwise => {
            let mut tasks = Vec::with_capacity(k * (k - 1) / 2);
            for j in 1..=k {
                for j2 in (j + 1)..=k {
                    tasks.push(BinaryTask::pair(dataset, j, j2)?);
                }
            }
            Ok(tasks)
        }
        SchemeKind::Baseline1 | SchemeKind::Baseline2 | SchemeKind::BaselinePairwise1 | SchemeKind::BaselinePairwise2 => {
            let k_star = baseline.expect("baseline schemes select k* first").k_star;
            let mut tasks = Vec::with_capacity(k - 1);
            for j in 1..=k {
                if j != k_star {
                    tasks.push(BinaryTask::pair(dataset, j, k_star)?);
                }
            }
            Ok(tasks)
        }
        SchemeKind::OneVsAll => (1..=k).map(|j| BinaryTask::one_vs_rest(dataset, j)).collect(),
    }
}

/// Fit one scheme on the training split, selecting (λ, σ) per task on the
/// tuning split. `truth_tune` carries the true class probabilities at the
/// tuning points and is required for GKL tuning.
pub fn fit_scheme(
    train: &LabeledDataset,
    tune: &LabeledDataset,
    kind: SchemeKind,
    truth_tune: Option<&[Vec<f64>]>,
    opts: &FitOptions,
) -> Result<FittedScheme> {
    let start = Instant::now();
    if train.num_classes() != tune.num_classes() {
        return Err(Error::DimensionMismatch(train.num_classes(), tune.num_classes()));
    }
    if train.dim() != tune.dim() {
        return Err(Error::DimensionMismatch(train.dim(), tune.dim()));
    }
    if train.num_classes() < 3 {
        return Err(Error::InvalidInput("multiclass schemes need K >= 3".into()));
    }

    let weight_grid = match opts.m_override {
        Some(m) => WeightGrid::uniform(m)?,
        None => WeightGrid::default_for(train.n())?,
    };
    let lambdas = opts.lambda_override.clone().unwrap_or_else(default_lambda_ladder);
    let sigmas = match &opts.sigma_override {
        Some(s) => s.clone(),
        None => {
            let sigma_m = median_sigma(train)?;
            (1..=6).map(|i| i as f64 * sigma_m / 4.0).collect()
        }
    };
    let grid = TuneGrid::new(lambdas, sigmas, opts.criterion)?;

    let baseline = match kind {
        SchemeKind::Baseline1 | SchemeKind::BaselinePairwise1 => Some(select_baseline_b1(train)?),
        SchemeKind::Baseline2 | SchemeKind::BaselinePairwise2 => Some(select_baseline_b2(train)?),
        _ => None,
    };
    let tasks = scheme_tasks(train, kind, baseline.as_ref())?;

    let tuned: Vec<_> = tasks
        .par_iter()
        .map(|task| tune_task(train, tune, task, &weight_grid, &grid, truth_tune, &opts.solve))
        .collect::<Result<_>>()?;

    let mut ladders = Vec::with_capacity(tuned.len());
    let mut reports = Vec::with_capacity(tuned.len());
    for (ladder, report) in tuned {
        ladders.push(ladder);
        reports.push(report);
    }

    let model = SchemeModel {
        kind,
        num_classes: train.num_classes(),
        dim: train.dim(),
        baseline,
        ladders,
        normalize_ova: opts.normalize_ova,
        vote_rule: opts.vote_rule,
    };
    Ok(FittedScheme { model, reports, fit_seconds: start.elapsed().as_secs_f64() })
}
