//! Trained scheme models: per-task ladders plus the assembly recipe, with a
//! versioned JSON bundle format for persistence. A bundle is self-contained;
//! prediction needs nothing beyond the stored support points.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::ladder::{ClassifierLadder, NegativeSide, WeightGrid};
use crate::schemes::{
    baseline_probs, classify_max_prob, dynamic_baseline, pairwise_coupling_probs, reconstruct_pairwise,
    BaselineChoice, PairwiseTable, ProbEstimate, SchemeKind, VoteRule,
};
use crate::solver::DecisionFunction;
use crate::types::PointMatrix;

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// A fully trained multiclass probability model.
#[derive(Clone, Debug)]
pub struct SchemeModel {
    pub kind: SchemeKind,
    pub num_classes: usize,
    pub dim: usize,
    pub baseline: Option<BaselineChoice>,
    pub ladders: Vec<ClassifierLadder>,
    pub normalize_ova: bool,
    pub vote_rule: VoteRule,
}

/// Batch prediction output.
#[derive(Clone, Debug)]
pub struct Prediction {
    pub probs: Vec<ProbEstimate>,
    pub labels_max_prob: Vec<usize>,
    /// Present only for schemes carrying a full pairwise table.
    pub labels_max_vote: Option<Vec<usize>>,
}

impl SchemeModel {
    fn ladder_for_pair(&self, j: usize) -> Result<&ClassifierLadder> {
        self.ladders
            .iter()
            .find(|l| l.positive == j)
            .ok_or_else(|| Error::InvalidInput(format!("no ladder trained for class {j}")))
    }

    /// The per-point pairwise table, when the scheme defines one.
    pub fn table_at(&self, x: &[f64]) -> Result<Option<PairwiseTable>> {
        match self.kind {
            SchemeKind::Pairwise => {
                let mut table = PairwiseTable::new(self.num_classes);
                for ladder in &self.ladders {
                    let NegativeSide::Label(k) = ladder.negative else {
                        return Err(Error::InvalidInput("pairwise model holds a rest ladder".into()));
                    };
                    table.set(ladder.positive, k, ladder.pairwise_prob(x)?)?;
                }
                Ok(Some(table))
            }
            SchemeKind::BaselinePairwise1 | SchemeKind::BaselinePairwise2 => {
                let k_star = self.baseline.as_ref().expect("baseline schemes store their choice").k_star;
                let mut q_col = vec![f64::NAN; self.num_classes];
                for ladder in &self.ladders {
                    q_col[ladder.positive - 1] = ladder.pairwise_prob(x)?;
                }
                let mut table = PairwiseTable::new(self.num_classes);
                for j in 1..=self.num_classes {
                    if j == k_star {
                        continue;
                    }
                    table.set(j, k_star, q_col[j - 1])?;
                    for j2 in (j + 1)..=self.num_classes {
                        if j2 == k_star {
                            continue;
                        }
                        table.set(j, j2, reconstruct_pairwise(q_col[j - 1], q_col[j2 - 1])?)?;
                    }
                }
                Ok(Some(table))
            }
            _ => Ok(None),
        }
    }

    /// Class probabilities at one point.
    pub fn probs(&self, x: &[f64]) -> Result<ProbEstimate> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(x.len(), self.dim));
        }
        match self.kind {
            SchemeKind::Pairwise | SchemeKind::BaselinePairwise1 | SchemeKind::BaselinePairwise2 => {
                let table = self.table_at(x)?.expect("full-table scheme");
                let baseline = dynamic_baseline(&table, self.vote_rule);
                let mut est = pairwise_coupling_probs(&table, baseline, self.kind)?;
                est.scheme = self.kind;
                Ok(est)
            }
            SchemeKind::Baseline1 | SchemeKind::Baseline2 => {
                let k_star = self.baseline.as_ref().expect("baseline schemes store their choice").k_star;
                let mut q_col = vec![1.0; self.num_classes];
                for ladder in &self.ladders {
                    q_col[ladder.positive - 1] = ladder.pairwise_prob(x)?;
                }
                let mut est = baseline_probs(&q_col, k_star)?;
                est.scheme = self.kind;
                Ok(est)
            }
            SchemeKind::OneVsAll => {
                let mut probs = vec![0.0; self.num_classes];
                for j in 1..=self.num_classes {
                    probs[j - 1] = self.ladder_for_pair(j)?.pairwise_prob(x)?;
                }
                if self.normalize_ova {
                    let sum: f64 = probs.iter().sum();
                    for p in &mut probs {
                        *p /= sum;
                    }
                }
                Ok(ProbEstimate { probs, scheme: self.kind, normalized: self.normalize_ova })
            }
        }
    }

    /// Probabilities for every row, in input order.
    pub fn probs_batch(&self, points: &PointMatrix) -> Result<Vec<ProbEstimate>> {
        (0..points.n()).into_par_iter().map(|i| self.probs(points.row(i))).collect()
    }

    /// Probabilities plus argmax labels and, for full-table schemes,
    /// max-vote labels.
    pub fn predict(&self, points: &PointMatrix) -> Result<Prediction> {
        let per_point: Vec<(ProbEstimate, usize, Option<usize>)> = (0..points.n())
            .into_par_iter()
            .map(|i| -> Result<_> {
                let x = points.row(i);
                let est = self.probs(x)?;
                let label = classify_max_prob(&est);
                let vote = match self.table_at(x)? {
                    Some(table) => Some(crate::schemes::classify_max_vote(&table)?),
                    None => None,
                };
                Ok((est, label, vote))
            })
            .collect::<Result<_>>()?;
        let mut probs = Vec::with_capacity(per_point.len());
        let mut labels = Vec::with_capacity(per_point.len());
        let mut votes = Vec::with_capacity(per_point.len());
        for (est, label, vote) in per_point {
            probs.push(est);
            labels.push(label);
            if let Some(v) = vote {
                votes.push(v);
            }
        }
        let labels_max_vote = if self.kind.has_full_table() { Some(votes) } else { None };
        Ok(Prediction { probs, labels_max_prob: labels, labels_max_vote })
    }
}

// ---------------------------------------------------------------------------
// Bundle format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RungRecord {
    coeffs: Vec<f64>,
    intercept: f64,
}

#[derive(Serialize, Deserialize)]
struct LadderRecord {
    positive: usize,
    /// None encodes the pooled-rest side.
    negative: Option<usize>,
    lambda: f64,
    kernel: KernelSpec,
    pis: Vec<f64>,
    support: PointMatrix,
    rungs: Vec<RungRecord>,
}

/// Serialized model; numbers survive a JSON round trip bit-exactly.
#[derive(Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub scheme: SchemeKind,
    pub num_classes: usize,
    pub dim: usize,
    pub baseline: Option<BaselineChoice>,
    pub normalize_ova: bool,
    pub vote_rule: VoteRule,
    tasks: Vec<LadderRecord>,
}

impl ModelBundle {
    pub fn from_model(model: &SchemeModel) -> Self {
        let tasks = model
            .ladders
            .iter()
            .map(|l| LadderRecord {
                positive: l.positive,
                negative: match l.negative {
                    NegativeSide::Label(k) => Some(k),
                    NegativeSide::Rest => None,
                },
                lambda: l.lambda,
                kernel: l.kernel,
                pis: l.grid.pis().to_vec(),
                support: (**l.support()).clone(),
                rungs: l
                    .rungs
                    .iter()
                    .map(|r| RungRecord { coeffs: r.coeffs.clone(), intercept: r.intercept })
                    .collect(),
            })
            .collect();
        ModelBundle {
            format_version: BUNDLE_FORMAT_VERSION,
            scheme: model.kind,
            num_classes: model.num_classes,
            dim: model.dim,
            baseline: model.baseline.clone(),
            normalize_ova: model.normalize_ova,
            vote_rule: model.vote_rule,
            tasks,
        }
    }

    pub fn into_model(self) -> Result<SchemeModel> {
        if self.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.format_version));
        }
        let mut ladders = Vec::with_capacity(self.tasks.len());
        for rec in self.tasks {
            let grid = WeightGrid::from_pis(rec.pis)?;
            if rec.rungs.len() != grid.m() - 1 {
                return Err(Error::InvalidInput(format!(
                    "ladder for class {} has {} rungs for M={}",
                    rec.positive,
                    rec.rungs.len(),
                    grid.m()
                )));
            }
            let support = Arc::new(rec.support);
            let rungs = rec
                .rungs
                .into_iter()
                .map(|r| DecisionFunction {
                    support: support.clone(),
                    kernel: rec.kernel,
                    coeffs: r.coeffs,
                    intercept: r.intercept,
                })
                .collect();
            ladders.push(ClassifierLadder {
                positive: rec.positive,
                negative: match rec.negative {
                    Some(k) => NegativeSide::Label(k),
                    None => NegativeSide::Rest,
                },
                grid,
                rungs,
                lambda: rec.lambda,
                kernel: rec.kernel,
            });
        }
        Ok(SchemeModel {
            kind: self.scheme,
            num_classes: self.num_classes,
            dim: self.dim,
            baseline: self.baseline,
            ladders,
            normalize_ova: self.normalize_ova,
            vote_rule: self.vote_rule,
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        let bundle: ModelBundle = serde_json::from_reader(std::io::BufReader::new(file))?;
        Ok(bundle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::WeightGrid;

    fn constant_ladder(positive: usize, negative: NegativeSide, value: f64, m: usize) -> ClassifierLadder {
        let support = Arc::new(PointMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap());
        let rungs = (0..m - 1)
            .map(|_| DecisionFunction {
                support: support.clone(),
                kernel: KernelSpec::Linear,
                coeffs: vec![0.0],
                intercept: value,
            })
            .collect();
        ClassifierLadder {
            positive,
            negative,
            grid: WeightGrid::uniform(m).unwrap(),
            rungs,
            lambda: 1.0,
            kernel: KernelSpec::Linear,
        }
    }

    #[test]
    fn ova_boundary_convention() {
        // class 1 all-positive rungs, others all-negative, M=5 → (0.9, 0.1, 0.1)
        let model = SchemeModel {
            kind: SchemeKind::OneVsAll,
            num_classes: 3,
            dim: 2,
            baseline: None,
            ladders: vec![
                constant_ladder(1, NegativeSide::Rest, 1.0, 5),
                constant_ladder(2, NegativeSide::Rest, -1.0, 5),
                constant_ladder(3, NegativeSide::Rest, -1.0, 5),
            ],
            normalize_ova: false,
            vote_rule: VoteRule::GtHalf,
        };
        let est = model.probs(&[0.0, 0.0]).unwrap();
        assert!(!est.normalized);
        let expect = [0.9, 0.1, 0.1];
        for (a, b) in est.probs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bundle_version_gate() {
        let model = SchemeModel {
            kind: SchemeKind::OneVsAll,
            num_classes: 3,
            dim: 2,
            baseline: None,
            ladders: vec![constant_ladder(1, NegativeSide::Rest, 1.0, 3)],
            normalize_ova: false,
            vote_rule: VoteRule::GtHalf,
        };
        let mut bundle = ModelBundle::from_model(&model);
        bundle.format_version = 99;
        assert!(matches!(bundle.into_model(), Err(Error::UnsupportedVersion(99))));
    }
}
