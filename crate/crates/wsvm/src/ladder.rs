//! Weighted-classifier ladders: train one binary task across the weight grid
//! and read a conditional probability off the rung signs.
//!
//! For weights 0 = π₁ < π₂ < … < π_M < π_{M+1} = 1 a classifier is trained at
//! every interior π. By construction the rung at π₁ counts as positive and
//! the rung at π_{M+1} as negative at every point, so at any x
//!
//! ```text
//!   q̂(x) = ½ [ min{π : f̂_π(x) < 0} + max{π : f̂_π(x) > 0} ]
//! ```
//!
//! always lands in [π₂/2, (π_M + 1)/2], never exactly 0 or 1. A rung value of
//! exactly zero is treated as negative.

use std::sync::Arc;

use rayon::prelude::*;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::kernel::{gram_square, GramMatrix, KernelSpec};
use crate::solver::{solve, DecisionFunction, SolveOptions, WeightedBinaryProblem};
use crate::types::PointMatrix;

/// The weight sequence π_j = (j-1)/M for j = 1..=M+1, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightGrid {
    m: usize,
    pis: Vec<f64>,
}

impl WeightGrid {
    /// Uniform grid with the given M (at least 2).
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("weight grid needs M >= 2, got {m}")));
        }
        let pis = (0..=m).map(|j| j as f64 / m as f64).collect();
        Ok(Self { m, pis })
    }

    /// Rebuild a grid from a stored weight sequence (endpoints included).
    pub fn from_pis(pis: Vec<f64>) -> Result<Self> {
        if pis.len() < 3 {
            return Err(Error::InvalidParameter("weight sequence needs at least 3 entries".into()));
        }
        if pis[0] != 0.0 || *pis.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter("weight sequence must run from 0 to 1".into()));
        }
        if pis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("weight sequence must be strictly increasing".into()));
        }
        Ok(Self { m: pis.len() - 1, pis })
    }

    /// Default precision M = ⌊√n⌋ for a training set of size n.
    pub fn default_for(n_train: usize) -> Result<Self> {
        if n_train < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 training points, got {n_train}")));
        }
        Self::uniform((n_train as f64).sqrt().floor() as usize)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// All M+1 weights including the 0 and 1 endpoints.
    pub fn pis(&self) -> &[f64] {
        &self.pis
    }

    /// The M-1 trained weights π₂..π_M.
    pub fn interior(&self) -> &[f64] {
        &self.pis[1..self.m]
    }

    /// Smallest attainable probability estimate π₂/2.
    pub fn q_min(&self) -> f64 {
        self.pis[1] / 2.0
    }

    /// Largest attainable probability estimate (π_M + 1)/2.
    pub fn q_max(&self) -> f64 {
        (self.pis[self.m - 1] + 1.0) / 2.0
    }
}

/// Which class plays the negative side of a binary task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativeSide {
    /// A single class label.
    Label(usize),
    /// The pooled complement of the positive class.
    Rest,
}

/// One binary subproblem: a positive class against either a single class or
/// the pooled rest, with the participating training indices.
#[derive(Clone, Debug)]
pub struct BinaryTask {
    pub positive: usize,
    pub negative: NegativeSide,
    pub train_indices: Vec<usize>,
}

impl BinaryTask {
    pub fn pair(dataset: &LabeledDataset, j: usize, k: usize) -> Result<Self> {
        if j == k {
            return Err(Error::InvalidParameter(format!("pair task needs distinct classes, got ({j}, {k})")));
        }
        if dataset.class(j).is_empty() {
            return Err(Error::EmptyClass(j));
        }
        if dataset.class(k).is_empty() {
            return Err(Error::EmptyClass(k));
        }
        let train_indices =
            (0..dataset.n()).filter(|&i| dataset.labels()[i] == j || dataset.labels()[i] == k).collect();
        Ok(Self { positive: j, negative: NegativeSide::Label(k), train_indices })
    }

    pub fn one_vs_rest(dataset: &LabeledDataset, j: usize) -> Result<Self> {
        if dataset.class(j).is_empty() {
            return Err(Error::EmptyClass(j));
        }
        if dataset.class(j).len() == dataset.n() {
            return Err(Error::InvalidInput(format!("class {j} covers the whole dataset")));
        }
        Ok(Self { positive: j, negative: NegativeSide::Rest, train_indices: (0..dataset.n()).collect() })
    }

    /// +1 / -1 membership of a label in this task, None when it does not
    /// participate.
    pub fn signed_label(&self, label: usize) -> Option<f64> {
        match self.negative {
            NegativeSide::Label(k) => {
                if label == self.positive {
                    Some(1.0)
                } else if label == k {
                    Some(-1.0)
                } else {
                    None
                }
            }
            NegativeSide::Rest => Some(if label == self.positive { 1.0 } else { -1.0 }),
        }
    }

    pub fn name(&self) -> String {
        match self.negative {
            NegativeSide::Label(k) => format!("{}|{}", self.positive, k),
            NegativeSide::Rest => format!("{}|rest", self.positive),
        }
    }
}

/// The trained rungs of one binary task, all sharing one (λ, σ).
#[derive(Clone, Debug)]
pub struct ClassifierLadder {
    pub positive: usize,
    pub negative: NegativeSide,
    pub grid: WeightGrid,
    /// One decision function per interior π, in grid order.
    pub rungs: Vec<DecisionFunction>,
    pub lambda: f64,
    pub kernel: KernelSpec,
}

impl ClassifierLadder {
    pub fn support(&self) -> &Arc<PointMatrix> {
        &self.rungs[0].support
    }

    /// Rung values at x, sharing one kernel row across rungs.
    pub fn rung_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        let support = self.support();
        if x.len() != support.dim() {
            return Err(Error::DimensionMismatch(x.len(), support.dim()));
        }
        let krow: Vec<f64> = (0..support.n()).map(|i| self.kernel.eval_unchecked(support.row(i), x)).collect();
        Ok(self.rungs.iter().map(|f| f.evaluate_with_kernel_row(&krow)).collect())
    }

    /// The conditional probability estimate at x.
    pub fn pairwise_prob(&self, x: &[f64]) -> Result<f64> {
        Ok(self.prob_from_rung_values(&self.rung_values(x)?))
    }

    /// Probability from precomputed rung values (grid order).
    pub fn prob_from_rung_values(&self, values: &[f64]) -> f64 {
        prob_from_values(&self.grid, values)
    }

    /// Probabilities for a batch of points, in input order.
    pub fn pairwise_probs(&self, points: &PointMatrix) -> Result<Vec<f64>> {
        (0..points.n())
            .into_par_iter()
            .map(|i| self.pairwise_prob(points.row(i)))
            .collect()
    }

    /// True iff the rung sign sequence at x is not non-increasing, i.e. a
    /// negative rung is followed by a positive one at a larger π. Diagnostic
    /// only; finite-sample rungs may violate monotonicity.
    pub fn sign_violation(&self, x: &[f64]) -> Result<bool> {
        let values = self.rung_values(x)?;
        let mut seen_negative = false;
        for &v in &values {
            if v > 0.0 {
                if seen_negative {
                    return Ok(true);
                }
            } else {
                seen_negative = true;
            }
        }
        Ok(false)
    }

    /// Fraction of points whose rung signs are non-monotone in π.
    pub fn monotonicity_violation_rate(&self, points: &PointMatrix) -> Result<f64> {
        let mut violations = 0usize;
        for i in 0..points.n() {
            if self.sign_violation(points.row(i))? {
                violations += 1;
            }
        }
        Ok(violations as f64 / points.n() as f64)
    }
}

/// The probability readout for one point given the signed rung values in
/// grid order: ½[min{π : f < 0} + max{π : f > 0}], with the 0 endpoint
/// counting as positive, the 1 endpoint as negative, and exact zeros as
/// negative.
pub fn prob_from_values(grid: &WeightGrid, values: &[f64]) -> f64 {
    let pis = grid.pis();
    let mut min_neg = pis[grid.m()];
    let mut max_pos = pis[0];
    for (i, &v) in values.iter().enumerate() {
        let pi = pis[i + 1];
        if v > 0.0 {
            if pi > max_pos {
                max_pos = pi;
            }
        } else if pi < min_neg {
            min_neg = pi;
        }
    }
    0.5 * (min_neg + max_pos)
}

/// Train the ladder for one task: one weighted solve per interior π, all
/// sharing the given (λ, kernel).
pub fn train_ladder(
    dataset: &LabeledDataset,
    task: &BinaryTask,
    grid: &WeightGrid,
    lambda: f64,
    kernel: &KernelSpec,
    opts: &SolveOptions,
) -> Result<ClassifierLadder> {
    let support = Arc::new(dataset.features().select(&task.train_indices));
    let signed: Vec<f64> = task
        .train_indices
        .iter()
        .map(|&i| task.signed_label(dataset.labels()[i]).expect("task indices are task members"))
        .collect();
    let gram = Arc::new(gram_square(&support, kernel)?);
    train_ladder_on_gram(task, support, gram, &signed, grid, lambda, kernel, opts)
}

/// Ladder training against a precomputed Gram matrix, for callers that sweep
/// λ at a fixed kernel.
#[allow(clippy::too_many_arguments)]
pub fn train_ladder_on_gram(
    task: &BinaryTask,
    support: Arc<PointMatrix>,
    gram: Arc<GramMatrix>,
    signed_labels: &[f64],
    grid: &WeightGrid,
    lambda: f64,
    kernel: &KernelSpec,
    opts: &SolveOptions,
) -> Result<ClassifierLadder> {
    let mut rungs = Vec::with_capacity(grid.m() - 1);
    for &pi in grid.interior() {
        let weights: Vec<f64> = signed_labels.iter().map(|&y| if y > 0.0 { 1.0 - pi } else { pi }).collect();
        let problem = WeightedBinaryProblem::new(
            support.clone(),
            *kernel,
            gram.clone(),
            signed_labels.to_vec(),
            weights,
            lambda,
        )
        .map_err(|e| Error::RungFailure { pi, source: Box::new(e) })?;
        let (f, _) = solve(&problem, opts).map_err(|e| Error::RungFailure { pi, source: Box::new(e) })?;
        rungs.push(f);
    }
    Ok(ClassifierLadder {
        positive: task.positive,
        negative: task.negative,
        grid: grid.clone(),
        rungs,
        lambda,
        kernel: *kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_n25() {
        let g = WeightGrid::default_for(25).unwrap();
        assert_eq!(g.m(), 5);
        assert_eq!(g.interior(), &[0.2, 0.4, 0.6, 0.8]);
        assert_eq!(g.pis()[0], 0.0);
        assert_eq!(g.pis()[5], 1.0);
    }

    #[test]
    fn default_grid_n500() {
        let g = WeightGrid::default_for(500).unwrap();
        assert_eq!(g.m(), 22);
        assert_eq!(g.interior().len(), 21);
    }

    #[test]
    fn default_grid_minimal() {
        let g = WeightGrid::default_for(4).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.interior(), &[0.5]);
        assert!(WeightGrid::default_for(3).is_err());
    }

    fn synthetic_ladder(signs_by_pi: &[f64]) -> ClassifierLadder {
        // constant decision functions with the requested values
        let m = signs_by_pi.len() + 1;
        let support = Arc::new(PointMatrix::from_rows(&[vec![0.0]]).unwrap());
        let rungs = signs_by_pi
            .iter()
            .map(|&v| DecisionFunction {
                support: support.clone(),
                kernel: KernelSpec::Linear,
                coeffs: vec![0.0],
                intercept: v,
            })
            .collect();
        ClassifierLadder {
            positive: 1,
            negative: NegativeSide::Label(2),
            grid: WeightGrid::uniform(m).unwrap(),
            rungs,
            lambda: 1.0,
            kernel: KernelSpec::Linear,
        }
    }

    #[test]
    fn prob_from_signs_middle() {
        // M=5, signs (+,+,-,-) over π = .2,.4,.6,.8 → ½(0.6 + 0.4)
        let ladder = synthetic_ladder(&[1.0, 1.0, -1.0, -1.0]);
        assert!((ladder.pairwise_prob(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn prob_all_positive_hits_upper_bound() {
        let ladder = synthetic_ladder(&[1.0, 1.0, 1.0, 1.0]);
        assert!((ladder.pairwise_prob(&[0.0]).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn prob_all_negative_hits_lower_bound() {
        let ladder = synthetic_ladder(&[-1.0, -1.0, -1.0, -1.0]);
        assert!((ladder.pairwise_prob(&[0.0]).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn prob_non_monotone_signs() {
        // (+,-,+,-): min negative π = 0.4, max positive π = 0.6
        let ladder = synthetic_ladder(&[1.0, -1.0, 1.0, -1.0]);
        assert!((ladder.pairwise_prob(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(ladder.sign_violation(&[0.0]).unwrap());
        let mono = synthetic_ladder(&[1.0, 1.0, -1.0, -1.0]);
        assert!(!mono.sign_violation(&[0.0]).unwrap());
    }

    #[test]
    fn zero_rung_counts_as_negative() {
        let ladder = synthetic_ladder(&[1.0, 0.0, -1.0, -1.0]);
        // negative set {0.4, 0.6, 0.8, 1.0}, positive set {0, 0.2}
        assert!((ladder.pairwise_prob(&[0.0]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn trained_ladder_reproduces_hand_solved_rung() {
        // symmetric separable pair; the π = 0.5 rung is the hand-solved
        // two-point solver problem
        let ds = LabeledDataset::from_rows(&[vec![-1.0], vec![1.0]], &[2, 1]).unwrap();
        let task = BinaryTask::pair(&ds, 1, 2).unwrap();
        let grid = WeightGrid::uniform(2).unwrap();
        let ladder =
            train_ladder(&ds, &task, &grid, 0.1, &KernelSpec::Linear, &SolveOptions::default()).unwrap();
        assert_eq!(ladder.rungs.len(), 1);
        let f = &ladder.rungs[0];
        assert!((f.evaluate(&[0.3]).unwrap() - 0.3).abs() < 1e-8);
    }

    #[test]
    fn ladder_training_is_deterministic_and_shares_support() {
        let (ds, _) = crate::data::gen_example1(40, 7).unwrap();
        let task = BinaryTask::pair(&ds, 1, 2).unwrap();
        let grid = WeightGrid::uniform(4).unwrap();
        let kernel = KernelSpec::rbf(1.0).unwrap();
        let opts = SolveOptions::default();
        let a = train_ladder(&ds, &task, &grid, 0.01, &kernel, &opts).unwrap();
        let b = train_ladder(&ds, &task, &grid, 0.01, &kernel, &opts).unwrap();
        for (ra, rb) in a.rungs.iter().zip(&b.rungs) {
            assert_eq!(ra.coeffs, rb.coeffs);
            assert!(ra.intercept == rb.intercept);
        }
        for r in &a.rungs {
            assert!(Arc::ptr_eq(&r.support, a.support()));
        }
        assert_eq!(a.support().n(), task.train_indices.len());
    }

    #[test]
    fn output_range_respected_on_trained_ladder() {
        let (ds, _) = crate::data::gen_example1(60, 3).unwrap();
        let task = BinaryTask::pair(&ds, 1, 4).unwrap();
        let grid = WeightGrid::uniform(5).unwrap();
        let kernel = KernelSpec::rbf(1.5).unwrap();
        let ladder = train_ladder(&ds, &task, &grid, 1e-3, &kernel, &SolveOptions::default()).unwrap();
        let probs = ladder.pairwise_probs(ds.features()).unwrap();
        for q in probs {
            assert!(q >= ladder.grid.q_min() - 1e-15 && q <= ladder.grid.q_max() + 1e-15);
        }
    }

    #[test]
    fn grid_refinement_changes_prob_by_at_most_old_spacing() {
        // rungs derived from a fixed latent probability p(x): f_π(x) = p(x) − π
        let latent = |x: f64| 0.15 + 0.07 * x; // p ∈ (0,1) on the test range
        let build = |m: usize, x: f64| -> f64 {
            let support = Arc::new(PointMatrix::from_rows(&[vec![0.0]]).unwrap());
            let grid = WeightGrid::uniform(m).unwrap();
            let rungs = grid
                .interior()
                .iter()
                .map(|&pi| DecisionFunction {
                    support: support.clone(),
                    kernel: KernelSpec::Linear,
                    coeffs: vec![0.0],
                    intercept: latent(x) - pi,
                })
                .collect();
            let ladder = ClassifierLadder {
                positive: 1,
                negative: NegativeSide::Label(2),
                grid,
                rungs,
                lambda: 1.0,
                kernel: KernelSpec::Linear,
            };
            ladder.pairwise_prob(&[x]).unwrap()
        };
        for m in [4usize, 8, 16] {
            let spacing = 1.0 / m as f64;
            for i in 0..50 {
                let x = i as f64 / 5.0;
                let a = build(m, x);
                let b = build(2 * m, x);
                assert!((a - b).abs() <= spacing + 1e-12, "m={m} x={x}: {a} vs {b}");
            }
        }
    }
}
