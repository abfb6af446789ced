//! Assembling pairwise conditional probabilities into K-class probability
//! estimates: pairwise coupling, baseline learning with a fixed reference
//! class, the algebraic pairwise reconstruction, and one-vs-all readout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::types::euclidean;

/// The learning schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Pairwise,
    Baseline1,
    Baseline2,
    BaselinePairwise1,
    BaselinePairwise2,
    OneVsAll,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] = [
        SchemeKind::Pairwise,
        SchemeKind::Baseline1,
        SchemeKind::Baseline2,
        SchemeKind::BaselinePairwise1,
        SchemeKind::BaselinePairwise2,
        SchemeKind::OneVsAll,
    ];

    /// Short table label (P-SVM, B1-SVM, ...).
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Pairwise => "P-SVM",
            SchemeKind::Baseline1 => "B1-SVM",
            SchemeKind::Baseline2 => "B2-SVM",
            SchemeKind::BaselinePairwise1 => "BP1-SVM",
            SchemeKind::BaselinePairwise2 => "BP2-SVM",
            SchemeKind::OneVsAll => "A-SVM",
        }
    }

    /// Whether prediction yields a full pairwise table (and therefore a
    /// max-vote label).
    pub fn has_full_table(&self) -> bool {
        matches!(self, SchemeKind::Pairwise | SchemeKind::BaselinePairwise1 | SchemeKind::BaselinePairwise2)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::Pairwise => "pairwise",
            SchemeKind::Baseline1 => "b1",
            SchemeKind::Baseline2 => "b2",
            SchemeKind::BaselinePairwise1 => "bp1",
            SchemeKind::BaselinePairwise2 => "bp2",
            SchemeKind::OneVsAll => "ova",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pairwise" | "p" | "p-svm" => Ok(SchemeKind::Pairwise),
            "b1" | "b1-svm" => Ok(SchemeKind::Baseline1),
            "b2" | "b2-svm" => Ok(SchemeKind::Baseline2),
            "bp1" | "bp1-svm" => Ok(SchemeKind::BaselinePairwise1),
            "bp2" | "bp2-svm" => Ok(SchemeKind::BaselinePairwise2),
            "ova" | "a" | "a-svm" | "ova-svm" => Ok(SchemeKind::OneVsAll),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// How the per-point baseline class is voted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoteRule {
    /// Count pairwise wins (q̂ strictly above ½); ties by probability sum,
    /// then smaller label.
    GtHalf,
    /// Maximize the smallest own-side probability across the row.
    MinDenominator,
}

impl FromStr for VoteRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gt-half" => Ok(VoteRule::GtHalf),
            "min-denominator" => Ok(VoteRule::MinDenominator),
            other => Err(Error::InvalidParameter(format!("unknown vote rule {other:?}"))),
        }
    }
}

/// Per-point table of q̂_{j|(j,j')} for ordered class pairs, closed under
/// q̂_{j'|(j,j')} = 1 - q̂_{j|(j,j')} exactly.
#[derive(Clone, Debug)]
pub struct PairwiseTable {
    k: usize,
    q: Vec<f64>,
}

impl PairwiseTable {
    pub fn new(k: usize) -> Self {
        Self { k, q: vec![f64::NAN; k * k] }
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    /// Set q̂_{j|(j,j')}; the complementary entry is fixed so the closure
    /// identity holds exactly.
    pub fn set(&mut self, j: usize, j2: usize, q: f64) -> Result<()> {
        if j == j2 || j == 0 || j2 == 0 || j > self.k || j2 > self.k {
            return Err(Error::InvalidParameter(format!("bad pair ({j}, {j2}) for K={}", self.k)));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("pairwise probability {q} outside (0, 1)")));
        }
        self.q[(j - 1) * self.k + (j2 - 1)] = q;
        self.q[(j2 - 1) * self.k + (j - 1)] = 1.0 - q;
        Ok(())
    }

    pub fn get(&self, j: usize, j2: usize) -> f64 {
        self.q[(j - 1) * self.k + (j2 - 1)]
    }

    pub fn is_complete(&self) -> bool {
        (1..=self.k).all(|j| (1..=self.k).all(|j2| j == j2 || !self.get(j, j2).is_nan()))
    }
}

/// A K-vector of class probabilities with its provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub probs: Vec<f64>,
    pub scheme: SchemeKind,
    /// Whether the entries were normalized to the simplex. Raw one-vs-all
    /// estimates are the one case where this is false.
    pub normalized: bool,
}

/// The chosen reference class with selection diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineChoice {
    pub k_star: usize,
    pub method: BaselineMethod,
    /// Class sizes (largest-class rule) or aggregated distances (median
    /// rule), indexed by class.
    pub diagnostics: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMethod {
    LargestClass,
    MedianAggDistance,
}

/// Largest-class baseline; ties go to the smallest label.
pub fn select_baseline_b1(dataset: &LabeledDataset) -> Result<BaselineChoice> {
    if dataset.num_classes() < 3 {
        return Err(Error::InvalidInput("baseline selection needs K >= 3".into()));
    }
    let sizes = dataset.class_sizes();
    for (j, &s) in sizes.iter().enumerate() {
        if s == 0 {
            return Err(Error::EmptyClass(j + 1));
        }
    }
    let k_star = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(j, _)| j + 1)
        .unwrap();
    Ok(BaselineChoice {
        k_star,
        method: BaselineMethod::LargestClass,
        diagnostics: sizes.iter().map(|&s| s as f64).collect(),
    })
}

/// Within-class compactness: the largest distance from a class point to the
/// class median point. The median point is the one whose summed distance to
/// its classmates equals the lower median of those sums; equal sums resolve
/// to the smallest index.
pub fn class_compactness(dataset: &LabeledDataset, j: usize) -> Result<f64> {
    let members = dataset.class(j);
    if members.len() < 2 {
        return Err(Error::ClassTooSmall(j, 2));
    }
    let pts: Vec<&[f64]> = members.iter().map(|&i| dataset.features().row(i)).collect();
    let sums: Vec<f64> = pts
        .iter()
        .enumerate()
        .map(|(t, xt)| pts.iter().enumerate().filter(|(s, _)| *s != t).map(|(_, xs)| euclidean(xs, xt)).sum())
        .collect();
    let mut sorted = sums.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_value = sorted[(sorted.len() - 1) / 2];
    let median_idx = sums.iter().position(|&d| d == median_value).unwrap();
    let median_point = pts[median_idx];
    Ok(pts.iter().map(|xs| euclidean(xs, median_point)).fold(0.0, f64::max))
}

/// Minimum distance between the boundary points of two classes.
pub fn between_class_distance(dataset: &LabeledDataset, j: usize, j2: usize) -> Result<f64> {
    let a = dataset.class(j);
    let b = dataset.class(j2);
    if a.is_empty() {
        return Err(Error::EmptyClass(j));
    }
    if b.is_empty() {
        return Err(Error::EmptyClass(j2));
    }
    let mut best = f64::INFINITY;
    for &s in a {
        for &t in b {
            let d = euclidean(dataset.features().row(s), dataset.features().row(t));
            if d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Median aggregated-distance baseline: D_agg(j) = (1/K) Σ_{j'≠j} D_bc(j,j')
/// / D_cp(j); the class at the lower median of the D_agg values wins, ties to
/// the smaller label.
pub fn select_baseline_b2(dataset: &LabeledDataset) -> Result<BaselineChoice> {
    let k = dataset.num_classes();
    if k < 3 {
        return Err(Error::InvalidInput("baseline selection needs K >= 3".into()));
    }
    let mut agg = Vec::with_capacity(k);
    for j in 1..=k {
        let cp = class_compactness(dataset, j)?;
        if cp == 0.0 {
            return Err(Error::InvalidInput(format!("class {j} has zero spread, aggregated distance undefined")));
        }
        let mut sum_bc = 0.0;
        for j2 in 1..=k {
            if j2 != j {
                sum_bc += between_class_distance(dataset, j, j2)?;
            }
        }
        agg.push(sum_bc / (k as f64 * cp));
    }
    let mut sorted = agg.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_value = sorted[(sorted.len() - 1) / 2];
    let k_star = agg.iter().position(|&d| d == median_value).unwrap() + 1;
    Ok(BaselineChoice { k_star, method: BaselineMethod::MedianAggDistance, diagnostics: agg })
}

/// Class probabilities from the K-1 conditionals against a fixed baseline.
/// `q_col[j-1]` holds q̂_{j|(j,k*)} for j ≠ k*; the k* entry is ignored.
/// The baseline probability is produced by subtraction from one.
pub fn baseline_probs(q_col: &[f64], k_star: usize) -> Result<ProbEstimate> {
    let k = q_col.len();
    if k_star == 0 || k_star > k {
        return Err(Error::InvalidParameter(format!("baseline {k_star} outside 1..={k}")));
    }
    let mut ratios = vec![1.0; k];
    for (j0, &q) in q_col.iter().enumerate() {
        if j0 + 1 == k_star {
            continue;
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("conditional probability {q} outside (0, 1)")));
        }
        ratios[j0] = q / (1.0 - q);
    }
    let denom: f64 = ratios.iter().sum();
    let mut probs = vec![0.0; k];
    let mut others = 0.0;
    for j0 in 0..k {
        if j0 + 1 != k_star {
            probs[j0] = ratios[j0] / denom;
            others += probs[j0];
        }
    }
    probs[k_star - 1] = 1.0 - others;
    Ok(ProbEstimate { probs, scheme: SchemeKind::Baseline1, normalized: true })
}

/// Recover q̂_{j|(j,j')} from the two baseline conditionals q̂_{j|(j,k*)}
/// and q̂_{j'|(j',k*)}.
pub fn reconstruct_pairwise(q_j: f64, q_j2: f64) -> Result<f64> {
    for q in [q_j, q_j2] {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("conditional probability {q} outside (0, 1)")));
        }
    }
    let denom = q_j + q_j2 - 2.0 * q_j * q_j2;
    if denom.abs() < 1e-15 {
        return Err(Error::InvalidInput("pairwise reconstruction denominator vanishes".into()));
    }
    Ok((q_j - q_j * q_j2) / denom)
}

/// Per-point baseline choice from a full table.
pub fn dynamic_baseline(table: &PairwiseTable, rule: VoteRule) -> usize {
    let k = table.num_classes();
    let mut best = 1usize;
    let mut best_key = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in 1..=k {
        let mut sum = 0.0;
        let mut wins = 0usize;
        let mut min_q = f64::INFINITY;
        for j in 1..=k {
            if j == c {
                continue;
            }
            let q = table.get(c, j);
            sum += q;
            if q > 0.5 {
                wins += 1;
            }
            if q < min_q {
                min_q = q;
            }
        }
        let key = match rule {
            VoteRule::GtHalf => (wins as f64, sum),
            VoteRule::MinDenominator => (min_q, sum),
        };
        if key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
            best_key = key;
            best = c;
        }
    }
    best
}

/// Coupled class probabilities from a full table and a baseline class.
pub fn pairwise_coupling_probs(table: &PairwiseTable, baseline: usize, scheme: SchemeKind) -> Result<ProbEstimate> {
    let k = table.num_classes();
    if baseline == 0 || baseline > k {
        return Err(Error::InvalidParameter(format!("baseline {baseline} outside 1..={k}")));
    }
    let mut ratios = vec![1.0; k];
    for s in 1..=k {
        if s == baseline {
            continue;
        }
        let q_s = table.get(s, baseline);
        let q_b = table.get(baseline, s);
        if q_s.is_nan() || q_b.is_nan() {
            return Err(Error::InvalidInput(format!("missing pair ({s}, {baseline}) in the table")));
        }
        ratios[s - 1] = q_s / q_b;
    }
    let denom: f64 = ratios.iter().sum();
    Ok(ProbEstimate { probs: ratios.iter().map(|r| r / denom).collect(), scheme, normalized: true })
}

/// Argmax label; ties resolve to the smallest label.
pub fn classify_max_prob(p: &ProbEstimate) -> usize {
    let mut best = 0usize;
    for (j, &v) in p.probs.iter().enumerate() {
        if v > p.probs[best] {
            best = j;
        }
    }
    best + 1
}

/// Max-vote label over a full pairwise table: most wins (q̂ > ½), ties by
/// probability sum, then smaller label.
pub fn classify_max_vote(table: &PairwiseTable) -> Result<usize> {
    if !table.is_complete() {
        return Err(Error::InvalidInput("max voting needs a complete pairwise table".into()));
    }
    Ok(dynamic_baseline(table, VoteRule::GtHalf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_from_probs(p: &[f64]) -> PairwiseTable {
        let k = p.len();
        let mut t = PairwiseTable::new(k);
        for j in 1..=k {
            for j2 in (j + 1)..=k {
                t.set(j, j2, p[j - 1] / (p[j - 1] + p[j2 - 1])).unwrap();
            }
        }
        t
    }

    #[test]
    fn b1_picks_largest_class() {
        let rows: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> =
            (0..10).map(|_| 1).chain((0..30).map(|_| 2)).chain((0..20).map(|_| 3)).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels).unwrap();
        assert_eq!(select_baseline_b1(&ds).unwrap().k_star, 2);
    }

    #[test]
    fn b1_breaks_ties_by_smallest_label() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 3 + 1).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels).unwrap();
        assert_eq!(select_baseline_b1(&ds).unwrap().k_star, 1);
    }

    #[test]
    fn compactness_hand_case() {
        // class {0,1,2}: summed distances (3,2,3); lower median 3 →
        // median point x=0 by smallest index; max distance 2
        let ds = LabeledDataset::from_rows(
            &[vec![0.0], vec![1.0], vec![2.0], vec![9.0], vec![9.5], vec![10.0]],
            &[1, 1, 1, 2, 2, 3],
        )
        .unwrap();
        assert!((class_compactness(&ds, 1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn compactness_symmetric_pair() {
        let a = 1.7;
        let ds = LabeledDataset::from_rows(&[vec![-a], vec![a], vec![0.0]], &[1, 1, 2]).unwrap();
        assert!((class_compactness(&ds, 1).unwrap() - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn compactness_scales_with_data() {
        let ds = LabeledDataset::from_rows(&[vec![0.0], vec![1.0], vec![2.5], vec![0.0]], &[1, 1, 1, 2]).unwrap();
        let scaled =
            LabeledDataset::from_rows(&[vec![0.0], vec![3.0], vec![7.5], vec![0.0]], &[1, 1, 1, 2]).unwrap();
        let (a, b) = (class_compactness(&ds, 1).unwrap(), class_compactness(&scaled, 1).unwrap());
        assert!((b - 3.0 * a).abs() < 1e-12);
    }

    #[test]
    fn compactness_rejects_singleton() {
        let ds = LabeledDataset::from_rows(&[vec![0.0], vec![1.0]], &[1, 2]).unwrap();
        assert!(class_compactness(&ds, 1).is_err());
    }

    #[test]
    fn between_class_hand_case() {
        let ds = LabeledDataset::from_rows(
            &[vec![0.0], vec![1.0], vec![2.0], vec![5.0], vec![6.0], vec![7.0]],
            &[1, 1, 1, 2, 2, 2],
        )
        .unwrap();
        assert_eq!(between_class_distance(&ds, 1, 2).unwrap(), 3.0);
        assert_eq!(between_class_distance(&ds, 2, 1).unwrap(), 3.0);
    }

    #[test]
    fn between_class_shared_point_is_zero() {
        let ds = LabeledDataset::from_rows(&[vec![1.0], vec![1.0]], &[1, 2]).unwrap();
        assert_eq!(between_class_distance(&ds, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn b2_hand_computed_example() {
        // classes {0,1,2}, {5,6,7}, {10,11,12}: D_agg = (11/6, 1, 11/6);
        // lower median 11/6 → tie between classes 1 and 3 → class 1
        let rows: Vec<Vec<f64>> =
            [0.0, 1.0, 2.0, 5.0, 6.0, 7.0, 10.0, 11.0, 12.0].iter().map(|&v| vec![v]).collect();
        let labels = [1, 1, 1, 2, 2, 2, 3, 3, 3];
        let ds = LabeledDataset::from_rows(&rows, &labels).unwrap();
        let choice = select_baseline_b2(&ds).unwrap();
        assert_eq!(choice.k_star, 1);
        let expect = [11.0 / 6.0, 1.0, 11.0 / 6.0];
        for (a, b) in choice.diagnostics.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn baseline_probs_symmetric_case() {
        let p = baseline_probs(&[0.5, 0.5, 1.0], 3).unwrap();
        for v in &p.probs {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn baseline_probs_hand_case() {
        // q1 = 2/3 → ratio 2; q2 = 1/2 → ratio 1; baseline ratio 1
        let p = baseline_probs(&[2.0 / 3.0, 0.5, 1.0], 3).unwrap();
        assert!((p.probs[0] - 0.5).abs() < 1e-12);
        assert!((p.probs[1] - 0.25).abs() < 1e-12);
        assert!((p.probs[2] - 0.25).abs() < 1e-12);
        let sum: f64 = p.probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn baseline_probs_rejects_out_of_range() {
        assert!(baseline_probs(&[0.0, 0.5, 1.0], 3).is_err());
        assert!(baseline_probs(&[1.0, 0.5, 1.0], 3).is_err());
    }

    #[test]
    fn reconstruction_hand_cases() {
        assert!((reconstruct_pairwise(0.5, 0.5).unwrap() - 0.5).abs() < 1e-15);
        // latent masses (2, 1, 1): q_j = 2/3, q_j' = 1/2 → q_{j|(j,j')} = 2/3
        assert!((reconstruct_pairwise(2.0 / 3.0, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        for q in [0.01, 0.3, 0.77, 0.99] {
            assert!((reconstruct_pairwise(q, q).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dynamic_baseline_hand_vote() {
        let mut t = PairwiseTable::new(3);
        t.set(1, 2, 0.9).unwrap();
        t.set(1, 3, 0.8).unwrap();
        t.set(2, 3, 0.6).unwrap();
        assert_eq!(dynamic_baseline(&t, VoteRule::GtHalf), 1);
    }

    #[test]
    fn dynamic_baseline_all_ties() {
        let mut t = PairwiseTable::new(3);
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            t.set(a, b, 0.5).unwrap();
        }
        assert_eq!(dynamic_baseline(&t, VoteRule::GtHalf), 1);
        assert_eq!(classify_max_vote(&t).unwrap(), 1);
    }

    #[test]
    fn dynamic_baseline_respects_relabeling() {
        let p = [0.2, 0.5, 0.3];
        let t = table_from_probs(&p);
        let c = dynamic_baseline(&t, VoteRule::GtHalf);
        // permute classes by reversing labels
        let rev: Vec<f64> = p.iter().rev().cloned().collect();
        let t2 = table_from_probs(&rev);
        let c2 = dynamic_baseline(&t2, VoteRule::GtHalf);
        assert_eq!(c2, p.len() + 1 - c);
    }

    #[test]
    fn coupling_recovers_exact_table() {
        let p = [0.5, 0.3, 0.2];
        let t = table_from_probs(&p);
        for baseline in 1..=3 {
            let est = pairwise_coupling_probs(&t, baseline, SchemeKind::Pairwise).unwrap();
            for (a, b) in est.probs.iter().zip(p) {
                assert!((a - b).abs() < 1e-12, "baseline {baseline}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn coupling_uniform_table() {
        let t = table_from_probs(&[0.25, 0.25, 0.25, 0.25]);
        let est = pairwise_coupling_probs(&t, 2, SchemeKind::Pairwise).unwrap();
        for v in est.probs {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_missing_pair_errors() {
        let mut t = PairwiseTable::new(3);
        t.set(1, 2, 0.6).unwrap();
        assert!(pairwise_coupling_probs(&t, 1, SchemeKind::Pairwise).is_err());
    }

    #[test]
    fn max_prob_classification() {
        let mk = |probs: Vec<f64>| ProbEstimate { probs, scheme: SchemeKind::Pairwise, normalized: true };
        assert_eq!(classify_max_prob(&mk(vec![0.2, 0.5, 0.3])), 2);
        assert_eq!(classify_max_prob(&mk(vec![0.4, 0.4, 0.2])), 1);
        // scale invariance (raw one-vs-all)
        assert_eq!(classify_max_prob(&mk(vec![0.8, 1.0, 0.4])), 2);
    }

    #[test]
    fn max_vote_agrees_with_max_prob_on_consistent_tables() {
        let p = [0.5, 0.3, 0.2];
        let t = table_from_probs(&p);
        assert_eq!(classify_max_vote(&t).unwrap(), 1);
        let est = pairwise_coupling_probs(&t, 3, SchemeKind::Pairwise).unwrap();
        assert_eq!(classify_max_prob(&est), 1);
    }
}
