//! Labeled datasets, synthetic generators with analytic class probabilities,
//! stratified splitting, CSV ingestion and BW feature ranking.
//!
//! All randomness flows through a seeded ChaCha8 stream, with normal variates
//! produced by a Box-Muller transform of uniforms, so a `(n, seed)` pair
//! fully determines a generated dataset.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::ContinuousCDF;

use crate::error::{Error, Result};
use crate::types::PointMatrix;

/// n points with p real features and labels in `1..=K`, plus per-class index
/// sets.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    features: PointMatrix,
    labels: Vec<usize>,
    num_classes: usize,
    class_index: Vec<Vec<usize>>,
}

impl LabeledDataset {
    /// Build a dataset, inferring `K` as the largest label present.
    pub fn new(features: PointMatrix, labels: Vec<usize>) -> Result<Self> {
        Self::with_classes(features, labels, None)
    }

    /// Build a dataset with an explicit class count (labels are validated
    /// against `1..=K`).
    pub fn with_classes(features: PointMatrix, labels: Vec<usize>, num_classes: Option<usize>) -> Result<Self> {
        if features.n() != labels.len() {
            return Err(Error::DimensionMismatch(features.n(), labels.len()));
        }
        if labels.is_empty() {
            return Err(Error::EmptyInput("dataset".into()));
        }
        let max_label = *labels.iter().max().unwrap();
        let k = num_classes.unwrap_or(max_label);
        let mut class_index = vec![Vec::new(); k];
        for (i, &y) in labels.iter().enumerate() {
            if y == 0 || y > k {
                return Err(Error::InvalidInput(format!("label {y} outside 1..={k} at row {i}")));
            }
            class_index[y - 1].push(i);
        }
        Ok(Self { features, labels, num_classes: k, class_index })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: &[usize]) -> Result<Self> {
        Self::new(PointMatrix::from_rows(rows)?, labels.to_vec())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &PointMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Indices of the points in class `j` (1-based label).
    pub fn class(&self, j: usize) -> &[usize] {
        &self.class_index[j - 1]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.class_index.iter().map(|s| s.len()).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::with_classes(self.features.select(indices), labels, Some(self.num_classes))
    }

    /// Zero-point dataset with this dataset's shape; split parts may be
    /// legitimately empty.
    fn empty_like(&self) -> Self {
        Self {
            features: PointMatrix::from_flat(Vec::new(), 0, self.dim()).unwrap(),
            labels: Vec::new(),
            num_classes: self.num_classes,
            class_index: vec![Vec::new(); self.num_classes],
        }
    }

    /// Keep only the first `k` classes, preserving labels. Used for building
    /// class-count subsets of a generator.
    pub fn filter_classes(&self, k: usize) -> Result<Self> {
        let idx: Vec<usize> = (0..self.n()).filter(|&i| self.labels[i] <= k).collect();
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        Self::with_classes(self.features.select(&idx), labels, Some(k))
    }
}

// ---------------------------------------------------------------------------
// Truth oracles
// ---------------------------------------------------------------------------

/// Analytic class-probability function attached to a synthetic generator.
#[derive(Clone, Debug)]
pub enum TruthOracle {
    /// Gaussian classes with means on a circle of the given radius and a
    /// shared isotropic covariance `sd² I₂`; equal priors.
    GaussianCircle { k: usize, radius: f64, sd: f64 },
    /// Five quadratic scores passed through a softmax.
    QuadraticSoftmax,
    /// Five linear/absolute-value scores mapped through the t₂ CDF and the
    /// standard normal quantile, then a softmax.
    DiscTSoftmax,
}

impl TruthOracle {
    pub fn num_classes(&self) -> usize {
        match self {
            TruthOracle::GaussianCircle { k, .. } => *k,
            TruthOracle::QuadraticSoftmax | TruthOracle::DiscTSoftmax => 5,
        }
    }

    /// The K-vector of conditional class probabilities at `x`.
    pub fn probs(&self, x: &[f64]) -> Vec<f64> {
        match self {
            TruthOracle::GaussianCircle { k, radius, sd } => {
                let scores: Vec<f64> = (1..=*k)
                    .map(|j| {
                        let mu = circle_mean(j, *k, *radius);
                        -((x[0] - mu.0).powi(2) + (x[1] - mu.1).powi(2)) / (2.0 * sd * sd)
                    })
                    .collect();
                softmax(&scores)
            }
            TruthOracle::QuadraticSoftmax => softmax(&quadratic_scores(x)),
            TruthOracle::DiscTSoftmax => softmax(&disc_scores(x)),
        }
    }

    /// True pairwise conditional probability q_{j|(j,k)}(x).
    pub fn pair_q(&self, j: usize, k: usize, x: &[f64]) -> f64 {
        let p = self.probs(x);
        p[j - 1] / (p[j - 1] + p[k - 1])
    }

    /// True conditional probability of class `j` against the pooled rest,
    /// which is simply p_j(x).
    pub fn rest_q(&self, j: usize, x: &[f64]) -> f64 {
        self.probs(x)[j - 1]
    }
}

fn circle_mean(j: usize, k: usize, radius: f64) -> (f64, f64) {
    let angle = 2.0 * (j as f64) * PI / (k as f64);
    (radius * angle.cos(), radius * angle.sin())
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

fn quadratic_scores(x: &[f64]) -> Vec<f64> {
    let (x1, x2) = (x[0], x[1]);
    vec![
        -1.5 * x1 + 0.2 * x1 * x1 - 0.1 * x2 * x2 + 0.2,
        0.3 * x1 * x1 + 0.2 * x2 * x2 - x1 * x2 + 0.2,
        1.5 * x1 + 0.2 * x1 * x1 - 0.1 * x2 * x2 + 0.2,
        -0.1 * x1 * x1 + 0.2 * x2 * x2 - 1.5 * x2 + x1 + 0.1 * x1 * x2,
        0.1 * x1 * x1 + 0.1 * x2 * x2 + x1 * x2 - 0.2,
    ]
}

fn disc_scores(x: &[f64]) -> Vec<f64> {
    let (x1, x2) = (x[0], x[1]);
    let sqrt5 = 5.0_f64.sqrt();
    let sqrt3 = 3.0_f64.sqrt();
    let h = [
        -3.0 * x1 * sqrt5 + 3.0 * x2,
        -3.0 * x1 * sqrt5 - 3.0 * x2,
        x2 * sqrt3 - 1.2 * x1,
        2.0 * x2 * sqrt3 + 1.2 * x1,
        ((x1 * x2).abs() + 1.0).sqrt(),
    ];
    h.iter().map(|&hj| normal_quantile(t2_cdf(hj))).collect()
}

/// Closed-form CDF of the t distribution with 2 degrees of freedom.
pub fn t2_cdf(t: f64) -> f64 {
    0.5 + t / (2.0 * (t * t + 2.0).sqrt())
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::Normal;
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// One standard-normal variate via Box-Muller on the uniform stream.
fn next_normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let mut u1: f64 = rng.gen();
    while u1 <= f64::MIN_POSITIVE {
        u1 = rng.gen();
    }
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * PI * u2;
    (r * theta.cos(), r * theta.sin())
}

fn sample_label(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (j, p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return j + 1;
        }
    }
    probs.len()
}

/// Gaussian classes with means on a circle; labels drawn uniformly.
pub fn gen_gaussian_circle(k: usize, radius: f64, sd: f64, n: usize, seed: u64) -> Result<(LabeledDataset, TruthOracle)> {
    if n < k {
        return Err(Error::InvalidParameter(format!("n={n} smaller than class count {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = rng.gen_range(1..=k);
        let (z1, z2) = next_normal_pair(&mut rng);
        let mu = circle_mean(y, k, radius);
        rows.push(vec![mu.0 + sd * z1, mu.1 + sd * z2]);
        labels.push(y);
    }
    let ds = LabeledDataset::with_classes(PointMatrix::from_rows(&rows)?, labels, Some(k))?;
    Ok((ds, TruthOracle::GaussianCircle { k, radius, sd }))
}

/// Gaussian circle classes with exactly `n_per_class` points per class,
/// in label order. Used for scaling studies where class sizes must be held
/// fixed.
pub fn gen_gaussian_circle_balanced(
    k: usize,
    radius: f64,
    sd: f64,
    n_per_class: usize,
    seed: u64,
) -> Result<(LabeledDataset, TruthOracle)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(k * n_per_class);
    let mut labels = Vec::with_capacity(k * n_per_class);
    for y in 1..=k {
        let mu = circle_mean(y, k, radius);
        for _ in 0..n_per_class {
            let (z1, z2) = next_normal_pair(&mut rng);
            rows.push(vec![mu.0 + sd * z1, mu.1 + sd * z2]);
            labels.push(y);
        }
    }
    let ds = LabeledDataset::with_classes(PointMatrix::from_rows(&rows)?, labels, Some(k))?;
    Ok((ds, TruthOracle::GaussianCircle { k, radius, sd }))
}

/// Seven Gaussian classes on a circle of radius 1.5 with sd 1.2.
pub fn gen_example1(n: usize, seed: u64) -> Result<(LabeledDataset, TruthOracle)> {
    gen_gaussian_circle(7, 1.5, 1.2, n, seed)
}

/// Nine Gaussian classes on a circle of radius 2.5 with sd 1.5.
pub fn gen_example2(n: usize, seed: u64) -> Result<(LabeledDataset, TruthOracle)> {
    gen_gaussian_circle(9, 2.5, 1.5, n, seed)
}

/// Five classes with quadratic score functions on the square [-5, 5]².
pub fn gen_example3(n: usize, seed: u64) -> Result<(LabeledDataset, TruthOracle)> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("n={n} smaller than class count 5")));
    }
    let oracle = TruthOracle::QuadraticSoftmax;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x1 = rng.gen::<f64>() * 10.0 - 5.0;
        let x2 = rng.gen::<f64>() * 10.0 - 5.0;
        let x = vec![x1, x2];
        let y = sample_label(&oracle.probs(&x), &mut rng);
        rows.push(x);
        labels.push(y);
    }
    let ds = LabeledDataset::with_classes(PointMatrix::from_rows(&rows)?, labels, Some(5))?;
    Ok((ds, oracle))
}

/// Five classes on the disc of radius 10, with t₂/normal-quantile score
/// transforms. Points are rejection-sampled from the bounding square.
pub fn gen_example4(n: usize, seed: u64) -> Result<(LabeledDataset, TruthOracle)> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!("n={n} smaller than class count 5")));
    }
    let oracle = TruthOracle::DiscTSoftmax;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x = loop {
            let x1 = rng.gen::<f64>() * 20.0 - 10.0;
            let x2 = rng.gen::<f64>() * 20.0 - 10.0;
            if x1 * x1 + x2 * x2 <= 100.0 {
                break vec![x1, x2];
            }
        };
        let y = sample_label(&oracle.probs(&x), &mut rng);
        rows.push(x);
        labels.push(y);
    }
    let ds = LabeledDataset::with_classes(PointMatrix::from_rows(&rows)?, labels, Some(5))?;
    Ok((ds, oracle))
}

/// Dispatch by example id 1..=4.
pub fn gen_example(example: u8, n: usize, seed: u64) -> Result<(LabeledDataset, TruthOracle)> {
    match example {
        1 => gen_example1(n, seed),
        2 => gen_example2(n, seed),
        3 => gen_example3(n, seed),
        4 => gen_example4(n, seed),
        other => Err(Error::InvalidParameter(format!("unknown example id {other}, expected 1..4"))),
    }
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

/// Train/tune/test fractions plus the split mode and seed.
#[derive(Clone, Copy, Debug)]
pub struct SplitSpec {
    pub train: f64,
    pub tune: f64,
    pub test: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, tune: f64, test: f64, stratified: bool, seed: u64) -> Result<Self> {
        let spec = Self { train, tune, test, stratified, seed };
        for f in [train, tune, test] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParameter(format!("split fraction {f} outside [0, 1]")));
            }
        }
        if train + tune + test > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("split fractions sum above 1".into()));
        }
        Ok(spec)
    }
}

fn split_counts(m: usize, spec: &SplitSpec) -> Result<(usize, usize, usize)> {
    let n_tr = (spec.train * m as f64).round() as usize;
    let n_tu = (spec.tune * m as f64).round() as usize;
    let mut n_te = (spec.test * m as f64).round() as usize;
    // When the fractions cover everything, hand the rounding remainder to the
    // last part so the three parts cover the input exactly.
    if (spec.train + spec.tune + spec.test - 1.0).abs() < 1e-12 {
        n_te = m.saturating_sub(n_tr + n_tu);
    }
    if n_tr + n_tu + n_te > m {
        return Err(Error::InvalidInput(format!("{m} points cannot satisfy the requested fractions")));
    }
    for (f, c) in [(spec.train, n_tr), (spec.tune, n_tu), (spec.test, n_te)] {
        if f > 0.0 && c == 0 {
            return Err(Error::InvalidInput(format!("{m} points round to an empty part for fraction {f}")));
        }
    }
    Ok((n_tr, n_tu, n_te))
}

/// Split into train/tune/test index sets. With `stratified` the shuffle and
/// the rounding happen independently per class.
pub fn split_indices(dataset: &LabeledDataset, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut tune = Vec::new();
    let mut test = Vec::new();
    let groups: Vec<Vec<usize>> = if spec.stratified {
        (1..=dataset.num_classes()).map(|j| dataset.class(j).to_vec()).collect()
    } else {
        vec![(0..dataset.n()).collect()]
    };
    for mut idx in groups {
        if idx.is_empty() {
            continue;
        }
        let (n_tr, n_tu, n_te) = split_counts(idx.len(), spec)?;
        // Fisher-Yates on the uniform stream.
        for i in (1..idx.len()).rev() {
            let j = rng.gen_range(0..=i);
            idx.swap(i, j);
        }
        train.extend_from_slice(&idx[..n_tr]);
        tune.extend_from_slice(&idx[n_tr..n_tr + n_tu]);
        test.extend_from_slice(&idx[n_tr + n_tu..n_tr + n_tu + n_te]);
    }
    train.sort_unstable();
    tune.sort_unstable();
    test.sort_unstable();
    Ok((train, tune, test))
}

/// Split into materialized train/tune/test datasets.
pub fn stratified_split(dataset: &LabeledDataset, spec: &SplitSpec) -> Result<(LabeledDataset, LabeledDataset, LabeledDataset)> {
    let (tr, tu, te) = split_indices(dataset, spec)?;
    let take = |idx: &[usize]| -> Result<LabeledDataset> {
        if idx.is_empty() {
            Ok(dataset.empty_like())
        } else {
            dataset.subset(idx)
        }
    };
    Ok((take(&tr)?, take(&tu)?, take(&te)?))
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

/// Expectations imposed while loading a data CSV.
#[derive(Clone, Copy, Debug, Default)]
pub struct CsvSchema {
    pub num_features: Option<usize>,
    pub num_classes: Option<usize>,
}

/// Load a dataset from a CSV with header `x1,..,xp,y` and integer labels in
/// `1..=K`. Errors carry the 1-based line number of the offending row.
pub fn load_csv<P: AsRef<Path>>(path: P, schema: &CsvSchema) -> Result<LabeledDataset> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::CsvFormat { line: 1, msg: "need at least one feature column and a label column".into() });
    }
    let p = headers.len() - 1;
    if let Some(expect) = schema.num_features {
        if p != expect {
            return Err(Error::CsvFormat { line: 1, msg: format!("expected {expect} feature columns, found {p}") });
        }
    }
    for (i, h) in headers.iter().take(p).enumerate() {
        if h != format!("x{}", i + 1) {
            return Err(Error::CsvFormat { line: 1, msg: format!("expected header x{}, found {h:?}", i + 1) });
        }
    }
    if &headers[p] != "y" {
        return Err(Error::CsvFormat { line: 1, msg: format!("expected final header y, found {:?}", &headers[p]) });
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (ri, record) in reader.records().enumerate() {
        let line = ri + 2; // header is line 1
        let record = record?;
        if record.len() != p + 1 {
            return Err(Error::CsvFormat { line, msg: format!("expected {} fields, found {}", p + 1, record.len()) });
        }
        let mut row = Vec::with_capacity(p);
        for field in record.iter().take(p) {
            row.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::CsvFormat { line, msg: format!("not a real number: {field:?}") })?,
            );
        }
        let label_field = &record[p];
        let y = label_field
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::CsvFormat { line, msg: format!("not an integer label: {label_field:?}") })?;
        if y == 0 {
            return Err(Error::CsvFormat { line, msg: "label 0 outside 1..=K".into() });
        }
        if let Some(k) = schema.num_classes {
            if y > k {
                return Err(Error::CsvFormat { line, msg: format!("label {y} outside 1..={k}") });
            }
        }
        rows.push(row);
        labels.push(y);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("csv has no data rows".into()));
    }
    LabeledDataset::with_classes(PointMatrix::from_rows(&rows)?, labels, schema.num_classes)
}

/// Write a dataset as `x1,..,xp,y`. Floats are printed with the shortest
/// round-trip representation.
pub fn save_csv<P: AsRef<Path>>(dataset: &LabeledDataset, path: P) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<String> = (1..=dataset.dim()).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    writer.write_record(&header)?;
    for i in 0..dataset.n() {
        let mut rec: Vec<String> = dataset.features().row(i).iter().map(|v| format!("{v}")).collect();
        rec.push(dataset.labels()[i].to_string());
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

/// Load a probability table CSV with header `p1,..,pK`.
pub fn load_prob_csv<P: AsRef<Path>>(path: P) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let k = headers.iter().take_while(|h| h.starts_with('p')).count();
    if k == 0 {
        return Err(Error::CsvFormat { line: 1, msg: "expected columns p1..pK".into() });
    }
    let mut out = Vec::new();
    for (ri, record) in reader.records().enumerate() {
        let line = ri + 2;
        let record = record?;
        let mut row = Vec::with_capacity(k);
        for field in record.iter().take(k) {
            let field = field.trim();
            let v = if field == "Inf" {
                f64::INFINITY
            } else {
                field.parse::<f64>().map_err(|_| Error::CsvFormat { line, msg: format!("not a real number: {field:?}") })?
            };
            row.push(v);
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("probability csv has no data rows".into()));
    }
    Ok(out)
}

/// Write a probability table CSV with header `p1,..,pK`.
pub fn save_prob_csv<P: AsRef<Path>>(probs: &[Vec<f64>], path: P) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::EmptyInput("probability table".into()));
    }
    let k = probs[0].len();
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let header: Vec<String> = (1..=k).map(|i| format!("p{i}")).collect();
    writer.write_record(&header)?;
    for row in probs {
        let rec: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// BW feature ranking
// ---------------------------------------------------------------------------

/// One feature's ratio of between-group to within-group sums of squares.
#[derive(Clone, Copy, Debug)]
pub struct BwScore {
    pub feature: usize,
    pub score: f64,
}

/// Rank features by the BW criterion, descending; ties broken by smaller
/// feature index. A feature with zero within-class spread but nonzero
/// between-class spread gets `+inf` and sorts first.
pub fn bw_rank(dataset: &LabeledDataset) -> Vec<BwScore> {
    let n = dataset.n();
    let p = dataset.dim();
    let k = dataset.num_classes();
    let mut scores = Vec::with_capacity(p);
    for g in 0..p {
        let col: Vec<f64> = (0..n).map(|i| dataset.features().row(i)[g]).collect();
        let overall = col.iter().sum::<f64>() / n as f64;
        let mut between = 0.0;
        let mut within = 0.0;
        for j in 1..=k {
            let idx = dataset.class(j);
            if idx.is_empty() {
                continue;
            }
            let mean_j = idx.iter().map(|&i| col[i]).sum::<f64>() / idx.len() as f64;
            between += idx.len() as f64 * (mean_j - overall).powi(2);
            within += idx.iter().map(|&i| (col[i] - mean_j).powi(2)).sum::<f64>();
        }
        let score = if within > 0.0 {
            between / within
        } else if between > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        scores.push(BwScore { feature: g, score });
    }
    scores.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap().then(a.feature.cmp(&b.feature)));
    scores
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_circle_truth_peaks_at_means() {
        let (_, oracle) = gen_example1(10, 3).unwrap();
        for j in 1..=7 {
            let mu = circle_mean(j, 7, 1.5);
            let p = oracle.probs(&[mu.0, mu.1]);
            let best = p.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0 + 1;
            assert_eq!(best, j);
        }
    }

    #[test]
    fn truth_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (_, oracle) in [gen_example1(10, 0).unwrap(), gen_example2(10, 0).unwrap(), gen_example3(10, 0).unwrap(), gen_example4(10, 0).unwrap()] {
            for _ in 0..200 {
                let x = [rng.gen::<f64>() * 10.0 - 5.0, rng.gen::<f64>() * 10.0 - 5.0];
                let p = oracle.probs(&x);
                let sum: f64 = p.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
                assert!(p.iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn example2_uniform_at_origin() {
        let (_, oracle) = gen_example2(10, 0).unwrap();
        let p = oracle.probs(&[0.0, 0.0]);
        for v in &p {
            assert!((v - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example3_probs_at_origin() {
        let (_, oracle) = gen_example3(10, 0).unwrap();
        let p = oracle.probs(&[0.0, 0.0]);
        let expected = [
            0.2227642423198805,
            0.2227642423198805,
            0.2227642423198805,
            0.1823839358734018,
            0.1493233371669566,
        ];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn example3_mirror_symmetry() {
        // f1 and f3 swap under x1 -> -x1; the other scores are not mirror
        // invariant, so only the score swap and the probability ratio
        // identity p1/p3 (x) = p3/p1 (-x1, x2) survive the softmax.
        let f = quadratic_scores(&[1.3, -0.7]);
        let g = quadratic_scores(&[-1.3, -0.7]);
        assert!((f[0] - g[2]).abs() < 1e-12);
        assert!((f[2] - g[0]).abs() < 1e-12);
        let (_, oracle) = gen_example3(10, 0).unwrap();
        let a = oracle.probs(&[1.3, -0.7]);
        let b = oracle.probs(&[-1.3, -0.7]);
        assert!((a[0] / a[2] - b[2] / b[0]).abs() < 1e-12);
    }

    #[test]
    fn example4_zero_score_maps_to_zero() {
        assert_eq!(t2_cdf(0.0), 0.5);
        assert!(normal_quantile(t2_cdf(0.0)).abs() < 1e-12);
        // closed form at t = 1 and the resulting normal score
        assert!((t2_cdf(1.0) - 0.7886751345948129).abs() < 1e-15);
        assert!((normal_quantile(t2_cdf(1.0)) - 0.8018327165292301).abs() < 1e-8);
    }

    #[test]
    fn example4_points_inside_disc() {
        let (ds, _) = gen_example4(500, 11).unwrap();
        for r in ds.features().rows() {
            assert!(r[0] * r[0] + r[1] * r[1] <= 100.0);
        }
    }

    #[test]
    fn example1_frequencies_roughly_uniform() {
        let n = 10_000;
        let (ds, _) = gen_example1(n, 42).unwrap();
        let expect = n as f64 / 7.0;
        // 3-sigma multinomial band
        let sd = (n as f64 * (1.0 / 7.0) * (6.0 / 7.0)).sqrt();
        for size in ds.class_sizes() {
            assert!((size as f64 - expect).abs() < 3.0 * sd, "class size {size} vs {expect}");
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let (a, _) = gen_example3(100, 9).unwrap();
        let (b, _) = gen_example3(100, 9).unwrap();
        assert_eq!(a.features(), b.features());
        assert_eq!(a.labels(), b.labels());
        let (c, _) = gen_example3(100, 10).unwrap();
        assert_ne!(a.labels(), c.labels());
    }

    #[test]
    fn split_even_fractions() {
        let rows: Vec<Vec<f64>> = (0..300).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..300).map(|i| i % 3 + 1).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels).unwrap();
        let spec = SplitSpec::new(0.5, 0.5, 0.0, true, 7).unwrap();
        let (tr, tu, te) = stratified_split(&ds, &spec).unwrap();
        assert_eq!(tr.n(), 150);
        assert_eq!(tu.n(), 150);
        assert_eq!(te.n(), 0);
        assert_eq!(tr.class_sizes(), vec![50, 50, 50]);
        assert_eq!(tu.class_sizes(), vec![50, 50, 50]);
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let rows: Vec<Vec<f64>> = (0..90).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..90).map(|i| i % 3 + 1).collect();
        let ds = LabeledDataset::from_rows(&rows, &labels).unwrap();
        let spec = SplitSpec::new(0.4, 0.3, 0.3, true, 5).unwrap();
        let (a1, b1, c1) = split_indices(&ds, &spec).unwrap();
        let (a2, b2, c2) = split_indices(&ds, &spec).unwrap();
        assert_eq!((&a1, &b1, &c1), (&a2, &b2, &c2));
        let mut all: Vec<usize> = a1.iter().chain(&b1).chain(&c1).cloned().collect();
        all.sort_unstable();
        assert_eq!(all, (0..90).collect::<Vec<_>>());
        let spec2 = SplitSpec::new(0.4, 0.3, 0.3, true, 6).unwrap();
        let (a3, _, _) = split_indices(&ds, &spec2).unwrap();
        assert_ne!(a1, a3);
    }

    #[test]
    fn split_rejects_too_small_classes() {
        let ds = LabeledDataset::from_rows(&[vec![0.0], vec![1.0]], &[1, 2]).unwrap();
        let spec = SplitSpec::new(0.4, 0.3, 0.3, true, 5).unwrap();
        assert!(split_indices(&ds, &spec).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let (ds, _) = gen_example1(50, 1).unwrap();
        save_csv(&ds, &path).unwrap();
        let ds2 = load_csv(&path, &CsvSchema::default()).unwrap();
        assert_eq!(ds.features(), ds2.features());
        assert_eq!(ds.labels(), ds2.labels());
    }

    #[test]
    fn csv_rejects_label_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x1,x2,y\n0.5,1.0,1\n0.1,0.2,0\n").unwrap();
        let err = load_csv(&path, &CsvSchema::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn csv_small_file_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("two.csv");
        std::fs::write(&path, "x1,x2,y\n0.5,1.0,1\n0.1,0.2,2\n").unwrap();
        let ds = load_csv(&path, &CsvSchema::default()).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.dim(), 2);
    }

    #[test]
    fn bw_ranking_orders_features() {
        // feature 0 separates the classes, feature 1 is constant noise-free
        // and feature 2 equals the label (zero within-class spread).
        let rows = vec![
            vec![0.0, 3.0, 1.0],
            vec![0.1, 3.0, 1.0],
            vec![1.0, 3.0, 2.0],
            vec![1.1, 3.0, 2.0],
        ];
        let ds = LabeledDataset::from_rows(&rows, &[1, 1, 2, 2]).unwrap();
        let ranks = bw_rank(&ds);
        assert_eq!(ranks[0].feature, 2);
        assert!(ranks[0].score.is_infinite());
        assert_eq!(ranks[1].feature, 0);
        assert_eq!(ranks[2].feature, 1);
        assert_eq!(ranks[2].score, 0.0);
    }
}
