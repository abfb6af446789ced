//! Test-set evaluation: probability losses against true class probabilities
//! and misclassification rates. Losses may legitimately be infinite when an
//! estimate hits zero; infinities are carried through and printed as "Inf".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_aligned(p_true: &[Vec<f64>], p_hat: &[Vec<f64>]) -> Result<usize> {
    if p_true.len() != p_hat.len() {
        return Err(Error::DimensionMismatch(p_true.len(), p_hat.len()));
    }
    if p_true.is_empty() {
        return Err(Error::EmptyInput("probability lists".into()));
    }
    let k = p_true[0].len();
    for (a, b) in p_true.iter().zip(p_hat) {
        if a.len() != k || b.len() != k {
            return Err(Error::DimensionMismatch(a.len().min(b.len()), k));
        }
    }
    Ok(k)
}

/// Mean over points of Σ_j |p̂_j - p_j|.
pub fn l1_error(p_true: &[Vec<f64>], p_hat: &[Vec<f64>]) -> Result<f64> {
    check_aligned(p_true, p_hat)?;
    let total: f64 = p_true
        .iter()
        .zip(p_hat)
        .map(|(t, h)| t.iter().zip(h).map(|(a, b)| (a - b).abs()).sum::<f64>())
        .sum();
    Ok(total / p_true.len() as f64)
}

/// Mean over points of Σ_j (p̂_j - p_j)².
pub fn l2_error(p_true: &[Vec<f64>], p_hat: &[Vec<f64>]) -> Result<f64> {
    check_aligned(p_true, p_hat)?;
    let total: f64 = p_true
        .iter()
        .zip(p_hat)
        .map(|(t, h)| t.iter().zip(h).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum();
    Ok(total / p_true.len() as f64)
}

/// Mean over points of Σ_j p_j log(p_j/p̂_j); +inf when some p̂_j = 0 with
/// p_j > 0.
pub fn egkl_loss(p_true: &[Vec<f64>], p_hat: &[Vec<f64>]) -> Result<f64> {
    check_aligned(p_true, p_hat)?;
    let mut total = 0.0;
    for (t, h) in p_true.iter().zip(p_hat) {
        for (&p, &ph) in t.iter().zip(h) {
            if p == 0.0 {
                continue;
            }
            if ph <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += p * (p / ph).ln();
        }
    }
    Ok(total / p_true.len() as f64)
}

/// The doubled divergence adding the complement terms
/// (1-p_j) log((1-p_j)/(1-p̂_j)).
pub fn gkl_loss(p_true: &[Vec<f64>], p_hat: &[Vec<f64>]) -> Result<f64> {
    check_aligned(p_true, p_hat)?;
    let mut total = 0.0;
    for (t, h) in p_true.iter().zip(p_hat) {
        for (&p, &ph) in t.iter().zip(h) {
            if p > 0.0 {
                if ph <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += p * (p / ph).ln();
            }
            let (pc, phc) = (1.0 - p, 1.0 - ph);
            if pc > 0.0 {
                if phc <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += pc * (pc / phc).ln();
            }
        }
    }
    Ok(total / p_true.len() as f64)
}

/// Misclassification fraction.
pub fn test_error(labels_true: &[usize], labels_pred: &[usize]) -> Result<f64> {
    if labels_true.len() != labels_pred.len() {
        return Err(Error::DimensionMismatch(labels_true.len(), labels_pred.len()));
    }
    if labels_true.is_empty() {
        return Err(Error::EmptyInput("label lists".into()));
    }
    let wrong = labels_true.iter().zip(labels_pred).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / labels_true.len() as f64)
}

/// One evaluated run. Losses are stored unscaled; the ×100 convention is
/// applied at report time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalResult {
    pub scheme: String,
    pub dataset: String,
    pub seed: u64,
    pub l1: f64,
    pub l2: f64,
    pub egkl: f64,
    pub gkl: f64,
    pub te1: f64,
    /// Max-vote error; only schemes with a full pairwise table have one.
    pub te2: Option<f64>,
    pub k_star: Option<usize>,
    pub runtime_seconds: f64,
}

/// Mean and standard error (sample sd over √N) of a metric across runs.
/// Infinite values poison the mean to Inf and the SE to NaN.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.iter().any(|v| v.is_infinite()) {
        return (f64::INFINITY, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Format a paper-style value (already ×100 scaled by the caller): finite
/// values to one decimal, infinities as "Inf", missing as "NA".
pub fn fmt_table_value(v: Option<f64>) -> String {
    match v {
        None => "NA".into(),
        Some(x) if x.is_infinite() => "Inf".into(),
        Some(x) if x.is_nan() => "NaN".into(),
        Some(x) => format!("{x:.1}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: &[f64]) -> Vec<Vec<f64>> {
        vec![p.to_vec()]
    }

    #[test]
    fn zero_losses_at_identity() {
        let p = single(&[0.5, 0.3, 0.2]);
        assert_eq!(l1_error(&p, &p).unwrap(), 0.0);
        assert_eq!(l2_error(&p, &p).unwrap(), 0.0);
        assert_eq!(egkl_loss(&p, &p).unwrap(), 0.0);
        assert_eq!(gkl_loss(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn l1_hand_value() {
        let t = single(&[0.5, 0.3, 0.2]);
        let h = single(&[0.4, 0.4, 0.2]);
        assert!((l1_error(&t, &h).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn l2_hand_value() {
        let t = single(&[0.5, 0.3, 0.2]);
        let h = single(&[0.4, 0.4, 0.2]);
        assert!((l2_error(&t, &h).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn l1_bounded_for_simplex_inputs() {
        let t = single(&[1.0, 0.0, 0.0]);
        let h = single(&[0.0, 0.5, 0.5]);
        assert!(l1_error(&t, &h).unwrap() <= 2.0 + 1e-15);
    }

    #[test]
    fn l2_below_l1_for_small_gaps() {
        let t = single(&[0.5, 0.3, 0.2]);
        let h = single(&[0.45, 0.35, 0.2]);
        assert!(l2_error(&t, &h).unwrap() <= l1_error(&t, &h).unwrap());
    }

    #[test]
    fn egkl_hand_value() {
        let t = single(&[0.5, 0.5]);
        let h = single(&[0.25, 0.75]);
        assert!((egkl_loss(&t, &h).unwrap() - 0.1438410362258904).abs() < 1e-12);
    }

    #[test]
    fn gkl_doubles_symmetric_binary_case() {
        let t = single(&[0.5, 0.5]);
        let h = single(&[0.25, 0.75]);
        assert!((gkl_loss(&t, &h).unwrap() - 0.2876820724517808).abs() < 1e-12);
    }

    #[test]
    fn zero_estimate_is_infinite() {
        let t = single(&[0.5, 0.5]);
        let h = single(&[0.0, 1.0]);
        assert!(egkl_loss(&t, &h).unwrap().is_infinite());
        assert!(gkl_loss(&t, &h).unwrap().is_infinite());
    }

    #[test]
    fn gkl_dominates_egkl() {
        let t = single(&[0.6, 0.3, 0.1]);
        let h = single(&[0.5, 0.35, 0.15]);
        assert!(gkl_loss(&t, &h).unwrap() >= egkl_loss(&t, &h).unwrap());
    }

    #[test]
    fn test_error_cases() {
        assert_eq!(test_error(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0.0);
        assert_eq!(test_error(&[1, 2, 3], &[2, 3, 1]).unwrap(), 1.0);
        assert_eq!(test_error(&[1, 2, 3, 4], &[1, 2, 4, 3]).unwrap(), 0.5);
        assert!(test_error(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn mean_se_matches_direct_computation() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        let sd: f64 = (((1.5f64).powi(2) + 0.25 + 0.25 + 2.25) / 3.0).sqrt();
        assert!((se - sd / 2.0).abs() < 1e-12);
        let (m_inf, se_inf) = mean_se(&[1.0, f64::INFINITY]);
        assert!(m_inf.is_infinite());
        assert!(se_inf.is_nan());
    }

    #[test]
    fn table_formatting() {
        assert_eq!(fmt_table_value(None), "NA");
        assert_eq!(fmt_table_value(Some(f64::INFINITY)), "Inf");
        assert_eq!(fmt_table_value(Some(47.93)), "47.9");
    }
}
