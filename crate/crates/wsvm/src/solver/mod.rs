//! Weighted binary SVM training via the dual quadratic program.
//!
//! The primal problem over an RKHS with representer form
//! `f(x) = d + Σ_i c_i K(x_i, x)` is
//!
//! ```text
//!   min  (1/n) Σ_i w_i [1 - y_i f(x_i)]_+  +  λ cᵀKc
//! ```
//!
//! with per-point weights `w_i ∈ [0, 1]`. Introducing slack variables and
//! dualizing gives the box-and-equality QP
//!
//! ```text
//!   max  Σ_i α_i - (1/4λ) αᵀ (Y∘K∘Y) α
//!   s.t. 0 ≤ α_i ≤ w_i/n,   Σ_i α_i y_i = 0,
//! ```
//!
//! where `(Y∘K∘Y)_{ij} = y_i y_j K(x_i, x_j)`. Stationarity in `c` gives
//! `c_i = y_i α_i / (2λ)`, and the intercept `d` comes from the KKT
//! conditions: free points (strictly inside the box) satisfy
//! `y_i f(x_i) = 1`.
//!
//! The maximization is two-variable working-set descent: the first index is
//! the most violating up-candidate, the second maximizes the second-order
//! gain estimate b²/a. The label-conjugated kernel matrix is materialized
//! once per solve so the per-iteration scans run over contiguous rows. A
//! small jitter (1e-10) is added to the Gram diagonal to guard against PSD
//! round-off. [`reference`] holds an independent projected-gradient solver
//! used to cross-check dual objectives.

mod active_set;
pub mod reference;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{GramMatrix, KernelSpec};
use crate::types::PointMatrix;

pub(crate) const DIAG_JITTER: f64 = 1e-10;
const TAU: f64 = 1e-12;
/// Boxes narrower than this are treated as frozen at zero.
pub(crate) const FROZEN_BOX: f64 = 1e-15;

/// One weighted binary training problem, fully specified by its Gram matrix,
/// signed labels, per-point weights and ridge parameter.
#[derive(Clone)]
pub struct WeightedBinaryProblem {
    pub support: Arc<PointMatrix>,
    pub kernel: KernelSpec,
    pub gram: Arc<GramMatrix>,
    pub labels: Vec<f64>,
    pub weights: Vec<f64>,
    pub lambda: f64,
}

impl WeightedBinaryProblem {
    pub fn new(
        support: Arc<PointMatrix>,
        kernel: KernelSpec,
        gram: Arc<GramMatrix>,
        labels: Vec<f64>,
        weights: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        let n = support.n();
        if !gram.is_square() || gram.rows() != n {
            return Err(Error::DimensionMismatch(gram.rows(), n));
        }
        if labels.len() != n || weights.len() != n {
            return Err(Error::DimensionMismatch(labels.len().min(weights.len()), n));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidParameter("labels must be +1 or -1".into()));
        }
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidParameter("weights must lie in [0, 1]".into()));
        }
        let has_pos = labels.iter().zip(&weights).any(|(&y, &w)| y > 0.0 && w / n as f64 >= FROZEN_BOX);
        let has_neg = labels.iter().zip(&weights).any(|(&y, &w)| y < 0.0 && w / n as f64 >= FROZEN_BOX);
        if !has_pos || !has_neg {
            return Err(Error::InvalidInput("need a positively-weighted point of each sign".into()));
        }
        Ok(Self { support, kernel, gram, labels, weights, lambda })
    }

    fn n(&self) -> usize {
        self.labels.len()
    }

    pub(crate) fn caps(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.weights.iter().map(|w| w / n).collect()
    }

    #[inline]
    pub(crate) fn kernel_entry(&self, i: usize, j: usize) -> f64 {
        self.gram.get(i, j) + if i == j { DIAG_JITTER } else { 0.0 }
    }

    /// Label-conjugated jittered kernel matrix y_i y_j (K_ij + τδ_ij).
    fn conjugated(&self) -> Vec<f64> {
        let n = self.n();
        let y = &self.labels;
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            let row = self.gram.row(i);
            let qrow = &mut q[i * n..(i + 1) * n];
            let yi = y[i];
            for t in 0..n {
                qrow[t] = yi * y[t] * row[t];
            }
            qrow[i] += DIAG_JITTER;
        }
        q
    }

    /// Dual objective Σα - (1/4λ) αᵀ(Y∘K∘Y)α, with the solver's diagonal
    /// jitter included.
    pub fn dual_objective(&self, alphas: &[f64]) -> f64 {
        let n = self.n();
        let mut quad = 0.0;
        for i in 0..n {
            if alphas[i] == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for j in 0..n {
                if alphas[j] != 0.0 {
                    acc += self.labels[j] * alphas[j] * self.kernel_entry(i, j);
                }
            }
            quad += self.labels[i] * alphas[i] * acc;
        }
        alphas.iter().sum::<f64>() - quad / (4.0 * self.lambda)
    }

    /// Primal objective at the representer coefficients implied by `alphas`
    /// and the given intercept.
    pub fn primal_objective(&self, alphas: &[f64], intercept: f64) -> f64 {
        let n = self.n();
        let coeffs: Vec<f64> = (0..n).map(|i| self.labels[i] * alphas[i] / (2.0 * self.lambda)).collect();
        let g: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| coeffs[j] * self.kernel_entry(i, j)).sum::<f64>())
            .collect();
        let hinge: f64 = (0..n)
            .map(|i| self.weights[i] * (1.0 - self.labels[i] * (g[i] + intercept)).max(0.0))
            .sum();
        let ridge: f64 = (0..n).map(|i| coeffs[i] * g[i]).sum();
        hinge / n as f64 + self.lambda * ridge
    }
}

/// Trained decision function `f(x) = d + Σ_i c_i K(x_i, x)`.
#[derive(Clone, Debug)]
pub struct DecisionFunction {
    pub support: Arc<PointMatrix>,
    pub kernel: KernelSpec,
    pub coeffs: Vec<f64>,
    pub intercept: f64,
}

impl DecisionFunction {
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.support.dim() {
            return Err(Error::DimensionMismatch(x.len(), self.support.dim()));
        }
        let mut f = self.intercept;
        for (i, c) in self.coeffs.iter().enumerate() {
            f += c * self.kernel.eval_unchecked(self.support.row(i), x);
        }
        Ok(f)
    }

    /// f given a precomputed kernel row against the support points.
    #[inline]
    pub(crate) fn evaluate_with_kernel_row(&self, krow: &[f64]) -> f64 {
        self.intercept + self.coeffs.iter().zip(krow).map(|(c, k)| c * k).sum::<f64>()
    }
}

/// Dual variables and convergence diagnostics of one solve.
#[derive(Clone, Debug)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 100_000 }
    }
}

/// Solve the dual QP by two-variable working-set descent.
pub fn solve(problem: &WeightedBinaryProblem, opts: &SolveOptions) -> Result<(DecisionFunction, DualSolution)> {
    solve_inner(problem, opts, None, None)
}

/// Solve starting from a feasible dual point, typically the solution of a
/// neighboring λ on the same data (the box does not depend on λ, so such a
/// point stays feasible). The result satisfies the same KKT tolerance as a
/// cold solve.
pub fn solve_warm(
    problem: &WeightedBinaryProblem,
    opts: &SolveOptions,
    alpha_init: &[f64],
) -> Result<(DecisionFunction, DualSolution)> {
    solve_inner(problem, opts, None, Some(alpha_init))
}

/// Like [`solve`] but records the dual objective after every pair update.
/// Only intended for diagnostics and tests; the trace costs O(n²) per
/// iteration.
pub fn solve_traced(
    problem: &WeightedBinaryProblem,
    opts: &SolveOptions,
    trace: &mut Vec<f64>,
) -> Result<(DecisionFunction, DualSolution)> {
    solve_inner(problem, opts, Some(trace), None)
}

fn solve_inner(
    problem: &WeightedBinaryProblem,
    opts: &SolveOptions,
    mut trace: Option<&mut Vec<f64>>,
    alpha_init: Option<&[f64]>,
) -> Result<(DecisionFunction, DualSolution)> {
    let n = problem.n();
    let inv2l = 1.0 / (2.0 * problem.lambda);
    let y = &problem.labels;
    let caps = problem.caps();
    let qmat = problem.conjugated();
    let qdiag: Vec<f64> = (0..n).map(|t| qmat[t * n + t]).collect();

    // grad is the gradient of (1/2)αᵀHα - Σα with H = qmat/(2λ).
    let (mut alpha, mut grad) = match alpha_init {
        None => (vec![0.0; n], vec![-1.0; n]),
        Some(a0) => {
            if a0.len() != n {
                return Err(Error::DimensionMismatch(a0.len(), n));
            }
            // Project onto the feasible set: the pair updates below preserve
            // the equality constraint, so the start must satisfy it.
            let alpha = project_feasible(a0, y, &caps);
            let mut grad = vec![-1.0; n];
            for i in 0..n {
                if alpha[i] == 0.0 {
                    continue;
                }
                let scale = alpha[i] * inv2l;
                let qrow = &qmat[i * n..(i + 1) * n];
                for t in 0..n {
                    grad[t] += scale * qrow[t];
                }
            }
            (alpha, grad)
        }
    };

    // Descent alone stalls on ill-conditioned small-λ problems, so budget a
    // prelude and hand the endgame to the direct active-set phase. Traced
    // solves stay pure descent so the recorded objectives cover every step.
    let prelude = if trace.is_some() { opts.max_iter } else { opts.max_iter.min(2000.max(4 * n)) };

    let mut iterations = 0;
    let mut gap = loop {
        // Pass 1: the most violating up-candidate and the low-side extreme,
        // over e_t = -y_t grad_t.
        let mut m_up = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        let mut i_up = usize::MAX;
        for t in 0..n {
            if caps[t] < FROZEN_BOX {
                continue;
            }
            let e = -y[t] * grad[t];
            let positive = y[t] > 0.0;
            if (if positive { alpha[t] < caps[t] } else { alpha[t] > 0.0 }) && e > m_up {
                m_up = e;
                i_up = t;
            }
            if (if positive { alpha[t] > 0.0 } else { alpha[t] < caps[t] }) && e < m_low {
                m_low = e;
            }
        }
        if i_up == usize::MAX || !m_low.is_finite() || m_up - m_low <= opts.tol {
            break (m_up - m_low).max(0.0);
        }
        if iterations >= prelude {
            break f64::NAN; // hand off below
        }
        iterations += 1;

        // Pass 2: among sufficiently violating low-candidates pick the
        // largest second-order gain b²/a.
        let i = i_up;
        let qrow_i = &qmat[i * n..(i + 1) * n];
        let yi = y[i];
        let mut i_low = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..n {
            if caps[t] < FROZEN_BOX {
                continue;
            }
            let positive = y[t] > 0.0;
            if !(if positive { alpha[t] > 0.0 } else { alpha[t] < caps[t] }) {
                continue;
            }
            let e = -y[t] * grad[t];
            let b = m_up - e;
            if b <= opts.tol {
                continue;
            }
            // a = (K̃_ii + K̃_tt - 2 K̃_it) / 2λ with K̃_it = y_i y_t q_it
            let mut a = (qdiag[i] + qdiag[t] - 2.0 * yi * y[t] * qrow_i[t]) * inv2l;
            if a <= 0.0 {
                a = TAU;
            }
            let gain = b * b / a;
            if gain > best_gain {
                best_gain = gain;
                i_low = t;
            }
        }
        if i_low == usize::MAX {
            break (m_up - m_low).max(0.0);
        }

        let j = i_low;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ci, cj) = (caps[i], caps[j]);
        let qij = qmat[i * n + j];
        if y[i] != y[j] {
            let mut quad = (qdiag[i] + qdiag[j] + 2.0 * qij) * inv2l;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = (qdiag[i] + qdiag[j] - 2.0 * qij) * inv2l;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        if di != 0.0 || dj != 0.0 {
            let si = di * inv2l;
            let sj = dj * inv2l;
            let (head, tail) = qmat.split_at(i.max(j) * n);
            let (qi, qj) = if i < j {
                (&head[i * n..i * n + n], &tail[..n])
            } else {
                (&tail[..n], &head[j * n..j * n + n])
            };
            for t in 0..n {
                grad[t] += si * qi[t] + sj * qj[t];
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(problem.dual_objective(&alpha));
        }
    };

    if gap.is_nan() {
        if trace.is_some() {
            return Err(Error::NoConvergence { iterations, gap: current_gap(&alpha, &grad, y, &caps) });
        }
        gap = match active_set::finish(&qmat, y, &caps, inv2l, &mut alpha, &mut grad, opts.tol, FROZEN_BOX) {
            Ok(g) => g,
            // The direct phase could not certify optimality; report the
            // honest working-set gap.
            Err(_) => {
                return Err(Error::NoConvergence { iterations: opts.max_iter, gap: current_gap(&alpha, &grad, y, &caps) });
            }
        };
    }

    let (coeffs, intercept) = recover_primal(problem, &alpha, &grad, &caps, opts.tol);
    let f = DecisionFunction { support: problem.support.clone(), kernel: problem.kernel, coeffs, intercept };
    Ok((f, DualSolution { alphas: alpha, kkt_residual: gap, iterations }))
}

fn current_gap(alpha: &[f64], grad: &[f64], y: &[f64], caps: &[f64]) -> f64 {
    let mut m_up = f64::NEG_INFINITY;
    let mut m_low = f64::INFINITY;
    for t in 0..y.len() {
        if caps[t] < FROZEN_BOX {
            continue;
        }
        let e = -y[t] * grad[t];
        let positive = y[t] > 0.0;
        if (if positive { alpha[t] < caps[t] } else { alpha[t] > 0.0 }) && e > m_up {
            m_up = e;
        }
        if (if positive { alpha[t] > 0.0 } else { alpha[t] < caps[t] }) && e < m_low {
            m_low = e;
        }
    }
    (m_up - m_low).max(0.0)
}

/// Euclidean projection onto {0 ≤ z ≤ cap, yᵀz = 0} by bisection on the
/// hyperplane multiplier; yᵀ clamp(z - νy) is non-increasing in ν.
pub(crate) fn project_feasible(z: &[f64], y: &[f64], caps: &[f64]) -> Vec<f64> {
    let clamp = |nu: f64| -> Vec<f64> {
        z.iter().zip(y).zip(caps).map(|((&zi, &yi), &ci)| (zi - nu * yi).clamp(0.0, ci)).collect()
    };
    let residual = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };
    if residual(&clamp(0.0)).abs() < 1e-15 {
        return clamp(0.0);
    }
    let bound = z.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + caps.iter().fold(0.0_f64, |m, v| m.max(*v)) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(&clamp(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * bound {
            break;
        }
    }
    clamp(0.5 * (lo + hi))
}

fn recover_primal(
    problem: &WeightedBinaryProblem,
    alpha: &[f64],
    grad: &[f64],
    caps: &[f64],
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = alpha.len();
    let y = &problem.labels;
    let coeffs: Vec<f64> = (0..n).map(|i| y[i] * alpha[i] / (2.0 * problem.lambda)).collect();

    // e_t = -y_t grad_t = y_t - g(x_t) is the intercept candidate at t.
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 0..n {
        if caps[t] < FROZEN_BOX {
            continue;
        }
        let e = -y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < caps[t] - tol {
            free_sum += e;
            free_count += 1;
        }
        let positive = y[t] > 0.0;
        let at_zero = alpha[t] <= 0.0;
        let at_cap = alpha[t] >= caps[t] - tol;
        // y f >= 1 at alpha = 0 and y f <= 1 at the cap bound the intercept.
        if (at_zero && positive) || (at_cap && !positive) {
            lower = lower.max(e);
        }
        if (at_zero && !positive) || (at_cap && positive) {
            upper = upper.min(e);
        }
    }
    let intercept = if free_count > 0 {
        free_sum / free_count as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    };
    (coeffs, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gram_square;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem_1d() -> WeightedBinaryProblem {
        let pts = Arc::new(PointMatrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap());
        let gram = Arc::new(gram_square(&pts, &KernelSpec::Linear).unwrap());
        WeightedBinaryProblem::new(pts, KernelSpec::Linear, gram, vec![-1.0, 1.0], vec![0.5, 0.5], 0.1).unwrap()
    }

    #[test]
    fn hand_solved_two_point_problem() {
        let problem = problem_1d();
        let (f, sol) = solve(&problem, &SolveOptions::default()).unwrap();
        assert!((sol.alphas[0] - 0.1).abs() < 1e-8, "{:?}", sol.alphas);
        assert!((sol.alphas[1] - 0.1).abs() < 1e-8);
        assert!(sol.kkt_residual <= 1e-6);
        // f(x) = x
        assert!(f.intercept.abs() < 1e-8);
        assert!((f.evaluate(&[0.3]).unwrap() - 0.3).abs() < 1e-8);
        assert!((f.evaluate(&[-1.0]).unwrap() + 1.0).abs() < 1e-8);
    }

    #[test]
    fn label_flip_negates_solution() {
        let problem = problem_1d();
        let (f, _) = solve(&problem, &SolveOptions::default()).unwrap();
        let pts = Arc::new(PointMatrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap());
        let gram = Arc::new(gram_square(&pts, &KernelSpec::Linear).unwrap());
        let flipped =
            WeightedBinaryProblem::new(pts, KernelSpec::Linear, gram, vec![1.0, -1.0], vec![0.5, 0.5], 0.1).unwrap();
        let (g, _) = solve(&flipped, &SolveOptions::default()).unwrap();
        for x in [-0.8, 0.0, 0.4, 2.0] {
            let a = f.evaluate(&[x]).unwrap();
            let b = g.evaluate(&[x]).unwrap();
            assert!((a + b).abs() < 1e-8);
        }
        assert!((f.intercept + g.intercept).abs() < 1e-8);
    }

    #[test]
    fn constant_function_evaluation() {
        let pts = Arc::new(PointMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap());
        let f = DecisionFunction { support: pts, kernel: KernelSpec::Linear, coeffs: vec![0.0], intercept: 0.7 };
        assert_eq!(f.evaluate(&[5.0, -3.0]).unwrap(), 0.7);
        assert!(f.evaluate(&[1.0]).is_err());
    }

    pub(crate) fn random_problem(rng: &mut ChaCha8Rng, n: usize, rbf: bool) -> WeightedBinaryProblem {
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| vec![rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0]).collect();
        let pts = Arc::new(PointMatrix::from_rows(&rows).unwrap());
        let spec = if rbf { KernelSpec::rbf(0.5 + rng.gen::<f64>() * 2.0).unwrap() } else { KernelSpec::Linear };
        let gram = Arc::new(gram_square(&pts, &spec).unwrap());
        let mut labels: Vec<f64> = (0..n).map(|_| if rng.gen::<f64>() < 0.5 { 1.0 } else { -1.0 }).collect();
        labels[0] = 1.0;
        labels[1] = -1.0;
        let weights: Vec<f64> = (0..n).map(|_| 0.05 + 0.95 * rng.gen::<f64>()).collect();
        let lambda = 10f64.powf(rng.gen::<f64>() * 5.0 - 4.0); // 1e-4 .. 10
        WeightedBinaryProblem::new(pts, spec, gram, labels, weights, lambda).unwrap()
    }

    #[test]
    fn kkt_conditions_hold_on_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let opts = SolveOptions::default();
        for trial in 0..25 {
            let n = 5 + (trial % 20);
            let problem = random_problem(&mut rng, n, trial % 2 == 0);
            let (f, sol) = solve(&problem, &opts).unwrap();
            assert!(sol.kkt_residual <= opts.tol);
            // feasibility
            let eq: f64 = sol.alphas.iter().zip(&problem.labels).map(|(a, y)| a * y).sum();
            assert!(eq.abs() <= 1e-9, "equality violation {eq}");
            let caps = problem.caps();
            for (a, c) in sol.alphas.iter().zip(&caps) {
                assert!(*a >= -1e-15 && *a <= c + 1e-15);
            }
            // complementarity against the fitted function
            let check = 5.0 * opts.tol;
            for i in 0..n {
                let yf = problem.labels[i] * f.evaluate(problem.support.row(i)).unwrap();
                if sol.alphas[i] <= 0.0 {
                    assert!(yf >= 1.0 - check, "alpha=0 but yf={yf}");
                } else if sol.alphas[i] >= caps[i] - opts.tol {
                    assert!(yf <= 1.0 + check, "alpha at cap but yf={yf}");
                } else {
                    assert!((yf - 1.0).abs() <= check, "free alpha but yf={yf}");
                }
            }
            // weak duality gap closes
            let gap = problem.primal_objective(&sol.alphas, f.intercept) - problem.dual_objective(&sol.alphas);
            assert!(gap >= -1e-9, "negative duality gap {gap}");
            assert!(gap <= 1e-5, "duality gap too large: {gap}");
        }
    }

    #[test]
    fn matches_reference_oracle_on_small_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let opts = SolveOptions::default();
        for trial in 0..20 {
            let n = 4 + (trial % 12);
            let problem = random_problem(&mut rng, n, trial % 2 == 1);
            let (_, sol) = solve(&problem, &opts).unwrap();
            let oracle = reference::solve_projected_gradient(&problem, 1e-8, 500_000);
            let ours = problem.dual_objective(&sol.alphas);
            assert!(
                (ours - oracle.objective).abs() <= 1e-6,
                "trial {trial}: {ours} vs oracle {}",
                oracle.objective
            );
        }
    }

    #[test]
    fn warm_start_reaches_the_same_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let opts = SolveOptions::default();
        for trial in 0..5 {
            let base = random_problem(&mut rng, 20, trial % 2 == 0);
            let (_, cold) = solve(&base, &opts).unwrap();
            // halve lambda and restart from the previous solution
            let next = WeightedBinaryProblem::new(
                base.support.clone(),
                base.kernel,
                base.gram.clone(),
                base.labels.clone(),
                base.weights.clone(),
                base.lambda / 2.0,
            )
            .unwrap();
            let (_, warm) = solve_warm(&next, &opts, &cold.alphas).unwrap();
            assert!(warm.kkt_residual <= opts.tol);
            let (_, cold2) = solve(&next, &opts).unwrap();
            let d = (next.dual_objective(&warm.alphas) - next.dual_objective(&cold2.alphas)).abs();
            assert!(d <= 1e-6, "warm and cold objectives differ by {d}");
        }
    }

    #[test]
    fn dual_objective_is_monotone_over_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..5 {
            let problem = random_problem(&mut rng, 20, trial % 2 == 0);
            let mut trace = Vec::new();
            solve_traced(&problem, &SolveOptions::default(), &mut trace).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "objective decreased: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn evaluate_matches_gram_route_at_support_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let problem = random_problem(&mut rng, 15, true);
        let (f, _) = solve(&problem, &SolveOptions::default()).unwrap();
        // the same fitted value through the precomputed Gram row
        for i in 0..15 {
            let via_gram: f64 = f.intercept
                + f.coeffs.iter().enumerate().map(|(j, c)| c * problem.gram.get(j, i)).sum::<f64>();
            let direct = f.evaluate(problem.support.row(i)).unwrap();
            assert!((via_gram - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_single_sided_problems() {
        let pts = Arc::new(PointMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap());
        let gram = Arc::new(gram_square(&pts, &KernelSpec::Linear).unwrap());
        let r = WeightedBinaryProblem::new(pts, KernelSpec::Linear, gram, vec![1.0, 1.0], vec![0.5, 0.5], 0.1);
        assert!(r.is_err());
    }
}
