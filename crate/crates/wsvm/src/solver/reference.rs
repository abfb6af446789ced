//! Brute-force projected-gradient solver for the weighted dual QP.
//!
//! Deliberately independent of the working-set solver: it maximizes the same
//! dual objective by accelerated projected gradient ascent, projecting onto
//! the box-and-hyperplane feasible set by bisection on the hyperplane
//! multiplier. Convergence is certified through the linearization gap
//! `max_{z feasible} ∇D(x)ᵀ(z - x)`, which upper-bounds the objective error
//! for a concave objective. Slow but trustworthy; used to cross-check the
//! main solver on small instances.

use super::WeightedBinaryProblem;

#[derive(Clone, Debug)]
pub struct ReferenceSolution {
    pub alphas: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximize the dual by projected gradient ascent with Nesterov momentum and
/// a monotone restart. `tol` bounds the certified objective error.
pub fn solve_projected_gradient(problem: &WeightedBinaryProblem, tol: f64, max_iter: usize) -> ReferenceSolution {
    let n = problem.labels.len();
    let y = &problem.labels;
    let caps = problem.caps();

    // Dense H with H_ij = y_i y_j (K_ij + jitter δ_ij) / (2λ).
    let inv2l = 1.0 / (2.0 * problem.lambda);
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] = y[i] * y[j] * problem.kernel_entry(i, j) * inv2l;
        }
    }
    let matvec = |x: &[f64]| -> Vec<f64> {
        (0..n).map(|i| h[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    };
    let objective = |x: &[f64]| -> f64 {
        let hx = matvec(x);
        x.iter().sum::<f64>() - 0.5 * x.iter().zip(&hx).map(|(a, b)| a * b).sum::<f64>()
    };
    let gradient = |x: &[f64]| -> Vec<f64> {
        let hx = matvec(x);
        hx.iter().map(|v| 1.0 - v).collect()
    };

    // Step size from the infinity-norm bound on the spectral radius.
    let lip = (0..n)
        .map(|i| h[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let step = 1.0 / lip;

    let project = |z: &[f64]| -> Vec<f64> { project_box_hyperplane(z, y, &caps) };

    let mut x = vec![0.0; n];
    let mut obj_x = objective(&x);
    let mut v = x.clone();
    let mut t = 1.0_f64;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let gv = gradient(&v);
        let cand: Vec<f64> = project(&v.iter().zip(&gv).map(|(a, g)| a + step * g).collect::<Vec<_>>());
        let (x_new, obj_new) = {
            let o = objective(&cand);
            if o + 1e-18 >= obj_x {
                (cand, o)
            } else {
                // momentum overshoot: restart from the plain gradient step
                t = 1.0;
                let gx = gradient(&x);
                let plain: Vec<f64> = project(&x.iter().zip(&gx).map(|(a, g)| a + step * g).collect::<Vec<_>>());
                let o = objective(&plain);
                (plain, o)
            }
        };
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        v = x_new.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        x = x_new;
        obj_x = obj_new;
        t = t_new;

        if iterations % 10 == 0 {
            let g = gradient(&x);
            let gap = linearization_gap(&x, &g, y, &caps);
            if gap <= tol * obj_x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }

    ReferenceSolution { objective: objective(&x), alphas: x, iterations, converged }
}

/// Euclidean projection onto {0 ≤ z ≤ cap, yᵀz = 0} by bisection on the
/// hyperplane multiplier. yᵀ clamp(z - νy) is non-increasing in ν.
fn project_box_hyperplane(z: &[f64], y: &[f64], caps: &[f64]) -> Vec<f64> {
    let clamp = |nu: f64| -> Vec<f64> {
        z.iter()
            .zip(y)
            .zip(caps)
            .map(|((&zi, &yi), &ci)| (zi - nu * yi).clamp(0.0, ci))
            .collect()
    };
    let residual = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };

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

/// max over the feasible polytope of gᵀ(z - x); the LP value is computed
/// through its one-dimensional dual min_μ Σ_i cap_i [g_i - μ y_i]_+.
fn linearization_gap(x: &[f64], g: &[f64], y: &[f64], caps: &[f64]) -> f64 {
    let phi = |mu: f64| -> f64 {
        g.iter()
            .zip(y)
            .zip(caps)
            .map(|((&gi, &yi), &ci)| ci * (gi - mu * yi).max(0.0))
            .sum()
    };
    // candidate breakpoints where a term crosses zero: μ = g_i y_i
    let mut best = f64::INFINITY;
    for i in 0..g.len() {
        best = best.min(phi(g[i] * y[i]));
    }
    best = best.min(phi(0.0));
    let gx: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    best - gx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{gram_square, KernelSpec};
    use crate::types::PointMatrix;
    use std::sync::Arc;

    #[test]
    fn solves_hand_checkable_problem() {
        // the interior optimum alpha = (0.1, 0.1) problem
        let pts = Arc::new(PointMatrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap());
        let gram = Arc::new(gram_square(&pts, &KernelSpec::Linear).unwrap());
        let problem = WeightedBinaryProblem::new(
            pts,
            KernelSpec::Linear,
            gram,
            vec![-1.0, 1.0],
            vec![0.5, 0.5],
            0.1,
        )
        .unwrap();
        let sol = solve_projected_gradient(&problem, 1e-10, 200_000);
        assert!(sol.converged);
        assert!((sol.alphas[0] - 0.1).abs() < 1e-6, "{:?}", sol.alphas);
        assert!((sol.alphas[1] - 0.1).abs() < 1e-6);
        // optimum value 2(0.1) - 10(0.1)^2 = 0.1
        assert!((sol.objective - 0.1).abs() < 1e-9);
    }

    #[test]
    fn projection_is_feasible_and_idempotent() {
        let y = [1.0, -1.0, 1.0, -1.0];
        let caps = [0.3, 0.2, 0.1, 0.4];
        let z = [0.5, -0.1, 0.05, 0.6];
        let p = project_box_hyperplane(&z, &y, &caps);
        let eq: f64 = p.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!(eq.abs() < 1e-12);
        for (v, c) in p.iter().zip(&caps) {
            assert!(*v >= -1e-15 && *v <= c + 1e-15);
        }
        let p2 = project_box_hyperplane(&p, &y, &caps);
        for (a, b) in p.iter().zip(&p2) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
