//! Direct active-set finishing phase for the dual QP.
//!
//! Two-variable descent stalls when λ is tiny: the effective box is huge,
//! most dual variables end up strictly inside it, and the iteration count
//! grows with the conditioning of the kernel matrix. The fix is direct: fix
//! the bounded variables, solve the equality-constrained quadratic exactly
//! on the free set by Cholesky, step to the nearest bound, and exchange one
//! constraint at a time. Each step is monotone in the dual objective, so the
//! phase composes cleanly with the descent prelude.

use crate::error::{Error, Result};

const REFINE_ROUNDS: usize = 2;

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarState {
    Free,
    Lower,
    Upper,
    Frozen,
}

/// In-place dense Cholesky (lower triangle), `mat` is n×n row-major.
fn cholesky(mat: &mut [f64], n: usize) -> Result<()> {
    for i in 0..n {
        for j in 0..=i {
            let mut sum = mat[i * n + j];
            for k in 0..j {
                sum -= mat[i * n + k] * mat[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::InvalidInput("kernel block is not positive definite".into()));
                }
                mat[i * n + j] = sum.sqrt();
            } else {
                mat[i * n + j] = sum / mat[j * n + j];
            }
        }
    }
    Ok(())
}

fn chol_solve(l: &[f64], n: usize, rhs: &[f64]) -> Vec<f64> {
    let mut x = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[i * n + k] * x[k];
        }
        x[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l[k * n + i] * x[k];
        }
        x[i] /= l[i * n + i];
    }
    x
}

/// Solve `hff x = rhs` with iterative refinement against the unfactored
/// matrix.
fn solve_refined(l: &[f64], hff: &[f64], nf: usize, rhs: &[f64]) -> Vec<f64> {
    let mut x = chol_solve(l, nf, rhs);
    for _ in 0..REFINE_ROUNDS {
        let mut r = rhs.to_vec();
        for i in 0..nf {
            let row = &hff[i * nf..(i + 1) * nf];
            let mut acc = 0.0;
            for (hj, xj) in row.iter().zip(&x) {
                acc += hj * xj;
            }
            r[i] -= acc;
        }
        let d = chol_solve(l, nf, &r);
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += di;
        }
    }
    x
}

/// Drive `alpha`/`grad` (grad = Hα - 1) to a KKT point with gap ≤ tol.
/// Returns the final gap. `qmat` is the label-conjugated jittered kernel
/// matrix; H = qmat · inv2l.
pub(super) fn finish(
    qmat: &[f64],
    y: &[f64],
    caps: &[f64],
    inv2l: f64,
    alpha: &mut [f64],
    grad: &mut [f64],
    tol: f64,
    frozen_box: f64,
) -> Result<f64> {
    let n = y.len();
    let mut state: Vec<VarState> = (0..n)
        .map(|t| {
            if caps[t] < frozen_box {
                VarState::Frozen
            } else if alpha[t] <= 0.0 {
                VarState::Lower
            } else if alpha[t] >= caps[t] {
                VarState::Upper
            } else {
                VarState::Free
            }
        })
        .collect();

    let gap_of = |alpha: &[f64], grad: &[f64]| -> f64 {
        let mut m_up = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            if caps[t] < frozen_box {
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
    };

    let outer_cap = 100 + 2 * n;
    for _outer in 0..outer_cap {
        let free: Vec<usize> = (0..n).filter(|&t| state[t] == VarState::Free).collect();
        let nf = free.len();

        if nf == 0 {
            // Everything bounded: either optimal or release the worst
            // violator against the feasible intercept interval.
            let gap = gap_of(alpha, grad);
            if gap <= tol {
                return Ok(gap);
            }
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for t in 0..n {
                if state[t] == VarState::Frozen {
                    continue;
                }
                let e = -y[t] * grad[t];
                let positive = y[t] > 0.0;
                let at_zero = state[t] == VarState::Lower;
                if (at_zero && positive) || (!at_zero && !positive) {
                    lo = lo.max(e);
                }
                if (at_zero && !positive) || (!at_zero && positive) {
                    hi = hi.min(e);
                }
            }
            let nu = 0.5 * (lo.max(-1e300) + hi.min(1e300));
            let worst = worst_violator(&state, y, grad, nu, tol);
            match worst {
                Some(t) => state[t] = VarState::Free,
                None => return Ok(gap),
            }
            continue;
        }

        // Equality-constrained solve on the free set.
        let mut hff = vec![0.0; nf * nf];
        for (r, &fr) in free.iter().enumerate() {
            let qrow = &qmat[fr * n..(fr + 1) * n];
            for (c, &fc) in free.iter().enumerate() {
                hff[r * nf + c] = qrow[fc] * inv2l;
            }
        }
        let mut l = hff.clone();
        let mut boost = 0.0;
        for attempt in 0..4 {
            match cholesky(&mut l, nf) {
                Ok(()) => break,
                Err(e) if attempt == 3 => return Err(e),
                Err(_) => {
                    boost = if boost == 0.0 { 1e-12 } else { boost * 1e3 };
                    let scale: f64 = (0..nf).map(|r| hff[r * nf + r]).fold(0.0, f64::max);
                    l.copy_from_slice(&hff);
                    for r in 0..nf {
                        l[r * nf + r] += boost * scale.max(1.0);
                    }
                }
            }
        }

        // rhs_a = 1 - H_FB α_B = -grad_F + H_FF α_F
        let alpha_f: Vec<f64> = free.iter().map(|&t| alpha[t]).collect();
        let mut rhs_a = vec![0.0; nf];
        for r in 0..nf {
            let row = &hff[r * nf..(r + 1) * nf];
            let mut acc = 0.0;
            for (hj, aj) in row.iter().zip(&alpha_f) {
                acc += hj * aj;
            }
            rhs_a[r] = -grad[free[r]] + acc;
        }
        let y_f: Vec<f64> = free.iter().map(|&t| y[t]).collect();
        let a = solve_refined(&l, &hff, nf, &rhs_a);
        let b = solve_refined(&l, &hff, nf, &y_f);

        let ytb: f64 = y_f.iter().zip(&b).map(|(u, v)| u * v).sum();
        if ytb <= 0.0 {
            return Err(Error::InvalidInput("degenerate equality system in active-set phase".into()));
        }
        let bounded_mass: f64 = (0..n)
            .filter(|&t| state[t] == VarState::Upper)
            .map(|t| y[t] * alpha[t])
            .sum();
        let yta: f64 = y_f.iter().zip(&a).map(|(u, v)| u * v).sum();
        let nu = (yta + bounded_mass) / ytb;
        let target: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| ai - nu * bi).collect();

        // Largest feasible step toward the target.
        let mut step = 1.0_f64;
        let mut blocker: Option<(usize, VarState)> = None;
        for (r, &t) in free.iter().enumerate() {
            let dir = target[r] - alpha[t];
            if dir < 0.0 && target[r] < 0.0 {
                let s = alpha[t] / (alpha[t] - target[r]);
                if s < step {
                    step = s;
                    blocker = Some((t, VarState::Lower));
                }
            } else if dir > 0.0 && target[r] > caps[t] {
                let s = (caps[t] - alpha[t]) / (target[r] - alpha[t]);
                if s < step {
                    step = s;
                    blocker = Some((t, VarState::Upper));
                }
            }
        }

        // Apply the move and refresh the gradient incrementally.
        let mut delta = vec![0.0; nf];
        for (r, &t) in free.iter().enumerate() {
            let d = step * (target[r] - alpha[t]);
            delta[r] = d;
            alpha[t] += d;
        }
        if let Some((t, s)) = blocker {
            alpha[t] = if s == VarState::Lower { 0.0 } else { caps[t] };
            state[t] = s;
        }
        for tt in 0..n {
            let mut acc = 0.0;
            for (r, &fr) in free.iter().enumerate() {
                if delta[r] != 0.0 {
                    acc += qmat[fr * n + tt] * delta[r];
                }
            }
            grad[tt] += acc * inv2l;
        }

        if blocker.is_none() {
            // Interior optimum on this face; release a violator or accept.
            let gap = gap_of(alpha, grad);
            if gap <= tol {
                return Ok(gap);
            }
            match worst_violator(&state, y, grad, nu, tol) {
                Some(t) => state[t] = VarState::Free,
                None => return Ok(gap),
            }
        }
    }
    Err(Error::NoConvergence { iterations: outer_cap, gap: gap_of(alpha, grad) })
}

/// The bounded variable whose KKT multiplier sign is most violated at the
/// intercept ν.
fn worst_violator(state: &[VarState], y: &[f64], grad: &[f64], nu: f64, tol: f64) -> Option<usize> {
    let mut worst: Option<(usize, f64)> = None;
    for t in 0..state.len() {
        let excess = match state[t] {
            VarState::Free | VarState::Frozen => continue,
            VarState::Lower => {
                let e = -y[t] * grad[t];
                if y[t] > 0.0 {
                    e - nu
                } else {
                    nu - e
                }
            }
            VarState::Upper => {
                let e = -y[t] * grad[t];
                if y[t] > 0.0 {
                    nu - e
                } else {
                    e - nu
                }
            }
        };
        if excess > tol * 0.5 {
            match worst {
                Some((_, w)) if w >= excess => {}
                _ => worst = Some((t, excess)),
            }
        }
    }
    worst.map(|(t, _)| t)
}
