//! Inner block solvers: cyclic coordinate descent for the l1-penalized
//! quadratic program
//!
//! ```text
//!   min_u  1/2 u'Au + a'u + lambda ||u||_1
//! ```
//!
//! and for the box-constrained quadratic program
//!
//! ```text
//!   min_v  1/2 (v+b)' Atil (v+b)   subject to  ||v||_inf <= lambda.
//! ```
//!
//! Both solvers keep the running gradient (`A u + a`, resp. `Atil (v+b)`)
//! up to date, so a coordinate that does not move costs O(1): zeros whose
//! subgradient condition already holds stay zero without a gradient update,
//! and box coordinates resting at `{-lambda, lambda}` with the gradient
//! pointing outward are likewise skipped.

use crate::error::{Error, Result};
use crate::symmat::{SymCols, SymmetricMatrix};

/// l1-penalized quadratic program: `min 1/2 u'Au + a'u + lambda ||u||_1`.
#[derive(Debug, Clone)]
pub struct L1QpProblem {
    pub a_mat: SymmetricMatrix,
    pub a: Vec<f64>,
    pub lambda: f64,
}

/// Box-constrained quadratic program:
/// `min 1/2 (v+b)'Atil(v+b)` over `||v||_inf <= lambda`.
#[derive(Debug, Clone)]
pub struct BoxQpProblem {
    pub atil: SymmetricMatrix,
    pub b: Vec<f64>,
    pub lambda: f64,
}

/// Options for the inner solvers.
#[derive(Debug, Clone)]
pub struct InnerOptions {
    /// Relative coordinate-change tolerance: a sweep converges when the
    /// largest coordinate move is at most `tol * (1 + max |coordinate|)`.
    pub tol: f64,
    /// Cap on full sweeps.
    pub max_sweeps: usize,
    /// Optional starting vector.
    pub warm: Option<Vec<f64>>,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_sweeps: 10_000,
            warm: None,
        }
    }
}

/// Result of an inner solve. `converged == false` means the sweep cap was
/// hit and `x` is the best iterate so far.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub x: Vec<f64>,
    /// The quadratic-term product at the solution: `A x` (l1 form) or
    /// `Atil (x + b)` (box form).
    pub ax: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Scalar soft-threshold: `sign(x) * max(|x| - t, 0)`.
#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

pub fn solve_l1_qp(prob: &L1QpProblem, opts: &InnerOptions) -> Result<InnerSolution> {
    solve_l1_qp_cols(
        &prob.a_mat,
        &prob.a,
        prob.lambda,
        opts.tol,
        opts.max_sweeps,
        opts.warm.as_deref(),
        |_| {},
    )
}

pub fn solve_box_qp(prob: &BoxQpProblem, opts: &InnerOptions) -> Result<InnerSolution> {
    solve_box_qp_cols(
        &prob.atil,
        &prob.b,
        prob.lambda,
        opts.tol,
        opts.max_sweeps,
        opts.warm.as_deref(),
        |_| {},
    )
}

fn check_inputs<M: SymCols>(m: &M, lin: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<()> {
    let q = m.dim();
    if lin.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            got: lin.len(),
        });
    }
    if let Some(w) = warm {
        if w.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: w.len(),
            });
        }
    }
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "penalty must be nonnegative, got {lambda}"
        )));
    }
    for j in 0..q {
        if !(m.diag(j) > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "quadratic form diagonal {:.3e} at index {j}",
                m.diag(j)
            )));
        }
    }
    Ok(())
}

/// Adds `delta * column_j` to `g`, where the column comes split in two
/// contiguous halves.
#[inline]
fn axpy_col(g: &mut [f64], delta: f64, lo: &[f64], hi: &[f64]) {
    let split = lo.len();
    for (gv, cv) in g[..split].iter_mut().zip(lo) {
        *gv += delta * cv;
    }
    for (gv, cv) in g[split..].iter_mut().zip(hi) {
        *gv += delta * cv;
    }
}

#[inline]
fn col_entry(lo: &[f64], hi: &[f64], k: usize) -> f64 {
    if k < lo.len() {
        lo[k]
    } else {
        hi[k - lo.len()]
    }
}

/// Column-access form of the l1 solver; `on_sweep` observes the iterate
/// after every full sweep (used by tests to watch objective descent).
pub(crate) fn solve_l1_qp_cols<M: SymCols, F: FnMut(&[f64])>(
    m: &M,
    a: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
    warm: Option<&[f64]>,
    mut on_sweep: F,
) -> Result<InnerSolution> {
    check_inputs(m, a, lambda, warm)?;
    let q = m.dim();
    let mut u = warm.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; q]);

    // Running gradient g = A u + a, built from the nonzero coordinates.
    let mut g = a.to_vec();
    for k in 0..q {
        if u[k] != 0.0 {
            let (lo, hi) = m.col_split(k);
            axpy_col(&mut g, u[k], lo, hi);
        }
    }

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_delta = 0.0_f64;
        let mut max_abs = 0.0_f64;
        for j in 0..q {
            let ajj = m.diag(j);
            let partial = g[j] - ajj * u[j];
            let new = soft_threshold(-partial, lambda) / ajj;
            let delta = new - u[j];
            if delta != 0.0 {
                let (lo, hi) = m.col_split(j);
                axpy_col(&mut g, delta, lo, hi);
                u[j] = new;
            }
            max_delta = max_delta.max(delta.abs());
            max_abs = max_abs.max(new.abs());
        }
        on_sweep(&u);
        if max_delta <= tol * (1.0 + max_abs) {
            converged = true;
            break;
        }
    }

    // Recompute A u exactly; the incremental gradient carries roundoff drift.
    let mut ax = vec![0.0; q];
    for k in 0..q {
        if u[k] != 0.0 {
            let (lo, hi) = m.col_split(k);
            axpy_col(&mut ax, u[k], lo, hi);
        }
    }
    Ok(InnerSolution {
        x: u,
        ax,
        sweeps,
        converged,
    })
}

/// Column-access form of the box solver. A warm start is clipped into the
/// box before use.
pub(crate) fn solve_box_qp_cols<M: SymCols, F: FnMut(&[f64])>(
    m: &M,
    b: &[f64],
    lambda: f64,
    tol: f64,
    max_sweeps: usize,
    warm: Option<&[f64]>,
    mut on_sweep: F,
) -> Result<InnerSolution> {
    check_inputs(m, b, lambda, warm)?;
    let q = m.dim();
    let mut v = warm.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; q]);
    for x in v.iter_mut() {
        *x = x.clamp(-lambda, lambda);
    }

    // Running gradient h = Atil (v + b).
    let mut h = vec![0.0; q];
    for k in 0..q {
        let resid = v[k] + b[k];
        if resid != 0.0 {
            let (lo, hi) = m.col_split(k);
            axpy_col(&mut h, resid, lo, hi);
        }
    }

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_delta = 0.0_f64;
        let mut max_abs = 0.0_f64;
        for j in 0..q {
            let ajj = m.diag(j);
            let partial = h[j] - ajj * (v[j] + b[j]);
            let new = (-b[j] - partial / ajj).clamp(-lambda, lambda);
            let delta = new - v[j];
            if delta != 0.0 {
                let (lo, hi) = m.col_split(j);
                axpy_col(&mut h, delta, lo, hi);
                v[j] = new;
            }
            max_delta = max_delta.max(delta.abs());
            max_abs = max_abs.max(new.abs());
        }
        on_sweep(&v);
        if max_delta <= tol * (1.0 + max_abs) {
            converged = true;
            break;
        }
    }

    let mut ax = vec![0.0; q];
    for k in 0..q {
        let resid = v[k] + b[k];
        if resid != 0.0 {
            let (lo, hi) = m.col_split(k);
            axpy_col(&mut ax, resid, lo, hi);
        }
    }
    Ok(InnerSolution {
        x: v,
        ax,
        sweeps,
        converged,
    })
}

/// Objective of the l1 form (test and diagnostic use).
pub fn l1_qp_objective(prob: &L1QpProblem, u: &[f64]) -> f64 {
    let au = prob.a_mat.mul_vec(u);
    0.5 * crate::symmat::dot(u, &au)
        + crate::symmat::dot(&prob.a, u)
        + prob.lambda * u.iter().map(|x| x.abs()).sum::<f64>()
}

/// Objective of the box form (test and diagnostic use).
pub fn box_qp_objective(prob: &BoxQpProblem, v: &[f64]) -> f64 {
    let resid: Vec<f64> = v.iter().zip(&prob.b).map(|(x, y)| x + y).collect();
    0.5 * crate::symmat::dot(&resid, &prob.atil.mul_vec(&resid))
}
