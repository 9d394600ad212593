//! Jacobi-preconditioned conjugate gradients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::operator::{dot, norm, RankOneShift, SymOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Target `‖Ax − b‖ ≤ rel_tol · ‖b‖`.
    pub rel_tol: f64,
    /// Defaults to `20·√dim + 200`.
    pub max_iter: Option<usize>,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            rel_tol: 1e-10,
            max_iter: None,
        }
    }
}

impl CgOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        CgOptions {
            rel_tol,
            max_iter: None,
        }
    }

    pub fn iteration_limit(&self, dim: usize) -> usize {
        self.max_iter
            .unwrap_or_else(|| (20.0 * (dim as f64).sqrt()).ceil() as usize + 200)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `‖Ax − b‖ / ‖b‖`, recomputed from scratch.
    pub residual: f64,
}

pub fn cg_solve<A: SymOperator + ?Sized>(
    a: &A,
    rhs: &[f64],
    opts: &CgOptions,
) -> Result<CgOutcome> {
    cg_solve_from(a, rhs, None, opts)
}

/// Conjugate gradients from an optional starting guess.
pub fn cg_solve_from<A: SymOperator + ?Sized>(
    a: &A,
    rhs: &[f64],
    start: Option<&[f64]>,
    opts: &CgOptions,
) -> Result<CgOutcome> {
    let n = a.dim();
    if rhs.len() != n {
        return Err(Error::SectionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in (0, 1), got {}",
            opts.rel_tol
        )));
    }
    let limit = opts.iteration_limit(n);
    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::SingularOperator);
    }
    let diag_max = diag.iter().copied().fold(0.0, f64::max);
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let target = opts.rel_tol * b_norm;

    let mut x = match start {
        Some(x0) if x0.len() == n => x0.to_vec(),
        _ => vec![0.0; n],
    };
    let mut ax = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;

    // restart from the true residual whenever the recurrence claims success
    loop {
        a.apply(&x, &mut ax);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, q)| b - q).collect();
        let mut r_norm = norm(&r);
        if r_norm <= target {
            return Ok(CgOutcome {
                x,
                iterations,
                residual: r_norm / b_norm,
            });
        }
        if iterations >= limit {
            return Err(Error::NoConvergence {
                iterations,
                residual: r_norm / b_norm,
            });
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, d)| ri * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while r_norm > target && iterations < limit {
            a.apply(&p, &mut ap);
            let curvature = dot(&p, &ap);
            if curvature <= 1e-14 * diag_max * dot(&p, &p) {
                return Err(Error::SingularOperator);
            }
            let alpha = rz / curvature;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            r_norm = norm(&r);
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOneMethod {
    /// CG on `A + e_o e_oᵀ` directly.
    Direct,
    /// Two CG solves with `A` combined by the Sherman–Morrison identity.
    /// Requires `A` itself to be positive definite.
    ShermanMorrison,
}

/// `(A + e_o e_oᵀ)⁻¹ rhs`.
pub fn solve_rank_one<A: SymOperator + ?Sized>(
    a: &A,
    o: usize,
    rhs: &[f64],
    opts: &CgOptions,
    method: RankOneMethod,
) -> Result<Vec<f64>> {
    if o >= a.dim() {
        return Err(Error::UnknownVertex(o.to_string()));
    }
    match method {
        RankOneMethod::Direct => {
            let shifted = RankOneShift {
                inner: a,
                vertex: o,
            };
            Ok(cg_solve(&shifted, rhs, opts)?.x)
        }
        RankOneMethod::ShermanMorrison => {
            let y = cg_solve(a, rhs, opts)?.x;
            let mut e = vec![0.0; a.dim()];
            e[o] = 1.0;
            let w = cg_solve(a, &e, opts)?.x;
            let factor = y[o] / (1.0 + w[o]);
            Ok(y.iter().zip(&w).map(|(yi, wi)| yi - factor * wi).collect())
        }
    }
}
