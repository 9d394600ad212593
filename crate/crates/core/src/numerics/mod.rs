//! Linear algebra backing the potential-theoretic computations: a CG solver
//! for symmetric positive definite systems, rank-one corrected solves, and
//! eigensolvers for diagonal-mass pencils.

mod cg;
mod eigen;
mod operator;

pub use cg::{cg_solve, cg_solve_from, solve_rank_one, CgOptions, CgOutcome, RankOneMethod};
pub use eigen::{dense_eigh, lowest_eigenpairs, Eigenpairs, SubspaceOptions, DEFAULT_DENSE_CAP};
pub use operator::{dot, norm, symmetry_defect, CsrSym, RankOneShift, SymOperator};
