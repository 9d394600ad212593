//! The Dirichlet problem on masked sections, the Royden decomposition,
//! maximum principle checks, emptiness of the harmonic boundary, truncation
//! of harmonic functions and the Liouville probe.

mod boundary;
mod dirichlet;
mod liouville;

pub use boundary::{harmonic_boundary_empty, HarmonicBoundary, HarmonicBoundaryReport};
pub use dirichlet::{
    check_harmonic, harmonic_extension, max_principle_check, royden_decompose, solve_dirichlet,
    truncate_harmonic, BoundCheck, Decomposition, MaxPrincipleReport, Truncation,
};
pub use liouville::{
    liouville_probe, one_point_diagnosis, LiouvilleReport, LiouvilleTrend, OnePointDiagnosis,
};
