//! Discrete potential theory and Dirichlet spectral theory on weighted graphs.
//!
//! A [`graph::Section`] is a finite weighted graph `(b, c)` with a measure `m`
//! and a Dirichlet mask standing in for the boundary at infinity. Infinite
//! graphs are approached through [`graph::ExhaustionGenerator`], which yields
//! nested sections with wired shells.
//!
//! - [`energy`]: the energy form, its polarisation, the `o`-norm and the
//!   formal Laplacian.
//! - [`potential`]: capacities, the metrics `γ` and `γ_o`, free resistance and
//!   the transience classifiers.
//! - [`harmonic`]: the Dirichlet problem, Royden decomposition, maximum
//!   principle checks and the Liouville probe.
//! - [`spectral`]: the Dirichlet Laplacian pencil, spectra, heat semigroup,
//!   eigenvalue lower bounds and the spectral gap criterion.
//! - [`walker`]: a Monte Carlo escape-probability oracle.

pub mod energy;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod harmonic;
pub mod numerics;
pub mod potential;
pub mod spectral;
pub mod walker;

pub use error::{Error, Result};
pub use graph::{ExhaustionGenerator, RawGraph, Section, VertexFn};
