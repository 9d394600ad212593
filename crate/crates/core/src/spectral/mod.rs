//! The Dirichlet Laplacian `L` on `ℓ²(interior, m)`: spectra, the heat
//! semigroup, ultracontractivity, eigenvalue lower bounds and the spectral
//! gap criterion.

mod bounds;
mod heat;
mod pencil;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::graph::VertexFn;

pub use bounds::{
    eigenvalue_bounds_check, gap_trend, spectral_gap_criterion, sup_norm_constant, BoundRow,
    BoundsReport, Enumeration, GapReport, GapTrend, SupConstant,
};
pub use heat::{
    heat_apply, heat_trace, ultracontractivity_check, ultracontractivity_with, HeatSemigroup,
    UltraReport,
};
pub use pencil::{
    assemble_pencil, spectrum, spectrum_with, Pencil, SpectralResult, SpectrumMethod,
};

/// Standard normal values on `support`, zero elsewhere.
pub(crate) fn random_interior_fn<R: Rng>(n: usize, support: &[usize], rng: &mut R) -> VertexFn {
    let mut f = VertexFn::zeros(n);
    for &v in support {
        f[v] = rng.sample(StandardNormal);
    }
    f
}
