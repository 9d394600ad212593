//! Point capacities, the metrics `γ` and `γ_o`, and the transience and
//! uniform transience classifiers.

mod capacity;
mod metric;
mod profile;
mod uniform;

pub use capacity::{equilibrium_potential, equilibrium_potential_with, Equilibrium};
pub use metric::{
    free_resistance, free_resistance_with, gamma, gamma_o, gamma_o_with, gamma_with, Gamma,
    GammaRegime,
};
pub use profile::{
    capacity_profile, classify_transience, CapacityProfile, Classification, Fit, Model, Transience,
};
pub use uniform::{
    uniform_transience_report, window_scan, Evidence, UtOptions, UtReport, UtVerdict, WindowScan,
};

/// Default capacity positivity threshold.
pub const DEFAULT_TOL: f64 = 1e-3;

pub(crate) use profile::{fit_window, linear_fit};
