use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ExhaustionGenerator;
use crate::potential::{classify_transience, Classification, Transience};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HarmonicBoundary {
    Empty,
    Nonempty,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicBoundaryReport {
    pub verdict: HarmonicBoundary,
    pub levels: Vec<usize>,
    /// `Σ c` over each level.
    pub killing_sums: Vec<f64>,
    /// Increment of the partial sums between the last two levels.
    pub tail: f64,
    pub killing_summable: bool,
    pub killing_diverges: bool,
    /// Transience of `(b, 0)`; absent when divergence of `c` already decides.
    pub zeroed: Option<Classification>,
    pub reason: String,
}

/// Emptiness of the harmonic boundary: `c` summable and `(b, 0)` recurrent.
pub fn harmonic_boundary_empty(
    gen: &ExhaustionGenerator,
    levels: &[usize],
    tol: f64,
) -> Result<HarmonicBoundaryReport> {
    if levels.len() < 3 {
        return Err(Error::InvalidParameter("need at least three levels".into()));
    }
    let killing_sums: Vec<f64> = levels
        .iter()
        .map(|&n| gen.killing_partial_sum(n))
        .collect::<Result<_>>()?;
    let k = killing_sums.len();
    let tail = killing_sums[k - 1] - killing_sums[k - 2];
    let growing = killing_sums[k - 3..].windows(2).all(|w| w[1] > w[0]);
    let killing_summable = tail.abs() < tol;
    let killing_diverges = tail > tol && growing;

    let mut report = HarmonicBoundaryReport {
        verdict: HarmonicBoundary::Inconclusive,
        levels: levels.to_vec(),
        killing_sums,
        tail,
        killing_summable,
        killing_diverges,
        zeroed: None,
        reason: String::new(),
    };
    if killing_diverges {
        report.verdict = HarmonicBoundary::Nonempty;
        report.reason = "partial sums of c keep growing".into();
        return Ok(report);
    }
    let zeroed = classify_transience(&gen.without_killing(), &gen.root_label(), levels, tol)?;
    (report.verdict, report.reason) = match zeroed.verdict {
        Transience::Transient => (HarmonicBoundary::Nonempty, "(b, 0) is transient".into()),
        Transience::Recurrent if killing_summable => (
            HarmonicBoundary::Empty,
            "c is summable and (b, 0) is recurrent".into(),
        ),
        _ => (
            HarmonicBoundary::Inconclusive,
            "neither criterion is decided by the levels".into(),
        ),
    };
    report.zeroed = Some(zeroed);
    Ok(report)
}
