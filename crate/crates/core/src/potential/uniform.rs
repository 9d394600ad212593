use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ExhaustionGenerator;
use crate::potential::capacity::equilibrium_potential;
use crate::potential::profile::{classify_transience, linear_fit, Classification, Transience};
use crate::spectral::{gap_trend, GapTrend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UtVerdict {
    #[serde(rename = "certified-UT")]
    CertifiedUt,
    #[serde(rename = "heuristic-UT")]
    HeuristicUt,
    #[serde(rename = "refuted")]
    Refuted,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl UtVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            UtVerdict::CertifiedUt => "certified-UT",
            UtVerdict::HeuristicUt => "heuristic-UT",
            UtVerdict::Refuted => "refuted",
            UtVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evidence {
    Transitivity,
    SpectralGap,
    Recurrence,
    WindowScan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtOptions {
    /// Level whose interior vertices are scanned.
    pub window_level: usize,
    /// Levels for the root capacity profile; the scan reuses the last three
    /// that lie above the window.
    pub profile_levels: Vec<usize>,
    /// Levels for the spectral-gap trend; empty skips that route.
    pub gap_levels: Vec<usize>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowScan {
    pub level: usize,
    pub scan_levels: Vec<usize>,
    pub vertices: usize,
    /// Smallest extrapolated capacity over the window.
    pub inf_cap: f64,
    pub argmin: String,
    /// Smallest capacity at the deepest scan level, before extrapolation.
    pub deepest_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtReport {
    pub verdict: UtVerdict,
    pub evidence: Evidence,
    pub inf_cap_estimate: f64,
    /// `C = inf_cap_estimate^{-1/2}`.
    #[serde(rename = "C")]
    pub c_constant: f64,
    /// `2C`.
    pub gamma_diameter_bound: f64,
    /// `δ·λ₀` when the gap route fired.
    pub certified_cap_lower_bound: Option<f64>,
    pub classification: Classification,
    pub window: WindowScan,
    pub gap: Option<GapTrend>,
}

/// Extrapolated capacity from a few trailing levels: plateau fit in
/// resistance space, never above the deepest observed value.
fn extrapolate(levels: &[usize], caps: &[f64]) -> f64 {
    let last = *caps.last().unwrap();
    if caps.len() < 3 || caps.iter().any(|&c| c <= 0.0) {
        return last;
    }
    let inv: Vec<f64> = levels.iter().map(|&n| 1.0 / n as f64).collect();
    let rs: Vec<f64> = caps.iter().map(|c| 1.0 / c).collect();
    let fit = linear_fit(&inv, &rs);
    if fit.alpha > 0.0 {
        (1.0 / fit.alpha).min(last)
    } else {
        0.0
    }
}

pub fn window_scan(
    gen: &ExhaustionGenerator,
    window_level: usize,
    profile_levels: &[usize],
) -> Result<WindowScan> {
    let window = gen.level(window_level)?;
    let labels: Vec<String> = window
        .interior()
        .into_iter()
        .map(|v| window.label(v).to_string())
        .collect();
    if labels.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let above: Vec<usize> = profile_levels
        .iter()
        .copied()
        .filter(|&n| n > window_level)
        .collect();
    let scan_levels: Vec<usize> = if above.is_empty() {
        vec![window_level]
    } else {
        above[above.len().saturating_sub(3)..].to_vec()
    };
    let mut caps = vec![Vec::with_capacity(scan_levels.len()); labels.len()];
    for &n in &scan_levels {
        let s = gen.level(n)?;
        let row: Vec<f64> = labels
            .par_iter()
            .map(|label| {
                let v = s
                    .vertex(label)
                    .ok_or_else(|| Error::UnknownVertex(label.clone()))?;
                Ok(equilibrium_potential(&s, v)?.cap)
            })
            .collect::<Result<_>>()?;
        for (per_vertex, c) in caps.iter_mut().zip(row) {
            per_vertex.push(c);
        }
    }
    let mut inf_cap = f64::INFINITY;
    let mut argmin = labels[0].clone();
    let mut deepest_inf = f64::INFINITY;
    for (label, c) in labels.iter().zip(&caps) {
        let est = extrapolate(&scan_levels, c);
        if est < inf_cap {
            inf_cap = est;
            argmin = label.clone();
        }
        deepest_inf = deepest_inf.min(*c.last().unwrap());
    }
    Ok(WindowScan {
        level: window_level,
        scan_levels,
        vertices: labels.len(),
        inf_cap,
        argmin,
        deepest_inf,
    })
}

pub fn uniform_transience_report(gen: &ExhaustionGenerator, opts: &UtOptions) -> Result<UtReport> {
    let classification =
        classify_transience(gen, &gen.root_label(), &opts.profile_levels, opts.tol)?;
    let window = window_scan(gen, opts.window_level, &opts.profile_levels)?;
    let transient = classification.verdict == Transience::Transient;

    let mut gap = None;
    let mut certified_cap_lower_bound = None;
    let (verdict, evidence, inf_cap_estimate) = if gen.is_vertex_transitive() && transient {
        let profile = &classification.profile;
        let single_orbit = if profile.limit > 0.0 {
            profile.limit
        } else {
            profile.last()
        };
        (UtVerdict::CertifiedUt, Evidence::Transitivity, single_orbit)
    } else if classification.verdict == Transience::Recurrent {
        (UtVerdict::Refuted, Evidence::Recurrence, 0.0)
    } else {
        let trend = if opts.gap_levels.is_empty() {
            None
        } else {
            Some(gap_trend(gen, &opts.gap_levels, opts.tol)?)
        };
        let certified = trend.as_ref().is_some_and(|t| t.certified);
        if certified {
            certified_cap_lower_bound = trend.as_ref().map(|t| t.cap_lower_bound);
        }
        gap = trend;
        if certified {
            (
                UtVerdict::CertifiedUt,
                Evidence::SpectralGap,
                window.inf_cap,
            )
        } else if window.inf_cap > opts.tol {
            (UtVerdict::HeuristicUt, Evidence::WindowScan, window.inf_cap)
        } else {
            (
                UtVerdict::Inconclusive,
                Evidence::WindowScan,
                window.inf_cap,
            )
        }
    };
    let c_constant = inf_cap_estimate.powf(-0.5);
    Ok(UtReport {
        verdict,
        evidence,
        inf_cap_estimate,
        c_constant,
        gamma_diameter_bound: 2.0 * c_constant,
        certified_cap_lower_bound,
        classification,
        window,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_never_exceeds_observation() {
        assert!(extrapolate(&[1, 2, 3], &[3.0, 2.0, 1.0]) <= 1.0);
        let caps: Vec<f64> = [4usize, 5, 6]
            .iter()
            .map(|&n| 1.0 / (0.5 - 1.0 / n as f64))
            .collect();
        let est = extrapolate(&[4, 5, 6], &caps);
        assert!((est - 2.0).abs() < 1e-12);
        assert_eq!(extrapolate(&[4], &[1.5]), 1.5);
    }

    #[test]
    fn one_dimensional_lattice_is_refuted() {
        let gen = ExhaustionGenerator::lattice(1).unwrap();
        let opts = UtOptions {
            window_level: 2,
            profile_levels: (2..=16).collect(),
            gap_levels: vec![],
            tol: 1e-3,
        };
        let r = uniform_transience_report(&gen, &opts).unwrap();
        assert_eq!(r.verdict, UtVerdict::Refuted);
        assert_eq!(r.c_constant, f64::INFINITY);
        assert_eq!(r.gamma_diameter_bound, 2.0 * r.c_constant);
        assert_eq!(r.window.vertices, 3);
    }
}
