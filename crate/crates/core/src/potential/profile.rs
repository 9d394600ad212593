//! Capacity profiles along an exhaustion and the transience classifier.
//!
//! Both extrapolation models are fitted in resistance space `R_n = 1/cap_n`,
//! where each is a two-parameter linear least-squares problem:
//! a plateau `R_n = α + β n^{-p}` (limit `cap = 1/α`) and a logarithmic decay
//! `R_n = α + β ln n` (limit `cap = 0`). The plateau exponent `p` is taken
//! from a fixed grid: `p = 1` is the lattice rate, large `p` stands in for
//! the geometric convergence seen on trees.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ExhaustionGenerator, Family, KillingRule, Section};
use crate::potential::capacity::equilibrium_potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Plateau,
    LogDecay,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub alpha: f64,
    pub beta: f64,
    /// Root-mean-square residual relative to the mean of the fitted data.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityProfile {
    pub vertex: String,
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    pub monotone: bool,
    /// Some level had no mask and no killing on the vertex's component.
    pub degenerate: bool,
    /// Index of the first level used by the fits.
    pub fit_start: usize,
    pub plateau: Option<Fit>,
    pub plateau_exponent: Option<f64>,
    pub decay: Option<Fit>,
    pub model: Model,
    pub limit: f64,
}

impl CapacityProfile {
    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `cap_n · ln n` for every level with `n > 1`.
    pub fn log_scaled(&self) -> Vec<f64> {
        self.levels
            .iter()
            .zip(&self.values)
            .filter(|(&n, _)| n > 1)
            .map(|(&n, &c)| c * (n as f64).ln())
            .collect()
    }

    /// Rows `level,cap,plateau_residual,decay_residual`; residuals are the
    /// pointwise misfits in resistance space, empty outside the fit window.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,cap,plateau_residual,decay_residual\n");
        for (i, (&n, &c)) in self.levels.iter().zip(&self.values).enumerate() {
            let p = self.plateau_exponent.unwrap_or(1.0);
            let misfit = |fit: &Option<Fit>, basis: &dyn Fn(f64) -> f64| match fit {
                Some(f) if i >= self.fit_start && c > 0.0 => {
                    format!("{:?}", 1.0 / c - (f.alpha + f.beta * basis(n as f64)))
                }
                _ => String::new(),
            };
            out.push_str(&format!(
                "{n},{c:?},{},{}\n",
                misfit(&self.plateau, &|n: f64| n.powf(-p)),
                misfit(&self.decay, &f64::ln)
            ));
        }
        out
    }
}

/// Least squares for `y ≈ α + β·x`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let beta = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let alpha = my - beta * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - alpha - beta * x;
            e * e
        })
        .sum();
    Fit {
        alpha,
        beta,
        residual: (rss / n).sqrt() / my.abs().max(f64::MIN_POSITIVE),
    }
}

const PLATEAU_EXPONENTS: [f64; 8] = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];

/// Best plateau fit over the exponent grid.
fn plateau_fit(ns: &[f64], rs: &[f64]) -> (Fit, f64) {
    PLATEAU_EXPONENTS
        .iter()
        .map(|&p| {
            let xs: Vec<f64> = ns.iter().map(|n| n.powf(-p)).collect();
            (linear_fit(&xs, rs), p)
        })
        .min_by(|a, b| a.0.residual.total_cmp(&b.0.residual))
        .unwrap()
}

/// Minimum number of trailing levels entering the fits.
const MIN_FIT_POINTS: usize = 3;

pub(crate) fn fit_window(len: usize) -> usize {
    if len < MIN_FIT_POINTS {
        return len;
    }
    let half = len.div_ceil(2);
    len - half.max(MIN_FIT_POINTS)
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidParameter("no levels given".into()));
    }
    if levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "levels must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Capacity of the vertex labelled `label` at one level.
pub(crate) fn cap_at(section: &Section, label: &str) -> Result<(f64, bool)> {
    let v = section
        .vertex(label)
        .ok_or_else(|| Error::UnknownVertex(label.to_string()))?;
    let eq = equilibrium_potential(section, v)?;
    Ok((eq.cap, eq.degenerate))
}

pub fn capacity_profile(
    gen: &ExhaustionGenerator,
    label: &str,
    levels: &[usize],
) -> Result<CapacityProfile> {
    check_levels(levels)?;
    let caps: Vec<(f64, bool)> = levels
        .par_iter()
        .map(|&n| cap_at(&gen.level(n)?, label))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = caps.iter().map(|c| c.0).collect();
    let degenerate = caps.iter().any(|c| c.1);
    let monotone = values
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-10 * w[0].abs().max(1.0));

    let fit_start = fit_window(values.len());
    let mut profile = CapacityProfile {
        vertex: label.to_string(),
        levels: levels.to_vec(),
        values,
        monotone,
        degenerate,
        fit_start,
        plateau: None,
        plateau_exponent: None,
        decay: None,
        model: Model::None,
        limit: f64::NAN,
    };
    let tail = &profile.values[fit_start..];
    if degenerate || tail.len() < MIN_FIT_POINTS || tail.iter().any(|&c| c <= 0.0) {
        profile.limit = profile.last();
        if degenerate {
            profile.limit = 0.0;
        }
        return Ok(profile);
    }
    let ns: Vec<f64> = profile.levels[fit_start..]
        .iter()
        .map(|&n| n as f64)
        .collect();
    let rs: Vec<f64> = tail.iter().map(|c| 1.0 / c).collect();
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (plateau, exponent) = plateau_fit(&ns, &rs);
    let decay = linear_fit(&logs, &rs);
    profile.plateau = Some(plateau);
    profile.plateau_exponent = Some(exponent);
    profile.decay = Some(decay);
    if plateau.residual <= decay.residual {
        profile.model = Model::Plateau;
        profile.limit = if plateau.alpha > 0.0 {
            1.0 / plateau.alpha
        } else {
            0.0
        };
    } else {
        profile.model = Model::LogDecay;
        profile.limit = if decay.beta > 0.0 {
            0.0
        } else {
            profile.last()
        };
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transience {
    Transient,
    Recurrent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Transience,
    pub reason: String,
    pub profile: CapacityProfile,
}

/// Whether `c` is somewhere positive on the component of the root.
fn killing_on_root_component(gen: &ExhaustionGenerator) -> bool {
    match (gen.killing_rule(), gen.family()) {
        (KillingRule::Zero, _) => false,
        (KillingRule::Constant(c), _) => c > 0.0,
        (KillingRule::Inherit, Family::Ball { base, root }) => {
            let comp = base.full_components();
            (0..base.len()).any(|v| comp[v] == comp[*root] && base.killing(v) > 0.0)
        }
        (KillingRule::Inherit, _) => false,
    }
}

pub fn classify_transience(
    gen: &ExhaustionGenerator,
    label: &str,
    levels: &[usize],
    tol: f64,
) -> Result<Classification> {
    let profile = capacity_profile(gen, label, levels)?;
    let (verdict, reason) = if killing_on_root_component(gen) {
        (
            Transience::Transient,
            "killing term does not vanish on the component".to_string(),
        )
    } else if profile.degenerate {
        (
            Transience::Recurrent,
            "finite component without mask: constants have zero energy".to_string(),
        )
    } else {
        match profile.model {
            Model::Plateau if profile.limit > tol => (
                Transience::Transient,
                format!("plateau fit, extrapolated capacity {:e}", profile.limit),
            ),
            Model::LogDecay if profile.limit == 0.0 && profile.last().is_finite() => {
                (Transience::Recurrent, "logarithmic decay fit".to_string())
            }
            Model::None => (
                Transience::Inconclusive,
                format!("need at least {MIN_FIT_POINTS} positive levels to fit"),
            ),
            _ => (
                Transience::Inconclusive,
                "fits do not separate the models".to_string(),
            ),
        }
    };
    Ok(Classification {
        verdict,
        reason,
        profile,
    })
}
