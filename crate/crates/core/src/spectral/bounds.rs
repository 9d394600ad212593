use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::energy;
use crate::error::{Error, Result};
use crate::graph::{ExhaustionGenerator, Section};
use crate::numerics::DEFAULT_DENSE_CAP;
use crate::potential::{equilibrium_potential, Fit};
use crate::spectral::pencil::{spectrum, spectrum_with, SpectralResult};
use crate::spectral::random_interior_fn;

/// Best constant in `‖φ‖_∞ ≤ C Q̃(φ)^{1/2}` on a finite section:
/// `C² = 1 / min_x cap(x)` over the interior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupConstant {
    pub min_cap: f64,
    pub argmin: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub c_squared: f64,
}

pub fn sup_norm_constant(s: &Section) -> Result<SupConstant> {
    let interior = s.interior();
    if interior.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let caps: Vec<f64> = interior
        .par_iter()
        .map(|&v| Ok(equilibrium_potential(s, v)?.cap))
        .collect::<Result<_>>()?;
    let (i, &min_cap) = caps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let c_squared = 1.0 / min_cap;
    Ok(SupConstant {
        min_cap,
        argmin: interior[i],
        c: c_squared.sqrt(),
        c_squared,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Enumeration {
    /// Interior vertices by nonincreasing measure, ties by index.
    MeasureDecreasing,
    Given(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub bound: f64,
    /// `λ_{n+1}`.
    pub lambda: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub constant: SupConstant,
    pub order: Vec<usize>,
    pub rows: Vec<BoundRow>,
    pub violations: usize,
    pub holds: bool,
}

fn resolve_order(s: &Section, enumeration: &Enumeration) -> Result<Vec<usize>> {
    let interior = s.interior();
    match enumeration {
        Enumeration::MeasureDecreasing => {
            let mut order = interior;
            order.sort_by(|&a, &b| s.measure(b).total_cmp(&s.measure(a)).then(a.cmp(&b)));
            Ok(order)
        }
        Enumeration::Given(order) => {
            let mut seen = vec![false; s.len()];
            for &v in order {
                s.check_vertex(v)?;
                if s.is_masked(v) || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidParameter(format!(
                        "enumeration must list each interior vertex once (vertex {v})"
                    )));
                }
            }
            if order.len() != interior.len() {
                return Err(Error::InvalidParameter(
                    "enumeration must cover the whole interior".into(),
                ));
            }
            Ok(order.clone())
        }
    }
}

/// Table of `1/(C² m(interior ∖ {x₁..x_n})) ≤ λ_{n+1}` for every `n`.
pub fn eigenvalue_bounds_check(s: &Section, enumeration: &Enumeration) -> Result<BoundsReport> {
    let order = resolve_order(s, enumeration)?;
    let constant = sup_norm_constant(s)?;
    let spec = spectrum(s, None)?;
    Ok(bounds_table(s, constant, &spec, order))
}

pub(crate) fn bounds_table(
    s: &Section,
    constant: SupConstant,
    spec: &SpectralResult,
    order: Vec<usize>,
) -> BoundsReport {
    let mut remaining: f64 = order.iter().map(|&v| s.measure(v)).sum();
    let mut rows = Vec::with_capacity(order.len());
    for (n, &v) in order.iter().enumerate() {
        let bound = 1.0 / (constant.c_squared * remaining);
        let lambda = spec.eigenvalues[n];
        rows.push(BoundRow {
            n,
            bound,
            lambda,
            slack: lambda - bound,
        });
        remaining -= s.measure(v);
    }
    let violations = rows
        .iter()
        .filter(|r| r.bound > r.lambda + 1e-9 * r.lambda.abs().max(1.0))
        .count();
    BoundsReport {
        constant,
        order,
        rows,
        violations,
        holds: violations == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub lambda0: f64,
    /// Smallest interior measure.
    pub delta: f64,
    pub applicable: bool,
    /// `1/(δλ₀)` in `‖φ‖_∞² ≤ Q̃(φ)/(δλ₀)`.
    pub bound_constant: f64,
    /// `δλ₀`, a lower bound for every interior capacity.
    pub cap_lower_bound: f64,
    /// Largest `‖φ‖_∞² δλ₀ / Q̃(φ)` over the trials.
    pub max_ratio: f64,
    pub trials: usize,
    pub holds: bool,
}

pub fn spectral_gap_criterion(s: &Section, trials: usize, seed: u64) -> Result<GapReport> {
    let interior = s.interior();
    if interior.is_empty() {
        return Err(Error::EmptyInterior);
    }
    let delta = interior
        .iter()
        .map(|&v| s.measure(v))
        .fold(f64::INFINITY, f64::min);
    let scale = interior
        .iter()
        .map(|&v| s.degree(v) + s.killing(v))
        .fold(0.0, f64::max);
    let grounded = s.interior_components().all_grounded();
    let lambda0 = if grounded { lowest_eigenvalue(s)? } else { 0.0 };
    let applicable = grounded && lambda0 > 1e-12 * scale.max(1.0) && delta > 0.0;
    let mut report = GapReport {
        lambda0,
        delta,
        applicable,
        bound_constant: f64::INFINITY,
        cap_lower_bound: 0.0,
        max_ratio: f64::NAN,
        trials,
        holds: false,
    };
    if !applicable {
        return Ok(report);
    }
    report.cap_lower_bound = delta * lambda0;
    report.bound_constant = 1.0 / report.cap_lower_bound;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let phi = random_interior_fn(s.len(), &interior, &mut rng);
        let q = energy(s, &phi)?.value;
        if q > 0.0 {
            let sup = phi.sup_norm();
            max_ratio = max_ratio.max(sup * sup * report.cap_lower_bound / q);
        }
    }
    report.max_ratio = max_ratio;
    report.holds = max_ratio <= 1.0 + 1e-12;
    Ok(report)
}

fn lowest_eigenvalue(s: &Section) -> Result<f64> {
    Ok(spectrum_with(s, Some(1), DEFAULT_DENSE_CAP)?.eigenvalues[0])
}

/// Bottom of the spectrum along an exhaustion, extrapolated by
/// `λ₀(n) = a + b/n²` over the trailing levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapTrend {
    pub levels: Vec<usize>,
    pub lambda0: Vec<f64>,
    pub fit: Option<Fit>,
    pub limit: f64,
    /// Smallest interior measure at the deepest level.
    pub delta: f64,
    pub certified: bool,
    /// `δ·limit` when certified, otherwise 0.
    pub cap_lower_bound: f64,
}

pub fn gap_trend(gen: &ExhaustionGenerator, levels: &[usize], tol: f64) -> Result<GapTrend> {
    if levels.is_empty() || levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "levels must be positive and strictly increasing".into(),
        ));
    }
    let mut lambda0 = Vec::with_capacity(levels.len());
    let mut delta = f64::INFINITY;
    for &n in levels {
        let s = gen.level(n)?;
        let interior = s.interior();
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        delta = interior
            .iter()
            .map(|&v| s.measure(v))
            .fold(f64::INFINITY, f64::min);
        let value = if s.interior_components().all_grounded() {
            lowest_eigenvalue(&s)?
        } else {
            0.0
        };
        lambda0.push(value);
    }
    let start = crate::potential::fit_window(levels.len());
    let (fit, limit) = if levels.len() - start >= 3 {
        let xs: Vec<f64> = levels[start..]
            .iter()
            .map(|&n| (n as f64).powi(-2))
            .collect();
        let fit = crate::potential::linear_fit(&xs, &lambda0[start..]);
        (Some(fit), fit.alpha)
    } else {
        (None, *lambda0.last().unwrap())
    };
    let certified = fit.is_some() && limit > tol && delta > 0.0;
    Ok(GapTrend {
        levels: levels.to_vec(),
        lambda0,
        fit,
        limit,
        delta,
        certified,
        cap_lower_bound: if certified { delta * limit } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_tree, RawGraph, VertexFn};

    fn p3() -> Section {
        Section::build(
            &RawGraph::new(3)
                .edge(0, 1, 1.0)
                .edge(1, 2, 1.0)
                .dirichlet(0)
                .dirichlet(2),
        )
        .unwrap()
    }

    #[test]
    fn one_by_one_equality() {
        let r = eigenvalue_bounds_check(&p3(), &Enumeration::MeasureDecreasing).unwrap();
        assert_eq!(r.constant.min_cap, 2.0);
        assert_eq!(r.constant.c_squared, 0.5);
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].bound, 2.0);
        assert_eq!(r.rows[0].lambda, 2.0);
        assert!(r.holds);
    }

    #[test]
    fn tree_bounds_have_slack() {
        let s = generate_tree(3, 6).unwrap();
        let r = eigenvalue_bounds_check(&s, &Enumeration::MeasureDecreasing).unwrap();
        assert!(r.holds);
        assert!(r.rows.windows(2).all(|w| w[0].bound <= w[1].bound));
        assert!(r.rows.iter().all(|row| row.slack > 0.0));
    }

    #[test]
    fn enumeration_validation() {
        let s = p3();
        assert!(eigenvalue_bounds_check(&s, &Enumeration::Given(vec![0])).is_err());
        assert!(eigenvalue_bounds_check(&s, &Enumeration::Given(vec![])).is_err());
        assert!(eigenvalue_bounds_check(&s, &Enumeration::Given(vec![1])).is_ok());
    }

    #[test]
    fn gap_on_one_by_one() {
        let r = spectral_gap_criterion(&p3(), 10, 1).unwrap();
        assert!(r.applicable);
        assert_eq!((r.lambda0, r.delta, r.bound_constant), (2.0, 1.0, 0.5));
        // φ = e₁ attains equality
        let phi = VertexFn::delta(3, 1);
        let q = energy(&p3(), &phi).unwrap().value;
        assert_eq!(1.0, r.bound_constant * q);
        assert!(r.holds);
    }

    #[test]
    fn gap_not_applicable_without_mask() {
        let s = Section::build(&RawGraph::new(2).edge(0, 1, 1.0)).unwrap();
        let r = spectral_gap_criterion(&s, 10, 1).unwrap();
        assert!(!r.applicable);
        assert_eq!(r.lambda0, 0.0);
    }
}
