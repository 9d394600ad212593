use std::collections::BTreeMap;

use serde::Serialize;

use crate::energy::{energy, energy_inner, laplacian_at, FormMatrix};
use crate::error::{Error, Result};
use crate::graph::{Section, VertexFn};
use crate::numerics::{cg_solve, CgOptions};

const DP_TOL: f64 = 1e-13;

/// Largest interior degree plus killing, at least 1.
fn degree_scale(s: &Section) -> f64 {
    s.interior()
        .into_iter()
        .map(|v| s.degree(v) + s.killing(v))
        .fold(1.0, f64::max)
}

/// Harmonic extension of mask values: equals `boundary` on the mask and
/// satisfies `𝓛f = 0` at every interior vertex.
pub fn solve_dirichlet(s: &Section, boundary: &BTreeMap<usize, f64>) -> Result<VertexFn> {
    let mut phi = VertexFn::zeros(s.len());
    for (&v, &value) in boundary {
        s.check_vertex(v)?;
        if !s.is_masked(v) {
            return Err(Error::InvalidParameter(format!(
                "boundary value given for interior vertex {v}"
            )));
        }
        phi[v] = value;
    }
    if let Some(v) = s.masked().into_iter().find(|v| !boundary.contains_key(v)) {
        return Err(Error::MissingBoundaryValue(v));
    }
    extend(s, &phi)
}

/// [`solve_dirichlet`] with the boundary data read off `f` on the mask.
pub fn harmonic_extension(s: &Section, f: &VertexFn) -> Result<VertexFn> {
    f.check(s)?;
    extend(s, f)
}

fn extend(s: &Section, phi: &VertexFn) -> Result<VertexFn> {
    let comps = s.interior_components();
    if let Some(id) = (0..comps.count()).find(|&id| !comps.grounded[id]) {
        return Err(Error::UngroundedComponent(comps.members[id][0]));
    }
    let mut out = VertexFn::zeros(s.len());
    for v in s.masked() {
        out[v] = phi[v];
    }
    let form = FormMatrix::interior(s);
    if form.dim() == 0 {
        return Ok(out);
    }
    let rhs: Vec<f64> = form
        .vertices
        .iter()
        .map(|&v| {
            s.neighbors(v)
                .filter(|&(w, _)| s.is_masked(w))
                .map(|(w, b)| b * phi[w])
                .sum()
        })
        .collect();
    let u = cg_solve(&form.matrix, &rhs, &CgOptions::with_tol(DP_TOL))?.x;
    for (&v, x) in form.vertices.iter().zip(u) {
        out[v] = x;
    }
    Ok(out)
}

/// Fails with the worst interior vertex unless `|𝓛f| ≤ 1e-9·scale` on the
/// interior, `scale = max(1, ‖f‖_∞)·max(1, degree + c)`.
pub fn check_harmonic(s: &Section, f: &VertexFn) -> Result<()> {
    f.check(s)?;
    let scale = f.sup_norm().max(1.0) * degree_scale(s);
    let worst = s
        .interior()
        .into_iter()
        .map(|v| (v, laplacian_at(s, f, v).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    match worst {
        Some((vertex, residual)) if residual > 1e-9 * scale => {
            Err(Error::NotHarmonic { vertex, residual })
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    /// `a = max(0, −min f)`.
    pub a: f64,
    /// `b = max(0, max f)`.
    pub b: f64,
    pub fh_min: f64,
    pub fh_max: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    /// Vanishes on the mask.
    pub f0: VertexFn,
    /// Harmonic on the interior, equal to `f` on the mask.
    pub fh: VertexFn,
    /// `|Q̃(f₀, f_h)|`.
    pub orthogonality_residual: f64,
    pub energy_f: f64,
    pub energy_f0: f64,
    pub energy_fh: f64,
    pub bounds: BoundCheck,
}

pub fn royden_decompose(s: &Section, f: &VertexFn) -> Result<Decomposition> {
    let fh = harmonic_extension(s, f)?;
    let f0 = f - &fh;
    let (lo, hi) = (f.min(), f.max());
    let a = (-lo).max(0.0);
    let b = hi.max(0.0);
    let (fh_min, fh_max) = (fh.min(), fh.max());
    let slack = 1e-10 * a.max(b).max(1.0);
    let bounds = BoundCheck {
        a,
        b,
        fh_min,
        fh_max,
        holds: fh_min >= -a - slack && fh_max <= b + slack,
    };
    Ok(Decomposition {
        orthogonality_residual: energy_inner(s, &f0, &fh)?.abs(),
        energy_f: energy(s, f)?.value,
        energy_f0: energy(s, &f0)?.value,
        energy_fh: energy(s, &fh)?.value,
        f0,
        fh,
        bounds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub max_abs: f64,
    /// `None` when the mask is empty.
    pub max_abs_mask: Option<f64>,
    pub gap: f64,
    pub constant: bool,
    /// Interior extrema propagate: every interior vertex attaining a
    /// nonnegative global maximum or nonpositive global minimum (any extremum
    /// where `c` vanishes) has all neighbours at the same value.
    pub strict: bool,
    pub passes: bool,
}

pub fn max_principle_check(s: &Section, f: &VertexFn) -> Result<MaxPrincipleReport> {
    check_harmonic(s, f)?;
    let scale = f.sup_norm().max(1.0);
    let tol = 1e-10 * scale;
    let max_abs = f.sup_norm();
    let masked = s.masked();
    let max_abs_mask = if masked.is_empty() {
        None
    } else {
        Some(masked.iter().map(|&v| f[v].abs()).fold(0.0, f64::max))
    };
    let constant = f.max() - f.min() <= tol;
    let gap = max_abs - max_abs_mask.unwrap_or(max_abs);
    let (hi, lo) = (f.max(), f.min());
    let strict = s.interior().into_iter().all(|v| {
        let free = s.killing(v) == 0.0;
        let at_max = (f[v] - hi).abs() <= tol && (hi >= 0.0 || free);
        let at_min = (f[v] - lo).abs() <= tol && (lo <= 0.0 || free);
        let flat = || s.neighbors(v).all(|(w, _)| (f[w] - f[v]).abs() <= tol);
        !(at_max || at_min) || flat()
    });
    let passes = match max_abs_mask {
        Some(_) => gap <= tol && strict,
        None => constant,
    };
    Ok(MaxPrincipleReport {
        max_abs,
        max_abs_mask,
        gap,
        constant,
        strict,
        passes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    pub level: f64,
    #[serde(rename = "fn")]
    pub truncated: VertexFn,
    pub decomposition: Decomposition,
    pub fh_nonconstant: bool,
    pub energy_f: f64,
    pub energy_truncated: f64,
    pub contraction_holds: bool,
}

/// Clamps a harmonic `f` to `[−n, n]` and decomposes the result.
pub fn truncate_harmonic(s: &Section, f: &VertexFn, n: f64) -> Result<Truncation> {
    if !(n >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation level must be ≥ 0, got {n}"
        )));
    }
    check_harmonic(s, f)?;
    let truncated = f.map(|x| x.clamp(-n, n));
    let decomposition = royden_decompose(s, &truncated)?;
    let fh = &decomposition.fh;
    let fh_nonconstant = fh.max() - fh.min() > 1e-9 * fh.sup_norm().max(1.0);
    let energy_f = energy(s, f)?.value;
    let energy_truncated = energy(s, &truncated)?.value;
    Ok(Truncation {
        level: n,
        contraction_holds: energy_truncated <= energy_f + 1e-12 * energy_f.max(1.0),
        truncated,
        decomposition,
        fh_nonconstant,
        energy_f,
        energy_truncated,
    })
}
