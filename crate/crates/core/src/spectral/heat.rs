use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Section, VertexFn};
use crate::numerics::{dense_eigh, DEFAULT_DENSE_CAP};
use crate::spectral::bounds::sup_norm_constant;
use crate::spectral::pencil::assemble_pencil;
use crate::spectral::random_interior_fn;

/// `e^{−tL}` through a full dense eigendecomposition of the pencil.
#[derive(Debug, Clone)]
pub struct HeatSemigroup {
    n: usize,
    vertices: Vec<usize>,
    mass: Vec<f64>,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

impl HeatSemigroup {
    pub fn new(s: &Section) -> Result<HeatSemigroup> {
        Self::with_cap(s, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(s: &Section, cap: usize) -> Result<HeatSemigroup> {
        let pencil = assemble_pencil(s)?;
        let eig = dense_eigh(&pencil.matrix().to_dense(), &pencil.mass, cap)?;
        Ok(HeatSemigroup {
            n: s.len(),
            vertices: pencil.form.vertices,
            mass: pencil.mass,
            values: eig.values,
            vectors: eig.vectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// `Σ e^{−tλ_i} ⟨f, v_i⟩_M v_i`; values of `f` on the mask are ignored.
    pub fn apply(&self, t: f64, f: &VertexFn) -> Result<VertexFn> {
        check_time(t)?;
        if f.len() != self.n {
            return Err(Error::SectionMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        let dim = self.vertices.len();
        let mut out = VertexFn::zeros(self.n);
        if t == 0.0 {
            for &v in &self.vertices {
                out[v] = f[v];
            }
            return Ok(out);
        }
        let mut local = vec![0.0; dim];
        for (i, &lambda) in self.values.iter().enumerate() {
            let col = self.vectors.column(i);
            let coef: f64 = (0..dim)
                .map(|j| col[j] * self.mass[j] * f[self.vertices[j]])
                .sum();
            let weight = (-t * lambda).exp() * coef;
            for j in 0..dim {
                local[j] += weight * col[j];
            }
        }
        for (j, &v) in self.vertices.iter().enumerate() {
            out[v] = local[j];
        }
        Ok(out)
    }

    /// `Σ e^{−tλ_i}`.
    pub fn trace(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.values.iter().map(|l| (-t * l).exp()).sum())
    }

    /// `‖f‖_M` over the interior.
    pub fn m_norm(&self, f: &VertexFn) -> f64 {
        self.vertices
            .iter()
            .zip(&self.mass)
            .map(|(&v, m)| m * f[v] * f[v])
            .sum::<f64>()
            .sqrt()
    }
}

pub fn heat_apply(s: &Section, t: f64, f: &VertexFn) -> Result<VertexFn> {
    check_time(t)?;
    f.check(s)?;
    HeatSemigroup::new(s)?.apply(t, f)
}

pub fn heat_trace(s: &Section, t: f64) -> Result<f64> {
    check_time(t)?;
    HeatSemigroup::new(s)?.trace(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UltraReport {
    pub t: f64,
    #[serde(rename = "C")]
    pub c_constant: f64,
    /// `C·(2et)^{-1/2}`.
    pub bound_factor: f64,
    /// Largest `‖e^{−tL}f‖_∞ / (bound_factor·‖f‖_M)` over the trials.
    pub max_ratio: f64,
    pub trials: usize,
    pub seed: u64,
    pub holds: bool,
}

/// Checks `‖e^{−tL}f‖_∞ ≤ C (2et)^{−1/2} ‖f‖_M` on seeded random `f`, with
/// `C² = 1 / min cap` over the interior.
pub fn ultracontractivity_check(
    s: &Section,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<UltraReport> {
    let heat = HeatSemigroup::new(s)?;
    let c = sup_norm_constant(s)?.c;
    ultracontractivity_with(&heat, c, t, trials, seed)
}

/// Same check against a prepared semigroup and constant.
pub fn ultracontractivity_with(
    heat: &HeatSemigroup,
    c: f64,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<UltraReport> {
    check_time(t)?;
    if t == 0.0 {
        return Err(Error::InvalidParameter(
            "ultracontractivity needs t > 0".into(),
        ));
    }
    let bound_factor = c / (2.0 * std::f64::consts::E * t).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let f = random_interior_fn(heat.n, &heat.vertices, &mut rng);
        let norm = heat.m_norm(&f);
        if norm == 0.0 {
            continue;
        }
        let g = heat.apply(t, &f)?;
        max_ratio = max_ratio.max(g.sup_norm() / (bound_factor * norm));
    }
    Ok(UltraReport {
        t,
        c_constant: c,
        bound_factor,
        max_ratio,
        trials,
        seed,
        holds: max_ratio <= 1.0 + 1e-12,
    })
}
