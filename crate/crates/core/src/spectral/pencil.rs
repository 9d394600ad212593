use serde::Serialize;

use crate::energy::FormMatrix;
use crate::error::{Error, Result};
use crate::graph::{Section, VertexFn};
use crate::numerics::{dense_eigh, lowest_eigenpairs, CsrSym, SubspaceOptions, DEFAULT_DENSE_CAP};

/// `A v = λ M v` for the Dirichlet Laplacian on the interior of a section.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub form: FormMatrix,
    /// Measure of each interior vertex, in the row order of `form`.
    pub mass: Vec<f64>,
}

impl Pencil {
    pub fn matrix(&self) -> &CsrSym {
        &self.form.matrix
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.form.vertices
    }
}

pub fn assemble_pencil(s: &Section) -> Result<Pencil> {
    let form = FormMatrix::interior(s);
    if form.dim() == 0 {
        return Err(Error::EmptyInterior);
    }
    let mass = form.vertices.iter().map(|&v| s.measure(v)).collect();
    Ok(Pencil { form, mass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Dense,
    Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    /// Ascending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    /// `M`-orthonormal, zero on the mask.
    #[serde(skip_serializing)]
    pub eigenvectors: Vec<VertexFn>,
    /// `m` of the interior.
    pub measure_total: f64,
    pub method: SpectrumMethod,
}

/// Full spectrum (`k = None`) or the `k` smallest eigenvalues. Above the
/// dense cap only a requested `k` is served, by subspace iteration.
pub fn spectrum(s: &Section, k: Option<usize>) -> Result<SpectralResult> {
    spectrum_with(s, k, DEFAULT_DENSE_CAP)
}

pub fn spectrum_with(s: &Section, k: Option<usize>, dense_cap: usize) -> Result<SpectralResult> {
    let pencil = assemble_pencil(s)?;
    let n = pencil.dim();
    let measure_total = pencil.mass.iter().sum();
    let lift = |col: &[f64]| pencil.form.lift(col, s.len());
    if let Some(k) = k {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "requested {k} eigenvalues of a {n}-dimensional pencil"
            )));
        }
    }
    match k {
        Some(k) if n > dense_cap => {
            let eig = lowest_eigenpairs(
                pencil.matrix(),
                &pencil.mass,
                k,
                &SubspaceOptions::default(),
            )?;
            Ok(SpectralResult {
                eigenvalues: eig.values,
                eigenvectors: eig
                    .vectors
                    .column_iter()
                    .map(|c| lift(c.as_slice()))
                    .collect(),
                measure_total,
                method: SpectrumMethod::Subspace,
            })
        }
        _ => {
            let eig = dense_eigh(&pencil.matrix().to_dense(), &pencil.mass, dense_cap)?;
            let count = k.unwrap_or(n);
            Ok(SpectralResult {
                eigenvalues: eig.values[..count].to_vec(),
                eigenvectors: eig
                    .vectors
                    .column_iter()
                    .take(count)
                    .map(|c| lift(c.as_slice()))
                    .collect(),
                measure_total,
                method: SpectrumMethod::Dense,
            })
        }
    }
}
