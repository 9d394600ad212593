//! Eigensolvers for the pencil `A v = λ M v` with diagonal `M`.
//!
//! Both reduce to the standard symmetric problem for `M^{-1/2} A M^{-1/2}`
//! and map eigenvectors back through `M^{-1/2}`, so returned eigenvectors are
//! `M`-orthonormal.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::cg::{cg_solve_from, CgOptions};
use crate::numerics::operator::SymOperator;

/// Default dimension above which the dense solver refuses to run.
pub const DEFAULT_DENSE_CAP: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    /// Ascending, with multiplicity.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: DMatrix<f64>,
}

fn check_mass(dim: usize, mass: &[f64]) -> Result<()> {
    if mass.len() != dim {
        return Err(Error::SectionMismatch {
            expected: dim,
            got: mass.len(),
        });
    }
    if let Some((v, &m)) = mass.iter().enumerate().find(|(_, &m)| !(m > 0.0)) {
        return Err(Error::NonPositiveMeasure {
            vertex: v,
            value: m,
        });
    }
    Ok(())
}

/// Full eigendecomposition of the pencil `(a, diag(mass))`.
pub fn dense_eigh(a: &DMatrix<f64>, mass: &[f64], cap: usize) -> Result<Eigenpairs> {
    let n = a.nrows();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    check_mass(n, mass)?;
    let scale: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let sym = 0.5 * (a[(i, j)] + a[(j, i)]);
            b[(i, j)] = sym / (mass[i] * mass[j]).sqrt();
        }
    }
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = scale[r] * eig.eigenvectors[(r, i)];
        }
    }
    Ok(Eigenpairs { values, vectors })
}

/// Options for [`lowest_eigenpairs`].
#[derive(Debug, Clone, Copy)]
pub struct SubspaceOptions {
    pub rel_tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    pub cg: CgOptions,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            rel_tol: 1e-10,
            max_sweeps: 500,
            seed: 0x5eed,
            cg: CgOptions {
                rel_tol: 1e-12,
                max_iter: None,
            },
        }
    }
}

/// Orthonormalises the columns of `basis` in the `M` inner product
/// (two passes of modified orthogonalisation).
fn m_orthonormalize(basis: &mut [Vec<f64>], mass: &[f64]) {
    let m_dot = |x: &[f64], y: &[f64]| -> f64 {
        x.iter().zip(y).zip(mass).map(|((a, b), m)| a * b * m).sum()
    };
    for j in 0..basis.len() {
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = basis.split_at_mut(j);
                let c = m_dot(&done[i], &rest[0]);
                for (x, y) in rest[0].iter_mut().zip(&done[i]) {
                    *x -= c * y;
                }
            }
        }
        let nrm = m_dot(&basis[j], &basis[j]).sqrt();
        if nrm > 0.0 {
            basis[j].iter_mut().for_each(|x| *x /= nrm);
        }
    }
}

/// The `k` smallest eigenpairs of a positive definite pencil by subspace
/// inverse iteration with Rayleigh–Ritz extraction. Each sweep costs one CG
/// solve per basis vector.
pub fn lowest_eigenpairs<A: SymOperator + ?Sized>(
    a: &A,
    mass: &[f64],
    k: usize,
    opts: &SubspaceOptions,
) -> Result<Eigenpairs> {
    let n = a.dim();
    check_mass(n, mass)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {n}-dimensional pencil"
        )));
    }
    let block = (k + 2).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    m_orthonormalize(&mut basis, mass);
    let mut previous: Option<Vec<f64>> = None;
    let mut warm: Vec<Vec<f64>> = vec![vec![0.0; n]; block];

    for _ in 0..opts.max_sweeps {
        for (j, col) in basis.iter_mut().enumerate() {
            let rhs: Vec<f64> = col.iter().zip(mass).map(|(x, m)| x * m).collect();
            let out = cg_solve_from(a, &rhs, Some(&warm[j]), &opts.cg)?;
            warm[j] = out.x.clone();
            *col = out.x;
        }
        m_orthonormalize(&mut basis, mass);

        let images: Vec<Vec<f64>> = basis.iter().map(|x| a.apply_vec(x)).collect();
        let mut h = DMatrix::zeros(block, block);
        for i in 0..block {
            for j in 0..block {
                let v: f64 = basis[i].iter().zip(&images[j]).map(|(x, y)| x * y).sum();
                h[(i, j)] = v;
            }
        }
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let rotated: Vec<Vec<f64>> = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (i, b) in basis.iter().enumerate() {
                    let coef = eig.eigenvectors[(i, c)];
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += coef * y;
                    }
                }
                v
            })
            .collect();
        basis = rotated;
        // keep warm starts consistent with the rotated basis: A⁻¹ M x scales by 1/θ
        for (j, &c) in order.iter().enumerate() {
            let theta = eig.eigenvalues[c];
            warm[j] = basis[j].iter().map(|x| x / theta.max(1e-300)).collect();
        }
        let values: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();

        let converged = previous.as_ref().is_some_and(|prev| {
            (0..k)
                .all(|i| (values[i] - prev[i]).abs() <= opts.rel_tol * values[i].abs().max(1e-300))
        });
        previous = Some(values.clone());
        if converged {
            let mut vectors = DMatrix::zeros(n, k);
            for j in 0..k {
                for r in 0..n {
                    vectors[(r, j)] = basis[j][r];
                }
            }
            return Ok(Eigenpairs {
                values: values[..k].to_vec(),
                vectors,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_sweeps,
        residual: f64::NAN,
    })
}
