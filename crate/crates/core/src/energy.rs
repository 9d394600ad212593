//! The energy form `Q̃(f) = ½ Σ b(x,y)(f(x) − f(y))² + Σ c(x) f(x)²`, its
//! polarisation, the `o`-norm and the formal Laplacian.
//!
//! Edge sums visit each unordered pair once with weight `b`, which absorbs
//! the factor ½. All evaluations are allowed on masked vertices; energies
//! report whether the function was non-zero there.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{Section, VertexFn};
use crate::numerics::CsrSym;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub value: f64,
    pub edge: f64,
    pub killing: f64,
    /// The function was non-zero somewhere on the Dirichlet mask, so it is
    /// not admissible for minimisation.
    pub touches_mask: bool,
}

pub fn energy(s: &Section, f: &VertexFn) -> Result<EnergyValue> {
    f.check(s)?;
    let mut edge = 0.0;
    for (u, v, b) in s.edges() {
        let d = f[u] - f[v];
        edge += b * d * d;
    }
    let killing: f64 = (0..s.len()).map(|x| s.killing(x) * f[x] * f[x]).sum();
    Ok(EnergyValue {
        value: edge + killing,
        edge,
        killing,
        touches_mask: !f.vanishes_on_mask(s),
    })
}

/// Polarised form `Q̃(f, g)`.
pub fn energy_inner(s: &Section, f: &VertexFn, g: &VertexFn) -> Result<f64> {
    f.check(s)?;
    g.check(s)?;
    let mut total = 0.0;
    for (u, v, b) in s.edges() {
        total += b * (f[u] - f[v]) * (g[u] - g[v]);
    }
    for x in 0..s.len() {
        total += s.killing(x) * f[x] * g[x];
    }
    Ok(total)
}

/// `‖f‖_o = (Q̃(f) + f(o)²)^{1/2}`.
pub fn o_norm(s: &Section, f: &VertexFn, o: usize) -> Result<f64> {
    s.check_vertex(o)?;
    let e = energy(s, f)?;
    Ok((e.value + f[o] * f[o]).sqrt())
}

/// `𝓛f(x) = Σ_y b(x,y)(f(x) − f(y)) + c(x) f(x)` at every vertex.
pub fn formal_laplacian(s: &Section, f: &VertexFn) -> Result<VertexFn> {
    f.check(s)?;
    Ok(VertexFn::new(
        (0..s.len()).map(|x| laplacian_at(s, f, x)).collect(),
    ))
}

pub(crate) fn laplacian_at(s: &Section, f: &VertexFn, x: usize) -> f64 {
    let mut acc = s.killing(x) * f[x];
    for (y, b) in s.neighbors(x) {
        acc += b * (f[x] - f[y]);
    }
    acc
}

/// Matrix of `Q̃` restricted to a vertex subset, all other vertices pinned.
///
/// Row `i` belongs to `vertices[i]`; the diagonal is the full weighted degree
/// plus `c`, so pinned neighbours still contribute their conductance.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub matrix: CsrSym,
    pub vertices: Vec<usize>,
    pub local: Vec<Option<usize>>,
}

impl FormMatrix {
    pub fn new(s: &Section, keep: &[bool]) -> FormMatrix {
        Self::assemble(s, keep, true)
    }

    /// Same restriction of the pure edge Laplacian, `c` ignored.
    pub fn laplacian(s: &Section, keep: &[bool]) -> FormMatrix {
        Self::assemble(s, keep, false)
    }

    fn assemble(s: &Section, keep: &[bool], with_killing: bool) -> FormMatrix {
        let mut local = vec![None; s.len()];
        let mut vertices = Vec::new();
        for v in 0..s.len() {
            if keep[v] {
                local[v] = Some(vertices.len());
                vertices.push(v);
            }
        }
        let rows = vertices
            .iter()
            .map(|&v| {
                let mut row = Vec::new();
                let mut diag = if with_killing { s.killing(v) } else { 0.0 };
                for (w, b) in s.neighbors(v) {
                    diag += b;
                    if let Some(j) = local[w] {
                        row.push((j, -b));
                    }
                }
                row.push((local[v].unwrap(), diag));
                row
            })
            .collect();
        FormMatrix {
            matrix: CsrSym::from_rows(rows),
            vertices,
            local,
        }
    }

    /// Restriction to the interior of `s`.
    pub fn interior(s: &Section) -> FormMatrix {
        let keep: Vec<bool> = s.mask().iter().map(|m| !m).collect();
        FormMatrix::new(s, &keep)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn restrict(&self, f: &VertexFn) -> Vec<f64> {
        self.vertices.iter().map(|&v| f[v]).collect()
    }

    /// Extends a local vector by zero to every vertex.
    pub fn lift(&self, x: &[f64], n: usize) -> VertexFn {
        let mut f = VertexFn::zeros(n);
        for (&v, &xi) in self.vertices.iter().zip(x) {
            f[v] = xi;
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RawGraph;
    use crate::numerics::SymOperator;

    fn p3() -> Section {
        Section::build(&RawGraph::new(3).edge(0, 1, 1.0).edge(1, 2, 1.0)).unwrap()
    }

    fn f(values: &[f64]) -> VertexFn {
        VertexFn::new(values.to_vec())
    }

    #[test]
    fn energy_examples() {
        let s = p3();
        let e = energy(&s, &f(&[0.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.value, 2.0);
        assert_eq!(e.killing, 0.0);
        assert_eq!(energy(&s, &VertexFn::constant(3, 4.2)).unwrap().value, 0.0);
        let killed = s.with_killing(vec![1.0; 3]).unwrap();
        let e = energy(&killed, &VertexFn::constant(3, 1.0)).unwrap();
        assert_eq!((e.value, e.edge, e.killing), (3.0, 0.0, 3.0));
    }

    #[test]
    fn inner_examples() {
        let s = p3();
        let x = f(&[0.0, 1.0, 2.0]);
        assert_eq!(energy_inner(&s, &x, &x).unwrap(), 2.0);
        assert_eq!(
            energy_inner(&s, &f(&[0.0, 1.0, 0.0]), &VertexFn::constant(3, 3.0)).unwrap(),
            0.0
        );
        let edge = Section::build(&RawGraph::new(2).edge(0, 1, 1.0)).unwrap();
        assert_eq!(
            energy_inner(&edge, &f(&[1.0, 0.0]), &f(&[0.0, 1.0])).unwrap(),
            -1.0
        );
    }

    #[test]
    fn o_norm_examples() {
        let s = p3();
        assert_eq!(o_norm(&s, &VertexFn::constant(3, 1.0), 1).unwrap(), 1.0);
        let x = f(&[0.0, 1.0, 2.0]);
        assert_eq!(o_norm(&s, &x, 0).unwrap(), 2f64.sqrt());
        assert_eq!(o_norm(&s, &x, 2).unwrap(), 6f64.sqrt());
        assert!(o_norm(&s, &x, 3).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let s = p3();
        let lf = formal_laplacian(&s, &f(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(lf[1], 2.0);
        assert_eq!(lf[0], -1.0);
        let zero = formal_laplacian(&s, &VertexFn::constant(3, 7.0)).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let single = Section::build(&RawGraph::new(1).killing(0, 2.0)).unwrap();
        assert_eq!(formal_laplacian(&single, &f(&[3.0])).unwrap()[0], 6.0);
    }

    #[test]
    fn mismatch_is_reported() {
        assert!(energy(&p3(), &VertexFn::zeros(2)).is_err());
    }

    #[test]
    fn mask_flag() {
        let s = p3().with_mask(vec![false, false, true]).unwrap();
        assert!(energy(&s, &f(&[1.0, 0.0, 1.0])).unwrap().touches_mask);
        assert!(!energy(&s, &f(&[1.0, 0.0, 0.0])).unwrap().touches_mask);
    }

    #[test]
    fn form_matrix_matches_energy_on_interior_supported_functions() {
        let raw = RawGraph::new(4)
            .edge(0, 1, 1.0)
            .edge(1, 2, 2.0)
            .edge(2, 3, 0.5)
            .killing(1, 0.25)
            .dirichlet(3);
        let s = Section::build(&raw).unwrap();
        let fm = FormMatrix::interior(&s);
        assert_eq!(fm.vertices, vec![0, 1, 2]);
        let x = [0.3, -1.0, 2.0];
        let lifted = fm.lift(&x, s.len());
        let direct = energy(&s, &lifted).unwrap().value;
        assert!((fm.matrix.form(&x, &x) - direct).abs() < 1e-14);
        assert_eq!(fm.matrix.get(2, 2), 2.5);
    }
}
