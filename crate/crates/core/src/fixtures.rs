//! Explicit functions on regular trees.

use crate::error::{Error, Result};
use crate::graph::{generate_tree, Section, VertexFn};
use crate::harmonic::harmonic_extension;

/// Branch indices below the root, `"t.0.2"` → `[0, 2]`.
fn branch_path(label: &str) -> Option<Vec<usize>> {
    let mut parts = label.split('.');
    if parts.next()? != "t" {
        return None;
    }
    parts.map(|p| p.parse().ok()).collect()
}

fn tree_labels(s: &Section) -> Result<Vec<Vec<usize>>> {
    s.labels()
        .iter()
        .map(|l| branch_path(l).ok_or_else(|| Error::InvalidLabel(l.clone())))
        .collect()
}

/// The unbounded finite-energy function on a tree section: along the ray
/// `x_0 = t, x_1 = t.0, x_2 = t.0.0, …`, every vertex whose nearest ray
/// vertex is `x_n` gets `Σ_{j≤n} 1/j`.
pub fn tree_ray_function(s: &Section) -> Result<VertexFn> {
    let paths = tree_labels(s)?;
    let harmonic = |n: usize| (1..=n).map(|j| 1.0 / j as f64).sum::<f64>();
    Ok(VertexFn::new(
        paths
            .iter()
            .map(|p| harmonic(p.iter().take_while(|&&b| b == 0).count()))
            .collect(),
    ))
}

/// Shell data `1` on leaves below the root's first child, `0` elsewhere.
pub fn tree_branch_data(s: &Section) -> Result<VertexFn> {
    let paths = tree_labels(s)?;
    let mut f = VertexFn::zeros(s.len());
    for v in s.masked() {
        if paths[v].first() == Some(&0) {
            f[v] = 1.0;
        }
    }
    Ok(f)
}

/// `tree(degree, depth)` with the harmonic extension of [`tree_branch_data`].
pub fn tree_harmonic_fixture(degree: usize, depth: usize) -> Result<(Section, VertexFn)> {
    let s = generate_tree(degree, depth)?;
    let data = tree_branch_data(&s)?;
    let f = harmonic_extension(&s, &data)?;
    Ok((s, f))
}
