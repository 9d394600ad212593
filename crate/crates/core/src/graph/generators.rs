//! Standard sections: lattice boxes and regular rooted trees.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::Section;

/// Default cap on the number of vertices a generator may produce.
pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

/// Environment variable overriding [`DEFAULT_VERTEX_CAP`].
pub const VERTEX_CAP_ENV: &str = "ROYDEN_VERTEX_CAP";

/// Effective vertex cap, read once from the environment.
pub fn vertex_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(VERTEX_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_VERTEX_CAP)
    })
}

fn check_cap(count: u128, cap: usize) -> Result<usize> {
    if count > cap as u128 {
        Err(Error::SizeOverflow { count, cap })
    } else {
        Ok(count as usize)
    }
}

/// Number of vertices of the box `{-radius..radius}^dim`.
pub fn lattice_size(dim: usize, radius: usize) -> u128 {
    let side = 2 * radius as u128 + 1;
    let mut count: u128 = 1;
    for _ in 0..dim {
        count = count.saturating_mul(side);
    }
    count
}

/// Number of vertices of the rooted tree of the given degree and depth.
pub fn tree_size(degree: usize, depth: usize) -> u128 {
    let mut count: u128 = 1;
    let mut layer: u128 = degree as u128;
    for _ in 0..depth {
        count = count.saturating_add(layer);
        layer = layer.saturating_mul(degree as u128 - 1);
    }
    count
}

pub fn lattice_label(coords: &[i64]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a lattice label `x,y,...` back into coordinates.
pub fn parse_lattice_label(label: &str) -> Option<Vec<i64>> {
    label.split(',').map(|p| p.trim().parse().ok()).collect()
}

/// Box `{-radius..radius}^dim` of `Z^dim` with unit weights; the mask is the
/// shell of vertices with some coordinate of absolute value `radius`.
pub fn generate_lattice(dim: usize, radius: usize) -> Result<Section> {
    generate_lattice_capped(dim, radius, vertex_cap())
}

pub fn generate_lattice_capped(dim: usize, radius: usize, cap: usize) -> Result<Section> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "lattice dimension must be at least 1".into(),
        ));
    }
    if radius == 0 {
        return Err(Error::InvalidParameter(
            "lattice radius must be at least 1".into(),
        ));
    }
    let n = check_cap(lattice_size(dim, radius), cap)?;
    let side = 2 * radius + 1;
    let r = radius as i64;

    let mut strides = vec![1usize; dim];
    for k in 1..dim {
        strides[k] = strides[k - 1] * side;
    }

    let mut labels = Vec::with_capacity(n);
    let mut adjacency = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(n);
    let mut coords = vec![0i64; dim];
    for v in 0..n {
        let mut rest = v;
        for c in coords.iter_mut() {
            *c = (rest % side) as i64 - r;
            rest /= side;
        }
        labels.push(lattice_label(&coords));
        mask.push(coords.iter().any(|c| c.abs() == r));
        let mut row = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            if coords[k] > -r {
                row.push((v - strides[k], 1.0));
            }
            if coords[k] < r {
                row.push((v + strides[k], 1.0));
            }
        }
        adjacency.push(row);
    }
    Ok(Section::from_parts(labels, adjacency, vec![0.0; n], mask))
}

/// Rooted tree: the root has `degree` children, every other internal vertex
/// `degree - 1`, so internal degrees all equal `degree`. Leaves at `depth`
/// form the mask. Labels are `t`, `t.0`, `t.0.1`, ...
pub fn generate_tree(degree: usize, depth: usize) -> Result<Section> {
    generate_tree_capped(degree, depth, vertex_cap())
}

pub fn generate_tree_capped(degree: usize, depth: usize, cap: usize) -> Result<Section> {
    if degree < 3 {
        return Err(Error::InvalidParameter(
            "tree degree must be at least 3".into(),
        ));
    }
    if depth == 0 {
        return Err(Error::InvalidParameter(
            "tree depth must be at least 1".into(),
        ));
    }
    let n = check_cap(tree_size(degree, depth), cap)?;
    let mut labels = Vec::with_capacity(n);
    let mut adjacency: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut depth_of = Vec::with_capacity(n);
    labels.push("t".to_string());
    adjacency.push(Vec::new());
    depth_of.push(0usize);
    let mut head = 0;
    while head < labels.len() {
        let d = depth_of[head];
        if d < depth {
            let children = if d == 0 { degree } else { degree - 1 };
            for i in 0..children {
                let child = labels.len();
                labels.push(format!("{}.{i}", labels[head]));
                adjacency.push(vec![(head, 1.0)]);
                adjacency[head].push((child, 1.0));
                depth_of.push(d + 1);
            }
        }
        head += 1;
    }
    let mask = depth_of.iter().map(|&d| d == depth).collect();
    Ok(Section::from_parts(labels, adjacency, vec![0.0; n], mask))
}

/// Depth of a tree label (`t` is 0, `t.2.1` is 2).
pub fn tree_label_depth(label: &str) -> usize {
    label.matches('.').count()
}
