//! Nested finite sections approximating an infinite graph.
//!
//! Level `n` of every family is a ball whose outer shell (the vertices with a
//! neighbour outside the ball) is wired to the Dirichlet mask. Labels are
//! stable across levels, so functions at different levels are compared by
//! label and never by index.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::generators::{
    generate_lattice_capped, generate_tree_capped, parse_lattice_label, vertex_cap,
};
use crate::graph::Section;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Sup-norm boxes of `Z^dim`.
    Lattice { dim: usize },
    /// Depth balls of the regular tree of the given degree.
    Tree { degree: usize },
    /// Graph-distance balls around `root` in a user-supplied graph.
    Ball { base: Arc<Section>, root: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "value")]
pub enum KillingRule {
    /// Whatever the family carries (zero for lattices and trees).
    Inherit,
    Zero,
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionGenerator {
    family: Family,
    killing: KillingRule,
    cap: usize,
}

impl ExhaustionGenerator {
    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "lattice dimension must be at least 1".into(),
            ));
        }
        Ok(Self::from_family(Family::Lattice { dim }))
    }

    pub fn tree(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(Error::InvalidParameter(
                "tree degree must be at least 3".into(),
            ));
        }
        Ok(Self::from_family(Family::Tree { degree }))
    }

    /// Balls around `root` in `base`; the base mask is ignored.
    pub fn ball(base: Section, root: usize) -> Result<Self> {
        base.check_vertex(root)?;
        Ok(Self::from_family(Family::Ball {
            base: Arc::new(base),
            root,
        }))
    }

    fn from_family(family: Family) -> Self {
        ExhaustionGenerator {
            family,
            killing: KillingRule::Inherit,
            cap: vertex_cap(),
        }
    }

    pub fn with_killing(mut self, rule: KillingRule) -> Result<Self> {
        if let KillingRule::Constant(c) = rule {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::NegativeKilling {
                    vertex: 0,
                    value: c,
                });
            }
        }
        self.killing = rule;
        Ok(self)
    }

    /// Same graph with `c` set to zero everywhere.
    pub fn without_killing(&self) -> Self {
        ExhaustionGenerator {
            killing: KillingRule::Zero,
            ..self.clone()
        }
    }

    pub fn with_vertex_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn killing_rule(&self) -> KillingRule {
        self.killing
    }

    /// Short description such as `lattice:d=3`.
    pub fn name(&self) -> String {
        let base = match &self.family {
            Family::Lattice { dim } => format!("lattice:d={dim}"),
            Family::Tree { degree } => format!("tree:k={degree}"),
            Family::Ball { base, root } => format!("ball:root={}", base.label(*root)),
        };
        match self.killing {
            KillingRule::Inherit => base,
            KillingRule::Zero => format!("{base},c=0"),
            KillingRule::Constant(c) => format!("{base},c={c}"),
        }
    }

    /// Whether the generated infinite graph is flagged vertex-transitive.
    ///
    /// Only lattices carry the flag (killing rules keep it since they are
    /// translation invariant). Regular trees are transitive too but are left
    /// unflagged so their uniform transience is certified by the spectral
    /// gap route instead.
    pub fn is_vertex_transitive(&self) -> bool {
        matches!(self.family, Family::Lattice { .. })
    }

    /// Label of the distinguished centre vertex.
    pub fn root_label(&self) -> String {
        match &self.family {
            Family::Lattice { dim } => vec!["0"; *dim].join(","),
            Family::Tree { .. } => "t".to_string(),
            Family::Ball { base, root } => base.label(*root).to_string(),
        }
    }

    /// Level-`n` section. Same as [`crate::graph::exhaust`].
    pub fn level(&self, n: usize) -> Result<Section> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "exhaustion levels start at 1".into(),
            ));
        }
        let section = match &self.family {
            Family::Lattice { dim } => generate_lattice_capped(*dim, n, self.cap)?,
            Family::Tree { degree } => generate_tree_capped(*degree, n, self.cap)?,
            Family::Ball { base, root } => ball_section(base, *root, n)?,
        };
        match self.killing {
            KillingRule::Inherit => Ok(section),
            KillingRule::Zero => section.with_killing(vec![0.0; section.len()]),
            KillingRule::Constant(c) => section.with_killing(vec![c; section.len()]),
        }
    }

    /// Partial sum of `c` over the level-`n` section.
    pub fn killing_partial_sum(&self, n: usize) -> Result<f64> {
        match (&self.family, self.killing) {
            (_, KillingRule::Zero) => Ok(0.0),
            (Family::Lattice { .. } | Family::Tree { .. }, KillingRule::Inherit) => Ok(0.0),
            _ => Ok(self.level(n)?.killing_total()),
        }
    }

    /// Coarse angular sector of every vertex of a section at some level,
    /// stable across levels: the orthant for lattices and the first branch
    /// off the root for trees and balls.
    pub fn sectors(&self, section: &Section) -> Vec<usize> {
        match &self.family {
            Family::Lattice { .. } => section
                .labels()
                .iter()
                .map(|label| {
                    parse_lattice_label(label)
                        .map(|coords| {
                            coords
                                .iter()
                                .enumerate()
                                .map(|(k, &c)| if c < 0 { 1usize << k } else { 0 })
                                .sum()
                        })
                        .unwrap_or(0)
                })
                .collect(),
            Family::Tree { .. } => section
                .labels()
                .iter()
                .map(|label| {
                    label
                        .split('.')
                        .nth(1)
                        .and_then(|s| s.parse().ok())
                        .unwrap_or(0)
                })
                .collect(),
            Family::Ball { base, root } => {
                let branches = first_branches(base, *root);
                section
                    .labels()
                    .iter()
                    .map(|label| base.vertex(label).map_or(0, |w| branches[w]))
                    .collect()
            }
        }
    }

    /// Number of distinct sectors.
    pub fn sector_count(&self) -> usize {
        match &self.family {
            Family::Lattice { dim } => 1 << dim,
            Family::Tree { degree } => *degree,
            Family::Ball { base, root } => base.neighbors(*root).count().max(1),
        }
    }
}

fn bfs_distances(s: &Section, root: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; s.len()];
    let mut queue = VecDeque::new();
    dist[root] = Some(0);
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for (v, _) in s.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// For every vertex, the position among the root's neighbours of the first
/// step of its BFS path from `root` (ties broken by smallest index).
fn first_branches(base: &Section, root: usize) -> Vec<usize> {
    let dist = bfs_distances(base, root);
    let mut branch = vec![0usize; base.len()];
    let mut order: Vec<usize> = (0..base.len()).filter(|&v| dist[v].is_some()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    for v in order {
        match dist[v] {
            Some(0) | None => {}
            Some(1) => {
                branch[v] = base.neighbors(root).position(|(u, _)| u == v).unwrap_or(0);
            }
            Some(d) => {
                let parent = base
                    .neighbors(v)
                    .find(|&(u, _)| dist[u] == Some(d - 1))
                    .map(|(u, _)| u)
                    .unwrap();
                branch[v] = branch[parent];
            }
        }
    }
    branch
}

fn ball_section(base: &Section, root: usize, radius: usize) -> Result<Section> {
    let dist = bfs_distances(base, root);
    let inside: Vec<usize> = (0..base.len())
        .filter(|&v| matches!(dist[v], Some(d) if d <= radius))
        .collect();
    let mut local = vec![usize::MAX; base.len()];
    for (i, &v) in inside.iter().enumerate() {
        local[v] = i;
    }
    let mut labels = Vec::with_capacity(inside.len());
    let mut adjacency = Vec::with_capacity(inside.len());
    let mut killing = Vec::with_capacity(inside.len());
    let mut mask = Vec::with_capacity(inside.len());
    for &v in &inside {
        labels.push(base.label(v).to_string());
        killing.push(base.killing(v));
        let mut row = Vec::new();
        let mut outside = false;
        for (u, w) in base.neighbors(v) {
            if local[u] == usize::MAX {
                outside = true;
            } else {
                row.push((local[u], w));
            }
        }
        mask.push(outside);
        adjacency.push(row);
    }
    let measure = inside.iter().map(|&v| base.measure(v)).collect();
    Section::from_parts(labels, adjacency, killing, mask).with_measure(measure)
}

/// Checks that `lower` embeds into `upper` by label with identical `b` and `c`.
pub fn check_nesting(lower: &Section, upper: &Section) -> Result<()> {
    for v in 0..lower.len() {
        let label = lower.label(v);
        let Some(w) = upper.vertex(label) else {
            return Err(Error::NestingViolation(format!("label {label} missing")));
        };
        if lower.killing(v) != upper.killing(w) {
            return Err(Error::NestingViolation(format!(
                "killing differs at {label}"
            )));
        }
        for (u, b) in lower.neighbors(v) {
            let Some(x) = upper.vertex(lower.label(u)) else {
                return Err(Error::NestingViolation(format!(
                    "label {} missing",
                    lower.label(u)
                )));
            };
            if upper.weight(w, x) != b {
                return Err(Error::NestingViolation(format!(
                    "weight differs on {label}-{}",
                    lower.label(u)
                )));
            }
        }
    }
    Ok(())
}
