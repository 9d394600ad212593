use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Raw description of a weighted graph before validation.
///
/// Edges may be listed in either orientation; listing the same pair twice is
/// accepted only when both entries carry the same weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawGraph {
    pub vertices: usize,
    pub labels: Vec<(usize, String)>,
    pub edges: Vec<(usize, usize, f64)>,
    pub killing: Vec<(usize, f64)>,
    pub measure: Vec<(usize, f64)>,
    pub dirichlet: Vec<usize>,
}

impl RawGraph {
    pub fn new(vertices: usize) -> Self {
        RawGraph {
            vertices,
            ..Default::default()
        }
    }

    pub fn edge(mut self, u: usize, v: usize, weight: f64) -> Self {
        self.edges.push((u, v, weight));
        self
    }

    pub fn killing(mut self, v: usize, value: f64) -> Self {
        self.killing.push((v, value));
        self
    }

    pub fn measure(mut self, v: usize, value: f64) -> Self {
        self.measure.push((v, value));
        self
    }

    pub fn dirichlet(mut self, v: usize) -> Self {
        self.dirichlet.push(v);
        self
    }

    pub fn label(mut self, v: usize, label: impl Into<String>) -> Self {
        self.labels.push((v, label.into()));
        self
    }
}

/// A finite weighted graph `(b, c)` with a measure `m` and a Dirichlet mask.
///
/// Adjacency is stored in CSR form with neighbours sorted by index, so every
/// traversal has a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    killing: Vec<f64>,
    measure: Vec<f64>,
    mask: Vec<bool>,
}

/// Connected components of the interior (non-masked vertices) under `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Components {
    /// Component id of each vertex, `None` on the mask.
    pub component_of: Vec<Option<usize>>,
    pub members: Vec<Vec<usize>>,
    /// A component is grounded when it touches the mask or carries killing.
    pub grounded: Vec<bool>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn all_grounded(&self) -> bool {
        self.grounded.iter().all(|&g| g)
    }
}

pub(crate) fn check_label(label: &str) -> Result<()> {
    if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

impl Section {
    /// Validates `raw` and builds the section, symmetrising edges.
    pub fn build(raw: &RawGraph) -> Result<Section> {
        let n = raw.vertices;
        let check = |v: usize| -> Result<()> {
            if v >= n {
                Err(Error::UnknownVertex(v.to_string()))
            } else {
                Ok(())
            }
        };

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in &raw.edges {
            check(u)?;
            check(v)?;
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NegativeWeight { u, v, weight: w });
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for (u, row) in adjacency.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let (v, w) = row[i];
                let mut j = i + 1;
                while j < row.len() && row[j].0 == v {
                    if row[j].1 != w {
                        let (a, b) = if u < v { (u, v) } else { (v, u) };
                        return Err(Error::DuplicateEdgeConflict {
                            u: a,
                            v: b,
                            first: w,
                            second: row[j].1,
                        });
                    }
                    j += 1;
                }
                neighbors.push(v);
                weights.push(w);
                i = j;
            }
            offsets.push(neighbors.len());
        }

        let mut killing = vec![0.0; n];
        for &(v, c) in &raw.killing {
            check(v)?;
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::NegativeKilling {
                    vertex: v,
                    value: c,
                });
            }
            killing[v] = c;
        }
        let mut measure = vec![1.0; n];
        for &(v, m) in &raw.measure {
            check(v)?;
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::NonPositiveMeasure {
                    vertex: v,
                    value: m,
                });
            }
            measure[v] = m;
        }
        let mut mask = vec![false; n];
        for &v in &raw.dirichlet {
            check(v)?;
            mask[v] = true;
        }

        let mut labels: Vec<String> = (0..n).map(|v| v.to_string()).collect();
        for (v, label) in &raw.labels {
            check(*v)?;
            check_label(label)?;
            labels[*v] = label.clone();
        }
        let mut label_index = HashMap::with_capacity(n);
        for (v, label) in labels.iter().enumerate() {
            if label_index.insert(label.clone(), v).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }

        Ok(Section {
            labels,
            label_index,
            offsets,
            neighbors,
            weights,
            killing,
            measure,
            mask,
        })
    }

    /// Builds from a pre-sorted, symmetric adjacency. Used by the generators,
    /// which produce valid data by construction.
    pub(crate) fn from_parts(
        labels: Vec<String>,
        adjacency: Vec<Vec<(usize, f64)>>,
        killing: Vec<f64>,
        mask: Vec<bool>,
    ) -> Section {
        let n = labels.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for mut row in adjacency {
            row.sort_by_key(|e| e.0);
            for (v, w) in row {
                neighbors.push(v);
                weights.push(w);
            }
            offsets.push(neighbors.len());
        }
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(v, l)| (l.clone(), v))
            .collect();
        Section {
            labels,
            label_index,
            offsets,
            neighbors,
            weights,
            killing,
            measure: vec![1.0; n],
            mask,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks a vertex up by label.
    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Resolves a label, falling back to a decimal index.
    pub fn resolve(&self, name: &str) -> Result<usize> {
        if let Some(v) = self.vertex(name) {
            return Ok(v);
        }
        match name.parse::<usize>() {
            Ok(v) if v < self.len() => Ok(v),
            _ => Err(Error::UnknownVertex(name.to_string())),
        }
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    /// Neighbours of `v` with their weights, in increasing index order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub(crate) fn neighbor_slice(&self, v: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[v]..self.offsets[v + 1];
        (&self.neighbors[range.clone()], &self.weights[range])
    }

    /// Weighted degree `Σ_y b(v, y)`.
    pub fn degree(&self, v: usize) -> f64 {
        self.weights[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .sum()
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let (nbrs, ws) = self.neighbor_slice(u);
        match nbrs.binary_search(&v) {
            Ok(i) => ws[i],
            Err(_) => 0.0,
        }
    }

    /// Each undirected edge once, as `(u, v, b)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn killing(&self, v: usize) -> f64 {
        self.killing[v]
    }

    pub fn killing_values(&self) -> &[f64] {
        &self.killing
    }

    pub fn has_killing(&self) -> bool {
        self.killing.iter().any(|&c| c > 0.0)
    }

    pub fn measure(&self, v: usize) -> f64 {
        self.measure[v]
    }

    pub fn measure_values(&self) -> &[f64] {
        &self.measure
    }

    pub fn is_masked(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn masked(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.mask[v]).collect()
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.mask[v]).collect()
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&m| !m).count()
    }

    /// Replaces the measure, keeping everything else.
    pub fn with_measure(&self, measure: Vec<f64>) -> Result<Section> {
        if measure.len() != self.len() {
            return Err(Error::SectionMismatch {
                expected: self.len(),
                got: measure.len(),
            });
        }
        if let Some((v, &m)) = measure
            .iter()
            .enumerate()
            .find(|(_, &m)| !(m > 0.0 && m.is_finite()))
        {
            return Err(Error::NonPositiveMeasure {
                vertex: v,
                value: m,
            });
        }
        Ok(Section {
            measure,
            ..self.clone()
        })
    }

    /// Replaces the killing term, keeping everything else.
    pub fn with_killing(&self, killing: Vec<f64>) -> Result<Section> {
        if killing.len() != self.len() {
            return Err(Error::SectionMismatch {
                expected: self.len(),
                got: killing.len(),
            });
        }
        if let Some((v, &c)) = killing
            .iter()
            .enumerate()
            .find(|(_, &c)| !(c >= 0.0 && c.is_finite()))
        {
            return Err(Error::NegativeKilling {
                vertex: v,
                value: c,
            });
        }
        Ok(Section {
            killing,
            ..self.clone()
        })
    }

    /// Replaces the Dirichlet mask, keeping everything else.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Section> {
        if mask.len() != self.len() {
            return Err(Error::SectionMismatch {
                expected: self.len(),
                got: mask.len(),
            });
        }
        Ok(Section {
            mask,
            ..self.clone()
        })
    }

    /// Components of the interior, connected through interior-to-interior edges.
    pub fn interior_components(&self) -> Components {
        let n = self.len();
        let mut component_of = vec![None; n];
        let mut members = Vec::new();
        let mut grounded = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if self.mask[start] || component_of[start].is_some() {
                continue;
            }
            let id = members.len();
            let mut group = Vec::new();
            let mut touches = false;
            component_of[start] = Some(id);
            stack.push(start);
            while let Some(u) = stack.pop() {
                group.push(u);
                touches |= self.killing[u] > 0.0;
                for (v, _) in self.neighbors(u) {
                    if self.mask[v] {
                        touches = true;
                    } else if component_of[v].is_none() {
                        component_of[v] = Some(id);
                        stack.push(v);
                    }
                }
            }
            group.sort_unstable();
            members.push(group);
            grounded.push(touches);
        }
        Components {
            component_of,
            members,
            grounded,
        }
    }

    /// Component id of every vertex in the full graph, ignoring the mask.
    pub fn full_components(&self) -> Vec<usize> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Label-based equality: same labels, weights, killing, measure and mask,
    /// regardless of vertex numbering.
    pub fn same_as(&self, other: &Section) -> bool {
        if self.len() != other.len() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut map = Vec::with_capacity(self.len());
        for label in &self.labels {
            match other.vertex(label) {
                Some(w) => map.push(w),
                None => return false,
            }
        }
        (0..self.len()).all(|v| {
            let w = map[v];
            self.killing[v] == other.killing[w]
                && self.measure[v] == other.measure[w]
                && self.mask[v] == other.mask[w]
                && self.neighbors(v).all(|(u, b)| other.weight(w, map[u]) == b)
        })
    }

    /// Sum of the killing term over all vertices.
    pub fn killing_total(&self) -> f64 {
        self.killing.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> RawGraph {
        RawGraph::new(3).edge(0, 1, 1.0).edge(1, 2, 1.0)
    }

    #[test]
    fn path_with_defaults() {
        let s = Section::build(&p3()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.weight(1, 0), 1.0);
        assert_eq!(s.weight(0, 2), 0.0);
        assert!(s.measure_values().iter().all(|&m| m == 1.0));
        assert!(!s.has_killing());
        assert!(s.masked().is_empty());
        assert_eq!(s.vertex("2"), Some(2));
    }

    #[test]
    fn conflicting_duplicate_is_rejected() {
        let raw = RawGraph::new(2).edge(0, 1, 1.0).edge(1, 0, 2.0);
        assert!(matches!(
            Section::build(&raw),
            Err(Error::DuplicateEdgeConflict { u: 0, v: 1, .. })
        ));
        let same = RawGraph::new(2).edge(0, 1, 1.5).edge(1, 0, 1.5);
        assert_eq!(Section::build(&same).unwrap().edge_count(), 1);
    }

    #[test]
    fn edgeless_vertex_with_killing() {
        let s = Section::build(&RawGraph::new(1).killing(0, 2.0)).unwrap();
        assert_eq!(s.killing(0), 2.0);
        assert_eq!(s.degree(0), 0.0);
        let comps = s.interior_components();
        assert_eq!(comps.count(), 1);
        assert!(comps.grounded[0]);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Section::build(&RawGraph::new(2).edge(1, 1, 1.0)),
            Err(Error::SelfLoop(1))
        );
        assert!(matches!(
            Section::build(&RawGraph::new(2).edge(0, 1, -1.0)),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            Section::build(&RawGraph::new(2).measure(0, 0.0)),
            Err(Error::NonPositiveMeasure { vertex: 0, .. })
        ));
        assert!(matches!(
            Section::build(&RawGraph::new(2).killing(1, -0.5)),
            Err(Error::NegativeKilling { vertex: 1, .. })
        ));
        assert!(matches!(
            Section::build(&RawGraph::new(2).edge(0, 5, 1.0)),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            Section::build(&RawGraph::new(2).label(0, "a").label(1, "a")),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            Section::build(&RawGraph::new(1).label(0, "a b")),
            Err(Error::InvalidLabel(_))
        ));
    }

    #[test]
    fn components_report_grounding() {
        // 0-1 grounded by mask at 2; 3-4 floating
        let raw = RawGraph::new(5)
            .edge(0, 1, 1.0)
            .edge(1, 2, 1.0)
            .edge(3, 4, 1.0)
            .dirichlet(2);
        let s = Section::build(&raw).unwrap();
        let comps = s.interior_components();
        assert_eq!(comps.members, vec![vec![0, 1], vec![3, 4]]);
        assert_eq!(comps.grounded, vec![true, false]);
        assert_eq!(comps.component_of[2], None);
    }

    #[test]
    fn same_as_ignores_numbering() {
        let a = Section::build(
            &RawGraph::new(2)
                .label(0, "x")
                .label(1, "y")
                .edge(0, 1, 2.0)
                .dirichlet(1),
        )
        .unwrap();
        let b = Section::build(
            &RawGraph::new(2)
                .label(0, "y")
                .label(1, "x")
                .edge(1, 0, 2.0)
                .dirichlet(0),
        )
        .unwrap();
        assert!(a.same_as(&b));
        let c = b.with_mask(vec![false, false]).unwrap();
        assert!(!a.same_as(&c));
    }
}
