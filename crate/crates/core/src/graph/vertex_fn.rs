use std::fmt::Write as _;
use std::ops::{Add, Index, IndexMut, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Section;

/// A real-valued function on the vertices of a [`Section`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VertexFn(Vec<f64>);

impl VertexFn {
    pub fn new(values: Vec<f64>) -> Self {
        VertexFn(values)
    }

    pub fn zeros(n: usize) -> Self {
        VertexFn(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        VertexFn(vec![value; n])
    }

    /// Indicator of a single vertex.
    pub fn delta(n: usize, v: usize) -> Self {
        let mut f = Self::zeros(n);
        f.0[v] = 1.0;
        f
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Fails unless the function has one value per vertex of `s`.
    pub fn check(&self, s: &Section) -> Result<()> {
        if self.len() == s.len() {
            Ok(())
        } else {
            Err(Error::SectionMismatch {
                expected: s.len(),
                got: self.len(),
            })
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> VertexFn {
        VertexFn(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn scale(&self, a: f64) -> VertexFn {
        self.map(|x| a * x)
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Admissible for energy minimisation: zero on the whole mask.
    pub fn vanishes_on_mask(&self, s: &Section) -> bool {
        s.masked().iter().all(|&v| self.0[v] == 0.0)
    }

    /// Parses `<vertex> <value>` lines; vertices are labels or indices and
    /// missing vertices default to zero.
    pub fn parse(text: &str, s: &Section) -> Result<VertexFn> {
        let mut values = vec![0.0; s.len()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| Error::Syntax {
                line: i + 1,
                message,
            };
            let mut parts = line.split_whitespace();
            let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(syntax("expected `<vertex> <value>`".into()));
            };
            let v = s.resolve(name)?;
            values[v] = value
                .parse::<f64>()
                .map_err(|e| syntax(format!("bad value {value:?}: {e}")))?;
        }
        Ok(VertexFn(values))
    }

    /// One `<index> <value>` line per vertex, full precision.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (v, x) in self.0.iter().enumerate() {
            let _ = writeln!(out, "{v} {x:?}");
        }
        out
    }
}

impl Index<usize> for VertexFn {
    type Output = f64;
    fn index(&self, v: usize) -> &f64 {
        &self.0[v]
    }
}

impl IndexMut<usize> for VertexFn {
    fn index_mut(&mut self, v: usize) -> &mut f64 {
        &mut self.0[v]
    }
}

impl From<Vec<f64>> for VertexFn {
    fn from(values: Vec<f64>) -> Self {
        VertexFn(values)
    }
}

impl Add for &VertexFn {
    type Output = VertexFn;
    fn add(self, rhs: &VertexFn) -> VertexFn {
        assert_eq!(self.len(), rhs.len());
        VertexFn(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VertexFn {
    type Output = VertexFn;
    fn sub(self, rhs: &VertexFn) -> VertexFn {
        assert_eq!(self.len(), rhs.len());
        VertexFn(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}
