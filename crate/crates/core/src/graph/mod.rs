//! Sections, generators, exhaustions and the graph file format.

mod exhaustion;
mod format;
pub mod generators;
mod section;
mod vertex_fn;

pub use exhaustion::{check_nesting, ExhaustionGenerator, Family, KillingRule};
pub use format::{parse_graph_file, serialize_graph_file};
pub use generators::{generate_lattice, generate_tree};
pub use section::{Components, RawGraph, Section};
pub use vertex_fn::VertexFn;

use crate::error::Result;

/// Level-`n` section of an exhaustion.
pub fn exhaust(gen: &ExhaustionGenerator, n: usize) -> Result<Section> {
    gen.level(n)
}
