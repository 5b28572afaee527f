//! Signed undirected graphs: data model, ingestion and generators.

mod load;
mod synth;
mod transform;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use load::{load_edge_list, parse_edge_list, EdgeListSpec, LoadReport, SignColumn};
pub use synth::{random_connected, synth_balanced};
pub use transform::{inject_sparsity, remove_edges, top_degree_subgraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Positive, Sign::Negative];

    /// Numeric projection: +1 or -1.
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    /// Balance composition: equal signs give Positive, mixed give Negative.
    #[inline]
    pub fn compose(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    /// Integer form used by the on-disk edge list.
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// An undirected signed edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
}

impl Edge {
    pub fn new(a: usize, b: usize, sign: Sign) -> Edge {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Edge { u, v, sign }
    }
}

/// Signed undirected simple graph over dense node ids `0..node_count`.
///
/// Immutable after construction. Edges are kept in insertion order with
/// `u < v`; adjacency lists are sorted by neighbor id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    node_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, Sign)>>,
    positive: usize,
}

impl SignedGraph {
    /// Builds a graph, rejecting self-loops, out-of-range ids and repeated
    /// unordered pairs.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut adjacency: Vec<Vec<(usize, Sign)>> = vec![Vec::new(); node_count];
        let mut stored = Vec::new();
        let mut positive = 0;
        for e in edges {
            let e = Edge::new(e.u, e.v, e.sign);
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop on node {}", e.u)));
            }
            if e.v >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "node {} out of range for {} nodes",
                    e.v, node_count
                )));
            }
            adjacency[e.u].push((e.v, e.sign));
            adjacency[e.v].push((e.u, e.sign));
            if e.sign.is_positive() {
                positive += 1;
            }
            stored.push(e);
        }
        for (node, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable_by_key(|&(n, _)| n);
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge incident to node {node}"
                )));
            }
        }
        Ok(SignedGraph {
            node_count,
            edges: stored,
            adjacency,
            positive,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn positive_edge_count(&self) -> usize {
        self.positive
    }

    pub fn negative_edge_count(&self) -> usize {
        self.edges.len() - self.positive
    }

    /// Neighbors of `node` with the sign of the connecting edge, ascending by id.
    pub fn neighbors(&self, node: usize) -> &[(usize, Sign)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn edge_sign(&self, a: usize, b: usize) -> Option<Sign> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |&(n, _)| n)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn average_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.node_count as f64
        }
    }

    /// Writes the canonical `u v sign` format. Isolated nodes are preserved
    /// through a `# nodes N` header line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# nodes {}", self.node_count)?;
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u, e.v, e.sign)?;
        }
        Ok(())
    }

    /// Order-independent content hash (over node count and sorted edges).
    pub fn checksum(&self) -> u64 {
        let mut sorted: Vec<(usize, usize, i8)> =
            self.edges.iter().map(|e| (e.u, e.v, e.sign.as_i8())).collect();
        sorted.sort_unstable();
        let mut bytes = Vec::with_capacity(8 + sorted.len() * 17);
        bytes.extend_from_slice(&(self.node_count as u64).to_le_bytes());
        for (u, v, s) in sorted {
            bytes.extend_from_slice(&(u as u64).to_le_bytes());
            bytes.extend_from_slice(&(v as u64).to_le_bytes());
            bytes.push(s as u8);
        }
        crate::seeds::checksum(&bytes)
    }
}
