//! Undirected graph storage in CSR form, connectivity, and synthetic generators.

mod generate;
mod operator;

pub use generate::{generate_er, normal_features};
pub use operator::NormalizedOperator;

use std::collections::VecDeque;

use crate::error::{NafsError, Result};

/// Immutable undirected graph. Symmetric CSR adjacency without self loops or
/// duplicate edges; column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from `(u, v)` pairs over nodes `0..n`.
    ///
    /// Both orientations of an edge collapse to one undirected edge and self
    /// loops are dropped. An out-of-range index is reported with the 1-based
    /// position of the pair in `edges`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut directed: Vec<(usize, usize)> = Vec::with_capacity(edges.len() * 2);
        for (pos, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(NafsError::Load {
                    line: pos + 1,
                    message: format!("edge ({u}, {v}) out of range for {n} nodes"),
                });
            }
            if u != v {
                directed.push((u, v));
                directed.push((v, u));
            }
        }
        directed.sort_unstable();
        directed.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &directed {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors: Vec<usize> = directed.into_iter().map(|(_, v)| v).collect();
        let m = neighbors.len() / 2;
        Ok(Self {
            n,
            m,
            offsets,
            neighbors,
        })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in CSR order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn column_indices(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn connected_components(&self) -> ComponentMap {
        connected_components(self)
    }
}

/// Connected-component labelling with per-component node and edge tallies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    /// Component id per node, dense in `0..count()`, numbered by smallest member.
    pub component_id: Vec<usize>,
    pub node_counts: Vec<usize>,
    pub edge_counts: Vec<usize>,
}

impl ComponentMap {
    pub fn count(&self) -> usize {
        self.node_counts.len()
    }

    pub fn is_connected(&self) -> bool {
        self.count() <= 1
    }
}

pub fn connected_components(g: &Graph) -> ComponentMap {
    const UNSEEN: usize = usize::MAX;
    let n = g.node_count();
    let mut component_id = vec![UNSEEN; n];
    let mut node_counts = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component_id[start] != UNSEEN {
            continue;
        }
        let id = node_counts.len();
        component_id[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if component_id[v] == UNSEEN {
                    component_id[v] = id;
                    queue.push_back(v);
                }
            }
        }
        node_counts.push(size);
    }
    let mut edge_counts = vec![0usize; node_counts.len()];
    for u in 0..n {
        edge_counts[component_id[u]] += g.degree(u);
    }
    edge_counts.iter_mut().for_each(|c| *c /= 2);
    ComponentMap {
        component_id,
        node_counts,
        edge_counts,
    }
}
