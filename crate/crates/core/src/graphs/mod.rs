//! Communication graphs and network models.
//!
//! A [`CommGraph`] on `n` agents stores, for every agent, the set of its
//! in-neighbors as a bitmask. Agents are `0..n` internally and `1..=n` in
//! every external format. Every agent is its own in-neighbor.

mod families;
mod io;

pub use families::{
    all_graphs, async_model, async_model_size, deaf_family, h0, h1, h2, psi_graph, psi_model,
    random_graph, random_nonsplit, random_rooted, sigma_block, two_agent_graphs,
    DEFAULT_MODEL_CAP,
};
pub use io::{
    graph_from_json, graph_to_json, model_from_json, model_to_json, parse_graph, parse_model,
    parse_pattern, serialize_graph, serialize_model, serialize_pattern,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported agent count (one bit per agent in a `u64`).
pub const MAX_AGENTS: usize = 64;

/// Bitmask with the low `n` bits set.
#[inline]
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates over the set bits of `mask` in increasing order.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Directed graph with a self-loop at every node.
///
/// Equality and ordering are structural on the in-neighbor rows, which gives
/// network models a canonical order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CommGraph {
    n: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for CommGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CommGraph({})", self.code())
    }
}

impl CommGraph {
    /// Builds a graph from per-agent in-neighbor bitmasks, validating the
    /// self-loop and range invariants.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_AGENTS {
            return Err(Error::Argument(format!(
                "agent count must lie in 1..={MAX_AGENTS}, got {n}"
            )));
        }
        if rows.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: rows.len(),
            });
        }
        let full = full_mask(n);
        for (i, &row) in rows.iter().enumerate() {
            if row & !full != 0 {
                return Err(Error::Validation(format!(
                    "agent {} has an in-neighbor outside 1..={n}",
                    i + 1
                )));
            }
            if row & (1 << i) == 0 {
                return Err(Error::Validation(format!(
                    "agent {} is missing its self-loop",
                    i + 1
                )));
            }
        }
        Ok(CommGraph { n, rows })
    }

    /// Builds a graph from 0-based in-neighbor lists.
    pub fn from_in_sets(in_sets: &[Vec<usize>]) -> Result<Self> {
        let n = in_sets.len();
        let mut rows = Vec::with_capacity(n);
        for (i, set) in in_sets.iter().enumerate() {
            let mut row = 0u64;
            for &j in set {
                if j >= n {
                    return Err(Error::Validation(format!(
                        "agent {} lists in-neighbor {} outside 1..={n}",
                        i + 1,
                        j + 1
                    )));
                }
                row |= 1 << j;
            }
            rows.push(row);
        }
        Self::from_rows(n, rows)
    }

    /// Builds a graph from 0-based directed edges `(from, to)`; self-loops are
    /// added automatically.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > MAX_AGENTS {
            return Err(Error::Argument(format!(
                "agent count must lie in 1..={MAX_AGENTS}, got {n}"
            )));
        }
        let mut rows: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for &(from, to) in edges {
            if from >= n || to >= n {
                return Err(Error::Argument(format!(
                    "edge ({}, {}) outside 1..={n}",
                    from + 1,
                    to + 1
                )));
            }
            rows[to] |= 1 << from;
        }
        Self::from_rows(n, rows)
    }

    /// Graph with self-loops only.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_edges(n, &[])
    }

    /// Complete digraph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        Self::from_rows(n, vec![full_mask(n); n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-neighbor bitmask of `agent`.
    #[inline]
    pub fn in_mask(&self, agent: usize) -> u64 {
        self.rows[agent]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn in_neighbors(&self, agent: usize) -> impl Iterator<Item = usize> {
        bits(self.rows[agent])
    }

    /// Out-neighbors of `agent`, derived from the in-neighbor rows.
    pub fn out_neighbors(&self, agent: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.rows[i] & (1 << agent) != 0)
            .collect()
    }

    /// Out-neighbor bitmasks of all agents (the transpose).
    pub fn out_masks(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (i, &row) in self.rows.iter().enumerate() {
            for j in bits(row) {
                out[j] |= 1 << i;
            }
        }
        out
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.rows[to] & (1 << from) != 0
    }

    /// An agent is deaf when its only in-neighbor is itself.
    pub fn is_deaf(&self, agent: usize) -> bool {
        self.rows[agent] == 1 << agent
    }

    /// Copy of this graph with every edge into `agent` removed, except the
    /// self-loop.
    pub fn with_deaf(&self, agent: usize) -> CommGraph {
        let mut rows = self.rows.clone();
        rows[agent] = 1 << agent;
        CommGraph { n: self.n, rows }
    }

    /// Product `self ∘ other`: edge `(i, j)` iff some `k` has `(i, k)` in
    /// `self` and `(k, j)` in `other`.
    pub fn product(&self, other: &CommGraph) -> Result<CommGraph> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let rows = other
            .rows
            .iter()
            .map(|&row| bits(row).fold(0u64, |acc, k| acc | self.rows[k]))
            .collect();
        Ok(CommGraph { n: self.n, rows })
    }

    /// Reachability bitmasks: bit `j` of entry `i` is set iff there is a
    /// directed path from `i` to `j`.
    pub fn reachability(&self) -> Vec<u64> {
        let mut reach = self.out_masks();
        loop {
            let mut changed = false;
            for i in 0..self.n {
                let next = bits(reach[i]).fold(reach[i], |acc, j| acc | reach[j]);
                if next != reach[i] {
                    reach[i] = next;
                    changed = true;
                }
            }
            if !changed {
                return reach;
            }
        }
    }

    /// Bitmask of the roots: agents with a directed path to every agent.
    pub fn roots_mask(&self) -> u64 {
        let full = full_mask(self.n);
        self.reachability()
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == full)
            .fold(0u64, |acc, (i, _)| acc | (1 << i))
    }

    /// Roots as 0-based agent indices.
    pub fn roots(&self) -> Vec<usize> {
        bits(self.roots_mask()).collect()
    }

    pub fn is_rooted(&self) -> bool {
        self.roots_mask() != 0
    }

    /// Any two agents share a common in-neighbor.
    pub fn is_nonsplit(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.rows[i] & self.rows[j] != 0))
    }

    /// Compact identifier: in-neighbor masks in hex, agent 1 first.
    pub fn code(&self) -> String {
        let parts: Vec<String> = self.rows.iter().map(|r| format!("{r:x}")).collect();
        parts.join(".")
    }
}

/// A finite nonempty set of communication graphs over a common agent count,
/// stored deduplicated in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkModel {
    n: usize,
    graphs: Vec<CommGraph>,
}

impl NetworkModel {
    pub fn new(graphs: impl IntoIterator<Item = CommGraph>) -> Result<Self> {
        let mut graphs: Vec<CommGraph> = graphs.into_iter().collect();
        let n = match graphs.first() {
            Some(g) => g.n(),
            None => return Err(Error::Validation("network model is empty".into())),
        };
        if let Some(g) = graphs.iter().find(|g| g.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: g.n(),
            });
        }
        graphs.sort();
        graphs.dedup();
        Ok(NetworkModel { n, graphs })
    }

    pub fn singleton(g: CommGraph) -> Self {
        NetworkModel {
            n: g.n(),
            graphs: vec![g],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[CommGraph] {
        &self.graphs
    }

    pub fn get(&self, idx: usize) -> &CommGraph {
        &self.graphs[idx]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CommGraph> {
        self.graphs.iter()
    }

    /// Canonical position of `g`, if it belongs to the model.
    pub fn index_of(&self, g: &CommGraph) -> Option<usize> {
        self.graphs.binary_search(g).ok()
    }

    pub fn contains(&self, g: &CommGraph) -> bool {
        self.index_of(g).is_some()
    }

    /// Submodel made of the graphs at the given canonical indices.
    pub fn submodel(&self, indices: &[usize]) -> Result<NetworkModel> {
        NetworkModel::new(indices.iter().map(|&i| self.graphs[i].clone()))
    }
}

impl<'a> IntoIterator for &'a NetworkModel {
    type Item = &'a CommGraph;
    type IntoIter = std::slice::Iter<'a, CommGraph>;

    fn into_iter(self) -> Self::IntoIter {
        self.graphs.iter()
    }
}
