//! Structural properties of network models: α-relations, β-classes,
//! solvability of exact and asymptotic consensus, and the α-diameter.
//!
//! Two graphs `G`, `H` are α-related through `K` when every root `j` of `K`
//! has the same in-neighborhood in `G` and in `H`. The comparison is made
//! agent by agent over the roots of `K`, not on the union of their
//! in-neighborhoods.

pub mod oracle;
mod partition;
mod report;

pub use partition::Partition;
pub use report::{analyze, AnalysisReport};

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graphs::{bits, CommGraph, NetworkModel};

/// Default cap on the model size for [`min_alpha_diameter_unsolvable`].
pub const DEFAULT_SUBSET_CAP: usize = 12;

/// All `K` in the model witnessing `g α_K h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaWitness {
    pub g: usize,
    pub h: usize,
    pub witnesses: Vec<usize>,
}

/// α-diameter value: a natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlphaDiameter {
    Finite(usize),
    Infinite,
}

impl AlphaDiameter {
    pub fn finite(self) -> Option<usize> {
        match self {
            AlphaDiameter::Finite(d) => Some(d),
            AlphaDiameter::Infinite => None,
        }
    }
}

impl fmt::Display for AlphaDiameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaDiameter::Finite(d) => write!(f, "{d}"),
            AlphaDiameter::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for AlphaDiameter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AlphaDiameter::Finite(d) => s.serialize_u64(*d as u64),
            AlphaDiameter::Infinite => s.serialize_str("inf"),
        }
    }
}

/// In-neighborhoods of `g` at the agents of `roots`, in agent order.
fn fingerprint(g: &CommGraph, roots: u64) -> Vec<u64> {
    bits(roots).map(|j| g.in_mask(j)).collect()
}

fn same_on(g: &CommGraph, h: &CommGraph, roots: u64) -> bool {
    bits(roots).all(|j| g.in_mask(j) == h.in_mask(j))
}

/// Every `K` in `model` with `In_j(G) = In_j(H)` for all roots `j` of `K`.
pub fn alpha_related(model: &NetworkModel, g: usize, h: usize) -> AlphaWitness {
    let (gg, hh) = (model.get(g), model.get(h));
    let witnesses = model
        .iter()
        .enumerate()
        .filter(|(_, k)| same_on(gg, hh, k.roots_mask()))
        .map(|(i, _)| i)
        .collect();
    AlphaWitness { g, h, witnesses }
}

/// Groups `members` into α-buckets for every distinct root set among
/// `witnesses`. Members sharing a bucket are pairwise α-related.
fn buckets(model: &NetworkModel, members: &[usize], witnesses: &[usize]) -> Vec<Vec<usize>> {
    let mut root_sets: Vec<u64> = witnesses
        .iter()
        .map(|&k| model.get(k).roots_mask())
        .collect();
    root_sets.sort_unstable();
    root_sets.dedup();
    let mut out = Vec::new();
    for roots in root_sets {
        let mut by_print: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for &g in members {
            by_print
                .entry(fingerprint(model.get(g), roots))
                .or_default()
                .push(g);
        }
        out.extend(by_print.into_values().filter(|b| b.len() > 1));
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of each block under α-relations witnessed by
/// graphs of the same block.
fn split_blocks(model: &NetworkModel, blocks: &[Vec<usize>]) -> Partition {
    let mut uf = UnionFind::new(model.len());
    for block in blocks {
        for bucket in buckets(model, block, block) {
            for w in bucket.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let labels: Vec<usize> = (0..model.len()).map(|i| uf.find(i)).collect();
    Partition::from_labels(&labels)
}

/// α*: transitive closure of the union of all α_K, K in the model.
pub fn alpha_star(model: &NetworkModel) -> Partition {
    let all: Vec<usize> = (0..model.len()).collect();
    split_blocks(model, &[all])
}

/// β-classes as the greatest fixed point of block splitting: starting from
/// α*, each block is replaced by the components of the α-relations
/// witnessed inside it, until nothing splits.
pub fn beta_classes(model: &NetworkModel) -> Partition {
    let mut current = alpha_star(model);
    loop {
        let next = split_blocks(model, current.blocks());
        if next.len() == current.len() {
            return current;
        }
        current = next;
    }
}

/// [`beta_classes`] cross-checked against the brute-force oracle on models
/// small enough for it; a disagreement is an internal error.
pub fn checked_beta_classes(model: &NetworkModel) -> Result<Partition> {
    let fast = beta_classes(model);
    if model.len() <= oracle::ORACLE_MAX_GRAPHS {
        let slow = oracle::beta_oracle(model)?;
        if slow != fast {
            return Err(Error::Internal(format!(
                "beta refinement {:?} disagrees with the oracle {:?}",
                fast.blocks(),
                slow.blocks()
            )));
        }
    }
    Ok(fast)
}

/// Checks the chain-closure property of `partition`: inside every block,
/// any two graphs are linked by a chain of α-steps whose witnesses lie in
/// the same block. Chains of length zero are allowed.
pub fn closure_property_holds(model: &NetworkModel, partition: &Partition) -> bool {
    partition.blocks().iter().all(|block| {
        let mut seen = vec![false; block.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(a) = queue.pop_front() {
            for b in 0..block.len() {
                if seen[b] {
                    continue;
                }
                let (ga, gb) = (model.get(block[a]), model.get(block[b]));
                if block
                    .iter()
                    .any(|&k| same_on(ga, gb, model.get(k).roots_mask()))
                {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen.iter().all(|&s| s)
    })
}

/// True iff the root sets of `graphs` have empty intersection.
pub fn is_source_incompatible<'a>(graphs: impl IntoIterator<Item = &'a CommGraph>) -> bool {
    graphs
        .into_iter()
        .fold(u64::MAX, |acc, g| acc & g.roots_mask())
        == 0
}

/// Exact consensus is solvable iff every β-class has a common root.
pub fn consensus_solvable(model: &NetworkModel) -> bool {
    beta_classes(model)
        .blocks()
        .iter()
        .all(|b| !is_source_incompatible(b.iter().map(|&i| model.get(i))))
}

/// Asymptotic consensus is solvable iff every graph is rooted.
pub fn asymptotic_solvable(model: &NetworkModel) -> bool {
    model.iter().all(CommGraph::is_rooted)
}

/// α-diameter via breadth-first search over α-buckets (hyperedges).
///
/// A single-graph model has diameter 1 by convention.
pub fn alpha_diameter(model: &NetworkModel) -> AlphaDiameter {
    let m = model.len();
    if m == 1 {
        return AlphaDiameter::Finite(1);
    }
    let all: Vec<usize> = (0..m).collect();
    let edges = buckets(model, &all, &all);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (e, bucket) in edges.iter().enumerate() {
        for &g in bucket {
            incident[g].push(e);
        }
    }
    let mut dist = vec![usize::MAX; m];
    let mut used = vec![false; edges.len()];
    let mut worst = 0;
    for src in 0..m {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        used.iter_mut().for_each(|u| *u = false);
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        let mut reached = 1;
        while let Some(g) = queue.pop_front() {
            for &e in &incident[g] {
                if used[e] {
                    continue;
                }
                used[e] = true;
                for &h in &edges[e] {
                    if dist[h] == usize::MAX {
                        dist[h] = dist[g] + 1;
                        worst = worst.max(dist[h]);
                        reached += 1;
                        queue.push_back(h);
                    }
                }
            }
        }
        if reached < m {
            return AlphaDiameter::Infinite;
        }
    }
    AlphaDiameter::Finite(worst.max(1))
}

/// Reference α-diameter computed from explicit pairwise witness sets.
pub fn alpha_diameter_pairwise(model: &NetworkModel) -> AlphaDiameter {
    let m = model.len();
    if m == 1 {
        return AlphaDiameter::Finite(1);
    }
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|g| {
            (0..m)
                .filter(|&h| h != g && !alpha_related(model, g, h).witnesses.is_empty())
                .collect()
        })
        .collect();
    let mut worst = 0;
    for src in 0..m {
        let mut dist = vec![usize::MAX; m];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(g) = queue.pop_front() {
            for &h in &adj[g] {
                if dist[h] == usize::MAX {
                    dist[h] = dist[g] + 1;
                    queue.push_back(h);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return AlphaDiameter::Infinite;
        }
        worst = worst.max(*dist.iter().max().expect("nonempty"));
    }
    AlphaDiameter::Finite(worst.max(1))
}

/// Smallest α-diameter over nonempty submodels in which exact consensus is
/// not solvable; infinite when every submodel is solvable.
pub fn min_alpha_diameter_unsolvable(model: &NetworkModel, cap: usize) -> Result<AlphaDiameter> {
    let m = model.len();
    if m > cap {
        return Err(Error::Resource {
            what: format!("submodels of a {m}-graph model"),
            count: (1u128 << m.min(127)) - 1,
            cap: (1u128 << cap.min(127)) - 1,
        });
    }
    let mut best = AlphaDiameter::Infinite;
    for mask in 1u64..(1u64 << m) {
        let indices: Vec<usize> = bits(mask).collect();
        let sub = model.submodel(&indices)?;
        if !consensus_solvable(&sub) {
            best = best.min(alpha_diameter(&sub));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{async_model, deaf_family, h0, h1, h2, two_agent_graphs, DEFAULT_MODEL_CAP};

    fn idx(m: &NetworkModel, g: &CommGraph) -> usize {
        m.index_of(g).unwrap()
    }

    #[test]
    fn checked_beta_agrees_on_small_models() {
        let m = deaf_family(&CommGraph::complete(4).unwrap());
        assert_eq!(checked_beta_classes(&m).unwrap(), beta_classes(&m));
    }

    #[test]
    fn alpha_is_reflexive() {
        let m = two_agent_graphs();
        for g in 0..m.len() {
            assert_eq!(alpha_related(&m, g, g).witnesses, vec![0, 1, 2]);
        }
    }

    #[test]
    fn two_agent_witness_table() {
        // R(H0) = {1,2}, R(H1) = {1}, R(H2) = {2}.
        // H0 ~ H1 only through K = H2 (In_2 agrees); H0 ~ H2 only through
        // K = H1 (In_1 agrees); H1 and H2 are never related.
        let m = two_agent_graphs();
        let (a, b, c) = (idx(&m, &h0()), idx(&m, &h1()), idx(&m, &h2()));
        assert_eq!(alpha_related(&m, a, b).witnesses, vec![c]);
        assert_eq!(alpha_related(&m, a, c).witnesses, vec![b]);
        assert!(alpha_related(&m, b, c).witnesses.is_empty());
    }

    #[test]
    fn alpha_star_blocks() {
        assert_eq!(alpha_star(&two_agent_graphs()).len(), 1);
        let single = NetworkModel::singleton(h0());
        assert_eq!(alpha_star(&single).len(), 1);
        let pair = NetworkModel::new([h1(), h2()]).unwrap();
        assert_eq!(alpha_star(&pair).len(), 2);
    }

    #[test]
    fn solvability_examples() {
        let k3 = CommGraph::complete(3).unwrap();
        assert!(consensus_solvable(&NetworkModel::singleton(k3.clone())));
        assert!(!consensus_solvable(&two_agent_graphs()));
        assert!(!consensus_solvable(&deaf_family(&k3)));
        assert!(is_source_incompatible(two_agent_graphs().iter()));
        assert!(!is_source_incompatible([&k3]));
        assert!(is_source_incompatible(deaf_family(&k3).iter()));
    }

    #[test]
    fn asymptotic_solvability() {
        assert!(asymptotic_solvable(&two_agent_graphs()));
        let split = CommGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!asymptotic_solvable(&NetworkModel::singleton(split)));
        assert!(asymptotic_solvable(
            &async_model(3, 1, DEFAULT_MODEL_CAP).unwrap()
        ));
    }

    #[test]
    fn singleton_solvable_iff_rooted() {
        for g in crate::graphs::all_graphs(3).unwrap() {
            assert_eq!(
                consensus_solvable(&NetworkModel::singleton(g.clone())),
                g.is_rooted()
            );
        }
    }

    #[test]
    fn alpha_diameters() {
        assert_eq!(alpha_diameter(&two_agent_graphs()), AlphaDiameter::Finite(2));
        for n in [3, 4] {
            let fam = deaf_family(&CommGraph::complete(n).unwrap());
            assert_eq!(alpha_diameter(&fam), AlphaDiameter::Finite(1));
        }
        assert_eq!(
            alpha_diameter(&NetworkModel::singleton(h0())),
            AlphaDiameter::Finite(1)
        );
        let pair = NetworkModel::new([h1(), h2()]).unwrap();
        assert_eq!(alpha_diameter(&pair), AlphaDiameter::Infinite);
    }

    #[test]
    fn min_diameter_over_unsolvable_submodels() {
        assert_eq!(
            min_alpha_diameter_unsolvable(&two_agent_graphs(), DEFAULT_SUBSET_CAP).unwrap(),
            AlphaDiameter::Finite(2)
        );
        let k3 = CommGraph::complete(3).unwrap();
        assert_eq!(
            min_alpha_diameter_unsolvable(&deaf_family(&k3), DEFAULT_SUBSET_CAP).unwrap(),
            AlphaDiameter::Finite(1)
        );
        assert_eq!(
            min_alpha_diameter_unsolvable(&NetworkModel::singleton(k3), DEFAULT_SUBSET_CAP)
                .unwrap(),
            AlphaDiameter::Infinite
        );
    }

    #[test]
    fn min_diameter_guard() {
        let m = async_model(3, 1, DEFAULT_MODEL_CAP).unwrap();
        assert!(matches!(
            min_alpha_diameter_unsolvable(&m, DEFAULT_SUBSET_CAP),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn unrooted_witness_relates_everything() {
        // The roots of an unrooted K are empty, so every pair agrees on them.
        let split = CommGraph::identity(2).unwrap();
        let m = NetworkModel::new([h1(), h2(), split]).unwrap();
        assert_eq!(alpha_star(&m).len(), 1);
        assert_eq!(alpha_diameter(&m), AlphaDiameter::Finite(1));
    }

    #[test]
    fn diameter_serializes_as_number_or_inf() {
        assert_eq!(
            serde_json::to_string(&AlphaDiameter::Finite(2)).unwrap(),
            "2"
        );
        assert_eq!(
            serde_json::to_string(&AlphaDiameter::Infinite).unwrap(),
            "\"inf\""
        );
    }
}
