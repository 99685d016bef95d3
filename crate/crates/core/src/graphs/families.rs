//! Generators for the graph families used by the lower-bound constructions.

use rand::Rng;

use super::{full_mask, CommGraph, NetworkModel};
use crate::error::{Error, Result};

/// Default enumeration cap for [`async_model`].
pub const DEFAULT_MODEL_CAP: u128 = 1_000_000;

/// Two agents, both directions.
pub fn h0() -> CommGraph {
    CommGraph::complete(2).expect("static graph")
}

/// Two agents, agent 1 sends to agent 2 only.
pub fn h1() -> CommGraph {
    CommGraph::from_edges(2, &[(0, 1)]).expect("static graph")
}

/// Two agents, agent 2 sends to agent 1 only.
pub fn h2() -> CommGraph {
    CommGraph::from_edges(2, &[(1, 0)]).expect("static graph")
}

/// The model `{H0, H1, H2}` of all rooted two-agent graphs.
pub fn two_agent_graphs() -> NetworkModel {
    NetworkModel::new([h0(), h1(), h2()]).expect("static model")
}

/// `deaf(G) = {F_1, ..., F_n}` where `F_i` is `g` with agent `i` made deaf.
/// Coinciding graphs are merged.
pub fn deaf_family(g: &CommGraph) -> NetworkModel {
    NetworkModel::new((0..g.n()).map(|i| g.with_deaf(i))).expect("nonempty family")
}

/// The rooted graph `Ψ_i` on `n ≥ 4` agents, `i ∈ {1, 2, 3}` (1-based).
///
/// Agents `4..n` form a path; the two agents of `{1,2,3} \ {i}` hear from
/// agent `n` and feed agent 4; agent `i` is deaf and feeds agent 4. For
/// `n = 4` the path is the single node 4, which is also agent `n`.
pub fn psi_graph(n: usize, i: usize) -> Result<CommGraph> {
    if n < 4 {
        return Err(Error::Argument(format!("psi graphs need n >= 4, got {n}")));
    }
    if !(1..=3).contains(&i) {
        return Err(Error::Argument(format!(
            "psi graph index must be 1, 2 or 3, got {i}"
        )));
    }
    // 0-based: path nodes 3..n-1, last node n-1.
    let mut edges = Vec::new();
    for j in 3..n - 1 {
        edges.push((j, j + 1));
    }
    for l in 0..3 {
        if l + 1 == i {
            edges.push((l, 3));
        } else {
            edges.push((n - 1, l));
            edges.push((l, 3));
        }
    }
    CommGraph::from_edges(n, &edges)
}

/// `{Ψ_1, Ψ_2, Ψ_3}` on `n` agents.
pub fn psi_model(n: usize) -> Result<NetworkModel> {
    NetworkModel::new((1..=3).map(|i| psi_graph(n, i)).collect::<Result<Vec<_>>>()?)
}

/// `σ_i`: the graph `Ψ_i` repeated `n - 2` times.
pub fn sigma_block(n: usize, i: usize) -> Result<Vec<CommGraph>> {
    let g = psi_graph(n, i)?;
    Ok(vec![g; n - 2])
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact number of graphs on `n` agents with every in-degree at least
/// `n - f` (self-loop included). Saturates at `u128::MAX`.
pub fn async_model_size(n: usize, f: usize) -> u128 {
    let others = n.saturating_sub(1) as u128;
    let min_extra = (n - f.min(n)).saturating_sub(1) as u128;
    let per_node: u128 = (min_extra..=others).map(|k| binomial(others, k)).sum();
    (0..n).try_fold(1u128, |acc, _| acc.checked_mul(per_node)).unwrap_or(u128::MAX)
}

/// The asynchronous-round model: all graphs on `n` agents in which every
/// agent has at least `n - f` in-neighbors.
pub fn async_model(n: usize, f: usize, cap: u128) -> Result<NetworkModel> {
    if n == 0 || n > super::MAX_AGENTS {
        return Err(Error::Argument(format!("invalid agent count {n}")));
    }
    if f >= n {
        return Err(Error::Argument(format!("need f < n, got n = {n}, f = {f}")));
    }
    let count = async_model_size(n, f);
    if count > cap {
        return Err(Error::Resource {
            what: format!("async model (n = {n}, f = {f})"),
            count,
            cap,
        });
    }
    let need = n - f;
    let options: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let others = full_mask(n) & !(1u64 << i);
            subsets(others)
                .map(|s| s | (1u64 << i))
                .filter(|row| row.count_ones() as usize >= need)
                .collect()
        })
        .collect();
    let mut graphs = Vec::with_capacity(count as usize);
    let mut choice = vec![0usize; n];
    loop {
        let rows = (0..n).map(|i| options[i][choice[i]]).collect();
        graphs.push(CommGraph::from_rows(n, rows)?);
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == n {
                return NetworkModel::new(graphs);
            }
            choice[pos] += 1;
            if choice[pos] < options[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// All submasks of `mask`, including 0 and `mask` itself.
fn subsets(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Every communication graph on `n` agents (`2^(n(n-1))` of them).
pub fn all_graphs(n: usize) -> Result<Vec<CommGraph>> {
    let count = 1u128 << (n * n.saturating_sub(1)).min(127);
    if n > 5 {
        return Err(Error::Resource {
            what: format!("all graphs on {n} agents"),
            count,
            cap: 1 << 20,
        });
    }
    Ok(async_model(n, n - 1, u128::MAX)?.graphs().to_vec())
}

/// Random graph where each non-loop edge is present with probability `p`.
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> CommGraph {
    let rows = (0..n)
        .map(|i| {
            (0..n).fold(1u64 << i, |row, j| {
                if j != i && rng.gen_bool(p) {
                    row | (1 << j)
                } else {
                    row
                }
            })
        })
        .collect();
    CommGraph::from_rows(n, rows).expect("valid by construction")
}

/// Random rooted graph: a random spanning out-tree plus random extra edges.
pub fn random_rooted<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> CommGraph {
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
    let mut rows: Vec<u64> = random_graph(n, p, rng).rows().to_vec();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        rows[order[k]] |= 1 << parent;
    }
    CommGraph::from_rows(n, rows).expect("valid by construction")
}

/// Random non-split graph: a random graph repaired by adding an edge
/// `i -> j` for every pair without a common in-neighbor.
pub fn random_nonsplit<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> CommGraph {
    let mut rows: Vec<u64> = random_graph(n, p, rng).rows().to_vec();
    for i in 0..n {
        for j in i + 1..n {
            if rows[i] & rows[j] == 0 {
                if rng.gen_bool(0.5) {
                    rows[j] |= 1 << i;
                } else {
                    rows[i] |= 1 << j;
                }
            }
        }
    }
    CommGraph::from_rows(n, rows).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_agent_family() {
        let m = two_agent_graphs();
        assert_eq!(m.len(), 3);
        assert!(m.iter().all(|g| g.is_rooted() && g.is_nonsplit()));
        let g = h1();
        assert_eq!(g.in_neighbors(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(g.in_neighbors(1).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn deaf_family_of_k3() {
        let k3 = CommGraph::complete(3).unwrap();
        let fam = deaf_family(&k3);
        assert_eq!(fam.len(), 3);
        let f2 = k3.with_deaf(1);
        assert!(fam.contains(&f2));
        assert_eq!(f2.in_mask(1), 0b010);
        assert_eq!(f2.in_mask(0), 0b111);
        assert_eq!(f2.in_mask(2), 0b111);
    }

    #[test]
    fn deaf_family_merges_duplicates() {
        // Agents 2 and 3 are already deaf, so F_2 = F_3 = g.
        let g = CommGraph::from_edges(3, &[(1, 0)]).unwrap();
        let fam = deaf_family(&g);
        assert_eq!(fam.len(), 2);
        assert!(fam.contains(&g));
        for f in fam.iter() {
            let differing = (0..3).filter(|&i| f.in_mask(i) != g.in_mask(i)).count();
            assert!(differing <= 1);
        }
    }

    #[test]
    fn psi_graph_for_six_agents_matches_figure() {
        let psi = psi_graph(6, 1).unwrap();
        let expected = CommGraph::from_edges(
            6,
            &[(3, 4), (4, 5), (5, 1), (5, 2), (1, 3), (2, 3), (0, 3)],
        )
        .unwrap();
        assert_eq!(psi, expected);
        assert!(psi.is_deaf(0));
    }

    #[test]
    fn psi_graphs_are_rooted_with_deaf_root() {
        for n in 4..=8 {
            for i in 1..=3 {
                let psi = psi_graph(n, i).unwrap();
                assert!(psi.is_rooted(), "n={n} i={i}");
                assert!(psi.is_deaf(i - 1));
                assert_eq!(psi.roots(), vec![i - 1]);
            }
        }
    }

    #[test]
    fn psi_graph_rejects_bad_arguments() {
        assert!(matches!(psi_graph(3, 1), Err(Error::Argument(_))));
        assert!(matches!(psi_graph(5, 4), Err(Error::Argument(_))));
        assert!(matches!(psi_graph(5, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn psi_four_agents_degenerate_path() {
        // Agent 4 is both the head and the tail of the path.
        let psi = psi_graph(4, 2).unwrap();
        let expected =
            CommGraph::from_edges(4, &[(1, 3), (3, 0), (0, 3), (3, 2), (2, 3)]).unwrap();
        assert_eq!(psi, expected);
    }

    #[test]
    fn async_model_counts() {
        assert_eq!(async_model(3, 1, DEFAULT_MODEL_CAP).unwrap().len(), 27);
        assert_eq!(async_model_size(3, 1), 27);
        assert_eq!(async_model_size(4, 1), 256);
        assert_eq!(async_model_size(4, 2), 2401);
        let k2 = async_model(2, 0, DEFAULT_MODEL_CAP).unwrap();
        assert_eq!(k2.graphs(), &[CommGraph::complete(2).unwrap()]);
    }

    #[test]
    fn async_model_cap_reports_exact_count() {
        let err = async_model(4, 2, 100).unwrap_err();
        assert_eq!(
            err,
            Error::Resource {
                what: "async model (n = 4, f = 2)".into(),
                count: 2401,
                cap: 100
            }
        );
    }

    #[test]
    fn async_members_are_nonsplit_below_half() {
        for (n, f) in [(3, 1), (4, 1), (5, 2)] {
            let m = async_model(n, f, DEFAULT_MODEL_CAP).unwrap();
            assert_eq!(m.len() as u128, async_model_size(n, f));
            for g in m.iter() {
                assert!((0..n).all(|i| g.in_mask(i).count_ones() as usize >= n - f));
                assert!(g.is_nonsplit());
            }
        }
    }

    #[test]
    fn all_graphs_three_agents() {
        assert_eq!(all_graphs(3).unwrap().len(), 64);
    }

    #[test]
    fn random_generators_meet_their_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=7);
            assert!(random_rooted(n, 0.1, &mut rng).is_rooted());
            assert!(random_nonsplit(n, 0.1, &mut rng).is_nonsplit());
        }
    }
}
