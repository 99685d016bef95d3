//! Brute-force reference for β-classes, kept independent of the refinement
//! in the parent module: roots by breadth-first search, α from the
//! definition, α* by Warshall closure, and exhaustive enumeration of set
//! partitions.

use std::collections::VecDeque;

use super::Partition;
use crate::error::{Error, Result};
use crate::graphs::NetworkModel;

/// Largest model accepted by [`beta_oracle`] (Bell(8) = 4140 partitions).
pub const ORACLE_MAX_GRAPHS: usize = 8;

/// Roots of graph `g` of the model, one BFS per agent over out-edges.
pub fn roots_by_bfs(model: &NetworkModel, g: usize) -> Vec<usize> {
    let graph = model.get(g);
    let n = graph.n();
    (0..n)
        .filter(|&src| {
            let mut seen = vec![false; n];
            seen[src] = true;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if !seen[v] && graph.has_edge(u, v) {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen.iter().all(|&s| s)
        })
        .collect()
}

/// `rel[k][g][h]` iff `g α_K h` with `K` the k-th graph.
fn alpha_table(model: &NetworkModel) -> Vec<Vec<Vec<bool>>> {
    let m = model.len();
    let roots: Vec<Vec<usize>> = (0..m).map(|k| roots_by_bfs(model, k)).collect();
    (0..m)
        .map(|k| {
            (0..m)
                .map(|g| {
                    (0..m)
                        .map(|h| {
                            roots[k].iter().all(|&j| {
                                let a: Vec<usize> = model.get(g).in_neighbors(j).collect();
                                let b: Vec<usize> = model.get(h).in_neighbors(j).collect();
                                a == b
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Visits every set partition of `0..m` as a restricted growth string.
fn for_each_partition(m: usize, mut visit: impl FnMut(&[usize])) {
    let mut labels = vec![0usize; m];
    let mut maxes = vec![0usize; m];
    loop {
        visit(&labels);
        // find rightmost position that can be incremented
        let mut i = m;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            if labels[i] <= maxes[i - 1] {
                break;
            }
        }
        labels[i] += 1;
        maxes[i] = maxes[i - 1].max(labels[i]);
        for j in i + 1..m {
            labels[j] = 0;
            maxes[j] = maxes[i];
        }
    }
}

/// The coarsest partition that is included in α* and satisfies the chain
/// closure property, found by enumerating all partitions.
///
/// Fails with a resource error above [`ORACLE_MAX_GRAPHS`] graphs and with an
/// internal error if no unique coarsest candidate exists.
pub fn beta_oracle(model: &NetworkModel) -> Result<Partition> {
    let m = model.len();
    if m > ORACLE_MAX_GRAPHS {
        return Err(Error::Resource {
            what: format!("set partitions of {m} graphs"),
            count: bell(m),
            cap: bell(ORACLE_MAX_GRAPHS),
        });
    }
    let alpha = alpha_table(model);
    let mut star = vec![vec![false; m]; m];
    for g in 0..m {
        for h in 0..m {
            star[g][h] = g == h || (0..m).any(|k| alpha[k][g][h]);
        }
    }
    for k in 0..m {
        for g in 0..m {
            for h in 0..m {
                if star[g][k] && star[k][h] {
                    star[g][h] = true;
                }
            }
        }
    }

    let mut valid: Vec<Vec<usize>> = Vec::new();
    for_each_partition(m, |labels| {
        let included = (0..m).all(|g| (0..m).all(|h| labels[g] != labels[h] || star[g][h]));
        if included && chains_exist(&alpha, labels) {
            valid.push(labels.to_vec());
        }
    });

    let finer_or_equal = |a: &[usize], b: &[usize]| {
        (0..m).all(|g| (0..m).all(|h| a[g] != a[h] || b[g] == b[h]))
    };
    let coarsest: Vec<&Vec<usize>> = valid
        .iter()
        .filter(|cand| valid.iter().all(|other| finer_or_equal(other, cand)))
        .collect();
    match coarsest.as_slice() {
        [only] => Ok(Partition::from_labels(only)),
        [] => Err(Error::Internal(
            "no coarsest closure-satisfying partition inside alpha*".into(),
        )),
        _ => Err(Error::Internal(
            "several coarsest closure-satisfying partitions".into(),
        )),
    }
}

/// For every pair in a common block, search a chain `G = H_0, ..., H_q = H`
/// inside the block with each step witnessed by some `K_r` of the block.
fn chains_exist(alpha: &[Vec<Vec<bool>>], labels: &[usize]) -> bool {
    let m = labels.len();
    (0..m).all(|g| {
        let mut seen = vec![false; m];
        seen[g] = true;
        let mut queue = VecDeque::from([g]);
        while let Some(u) = queue.pop_front() {
            for v in 0..m {
                if seen[v] || labels[v] != labels[g] {
                    continue;
                }
                let step = (0..m).any(|k| labels[k] == labels[g] && alpha[k][u][v]);
                if step {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        (0..m).all(|h| labels[h] != labels[g] || seen[h])
    })
}

fn bell(m: usize) -> u128 {
    // Bell triangle
    let mut row = vec![1u128];
    for _ in 0..m {
        let mut next = vec![*row.last().expect("nonempty")];
        for &x in &row {
            let last = *next.last().expect("nonempty");
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}
