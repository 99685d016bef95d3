//! Communication pattern sources.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphs::{psi_graph, random_nonsplit, random_rooted, CommGraph, NetworkModel};

/// Graph classes usable as a declared membership instead of an explicit
/// model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphClass {
    Rooted,
    NonSplit,
}

impl GraphClass {
    pub fn contains(self, g: &CommGraph) -> bool {
        match self {
            GraphClass::Rooted => g.is_rooted(),
            GraphClass::NonSplit => g.is_nonsplit(),
        }
    }
}

/// What a source promises every produced graph belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Model(NetworkModel),
    Class { n: usize, class: GraphClass },
}

impl Membership {
    pub fn n(&self) -> usize {
        match self {
            Membership::Model(m) => m.n(),
            Membership::Class { n, .. } => *n,
        }
    }

    pub fn admits(&self, g: &CommGraph) -> bool {
        match self {
            Membership::Model(m) => m.contains(g),
            Membership::Class { n, class } => g.n() == *n && class.contains(g),
        }
    }
}

/// Produces the graph of each round. Given the same construction (seed
/// included) and the same history, a source yields the same graph.
pub trait PatternSource {
    fn membership(&self) -> &Membership;

    /// Graph for `round` (1-based); `history` holds the graphs of rounds
    /// `1..round`.
    fn next_graph(&mut self, round: usize, history: &[CommGraph]) -> Result<CommGraph>;

    fn n(&self) -> usize {
        self.membership().n()
    }

    fn admits(&self, g: &CommGraph) -> bool {
        self.membership().admits(g)
    }

    /// Index of `g` in the declared model, if the membership is a model.
    fn graph_id(&self, g: &CommGraph) -> Option<usize> {
        match self.membership() {
            Membership::Model(m) => m.index_of(g),
            Membership::Class { .. } => None,
        }
    }
}

fn check_members(model: &NetworkModel, graphs: &[CommGraph]) -> Result<()> {
    for g in graphs {
        if !model.contains(g) {
            return Err(Error::Contract(format!(
                "graph {} is not in the declared model",
                g.code()
            )));
        }
    }
    Ok(())
}

/// The same graph every round.
#[derive(Clone, Debug)]
pub struct Constant {
    membership: Membership,
    graph: CommGraph,
}

impl Constant {
    pub fn new(graph: CommGraph) -> Self {
        Constant {
            membership: Membership::Model(NetworkModel::singleton(graph.clone())),
            graph,
        }
    }

    pub fn in_model(model: NetworkModel, graph: CommGraph) -> Result<Self> {
        check_members(&model, std::slice::from_ref(&graph))?;
        Ok(Constant {
            membership: Membership::Model(model),
            graph,
        })
    }
}

impl PatternSource for Constant {
    fn membership(&self) -> &Membership {
        &self.membership
    }

    fn next_graph(&mut self, _round: usize, _history: &[CommGraph]) -> Result<CommGraph> {
        Ok(self.graph.clone())
    }
}

/// Repeats a finite list of graphs.
#[derive(Clone, Debug)]
pub struct Cyclic {
    membership: Membership,
    graphs: Vec<CommGraph>,
}

impl Cyclic {
    pub fn new(graphs: Vec<CommGraph>) -> Result<Self> {
        let model = NetworkModel::new(graphs.iter().cloned())?;
        Ok(Cyclic {
            membership: Membership::Model(model),
            graphs,
        })
    }

    pub fn in_model(model: NetworkModel, graphs: Vec<CommGraph>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::Argument("cyclic pattern needs a graph".into()));
        }
        check_members(&model, &graphs)?;
        Ok(Cyclic {
            membership: Membership::Model(model),
            graphs,
        })
    }
}

impl PatternSource for Cyclic {
    fn membership(&self) -> &Membership {
        &self.membership
    }

    fn next_graph(&mut self, round: usize, _history: &[CommGraph]) -> Result<CommGraph> {
        Ok(self.graphs[(round - 1) % self.graphs.len()].clone())
    }
}

/// Independent uniform draws from a model.
#[derive(Clone, Debug)]
pub struct IidRandom {
    membership: Membership,
    rng: ChaCha8Rng,
}

impl IidRandom {
    pub fn new(model: NetworkModel, seed: u64) -> Self {
        IidRandom {
            membership: Membership::Model(model),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl PatternSource for IidRandom {
    fn membership(&self) -> &Membership {
        &self.membership
    }

    fn next_graph(&mut self, _round: usize, _history: &[CommGraph]) -> Result<CommGraph> {
        let Membership::Model(model) = &self.membership else {
            unreachable!()
        };
        let i = self.rng.gen_range(0..model.len());
        Ok(model.get(i).clone())
    }
}

/// Random members of a graph class, each edge outside the guaranteed
/// skeleton present with probability `p`.
#[derive(Clone, Debug)]
pub struct RandomClass {
    membership: Membership,
    p: f64,
    rng: ChaCha8Rng,
}

impl RandomClass {
    pub fn new(n: usize, class: GraphClass, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!("edge probability {p} not in [0, 1]")));
        }
        if n == 0 || n > crate::graphs::MAX_AGENTS {
            return Err(Error::Argument(format!("agent count {n} not supported")));
        }
        Ok(RandomClass {
            membership: Membership::Class { n, class },
            p,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl PatternSource for RandomClass {
    fn membership(&self) -> &Membership {
        &self.membership
    }

    fn next_graph(&mut self, _round: usize, _history: &[CommGraph]) -> Result<CommGraph> {
        let Membership::Class { n, class } = self.membership else {
            unreachable!()
        };
        Ok(match class {
            GraphClass::Rooted => random_rooted(n, self.p, &mut self.rng),
            GraphClass::NonSplit => random_nonsplit(n, self.p, &mut self.rng),
        })
    }
}

/// Concatenation of blocks `σ_i`, each `n - 2` copies of `Ψ_i`, with the
/// block index drawn uniformly from `{1, 2, 3}` or taken from a fixed list.
#[derive(Clone, Debug)]
pub struct SigmaConcat {
    membership: Membership,
    graphs: [CommGraph; 3],
    order: Option<Vec<usize>>,
    rng: ChaCha8Rng,
    current: usize,
}

impl SigmaConcat {
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        Self::build(n, None, seed)
    }

    /// Blocks in the given order (1-based indices), cycling when exhausted.
    pub fn fixed(n: usize, order: Vec<usize>) -> Result<Self> {
        if order.is_empty() || order.iter().any(|i| !(1..=3).contains(i)) {
            return Err(Error::Argument("block indices must be in 1..=3".into()));
        }
        Self::build(n, Some(order), 0)
    }

    fn build(n: usize, order: Option<Vec<usize>>, seed: u64) -> Result<Self> {
        let graphs = [psi_graph(n, 1)?, psi_graph(n, 2)?, psi_graph(n, 3)?];
        let model = NetworkModel::new(graphs.iter().cloned())?;
        Ok(SigmaConcat {
            membership: Membership::Model(model),
            graphs,
            order,
            rng: ChaCha8Rng::seed_from_u64(seed),
            current: 0,
        })
    }

    pub fn block_len(&self) -> usize {
        self.graphs[0].n() - 2
    }
}

impl PatternSource for SigmaConcat {
    fn membership(&self) -> &Membership {
        &self.membership
    }

    fn next_graph(&mut self, round: usize, _history: &[CommGraph]) -> Result<CommGraph> {
        let len = self.block_len();
        if (round - 1) % len == 0 {
            let block = (round - 1) / len;
            self.current = match &self.order {
                Some(order) => order[block % order.len()] - 1,
                None => self.rng.gen_range(0..3),
            };
        }
        Ok(self.graphs[self.current].clone())
    }
}

/// Replays a recorded sequence; running past its end is a contract error.
#[derive(Clone, Debug)]
pub struct Recorded {
    membership: Membership,
    graphs: Vec<CommGraph>,
}

impl Recorded {
    pub fn new(graphs: Vec<CommGraph>) -> Result<Self> {
        let model = NetworkModel::new(graphs.iter().cloned())?;
        Ok(Recorded {
            membership: Membership::Model(model),
            graphs,
        })
    }

    pub fn in_model(model: NetworkModel, graphs: Vec<CommGraph>) -> Result<Self> {
        check_members(&model, &graphs)?;
        Ok(Recorded {
            membership: Membership::Model(model),
            graphs,
        })
    }

    pub fn with_membership(membership: Membership, graphs: Vec<CommGraph>) -> Result<Self> {
        if let Some(g) = graphs.iter().find(|g| !membership.admits(g)) {
            return Err(Error::Contract(format!(
                "graph {} is outside the declared membership",
                g.code()
            )));
        }
        Ok(Recorded { membership, graphs })
    }
}

impl PatternSource for Recorded {
    fn membership(&self) -> &Membership {
        &self.membership
    }

    fn next_graph(&mut self, round: usize, _history: &[CommGraph]) -> Result<CommGraph> {
        self.graphs.get(round - 1).cloned().ok_or_else(|| {
            Error::Contract(format!(
                "recorded pattern has {} rounds, round {round} requested",
                self.graphs.len()
            ))
        })
    }
}
