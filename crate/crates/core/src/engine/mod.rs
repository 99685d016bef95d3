//! Deterministic round-based execution.
//!
//! In every round each agent receives the previous-round states of its
//! in-neighbors (itself included) in the round's communication graph and
//! applies its algorithm's transition.

mod adversary;
mod contraction;
mod source;
mod valency;

pub use adversary::{greedy_adversary, psi_adversary, AdversaryRun, TIE_TOLERANCE};
pub use contraction::{contraction_estimate, ContractionEstimate};
pub use source::{
    Constant, Cyclic, GraphClass, IidRandom, Membership, PatternSource, RandomClass, Recorded,
    SigmaConcat,
};
pub use valency::{
    valency_bracket, valency_bracket_with, BracketConfig, ContinuationFamily, LimitSample,
    ValencyBracket, DEFAULT_BRANCH_CAP, DEFAULT_ROUND_BUDGET, DEFAULT_TOL,
};

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::CommGraph;

/// A point of `ℝ^d`.
pub type Point = Vec<f64>;

/// A round-based consensus algorithm given by its transition function.
pub trait Algorithm {
    type State: Clone + PartialEq + Debug + Serialize;

    fn name(&self) -> String;

    /// Initial state of `agent` from its input value.
    fn init(&self, agent: usize, n: usize, input: &[f64]) -> Result<Self::State>;

    /// The output variable `y` of a state.
    fn output<'a>(&self, state: &'a Self::State) -> &'a [f64];

    /// New state of `agent` in `round` (1-based) from the states received
    /// from its in-neighbors, given as `(agent, state)` in agent order. The
    /// agent itself is always among them.
    fn step(
        &self,
        agent: usize,
        round: usize,
        own: &Self::State,
        received: &[(usize, &Self::State)],
    ) -> std::result::Result<Self::State, String>;

    /// Every new output lies in the convex hull of the outputs received.
    fn is_convex(&self) -> bool;

    /// Rejects graphs the algorithm was not built for.
    fn check_graph(&self, _graph: &CommGraph) -> Result<()> {
        Ok(())
    }
}

/// States of all agents after `round` rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration<S> {
    pub round: usize,
    pub states: Vec<S>,
}

impl<S: Clone> Configuration<S> {
    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn outputs<'a, A>(&'a self, alg: &'a A) -> Vec<&'a [f64]>
    where
        A: Algorithm<State = S>,
    {
        self.states.iter().map(|s| alg.output(s)).collect()
    }
}

/// Builds the initial configuration from per-agent inputs.
pub fn initial_configuration<A: Algorithm>(
    alg: &A,
    inputs: &[Point],
) -> Result<Configuration<A::State>> {
    if inputs.is_empty() {
        return Err(Error::Argument("no agents".into()));
    }
    let d = inputs[0].len();
    if d == 0 || inputs.iter().any(|p| p.len() != d) {
        return Err(Error::Argument(
            "all inputs must share one positive dimension".into(),
        ));
    }
    if inputs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Argument("inputs must be finite".into()));
    }
    let n = inputs.len();
    let states = inputs
        .iter()
        .enumerate()
        .map(|(i, p)| alg.init(i, n, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Configuration { round: 0, states })
}

/// The successor configuration `G.C`.
pub fn step_configuration<A: Algorithm>(
    alg: &A,
    config: &Configuration<A::State>,
    graph: &CommGraph,
) -> Result<Configuration<A::State>> {
    if graph.n() != config.n() {
        return Err(Error::Dimension {
            expected: config.n(),
            found: graph.n(),
        });
    }
    let round = config.round + 1;
    let mut received = Vec::with_capacity(config.n());
    let mut states = Vec::with_capacity(config.n());
    for (i, own) in config.states.iter().enumerate() {
        received.clear();
        received.extend(graph.in_neighbors(i).map(|j| (j, &config.states[j])));
        let next = alg
            .step(i, round, own, &received)
            .map_err(|message| Error::Transition {
                round,
                agent: i + 1,
                message,
            })?;
        states.push(next);
    }
    Ok(Configuration { round, states })
}

/// Applies a finite sequence of graphs.
pub fn apply_sequence<A: Algorithm>(
    alg: &A,
    config: &Configuration<A::State>,
    graphs: &[CommGraph],
) -> Result<Configuration<A::State>> {
    let mut cur = config.clone();
    for g in graphs {
        cur = step_configuration(alg, &cur, g)?;
    }
    Ok(cur)
}

/// One round of an execution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Round<S> {
    pub graph: CommGraph,
    /// Position of the graph in the source's declared model, if any.
    pub graph_id: Option<usize>,
    pub config: Configuration<S>,
}

/// `C_0, G_1, C_1, G_2, ...` with the output diameter recorded per round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Execution<S> {
    pub initial: Configuration<S>,
    pub rounds: Vec<Round<S>>,
    /// `Δ(y(t))` for `t = 0..=T`.
    pub deltas: Vec<f64>,
}

impl<S: Clone + PartialEq> Execution<S> {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Configuration after `t` rounds.
    pub fn config(&self, t: usize) -> &Configuration<S> {
        if t == 0 {
            &self.initial
        } else {
            &self.rounds[t - 1].config
        }
    }

    pub fn last(&self) -> &Configuration<S> {
        self.config(self.rounds.len())
    }

    pub fn graphs(&self) -> Vec<CommGraph> {
        self.rounds.iter().map(|r| r.graph.clone()).collect()
    }

    /// Re-derives every configuration from its predecessor and checks the
    /// recorded diameters.
    pub fn verify<A: Algorithm<State = S>>(&self, alg: &A) -> Result<bool> {
        let mut prev = &self.initial;
        if self.deltas.len() != self.rounds.len() + 1 {
            return Ok(false);
        }
        for (t, r) in self.rounds.iter().enumerate() {
            if step_configuration(alg, prev, &r.graph)? != r.config {
                return Ok(false);
            }
            if spread(alg, &r.config) != self.deltas[t + 1] {
                return Ok(false);
            }
            prev = &r.config;
        }
        Ok(spread(alg, &self.initial) == self.deltas[0])
    }
}

impl<S> Execution<S> {
    pub(crate) fn start<A: Algorithm<State = S>>(alg: &A, initial: Configuration<S>) -> Self
    where
        S: Clone,
    {
        let d0 = spread(alg, &initial);
        Execution {
            initial,
            rounds: Vec::new(),
            deltas: vec![d0],
        }
    }

    pub(crate) fn push<A: Algorithm<State = S>>(
        &mut self,
        alg: &A,
        graph: CommGraph,
        graph_id: Option<usize>,
        config: Configuration<S>,
    ) where
        S: Clone,
    {
        self.deltas.push(spread(alg, &config));
        self.rounds.push(Round {
            graph,
            graph_id,
            config,
        });
    }
}

/// Runs `rounds` rounds of `alg` from `inputs` under the graphs produced by
/// `source`.
pub fn run<A: Algorithm>(
    alg: &A,
    inputs: &[Point],
    source: &mut dyn PatternSource,
    rounds: usize,
) -> Result<Execution<A::State>> {
    if inputs.len() != source.n() {
        return Err(Error::Dimension {
            expected: source.n(),
            found: inputs.len(),
        });
    }
    let initial = initial_configuration(alg, inputs)?;
    let mut exec = Execution::start(alg, initial);
    let mut history: Vec<CommGraph> = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let g = source.next_graph(t, &history)?;
        if !source.admits(&g) {
            return Err(Error::Contract(format!(
                "source produced graph {} outside its declared model in round {t}",
                g.code()
            )));
        }
        alg.check_graph(&g)?;
        let next = step_configuration(alg, exec.last(), &g)?;
        let id = source.graph_id(&g);
        history.push(g.clone());
        exec.push(alg, g, id, next);
    }
    Ok(exec)
}

/// Largest Euclidean distance between two points of a nonempty set.
pub fn diameter<P: AsRef<[f64]>>(points: &[P]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Argument("diameter of an empty set".into()));
    }
    Ok(diameter_unchecked(points))
}

pub(crate) fn diameter_unchecked<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let d = points[0].as_ref().len();
    if d == 1 {
        let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let x = p.as_ref()[0];
            (lo.min(x), hi.max(x))
        });
        return hi - lo;
    }
    let mut best = 0.0f64;
    for (a, p) in points.iter().enumerate() {
        for q in &points[a + 1..] {
            best = best.max(distance(p.as_ref(), q.as_ref()));
        }
    }
    best
}

pub(crate) fn distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `Δ(y)` of a configuration.
pub fn spread<A: Algorithm>(alg: &A, config: &Configuration<A::State>) -> f64 {
    diameter_unchecked(&config.outputs(alg))
}

/// `C ∼_i C'`: agent `agent` is in the same state in both configurations.
pub fn indistinguishable<S: PartialEq>(
    a: &Configuration<S>,
    b: &Configuration<S>,
    agent: usize,
) -> bool {
    a.states[agent] == b.states[agent]
}
