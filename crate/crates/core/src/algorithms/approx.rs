use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AmortizedMidpoint, AnyAlgorithm, Midpoint, Thirds};
use crate::engine::{diameter, Algorithm, Point};
use crate::error::{Error, Result};
use crate::graphs::CommGraph;

/// Model class and algorithm pairing of an approximate-consensus wrapper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Thirds over two-agent rooted graphs.
    TwoAgent,
    /// Midpoint over non-split graphs.
    NonsplitMidpoint,
    /// Amortized midpoint over rooted graphs.
    RootedAmortized,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_agent" => Ok(Regime::TwoAgent),
            "nonsplit_midpoint" => Ok(Regime::NonsplitMidpoint),
            "rooted_amortized" => Ok(Regime::RootedAmortized),
            other => Err(Error::Argument(format!(
                "unknown regime '{other}', expected two_agent, nonsplit_midpoint or rooted_amortized"
            ))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::TwoAgent => "two_agent",
            Regime::NonsplitMidpoint => "nonsplit_midpoint",
            Regime::RootedAmortized => "rooted_amortized",
        })
    }
}

/// Smallest `k` with `eps · base^k ≥ delta`.
fn ceil_log(base: f64, delta: f64, eps: f64) -> usize {
    let mut k = 0;
    let mut reach = eps;
    while reach < delta {
        reach *= base;
        k += 1;
    }
    k
}

/// Rounds after which the regime's algorithm has output diameter at most
/// `eps` from any inputs of diameter at most `delta`.
pub fn decision_round(regime: Regime, n: usize, delta: f64, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("eps must be positive, got {eps}")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("delta must be nonnegative, got {delta}")));
    }
    match regime {
        Regime::TwoAgent if n != 2 => Err(Error::Argument(format!(
            "two_agent regime needs 2 agents, got {n}"
        ))),
        Regime::TwoAgent => Ok(ceil_log(3.0, delta, eps)),
        Regime::NonsplitMidpoint => Ok(ceil_log(2.0, delta, eps)),
        Regime::RootedAmortized if n < 2 => Err(Error::Argument(
            "rooted_amortized regime needs at least 2 agents".into(),
        )),
        Regime::RootedAmortized => Ok((n - 1) * ceil_log(2.0, delta, eps)),
    }
}

/// Runs the wrapped algorithm and decides its output at the decision
/// round.
#[derive(Clone, Debug, PartialEq)]
pub struct Approx<A> {
    inner: A,
    regime: Regime,
    n: usize,
    delta: f64,
    eps: f64,
    rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecisionState<S> {
    pub inner: S,
    pub decision: Option<Point>,
    pub decision_round: usize,
}

impl<A: Algorithm> Approx<A> {
    pub fn new(inner: A, regime: Regime, n: usize, delta: f64, eps: f64) -> Result<Self> {
        let rounds = decision_round(regime, n, delta, eps)?;
        Ok(Approx {
            inner,
            regime,
            n,
            delta,
            eps,
            rounds,
        })
    }

    pub fn decision_round(&self) -> usize {
        self.rounds
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    /// Inputs must not spread more than the declared bound.
    pub fn check_inputs(&self, inputs: &[Point]) -> Result<()> {
        let d = diameter(inputs)?;
        if d > self.delta {
            return Err(Error::Argument(format!(
                "input diameter {d} exceeds the declared bound {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// The regime's wrapper around its matching algorithm.
pub fn approx_wrapper(regime: Regime, n: usize, delta: f64, eps: f64) -> Result<Approx<AnyAlgorithm>> {
    let inner = match regime {
        Regime::TwoAgent => AnyAlgorithm::Thirds(Thirds),
        Regime::NonsplitMidpoint => AnyAlgorithm::Midpoint(Midpoint),
        Regime::RootedAmortized => AnyAlgorithm::AmortizedMidpoint(AmortizedMidpoint::new(n)?),
    };
    Approx::new(inner, regime, n, delta, eps)
}

impl<A: Algorithm> Algorithm for Approx<A> {
    type State = DecisionState<A::State>;

    fn name(&self) -> String {
        format!("approx[{}]({})", self.regime, self.inner.name())
    }

    fn init(&self, agent: usize, n: usize, input: &[f64]) -> Result<Self::State> {
        if n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: n,
            });
        }
        let inner = self.inner.init(agent, n, input)?;
        let decision = (self.rounds == 0).then(|| self.inner.output(&inner).to_vec());
        Ok(DecisionState {
            inner,
            decision,
            decision_round: self.rounds,
        })
    }

    fn output<'a>(&self, state: &'a Self::State) -> &'a [f64] {
        self.inner.output(&state.inner)
    }

    fn step(
        &self,
        agent: usize,
        round: usize,
        own: &Self::State,
        received: &[(usize, &Self::State)],
    ) -> std::result::Result<Self::State, String> {
        let inner_received: Vec<(usize, &A::State)> =
            received.iter().map(|(j, s)| (*j, &s.inner)).collect();
        let inner = self.inner.step(agent, round, &own.inner, &inner_received)?;
        let decision = match &own.decision {
            Some(d) => Some(d.clone()),
            None if round >= self.rounds => Some(self.inner.output(&inner).to_vec()),
            None => None,
        };
        Ok(DecisionState {
            inner,
            decision,
            decision_round: self.rounds,
        })
    }

    fn is_convex(&self) -> bool {
        self.inner.is_convex()
    }

    fn check_graph(&self, graph: &CommGraph) -> Result<()> {
        self.inner.check_graph(graph)?;
        let ok = match self.regime {
            Regime::TwoAgent => graph.n() == 2 && graph.is_rooted(),
            Regime::NonsplitMidpoint => graph.is_nonsplit(),
            Regime::RootedAmortized => graph.is_rooted(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Contract(format!(
                "graph {} is outside the {} regime",
                graph.code(),
                self.regime
            )))
        }
    }
}
