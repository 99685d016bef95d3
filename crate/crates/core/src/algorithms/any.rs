use serde::Serialize;

use super::{AmortizedMidpoint, AmortizedState, MassSplit, Midpoint, PointState, Thirds};
use crate::engine::Algorithm;
use crate::error::{Error, Result};
use crate::graphs::CommGraph;

/// Round-based algorithms selectable by name.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyAlgorithm {
    Thirds(Thirds),
    Midpoint(Midpoint),
    AmortizedMidpoint(AmortizedMidpoint),
    MassSplit(MassSplit),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AnyState {
    Point(PointState),
    Amortized(AmortizedState),
}

pub const ALGORITHM_NAMES: [&str; 4] = ["thirds", "midpoint", "amortized-midpoint", "mass-split"];

impl AnyAlgorithm {
    /// `mass-split` needs the fixed graph it runs on.
    pub fn by_name(name: &str, n: usize, graph: Option<&CommGraph>) -> Result<Self> {
        match name {
            "thirds" => Ok(AnyAlgorithm::Thirds(Thirds)),
            "midpoint" => Ok(AnyAlgorithm::Midpoint(Midpoint)),
            "amortized-midpoint" => Ok(AnyAlgorithm::AmortizedMidpoint(AmortizedMidpoint::new(n)?)),
            "mass-split" => {
                let g = graph.ok_or_else(|| {
                    Error::Argument("mass-split needs a single fixed graph".into())
                })?;
                Ok(AnyAlgorithm::MassSplit(MassSplit::new(g.clone())))
            }
            "minrelay" => Err(Error::Argument(
                "minrelay is asynchronous; use the async command".into(),
            )),
            other => Err(Error::Argument(format!(
                "unknown algorithm '{other}', expected one of {}",
                ALGORITHM_NAMES.join(", ")
            ))),
        }
    }
}

fn points<'a>(received: &[(usize, &'a AnyState)]) -> std::result::Result<Vec<(usize, &'a PointState)>, String> {
    received
        .iter()
        .map(|(j, s)| match s {
            AnyState::Point(p) => Ok((*j, p)),
            AnyState::Amortized(_) => Err("mixed state kinds".to_string()),
        })
        .collect()
}

fn amortized<'a>(
    received: &[(usize, &'a AnyState)],
) -> std::result::Result<Vec<(usize, &'a AmortizedState)>, String> {
    received
        .iter()
        .map(|(j, s)| match s {
            AnyState::Amortized(p) => Ok((*j, p)),
            AnyState::Point(_) => Err("mixed state kinds".to_string()),
        })
        .collect()
}

impl Algorithm for AnyAlgorithm {
    type State = AnyState;

    fn name(&self) -> String {
        match self {
            AnyAlgorithm::Thirds(a) => a.name(),
            AnyAlgorithm::Midpoint(a) => a.name(),
            AnyAlgorithm::AmortizedMidpoint(a) => a.name(),
            AnyAlgorithm::MassSplit(a) => a.name(),
        }
    }

    fn init(&self, agent: usize, n: usize, input: &[f64]) -> Result<AnyState> {
        Ok(match self {
            AnyAlgorithm::Thirds(a) => AnyState::Point(a.init(agent, n, input)?),
            AnyAlgorithm::Midpoint(a) => AnyState::Point(a.init(agent, n, input)?),
            AnyAlgorithm::AmortizedMidpoint(a) => AnyState::Amortized(a.init(agent, n, input)?),
            AnyAlgorithm::MassSplit(a) => AnyState::Point(a.init(agent, n, input)?),
        })
    }

    fn output<'a>(&self, state: &'a AnyState) -> &'a [f64] {
        match state {
            AnyState::Point(s) => &s.y,
            AnyState::Amortized(s) => &s.y,
        }
    }

    fn step(
        &self,
        agent: usize,
        round: usize,
        own: &AnyState,
        received: &[(usize, &AnyState)],
    ) -> std::result::Result<AnyState, String> {
        match (self, own) {
            (AnyAlgorithm::Thirds(a), AnyState::Point(s)) => {
                a.step(agent, round, s, &points(received)?).map(AnyState::Point)
            }
            (AnyAlgorithm::Midpoint(a), AnyState::Point(s)) => {
                a.step(agent, round, s, &points(received)?).map(AnyState::Point)
            }
            (AnyAlgorithm::MassSplit(a), AnyState::Point(s)) => {
                a.step(agent, round, s, &points(received)?).map(AnyState::Point)
            }
            (AnyAlgorithm::AmortizedMidpoint(a), AnyState::Amortized(s)) => a
                .step(agent, round, s, &amortized(received)?)
                .map(AnyState::Amortized),
            _ => Err("state does not belong to this algorithm".into()),
        }
    }

    fn is_convex(&self) -> bool {
        !matches!(self, AnyAlgorithm::MassSplit(_))
    }

    fn check_graph(&self, graph: &CommGraph) -> Result<()> {
        match self {
            AnyAlgorithm::MassSplit(a) => a.check_graph(graph),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for name in ALGORITHM_NAMES {
            let g = CommGraph::complete(2).unwrap();
            assert_eq!(AnyAlgorithm::by_name(name, 2, Some(&g)).unwrap().name(), name);
        }
        assert!(matches!(
            AnyAlgorithm::by_name("bogus", 2, None),
            Err(Error::Argument(_))
        ));
        assert!(AnyAlgorithm::by_name("mass-split", 2, None).is_err());
    }
}
