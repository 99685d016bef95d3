use serde::{Deserialize, Serialize};

use super::{bounds, midpoint_of};
use crate::engine::{Algorithm, Point};
use crate::error::{Error, Result};

/// Midpoint applied once per phase of `n - 1` rounds to the extreme values
/// relayed during the phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmortizedMidpoint {
    n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmortizedState {
    pub y: Point,
    pub m: Point,
    #[serde(rename = "M")]
    pub big_m: Point,
    /// Rounds completed in the current phase.
    pub pos: usize,
}

impl AmortizedMidpoint {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!(
                "amortized midpoint needs at least 2 agents, got {n}"
            )));
        }
        Ok(AmortizedMidpoint { n })
    }

    pub fn phase_len(&self) -> usize {
        self.n - 1
    }
}

impl Algorithm for AmortizedMidpoint {
    type State = AmortizedState;

    fn name(&self) -> String {
        "amortized-midpoint".into()
    }

    fn init(&self, _agent: usize, n: usize, input: &[f64]) -> Result<AmortizedState> {
        if n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: n,
            });
        }
        Ok(AmortizedState {
            y: input.to_vec(),
            m: input.to_vec(),
            big_m: input.to_vec(),
            pos: 0,
        })
    }

    fn output<'a>(&self, state: &'a AmortizedState) -> &'a [f64] {
        &state.y
    }

    fn step(
        &self,
        _agent: usize,
        _round: usize,
        own: &AmortizedState,
        received: &[(usize, &AmortizedState)],
    ) -> std::result::Result<AmortizedState, String> {
        let (m, _) = bounds(received.iter().map(|(_, s)| s.m.as_slice()));
        let (_, big_m) = bounds(received.iter().map(|(_, s)| s.big_m.as_slice()));
        let pos = own.pos + 1;
        if pos == self.phase_len() {
            let y = midpoint_of(&m, &big_m);
            Ok(AmortizedState {
                m: y.clone(),
                big_m: y.clone(),
                y,
                pos: 0,
            })
        } else {
            Ok(AmortizedState {
                y: own.y.clone(),
                m,
                big_m,
                pos,
            })
        }
    }

    fn is_convex(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Cyclic};
    use crate::graphs::CommGraph;

    #[test]
    fn output_changes_only_at_phase_ends() {
        let alg = AmortizedMidpoint::new(3).unwrap();
        // path 1 -> 2 -> 3
        let g = CommGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inputs = vec![vec![0.0], vec![0.5], vec![1.0]];
        let exec = run(&alg, &inputs, &mut Cyclic::new(vec![g]).unwrap(), 2).unwrap();
        assert_eq!(exec.config(1).states[2].y, vec![1.0]);
        assert_eq!(exec.config(1).states[2].m, vec![0.5]);
        // after the phase agent 3 has seen agent 1's value through agent 2
        assert_eq!(exec.config(2).states[2].y, vec![0.5]);
        assert_eq!(exec.config(2).states[0].y, vec![0.0]);
        assert_eq!(exec.deltas, vec![1.0, 1.0, 0.5]);
    }

    #[test]
    fn two_agents_is_plain_midpoint() {
        let alg = AmortizedMidpoint::new(2).unwrap();
        assert_eq!(alg.phase_len(), 1);
    }
}
