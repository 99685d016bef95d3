use super::{bounds, midpoint_of, PointState};
use crate::engine::Algorithm;
use crate::error::Result;

/// `y ← (min + max) / 2` over the received outputs, coordinate-wise in
/// higher dimension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Midpoint;

impl Algorithm for Midpoint {
    type State = PointState;

    fn name(&self) -> String {
        "midpoint".into()
    }

    fn init(&self, _agent: usize, _n: usize, input: &[f64]) -> Result<PointState> {
        Ok(PointState { y: input.to_vec() })
    }

    fn output<'a>(&self, state: &'a PointState) -> &'a [f64] {
        &state.y
    }

    fn step(
        &self,
        _agent: usize,
        _round: usize,
        _own: &PointState,
        received: &[(usize, &PointState)],
    ) -> std::result::Result<PointState, String> {
        let (lo, hi) = bounds(received.iter().map(|(_, s)| s.y.as_slice()));
        Ok(PointState {
            y: midpoint_of(&lo, &hi),
        })
    }

    fn is_convex(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Constant};
    use crate::graphs::CommGraph;

    #[test]
    fn complete_graph_agrees_in_one_round() {
        let inputs = vec![vec![0.0], vec![0.25], vec![1.0]];
        let g = CommGraph::complete(3).unwrap();
        let exec = run(&Midpoint, &inputs, &mut Constant::new(g), 1).unwrap();
        assert_eq!(exec.deltas, vec![1.0, 0.0]);
        assert_eq!(exec.last().states[2].y, vec![0.5]);
    }

    #[test]
    fn coordinatewise_in_the_plane() {
        let s0 = PointState { y: vec![0.0, 4.0] };
        let s1 = PointState { y: vec![2.0, 0.0] };
        let out = Midpoint.step(0, 1, &s0, &[(0, &s0), (1, &s1)]).unwrap();
        assert_eq!(out.y, vec![1.0, 2.0]);
    }
}
