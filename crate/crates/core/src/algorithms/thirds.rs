use super::PointState;
use crate::engine::Algorithm;
use crate::error::{Error, Result};

/// Two-agent averaging: an agent that hears the other moves two thirds of
/// the way toward it, `y ← y/3 + 2·y_other/3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Thirds;

impl Algorithm for Thirds {
    type State = PointState;

    fn name(&self) -> String {
        "thirds".into()
    }

    fn init(&self, _agent: usize, n: usize, input: &[f64]) -> Result<PointState> {
        if n != 2 {
            return Err(Error::Argument(format!(
                "the thirds algorithm needs exactly 2 agents, got {n}"
            )));
        }
        Ok(PointState { y: input.to_vec() })
    }

    fn output<'a>(&self, state: &'a PointState) -> &'a [f64] {
        &state.y
    }

    fn step(
        &self,
        agent: usize,
        _round: usize,
        own: &PointState,
        received: &[(usize, &PointState)],
    ) -> std::result::Result<PointState, String> {
        match received.iter().find(|(j, _)| *j != agent) {
            None => Ok(own.clone()),
            Some((_, other)) => Ok(PointState {
                y: own
                    .y
                    .iter()
                    .zip(&other.y)
                    .map(|(a, b)| a / 3.0 + 2.0 * b / 3.0)
                    .collect(),
            }),
        }
    }

    fn is_convex(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Constant};
    use crate::graphs::{h0, h1};

    #[test]
    fn h0_swaps_two_thirds() {
        let exec = run(&Thirds, &[vec![0.0], vec![1.0]], &mut Constant::new(h0()), 1).unwrap();
        let y: Vec<f64> = exec.last().states.iter().map(|s| s.y[0]).collect();
        assert!((y[0] - 2.0 / 3.0).abs() < 1e-15 && (y[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((exec.deltas[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn h1_moves_only_the_listener() {
        let exec = run(&Thirds, &[vec![0.0], vec![1.0]], &mut Constant::new(h1()), 2).unwrap();
        assert_eq!(exec.last().states[0].y, vec![0.0]);
        assert!((exec.last().states[1].y[0] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_three_agents() {
        assert!(matches!(Thirds.init(0, 3, &[0.0]), Err(Error::Argument(_))));
    }
}
