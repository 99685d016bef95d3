use super::PointState;
use crate::engine::Algorithm;
use crate::error::{Error, Result};
use crate::graphs::CommGraph;

/// Each agent splits its value evenly among its out-neighbors:
/// `y_i ← Σ_{j ∈ In_i} y_j / |Out_j|`. Built for one fixed graph; it
/// preserves the sum of the outputs but can leave their convex hull.
#[derive(Clone, Debug, PartialEq)]
pub struct MassSplit {
    graph: CommGraph,
    out_degree: Vec<usize>,
}

impl MassSplit {
    pub fn new(graph: CommGraph) -> Self {
        let out_degree = (0..graph.n()).map(|j| graph.out_neighbors(j).len()).collect();
        MassSplit { graph, out_degree }
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }
}

impl Algorithm for MassSplit {
    type State = PointState;

    fn name(&self) -> String {
        "mass-split".into()
    }

    fn init(&self, _agent: usize, n: usize, input: &[f64]) -> Result<PointState> {
        if n != self.graph.n() {
            return Err(Error::Dimension {
                expected: self.graph.n(),
                found: n,
            });
        }
        Ok(PointState { y: input.to_vec() })
    }

    fn output<'a>(&self, state: &'a PointState) -> &'a [f64] {
        &state.y
    }

    fn step(
        &self,
        _agent: usize,
        _round: usize,
        own: &PointState,
        received: &[(usize, &PointState)],
    ) -> std::result::Result<PointState, String> {
        let mut y = vec![0.0; own.y.len()];
        for (j, s) in received {
            let share = self.out_degree[*j] as f64;
            for (acc, v) in y.iter_mut().zip(&s.y) {
                *acc += v / share;
            }
        }
        Ok(PointState { y })
    }

    fn is_convex(&self) -> bool {
        false
    }

    fn check_graph(&self, graph: &CommGraph) -> Result<()> {
        if *graph != self.graph {
            return Err(Error::Contract(format!(
                "mass split was built for graph {}, got {}",
                self.graph.code(),
                graph.code()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, Constant};

    #[test]
    fn leaves_the_hull() {
        let g = CommGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let alg = MassSplit::new(g.clone());
        let inputs = vec![vec![1.0]; 3];
        let exec = run(&alg, &inputs, &mut Constant::new(g), 1).unwrap();
        let y: Vec<f64> = exec.last().states.iter().map(|s| s.y[0]).collect();
        assert!((y[2] - 4.0 / 3.0).abs() < 1e-15);
        assert!((y.iter().sum::<f64>() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn other_graphs_rejected() {
        let alg = MassSplit::new(CommGraph::complete(2).unwrap());
        assert!(matches!(
            alg.check_graph(&CommGraph::identity(2).unwrap()),
            Err(Error::Contract(_))
        ));
    }
}
