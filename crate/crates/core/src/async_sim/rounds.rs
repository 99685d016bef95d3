use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use super::{pop_batch, DelayPolicy, Pending};
use crate::engine::{run, Algorithm, Execution, Point, Recorded};
use crate::error::{Error, Result};
use crate::graphs::CommGraph;

/// Lock-step rounds on top of asynchronous delivery, and the communication
/// pattern they induce.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRun<S> {
    pub execution: Execution<S>,
    pub pattern: Vec<CommGraph>,
    /// Time at which the last agent finished each round.
    pub round_end_times: Vec<f64>,
}

/// Every agent broadcasts its round-`t` state, waits until it holds round-`t`
/// states of at least `n - f` agents (its own arriving instantly), takes
/// every state delivered up to that moment, and computes its next state.
/// Late messages are discarded and early ones buffered. The senders used by
/// agent `i` in round `t` form `In_i(G_t)`.
///
/// The execution returned is the engine replay of the induced pattern,
/// checked against the states computed during the simulation.
pub fn round_based_wrapper<A: Algorithm>(
    alg: &A,
    inputs: &[Point],
    f: usize,
    delays: &DelayPolicy,
    rounds: usize,
) -> Result<RoundRun<A::State>> {
    let n = inputs.len();
    if n == 0 || 2 * f >= n {
        return Err(Error::Argument(format!("need f < n/2, got f = {f}, n = {n}")));
    }
    let mut delay = delays.sampler()?;
    let quorum = n - f;

    let mut state: Vec<A::State> = inputs
        .iter()
        .enumerate()
        .map(|(i, p)| alg.init(i, n, p))
        .collect::<Result<_>>()?;
    let mut history: Vec<Vec<A::State>> = vec![state.clone()];
    let mut current = vec![1usize; n];
    let mut buffers: Vec<BTreeMap<usize, BTreeMap<usize, A::State>>> = vec![BTreeMap::new(); n];
    let mut rows = vec![vec![0u64; n]; rounds];
    let mut end_times = vec![0.0f64; rounds];
    let mut heap: BinaryHeap<Pending<(usize, A::State)>> = BinaryHeap::new();
    let mut next_id = 0u64;

    let mut broadcast = |heap: &mut BinaryHeap<Pending<(usize, A::State)>>,
                         i: usize,
                         round: usize,
                         s: &A::State,
                         now: f64|
     -> Result<()> {
        for j in (0..n).filter(|&j| j != i) {
            heap.push(Pending {
                time: now + delay.delay(i, j)?,
                id: next_id,
                from: i,
                to: j,
                msg: (round, s.clone()),
            });
            next_id += 1;
        }
        Ok(())
    };

    if rounds > 0 {
        for i in 0..n {
            buffers[i].entry(1).or_default().insert(i, state[i].clone());
            broadcast(&mut heap, i, 1, &state[i], 0.0)?;
        }
    }

    let mut now = 0.0;
    loop {
        for i in 0..n {
            while current[i] <= rounds
                && buffers[i].get(&current[i]).map_or(0, BTreeMap::len) >= quorum
            {
                let t = current[i];
                let got = buffers[i].remove(&t).expect("checked");
                let received: Vec<(usize, &A::State)> = got.iter().map(|(j, s)| (*j, s)).collect();
                let next = alg
                    .step(i, t, &state[i], &received)
                    .map_err(|message| Error::Transition {
                        round: t,
                        agent: i + 1,
                        message,
                    })?;
                rows[t - 1][i] = got.keys().fold(0u64, |m, &j| m | 1 << j);
                end_times[t - 1] = end_times[t - 1].max(now);
                state[i] = next;
                if history.len() <= t {
                    history.push(state.clone());
                }
                history[t][i] = state[i].clone();
                current[i] = t + 1;
                if t < rounds {
                    buffers[i].entry(t + 1).or_default().insert(i, state[i].clone());
                    broadcast(&mut heap, i, t + 1, &state[i], now)?;
                }
            }
        }
        if heap.is_empty() {
            break;
        }
        let batch = pop_batch(&mut heap);
        now = batch[0].time;
        for p in batch {
            let (round, s) = p.msg;
            if round >= current[p.to] && round <= rounds {
                buffers[p.to].entry(round).or_default().insert(p.from, s);
            }
        }
    }
    if current.iter().any(|&c| c <= rounds) {
        return Err(Error::Internal("round wrapper stalled".into()));
    }

    let pattern: Vec<CommGraph> = rows
        .into_iter()
        .map(|r| CommGraph::from_rows(n, r))
        .collect::<Result<_>>()?;
    let execution = if rounds == 0 {
        let mut src = crate::engine::Constant::new(CommGraph::complete(n)?);
        run(alg, inputs, &mut src, 0)?
    } else {
        run(alg, inputs, &mut Recorded::new(pattern.clone())?, rounds)?
    };
    for (t, states) in history.iter().enumerate() {
        if execution.config(t).states != *states {
            return Err(Error::Internal(format!(
                "replay of the induced pattern diverges in round {t}"
            )));
        }
    }
    Ok(RoundRun {
        execution,
        pattern,
        round_end_times: end_times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Midpoint;
    use crate::graphs::{async_model, DEFAULT_MODEL_CAP};

    #[test]
    fn constant_delays_induce_complete_graphs() {
        let inputs = vec![vec![0.0], vec![0.3], vec![1.0], vec![0.6]];
        let r = round_based_wrapper(&Midpoint, &inputs, 1, &DelayPolicy::Constant(1.0), 3).unwrap();
        let k4 = CommGraph::complete(4).unwrap();
        assert!(r.pattern.iter().all(|g| *g == k4));
        assert_eq!(r.round_end_times, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.execution.deltas[1], 0.0);
    }

    #[test]
    fn random_delays_stay_in_the_async_model() {
        let model = async_model(5, 2, DEFAULT_MODEL_CAP).unwrap();
        for seed in 0..20 {
            let inputs: Vec<Point> = (0..5).map(|i| vec![i as f64]).collect();
            let r = round_based_wrapper(
                &Midpoint,
                &inputs,
                2,
                &DelayPolicy::Lattice { seed, steps: 4 },
                6,
            )
            .unwrap();
            assert!(r.pattern.iter().all(|g| model.contains(g)));
        }
    }

    #[test]
    fn rejects_large_f() {
        let inputs = vec![vec![0.0], vec![1.0]];
        assert!(round_based_wrapper(&Midpoint, &inputs, 1, &DelayPolicy::Constant(1.0), 1).is_err());
    }
}
