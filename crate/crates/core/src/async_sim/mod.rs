//! Discrete-event asynchronous message passing with crash faults.
//!
//! Delays are normalized to `(0, 1]`. Events are ordered by time and then by
//! creation order; all deliveries with the same timestamp are processed
//! before any agent reacts to them.

mod rounds;
mod schedule;

pub use rounds::{round_based_wrapper, RoundRun};
pub use schedule::{random_crash_schedule, worst_case_crash_schedule, Crash, CrashSchedule, DelayPolicy, Delays};

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use ordered_float::OrderedFloat;
use serde::Serialize;

use crate::algorithms::{MinRelay, MinRelayState};
use crate::error::{Error, Result};

/// Slack on time comparisons against horizons such as `f + 1`.
pub const TIME_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Send,
    Deliver,
    Crash,
}

/// One entry of the event log. Agents are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsyncEvent {
    pub kind: EventKind,
    pub time: f64,
    pub sender: usize,
    pub receiver: Option<usize>,
    pub payload: Vec<f64>,
}

/// State of an agent from `time` on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub agent: usize,
    pub state: MinRelayState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsyncTimeline {
    pub n: usize,
    pub f: usize,
    pub horizon: f64,
    pub events: Vec<AsyncEvent>,
    /// Initial states at time 0 followed by every state change.
    pub snapshots: Vec<Snapshot>,
    /// Crash time per agent (0-based index).
    pub crash_times: Vec<Option<f64>>,
    pub final_states: Vec<MinRelayState>,
}

impl AsyncTimeline {
    /// Agents (0-based) that do not crash before the horizon.
    pub fn correct(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.crash_times[i].map_or(true, |c| c > self.horizon))
            .collect()
    }

    /// States of all agents after processing every event up to `time`.
    pub fn states_at(&self, time: f64) -> Vec<MinRelayState> {
        let mut states: Vec<Option<MinRelayState>> = vec![None; self.n];
        for s in &self.snapshots {
            if s.time <= time {
                states[s.agent] = Some(s.state.clone());
            }
        }
        states.into_iter().map(|s| s.expect("initial snapshot")).collect()
    }

    /// Whether all correct agents hold the same set at `time`.
    pub fn correct_equal_at(&self, time: f64) -> bool {
        let states = self.states_at(time);
        let correct = self.correct();
        correct.windows(2).all(|w| states[w[0]].set == states[w[1]].set)
    }

    /// Time of the last set change among correct agents, provided their
    /// final sets are equal.
    pub fn agreement_time(&self) -> Option<f64> {
        let correct = self.correct();
        let equal = correct
            .windows(2)
            .all(|w| self.final_states[w[0]].set == self.final_states[w[1]].set);
        if !equal {
            return None;
        }
        Some(
            self.snapshots
                .iter()
                .filter(|s| correct.contains(&s.agent))
                .map(|s| s.time)
                .fold(0.0, f64::max),
        )
    }

    /// Diameter of the correct agents' outputs at `time`.
    pub fn output_spread_at(&self, time: f64) -> f64 {
        let states = self.states_at(time);
        let ys: Vec<f64> = self.correct().iter().map(|&i| states[i].y.0).collect();
        let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if ys.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// The event log as JSON lines.
    pub fn event_log_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializable"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug)]
pub(crate) struct Pending<M> {
    pub time: f64,
    pub id: u64,
    pub from: usize,
    pub to: usize,
    pub msg: M,
}

impl<M> PartialEq for Pending<M> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<M> Eq for Pending<M> {}
impl<M> PartialOrd for Pending<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<M> Ord for Pending<M> {
    // reversed for a min-heap on (time, id)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Pops every event carrying the smallest timestamp.
pub(crate) fn pop_batch<M>(heap: &mut BinaryHeap<Pending<M>>) -> Vec<Pending<M>> {
    let mut batch = Vec::new();
    if let Some(first) = heap.pop() {
        let t = first.time;
        batch.push(first);
        while heap.peek().is_some_and(|p| p.time == t) {
            batch.push(heap.pop().expect("peeked"));
        }
    }
    batch
}

fn values(set: &BTreeSet<OrderedFloat<f64>>) -> Vec<f64> {
    set.iter().map(|v| v.0).collect()
}

/// Appends not yet logged crashes accepted by `due`, ordered by time and
/// then agent.
fn log_crashes(
    crash_times: &[Option<f64>],
    logged: &mut [bool],
    events: &mut Vec<AsyncEvent>,
    due: impl Fn(f64) -> bool,
) {
    let mut fresh: Vec<(f64, usize)> = crash_times
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.filter(|&c| !logged[i] && due(c)).map(|c| (c, i)))
        .collect();
    fresh.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (c, i) in fresh {
        logged[i] = true;
        events.push(AsyncEvent {
            kind: EventKind::Crash,
            time: c,
            sender: i + 1,
            receiver: None,
            payload: Vec::new(),
        });
    }
}

/// Runs MinRelay from one real input per agent.
///
/// An agent crashing at time `c` still processes deliveries up to and
/// including `c`; a broadcast it makes at exactly `c` reaches only the
/// schedule's recipients and it does nothing afterwards.
pub fn run_async(
    alg: &MinRelay,
    f: usize,
    inputs: &[f64],
    delays: &DelayPolicy,
    schedule: &CrashSchedule,
    horizon: f64,
) -> Result<AsyncTimeline> {
    let n = inputs.len();
    if n == 0 {
        return Err(Error::Argument("no agents".into()));
    }
    if f >= n {
        return Err(Error::Argument(format!("need f < n, got f = {f}, n = {n}")));
    }
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::Argument(format!("horizon must be finite and nonnegative, got {horizon}")));
    }
    if inputs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument("inputs must be finite".into()));
    }
    schedule.validate(n, f)?;
    let crash_times = schedule.crash_times(n);
    let mut delay = delays.sampler()?;

    let mut states: Vec<MinRelayState> = inputs.iter().map(|&x| alg.init(x)).collect();
    let mut snapshots: Vec<Snapshot> = states
        .iter()
        .enumerate()
        .map(|(i, s)| Snapshot {
            time: 0.0,
            agent: i,
            state: s.clone(),
        })
        .collect();
    let mut events = Vec::new();
    let mut heap: BinaryHeap<Pending<BTreeSet<OrderedFloat<f64>>>> = BinaryHeap::new();
    let mut next_id = 0u64;
    let mut crash_logged = vec![false; n];

    let mut now = 0.0;
    loop {
        // broadcasts of agents still alive at `now`
        for i in 0..n {
            if crash_times[i].is_some_and(|c| c < now) {
                continue;
            }
            let Some(set) = alg.take_broadcast(&mut states[i]) else {
                continue;
            };
            let crashing_now = crash_times[i] == Some(now);
            for j in 0..n {
                if j == i {
                    continue;
                }
                if crashing_now && !schedule.recipients_of(i).contains(&j) {
                    continue;
                }
                let d = delay.delay(i, j)?;
                events.push(AsyncEvent {
                    kind: EventKind::Send,
                    time: now,
                    sender: i + 1,
                    receiver: Some(j + 1),
                    payload: values(&set),
                });
                heap.push(Pending {
                    time: now + d,
                    id: next_id,
                    from: i,
                    to: j,
                    msg: set.clone(),
                });
                next_id += 1;
            }
        }
        let next_time = match heap.peek() {
            Some(p) if p.time <= horizon => p.time,
            _ => break,
        };
        log_crashes(&crash_times, &mut crash_logged, &mut events, |c| c < next_time);
        now = next_time;
        for p in pop_batch(&mut heap) {
            if crash_times[p.to].is_some_and(|c| c < now) {
                continue;
            }
            events.push(AsyncEvent {
                kind: EventKind::Deliver,
                time: now,
                sender: p.from + 1,
                receiver: Some(p.to + 1),
                payload: values(&p.msg),
            });
            if alg.receive(&mut states[p.to], &p.msg) {
                snapshots.push(Snapshot {
                    time: now,
                    agent: p.to,
                    state: states[p.to].clone(),
                });
            }
        }
    }
    log_crashes(&crash_times, &mut crash_logged, &mut events, |c| c <= horizon);
    // snapshots keep the dirty flag of the moment; normalize for comparison
    for s in &mut snapshots {
        s.state.dirty = false;
    }
    for s in &mut states {
        s.dirty = false;
    }
    Ok(AsyncTimeline {
        n,
        f,
        horizon,
        events,
        snapshots,
        crash_times,
        final_states: states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_crash() -> CrashSchedule {
        CrashSchedule::default()
    }

    #[test]
    fn one_exchange_without_crashes() {
        let tl = run_async(&MinRelay, 1, &[3.0, 1.0, 2.0], &DelayPolicy::Constant(1.0), &no_crash(), 5.0)
            .unwrap();
        assert!(!tl.correct_equal_at(0.5));
        assert!(tl.correct_equal_at(1.0));
        assert_eq!(tl.agreement_time(), Some(1.0));
        assert_eq!(tl.output_spread_at(1.0), 0.0);
    }

    #[test]
    fn survivor_of_early_crashes_keeps_its_value() {
        let sched = CrashSchedule {
            crashes: vec![
                Crash { agent: 0, time: 0.0, recipients: vec![] },
                Crash { agent: 1, time: 0.0, recipients: vec![] },
            ],
        };
        let tl = run_async(&MinRelay, 2, &[0.0, 1.0, 2.0], &DelayPolicy::Constant(1.0), &sched, 5.0).unwrap();
        assert_eq!(tl.correct(), vec![2]);
        assert_eq!(tl.final_states[2].y.0, 2.0);
        assert_eq!(tl.agreement_time(), Some(0.0));
    }

    #[test]
    fn worst_case_chain_reaches_everyone_at_f_plus_one() {
        for (n, f) in [(3, 1), (5, 2), (6, 4)] {
            let (sched, delays) = worst_case_crash_schedule(n, f).unwrap();
            let inputs: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let tl = run_async(&MinRelay, f, &inputs, &delays, &sched, f as f64 + 2.0).unwrap();
            assert_eq!(tl.agreement_time(), Some(f as f64 + 1.0), "n={n} f={f}");
            assert!(!tl.correct_equal_at(f as f64 + 1.0 - 1e-6));
            assert!(tl.correct_equal_at(f as f64 + 1.0));
        }
    }

    #[test]
    fn event_times_are_monotone_and_replay_is_identical() {
        let delays = DelayPolicy::Uniform { seed: 4 };
        let sched = CrashSchedule {
            crashes: vec![Crash { agent: 2, time: 0.4, recipients: vec![0] }],
        };
        let a = run_async(&MinRelay, 1, &[0.5, 0.2, 0.9, 0.7], &delays, &sched, 3.0).unwrap();
        let b = run_async(&MinRelay, 1, &[0.5, 0.2, 0.9, 0.7], &delays, &sched, 3.0).unwrap();
        assert_eq!(a.event_log_jsonl(), b.event_log_jsonl());
        assert!(a.events.windows(2).all(|w| w[0].time <= w[1].time));
    }

    #[test]
    fn too_many_crashes_rejected() {
        let sched = CrashSchedule {
            crashes: vec![
                Crash { agent: 0, time: 0.0, recipients: vec![] },
                Crash { agent: 1, time: 0.0, recipients: vec![] },
            ],
        };
        let r = run_async(&MinRelay, 1, &[0.0, 1.0, 2.0], &DelayPolicy::Constant(1.0), &sched, 5.0);
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}
