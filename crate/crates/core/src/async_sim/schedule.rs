use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How message delays are drawn. All delays lie in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayPolicy {
    Constant(f64),
    /// Uniform on `(0, 1]`.
    Uniform { seed: u64 },
    /// Uniform on `{1/steps, 2/steps, ..., 1}`, so that deliveries coincide.
    Lattice { seed: u64, steps: u32 },
}

impl DelayPolicy {
    pub fn sampler(&self) -> Result<Delays> {
        match *self {
            DelayPolicy::Constant(d) if !(d > 0.0 && d <= 1.0) => {
                Err(Error::Validation(format!("delay {d} not in (0, 1]")))
            }
            DelayPolicy::Lattice { steps: 0, .. } => {
                Err(Error::Validation("lattice delays need at least one step".into()))
            }
            DelayPolicy::Constant(_) => Ok(Delays {
                policy: self.clone(),
                rng: ChaCha8Rng::seed_from_u64(0),
            }),
            DelayPolicy::Uniform { seed } | DelayPolicy::Lattice { seed, .. } => Ok(Delays {
                policy: self.clone(),
                rng: ChaCha8Rng::seed_from_u64(seed),
            }),
        }
    }
}

/// Stateful delay source of one simulation run.
#[derive(Clone, Debug)]
pub struct Delays {
    policy: DelayPolicy,
    rng: ChaCha8Rng,
}

impl Delays {
    pub fn delay(&mut self, _from: usize, _to: usize) -> Result<f64> {
        Ok(match self.policy {
            DelayPolicy::Constant(d) => d,
            DelayPolicy::Uniform { .. } => 1.0 - self.rng.gen::<f64>(),
            DelayPolicy::Lattice { steps, .. } => {
                self.rng.gen_range(1..=steps) as f64 / steps as f64
            }
        })
    }
}

/// Agent `agent` crashes at `time`; a broadcast it makes at exactly that
/// time reaches only `recipients`. Agents are 0-based here and 1-based in
/// JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct Crash {
    pub agent: usize,
    pub time: f64,
    pub recipients: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrashSchedule {
    pub crashes: Vec<Crash>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrashJson {
    agent: usize,
    time: f64,
    #[serde(default)]
    recipients: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleJson {
    crashes: Vec<CrashJson>,
}

impl CrashSchedule {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ScheduleJson = serde_json::from_str(text)?;
        let mut crashes = Vec::with_capacity(raw.crashes.len());
        for c in raw.crashes {
            if c.agent == 0 || c.recipients.contains(&0) {
                return Err(Error::Validation("agents are numbered from 1".into()));
            }
            crashes.push(Crash {
                agent: c.agent - 1,
                time: c.time,
                recipients: c.recipients.iter().map(|r| r - 1).collect(),
            });
        }
        Ok(CrashSchedule { crashes })
    }

    pub fn to_json(&self) -> String {
        let raw = ScheduleJson {
            crashes: self
                .crashes
                .iter()
                .map(|c| CrashJson {
                    agent: c.agent + 1,
                    time: c.time,
                    recipients: c.recipients.iter().map(|r| r + 1).collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("serializable");
        s.push('\n');
        s
    }

    pub fn validate(&self, n: usize, f: usize) -> Result<()> {
        if self.crashes.len() > f {
            return Err(Error::Validation(format!(
                "{} crashes scheduled but f = {f}",
                self.crashes.len()
            )));
        }
        let mut seen = vec![false; n];
        for c in &self.crashes {
            if c.agent >= n {
                return Err(Error::Validation(format!(
                    "crashing agent {} outside 1..={n}",
                    c.agent + 1
                )));
            }
            if std::mem::replace(&mut seen[c.agent], true) {
                return Err(Error::Validation(format!(
                    "agent {} crashes twice",
                    c.agent + 1
                )));
            }
            if !(c.time.is_finite() && c.time >= 0.0) {
                return Err(Error::Validation(format!(
                    "crash time {} of agent {} is not a nonnegative number",
                    c.time,
                    c.agent + 1
                )));
            }
            if let Some(r) = c.recipients.iter().find(|&&r| r >= n || r == c.agent) {
                return Err(Error::Validation(format!(
                    "agent {} has invalid final recipient {}",
                    c.agent + 1,
                    r + 1
                )));
            }
        }
        Ok(())
    }

    pub fn crash_times(&self, n: usize) -> Vec<Option<f64>> {
        let mut times = vec![None; n];
        for c in &self.crashes {
            times[c.agent] = Some(c.time);
        }
        times
    }

    pub fn recipients_of(&self, agent: usize) -> &[usize] {
        self.crashes
            .iter()
            .find(|c| c.agent == agent)
            .map_or(&[], |c| c.recipients.as_slice())
    }
}

/// Agent `k` crashes at time `k - 1` handing its set only to agent `k + 1`
/// (1-based, `k = 1..=f`), with every delay equal to 1. Agent 1's value
/// then reaches the other correct agents only at time `f + 1`.
pub fn worst_case_crash_schedule(n: usize, f: usize) -> Result<(CrashSchedule, DelayPolicy)> {
    if f >= n {
        return Err(Error::Argument(format!("need f < n, got f = {f}, n = {n}")));
    }
    let crashes = (0..f)
        .map(|k| Crash {
            agent: k,
            time: k as f64,
            recipients: vec![k + 1],
        })
        .collect();
    Ok((CrashSchedule { crashes }, DelayPolicy::Constant(1.0)))
}

/// Up to `f` crashes at times in `[0, f + 1]`, each final broadcast reaching
/// a random subset. With `lattice_steps`, crash times are multiples of
/// `1 / lattice_steps`.
pub fn random_crash_schedule<R: Rng + ?Sized>(
    n: usize,
    f: usize,
    lattice_steps: Option<u32>,
    rng: &mut R,
) -> CrashSchedule {
    let k = rng.gen_range(0..=f.min(n.saturating_sub(1)));
    let span = (f + 1) as f64;
    let crashes = sample(rng, n, k)
        .into_iter()
        .map(|agent| {
            let time = match lattice_steps {
                Some(s) => rng.gen_range(0..=s * (f as u32 + 1)) as f64 / s as f64,
                None => rng.gen::<f64>() * span,
            };
            let recipients = (0..n).filter(|&j| j != agent && rng.gen_bool(0.5)).collect();
            Crash {
                agent,
                time,
                recipients,
            }
        })
        .collect();
    CrashSchedule { crashes }
}
