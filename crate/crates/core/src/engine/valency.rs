//! Numerical brackets on the valency diameter `δ(C)`: the diameter of the
//! set of limits reachable from a configuration.
//!
//! Limits are estimated by running constant continuations `G^ω` after
//! every prefix of bounded depth until the output diameter falls below a
//! threshold relative to `Δ(y(C))`. The last output of agent 1 is taken as
//! the estimate and the remaining output diameter as its error radius,
//! which bounds the distance to the true limit for convex algorithms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{distance, spread, step_configuration, Algorithm, Configuration, Point};
use crate::error::{Error, Result};
use crate::graphs::{psi_graph, sigma_block, CommGraph, NetworkModel};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_BRANCH_CAP: usize = 4096;
pub const DEFAULT_ROUND_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketConfig {
    /// Length of the explored prefixes, in blocks.
    pub depth: usize,
    /// Continuations stop once their output diameter is at most `tol`
    /// times the diameter of the bracketed configuration.
    pub tol: f64,
    /// Above this many prefixes, `branch_cap` prefixes are sampled.
    pub branch_cap: usize,
    pub seed: u64,
    /// Rounds allowed per continuation.
    pub round_budget: usize,
}

impl Default for BracketConfig {
    fn default() -> Self {
        BracketConfig {
            depth: 0,
            tol: DEFAULT_TOL,
            branch_cap: DEFAULT_BRANCH_CAP,
            seed: 0,
            round_budget: DEFAULT_ROUND_BUDGET,
        }
    }
}

/// Prefix alphabet and constant continuations explored by a bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationFamily {
    pub blocks: Vec<Vec<CommGraph>>,
    pub continuations: Vec<CommGraph>,
}

impl ContinuationFamily {
    /// Single-graph blocks and constant continuations over a whole model.
    pub fn from_model(model: &NetworkModel) -> Self {
        ContinuationFamily {
            blocks: model.iter().map(|g| vec![g.clone()]).collect(),
            continuations: model.graphs().to_vec(),
        }
    }

    /// Blocks `σ_1, σ_2, σ_3` and continuations `Ψ_1^ω, Ψ_2^ω, Ψ_3^ω`.
    pub fn sigma(n: usize) -> Result<Self> {
        Ok(ContinuationFamily {
            blocks: (1..=3).map(|i| sigma_block(n, i)).collect::<Result<_>>()?,
            continuations: (1..=3).map(|i| psi_graph(n, i)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSample {
    /// Block indices of the prefix.
    pub prefix: Vec<usize>,
    /// Index of the constant continuation.
    pub continuation: usize,
    pub estimate: Point,
    pub error: f64,
    /// Continuation rounds used.
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValencyBracket {
    /// Guaranteed `δ(C) ≥ lower` up to the stated error radii.
    pub lower: f64,
    /// `Δ(y(C))` for convex algorithms, infinite otherwise.
    pub upper: f64,
    pub depth: usize,
    pub tol: f64,
    pub prefixes: usize,
    pub sampled: bool,
    pub max_error: f64,
    pub samples: Vec<LimitSample>,
}

/// Bracket over the model's graphs as prefix alphabet and continuations.
pub fn valency_bracket<A: Algorithm>(
    alg: &A,
    model: &NetworkModel,
    config: &Configuration<A::State>,
    cfg: &BracketConfig,
) -> Result<ValencyBracket> {
    valency_bracket_with(alg, &ContinuationFamily::from_model(model), config, cfg)
}

struct Running<S> {
    prefix: Vec<usize>,
    continuation: usize,
    config: Configuration<S>,
    delta: f64,
    rounds: usize,
}

pub fn valency_bracket_with<A: Algorithm>(
    alg: &A,
    family: &ContinuationFamily,
    config: &Configuration<A::State>,
    cfg: &BracketConfig,
) -> Result<ValencyBracket> {
    if family.blocks.is_empty() || family.continuations.is_empty() {
        return Err(Error::Argument("empty continuation family".into()));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(Error::Argument(format!("tolerance {} not in (0, 1)", cfg.tol)));
    }
    if cfg.branch_cap == 0 {
        return Err(Error::Argument("branch cap must be positive".into()));
    }
    let scale = spread(alg, config);
    let upper = if alg.is_convex() { scale } else { f64::INFINITY };

    let total = family.blocks.len().checked_pow(cfg.depth as u32);
    let sampled = total.map_or(true, |t| t > cfg.branch_cap);
    let leaves = if sampled {
        sample_prefixes(alg, family, config, cfg)?
    } else {
        enumerate_prefixes(alg, family, config, cfg.depth)?
    };
    let prefixes = leaves.len();

    let mut runs = Vec::with_capacity(leaves.len() * family.continuations.len());
    for (prefix, leaf) in leaves {
        for (c, g) in family.continuations.iter().enumerate() {
            alg.check_graph(g)?;
            let delta = spread(alg, &leaf);
            runs.push(Running {
                prefix: prefix.clone(),
                continuation: c,
                config: leaf.clone(),
                delta,
                rounds: 0,
            });
        }
    }

    let first = cfg.tol * scale;
    for r in &mut runs {
        advance(alg, &family.continuations[r.continuation], r, first, cfg.round_budget)?;
    }
    let raw = raw_diameter(alg, &runs);
    let refined = cfg.tol * raw / 8.0;
    if refined < first {
        for r in &mut runs {
            advance(alg, &family.continuations[r.continuation], r, refined, cfg.round_budget)?;
        }
    }

    let samples: Vec<LimitSample> = runs
        .into_iter()
        .map(|r| LimitSample {
            estimate: alg.output(&r.config.states[0]).to_vec(),
            error: r.delta,
            prefix: r.prefix,
            continuation: r.continuation,
            rounds: r.rounds,
        })
        .collect();
    let lower = separated_lower_bound(&samples);
    let max_error = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    Ok(ValencyBracket {
        lower,
        upper,
        depth: cfg.depth,
        tol: cfg.tol,
        prefixes,
        sampled,
        max_error,
        samples,
    })
}

fn max_abs<A: Algorithm>(alg: &A, config: &Configuration<A::State>) -> f64 {
    config
        .states
        .iter()
        .flat_map(|s| alg.output(s).iter())
        .fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs `G^ω` until the output diameter is at most `threshold`, or at most
/// the rounding floor of the current magnitudes.
fn advance<A: Algorithm>(
    alg: &A,
    g: &CommGraph,
    r: &mut Running<A::State>,
    threshold: f64,
    budget: usize,
) -> Result<()> {
    loop {
        let floor = 16.0 * f64::EPSILON * max_abs(alg, &r.config);
        if r.delta <= threshold.max(floor) {
            return Ok(());
        }
        if r.rounds >= budget {
            return Err(Error::ConvergenceBudget {
                rounds: budget,
                diameter: r.delta,
                threshold,
            });
        }
        r.config = step_configuration(alg, &r.config, g)?;
        r.delta = spread(alg, &r.config);
        r.rounds += 1;
    }
}

fn raw_diameter<A: Algorithm>(alg: &A, runs: &[Running<A::State>]) -> f64 {
    let points: Vec<&[f64]> = runs.iter().map(|r| alg.output(&r.config.states[0])).collect();
    super::diameter_unchecked(&points)
}

/// `max (‖e_p − e_q‖ − err_p − err_q)` over pairs, clamped at zero.
fn separated_lower_bound(samples: &[LimitSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    if samples[0].estimate.len() == 1 {
        let hi = samples
            .iter()
            .map(|s| s.estimate[0] - s.error)
            .fold(f64::NEG_INFINITY, f64::max);
        let lo = samples
            .iter()
            .map(|s| s.estimate[0] + s.error)
            .fold(f64::INFINITY, f64::min);
        return (hi - lo).max(0.0);
    }
    let mut best = 0.0f64;
    for (a, p) in samples.iter().enumerate() {
        for q in &samples[a + 1..] {
            best = best.max(distance(&p.estimate, &q.estimate) - p.error - q.error);
        }
    }
    best
}

type Leaf<S> = (Vec<usize>, Configuration<S>);

fn apply_block<A: Algorithm>(
    alg: &A,
    config: &Configuration<A::State>,
    block: &[CommGraph],
) -> Result<Configuration<A::State>> {
    let mut cur = config.clone();
    for g in block {
        alg.check_graph(g)?;
        cur = step_configuration(alg, &cur, g)?;
    }
    Ok(cur)
}

fn enumerate_prefixes<A: Algorithm>(
    alg: &A,
    family: &ContinuationFamily,
    config: &Configuration<A::State>,
    depth: usize,
) -> Result<Vec<Leaf<A::State>>> {
    let mut frontier = vec![(Vec::new(), config.clone())];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * family.blocks.len());
        for (prefix, c) in &frontier {
            for (b, block) in family.blocks.iter().enumerate() {
                let mut p = prefix.clone();
                p.push(b);
                next.push((p, apply_block(alg, c, block)?));
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

fn sample_prefixes<A: Algorithm>(
    alg: &A,
    family: &ContinuationFamily,
    config: &Configuration<A::State>,
    cfg: &BracketConfig,
) -> Result<Vec<Leaf<A::State>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.branch_cap)
        .map(|_| {
            let mut prefix = Vec::with_capacity(cfg.depth);
            let mut c = config.clone();
            for _ in 0..cfg.depth {
                let b = rng.gen_range(0..family.blocks.len());
                c = apply_block(alg, &c, &family.blocks[b])?;
                prefix.push(b);
            }
            Ok((prefix, c))
        })
        .collect()
}
