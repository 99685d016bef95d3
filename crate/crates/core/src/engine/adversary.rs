//! Adversaries that keep the valency diameter large.

use serde::Serialize;

use super::{
    initial_configuration, step_configuration, valency_bracket_with, Algorithm, BracketConfig,
    Configuration, ContinuationFamily, Execution, Point, ValencyBracket,
};
use crate::error::Result;
use crate::graphs::{psi_model, NetworkModel};

/// Relative tolerance under which two candidate lower bounds count as
/// equal; ties go to the first candidate in canonical order.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversaryRun<S> {
    pub execution: Execution<S>,
    /// Bracket at every decision point, the initial configuration included.
    pub brackets: Vec<ValencyBracket>,
    /// Chosen candidate index per decision.
    pub choices: Vec<usize>,
    /// Lower bounds of all candidates per decision.
    pub candidate_lower: Vec<Vec<f64>>,
}

impl<S> AdversaryRun<S> {
    pub fn lower_bounds(&self) -> Vec<f64> {
        self.brackets.iter().map(|b| b.lower).collect()
    }
}

fn decision_seed(seed: u64, decision: usize, candidate: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(((decision as u64) << 32) | candidate as u64)
}

fn choose(lowers: &[f64]) -> usize {
    let best = lowers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = best - TIE_TOLERANCE * best.abs();
    lowers.iter().position(|&l| l >= cut).unwrap_or(0)
}

/// Each round, picks the model graph whose successor has the largest
/// valency lower bound.
pub fn greedy_adversary<A: Algorithm>(
    alg: &A,
    model: &NetworkModel,
    inputs: &[Point],
    rounds: usize,
    cfg: &BracketConfig,
) -> Result<AdversaryRun<A::State>> {
    let family = ContinuationFamily::from_model(model);
    let initial = initial_configuration(alg, inputs)?;
    let first = valency_bracket_with(alg, &family, &initial, cfg)?;
    let mut run = AdversaryRun {
        execution: Execution::start(alg, initial),
        brackets: vec![first],
        choices: Vec::new(),
        candidate_lower: Vec::new(),
    };
    for t in 1..=rounds {
        let mut cands = Vec::with_capacity(model.len());
        for (k, g) in model.iter().enumerate() {
            alg.check_graph(g)?;
            let next = step_configuration(alg, run.execution.last(), g)?;
            let local = BracketConfig {
                seed: decision_seed(cfg.seed, t, k),
                ..cfg.clone()
            };
            let b = valency_bracket_with(alg, &family, &next, &local)?;
            cands.push((next, b));
        }
        let lowers: Vec<f64> = cands.iter().map(|(_, b)| b.lower).collect();
        let k = choose(&lowers);
        let (next, b) = cands.swap_remove(k);
        run.execution.push(alg, model.get(k).clone(), Some(k), next);
        run.brackets.push(b);
        run.choices.push(k);
        run.candidate_lower.push(lowers);
    }
    Ok(run)
}

/// Phase-level adversary over `σ_1, σ_2, σ_3`: at every phase boundary it
/// appends the block whose end configuration has the largest lower bound
/// with respect to σ-concatenation continuations. Choices are block
/// indices `0..3` for `σ_1..σ_3`.
pub fn psi_adversary<A: Algorithm>(
    alg: &A,
    n: usize,
    inputs: &[Point],
    phases: usize,
    cfg: &BracketConfig,
) -> Result<AdversaryRun<A::State>> {
    let family = ContinuationFamily::sigma(n)?;
    let model = psi_model(n)?;
    let initial = initial_configuration(alg, inputs)?;
    let first = valency_bracket_with(alg, &family, &initial, cfg)?;
    let mut run = AdversaryRun {
        execution: Execution::start(alg, initial),
        brackets: vec![first],
        choices: Vec::new(),
        candidate_lower: Vec::new(),
    };
    for phase in 1..=phases {
        let mut cands: Vec<(Vec<Configuration<A::State>>, ValencyBracket)> = Vec::new();
        for (u, block) in family.blocks.iter().enumerate() {
            let mut trail = Vec::with_capacity(block.len());
            let mut cur = run.execution.last().clone();
            for g in block {
                alg.check_graph(g)?;
                cur = step_configuration(alg, &cur, g)?;
                trail.push(cur.clone());
            }
            let local = BracketConfig {
                seed: decision_seed(cfg.seed, phase, u),
                ..cfg.clone()
            };
            let b = valency_bracket_with(alg, &family, &cur, &local)?;
            cands.push((trail, b));
        }
        let lowers: Vec<f64> = cands.iter().map(|(_, b)| b.lower).collect();
        let u = choose(&lowers);
        let (trail, b) = cands.swap_remove(u);
        let g = &family.blocks[u][0];
        let id = model.index_of(g);
        for c in trail {
            run.execution.push(alg, g.clone(), id, c);
        }
        run.brackets.push(b);
        run.choices.push(u);
        run.candidate_lower.push(lowers);
    }
    Ok(run)
}
