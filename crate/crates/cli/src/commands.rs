use conlab::algorithms::{approx_wrapper, AnyAlgorithm, Approx, MinRelay, Regime};
use conlab::analysis::analyze as analyze_model;
use conlab::async_sim::{
    random_crash_schedule, round_based_wrapper, run_async as run_minrelay,
    worst_case_crash_schedule, CrashSchedule,
};
use conlab::engine::{
    contraction_estimate, greedy_adversary, psi_adversary, run, valency_bracket, Algorithm,
    BracketConfig, Execution, Point,
};
use conlab::graphs::{serialize_pattern, two_agent_graphs, NetworkModel};
use conlab::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{csv, execution_rows, finish, json_num, TraceRow};
use crate::parse::{self, read};
use crate::{AdversaryArgs, AnalyzeArgs, ApproxArgs, AsyncArgs, SimulateArgs};

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let model = conlab::graphs::parse_model(&read(&args.model)?)?;
    conlab::analysis::checked_beta_classes(&model)?;
    let report = serde_json::to_value(analyze_model(&model)).expect("serializable");
    finish(&args.common, None, &report, &[])
}

fn contraction_json(series: &[f64]) -> Value {
    match contraction_estimate(series) {
        Ok(c) => json!({
            "ratios": c.ratios,
            "roots": c.roots,
            "sup_ratio": c.sup_ratio,
            "sup_root": c.sup_root,
        }),
        Err(_) => Value::Null,
    }
}

fn bracket_cfg(common: &crate::Common) -> BracketConfig {
    BracketConfig {
        tol: common.tol,
        seed: common.seed.unwrap_or(0),
        ..BracketConfig::default()
    }
}

/// Mass split runs on one fixed graph: the model's only graph.
fn algorithm(name: &str, n: usize, model: Option<&NetworkModel>) -> Result<AnyAlgorithm> {
    let single = model.filter(|m| m.len() == 1).map(|m| m.get(0));
    AnyAlgorithm::by_name(name, n, single)
}

fn simulate_rows<A: Algorithm>(
    alg: &A,
    exec: &Execution<A::State>,
    model: Option<&NetworkModel>,
    bracket: bool,
    cfg: &BracketConfig,
) -> Result<Vec<TraceRow>> {
    let bounds = if bracket {
        let model = model.ok_or_else(|| Error::Argument("--bracket needs --model".into()))?;
        (0..=exec.len())
            .map(|t| valency_bracket(alg, model, exec.config(t), cfg).map(|b| (b.lower, b.upper)))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(execution_rows(alg, exec, |t| bounds.get(t).copied()))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let model = parse::load_model(args.model.as_deref(), args.graph.as_deref())?;
    let inputs = parse::inputs(&args.inputs)?;
    let n = inputs.len();
    let mut src = parse::pattern(&args.pattern, model.as_ref(), n, args.edge_prob, args.common.seed)?;
    let cfg = bracket_cfg(&args.common);
    if args.approx {
        let (regime, delta, eps) = match (&args.regime, args.delta, args.eps) {
            (Some(r), Some(d), Some(e)) => (r.parse::<Regime>()?, d, e),
            _ => {
                return Err(Error::Argument(
                    "--approx needs --regime, --delta and --eps".into(),
                ))
            }
        };
        let alg = approx_wrapper(regime, n, delta, eps)?;
        if let Some(name) = &args.algorithm {
            if *name != alg.inner().name() {
                return Err(Error::Argument(format!(
                    "regime {regime} runs {}, not {name}",
                    alg.inner().name()
                )));
            }
        }
        alg.check_inputs(&inputs)?;
        let exec = run(&alg, &inputs, src.as_mut(), args.rounds)?;
        let rows = simulate_rows(&alg, &exec, model.as_ref(), args.bracket, &cfg)?;
        let mut summary = simulate_summary(&alg, &exec, args);
        summary["decision_round"] = json!(alg.decision_round());
        summary["decisions"] = json!(exec.last().states.iter().map(|s| s.decision.clone()).collect::<Vec<_>>());
        return finish(&args.common, Some(csv(&rows)?), &summary, &[]);
    }
    let name = args
        .algorithm
        .as_deref()
        .ok_or_else(|| Error::Argument("--algorithm is required".into()))?;
    let alg = algorithm(name, n, model.as_ref())?;
    let exec = run(&alg, &inputs, src.as_mut(), args.rounds)?;
    let rows = simulate_rows(&alg, &exec, model.as_ref(), args.bracket, &cfg)?;
    let summary = simulate_summary(&alg, &exec, args);
    finish(&args.common, Some(csv(&rows)?), &summary, &[])
}

fn simulate_summary<A: Algorithm>(alg: &A, exec: &Execution<A::State>, args: &SimulateArgs) -> Value {
    json!({
        "command": "simulate",
        "algorithm": alg.name(),
        "n": exec.initial.n(),
        "rounds": exec.len(),
        "pattern": args.pattern,
        "seed": args.common.seed,
        "graph_ids": exec.rounds.iter().map(|r| r.graph_id).collect::<Vec<_>>(),
        "deltas": exec.deltas,
        "final_outputs": exec.last().states.iter().map(|s| alg.output(s).to_vec()).collect::<Vec<_>>(),
        "contraction": contraction_json(&exec.deltas),
    })
}

pub fn adversary(args: &AdversaryArgs) -> Result<()> {
    let inputs = parse::inputs(&args.inputs)?;
    let n = inputs.len();
    let cfg = BracketConfig {
        depth: args.depth,
        tol: args.common.tol,
        branch_cap: args.branch_cap,
        seed: args.common.seed.unwrap_or(0),
        round_budget: args.budget,
    };
    let alphabet = match (&args.model, args.psi) {
        (Some(_), _) => None,
        (None, Some(_)) => Some(3usize),
        (None, None) => return Err(Error::Argument("give --model or --psi".into())),
    };
    let model = parse::load_model(args.model.as_deref(), None)?;
    let letters = alphabet.unwrap_or_else(|| model.as_ref().map_or(1, NetworkModel::len));
    let sampled = letters.checked_pow(args.depth as u32).map_or(true, |t| t > args.branch_cap);
    if sampled && args.common.seed.is_none() {
        return Err(Error::Argument(
            "--seed is required when prefixes are sampled (model size^depth above the branch cap)"
                .into(),
        ));
    }
    let alg = algorithm(&args.algorithm, n, model.as_ref())?;

    let (run, block) = match (&model, args.psi) {
        (Some(m), _) => (greedy_adversary(&alg, m, &inputs, args.rounds, &cfg)?, 1),
        (None, Some(k)) => {
            if k != n {
                return Err(Error::Dimension { expected: k, found: n });
            }
            (psi_adversary(&alg, k, &inputs, args.rounds, &cfg)?, k - 2)
        }
        (None, None) => unreachable!(),
    };
    let rows = execution_rows(&alg, &run.execution, |t| {
        (t % block == 0).then(|| {
            let b = &run.brackets[t / block];
            (b.lower, b.upper)
        })
    });
    let lowers = run.lower_bounds();
    let summary = json!({
        "command": "adversary",
        "kind": if model.is_some() { "greedy" } else { "psi" },
        "algorithm": alg.name(),
        "n": n,
        "decisions": run.choices.len(),
        "block_length": block,
        "choices": run.choices,
        "delta_lb": lowers,
        "delta_ub": run.brackets.iter().map(|b| json_num(b.upper)).collect::<Vec<_>>(),
        "candidate_lb": run.candidate_lower,
        "sampled": run.brackets.iter().any(|b| b.sampled),
        "tol": cfg.tol,
        "depth": cfg.depth,
        "seed": args.common.seed,
        "deltas": run.execution.deltas,
        "lb_contraction": contraction_json(&lowers),
        "delta_contraction": contraction_json(&run.execution.deltas),
    });
    finish(&args.common, Some(csv(&rows)?), &summary, &[])
}

pub fn run_async(args: &AsyncArgs) -> Result<()> {
    let inputs: Vec<Point> = match &args.inputs {
        Some(s) => parse::inputs(s)?,
        None => (0..args.n).map(|i| vec![i as f64]).collect(),
    };
    if inputs.len() != args.n {
        return Err(Error::Dimension {
            expected: args.n,
            found: inputs.len(),
        });
    }
    let mut delays = parse::delays(&args.delays, args.common.seed)?;

    if let Some(name) = args.algorithm.strip_prefix("round:") {
        if args.schedule.is_some() || args.worst_case || args.random_schedule {
            return Err(Error::Argument(
                "crash schedules apply to minrelay only; round-based runs vary delays".into(),
            ));
        }
        let alg = algorithm(name, args.n, None)?;
        let rr = round_based_wrapper(&alg, &inputs, args.f, &delays, args.rounds)?;
        let rows = execution_rows(&alg, &rr.execution, |_| None);
        let d0 = rr.execution.deltas[0];
        let per_time: Vec<Option<f64>> = rr
            .round_end_times
            .iter()
            .zip(&rr.execution.deltas[1..])
            .map(|(&time, &d)| (d0 > 0.0 && time > 0.0).then(|| (d / d0).powf(1.0 / time)))
            .collect();
        let summary = json!({
            "command": "async",
            "algorithm": format!("round:{}", alg.name()),
            "n": args.n,
            "f": args.f,
            "delays": args.delays,
            "seed": args.common.seed,
            "rounds": args.rounds,
            "round_end_times": rr.round_end_times,
            "deltas": rr.execution.deltas,
            "per_round": contraction_json(&rr.execution.deltas),
            "per_time_rates": per_time,
        });
        let pattern = if rr.pattern.is_empty() { Vec::new() } else {
            vec![("pattern.json", serialize_pattern(&rr.pattern)?)]
        };
        return finish(&args.common, Some(csv(&rows)?), &summary, &pattern);
    }
    if args.algorithm != "minrelay" {
        return Err(Error::Argument(format!(
            "unknown asynchronous algorithm {:?}; use minrelay or round:<name>",
            args.algorithm
        )));
    }
    if inputs.iter().any(|p| p.len() != 1) {
        return Err(Error::Argument("minrelay takes scalar inputs".into()));
    }
    let schedule = if let Some(path) = &args.schedule {
        CrashSchedule::from_json(&read(path)?)?
    } else if args.worst_case {
        let (s, d) = worst_case_crash_schedule(args.n, args.f)?;
        delays = d;
        s
    } else if args.random_schedule {
        let seed = args
            .common
            .seed
            .ok_or_else(|| Error::Argument("--seed is required for random schedules".into()))?;
        random_crash_schedule(args.n, args.f, None, &mut ChaCha8Rng::seed_from_u64(seed))
    } else {
        CrashSchedule::default()
    };
    let horizon = args.horizon.unwrap_or(args.f as f64 + 1.0);
    let scalars: Vec<f64> = inputs.iter().map(|p| p[0]).collect();
    let tl = run_minrelay(&MinRelay, args.f, &scalars, &delays, &schedule, horizon)?;
    let correct = tl.correct();
    let deadline = args.f as f64 + 1.0 + conlab::async_sim::TIME_SLACK;
    let summary = json!({
        "command": "async",
        "algorithm": "minrelay",
        "n": args.n,
        "f": args.f,
        "delays": delays,
        "horizon": horizon,
        "crashes": serde_json::from_str::<Value>(&schedule.to_json()).expect("json")["crashes"],
        "correct": correct.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "agreement_time": tl.agreement_time(),
        "equal_by_f_plus_1": tl.correct_equal_at(deadline),
        "final_outputs": correct.iter().map(|&i| tl.final_states[i].y.0).collect::<Vec<_>>(),
        "events": tl.events.len(),
    });
    finish(&args.common, None, &summary, &[("events.jsonl", tl.event_log_jsonl())])
}

pub fn approx(args: &ApproxArgs) -> Result<()> {
    let regime: Regime = args.regime.parse()?;
    let inputs = parse::inputs(&args.inputs)?;
    let n = inputs.len();
    let alg: Approx<AnyAlgorithm> = approx_wrapper(regime, n, args.delta, args.eps)?;
    alg.check_inputs(&inputs)?;
    let mut model = parse::load_model(args.model.as_deref(), None)?;
    if model.is_none() && regime == Regime::TwoAgent {
        model = Some(two_agent_graphs());
    }
    let default_pattern = match regime {
        Regime::TwoAgent => "iid",
        Regime::NonsplitMidpoint => "nonsplit",
        Regime::RootedAmortized => "rooted",
    };
    let spec = args.pattern.as_deref().unwrap_or(default_pattern);
    let mut src = parse::pattern(spec, model.as_ref(), n, args.edge_prob, args.common.seed)?;
    let rounds = args.rounds.unwrap_or(alg.decision_round());
    let exec = run(&alg, &inputs, src.as_mut(), rounds)?;
    let decisions: Vec<Option<Point>> = exec.last().states.iter().map(|s| s.decision.clone()).collect();
    let decided: Vec<&Point> = decisions.iter().flatten().collect();
    let mut max_gap = 0.0f64;
    for (a, p) in decided.iter().enumerate() {
        for q in &decided[a + 1..] {
            let d = p.iter().zip(q.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            max_gap = max_gap.max(d);
        }
    }
    let d = inputs[0].len();
    let valid = decided.iter().all(|p| {
        (0..d).all(|k| {
            let lo = inputs.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min);
            let hi = inputs.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max);
            p[k] >= lo && p[k] <= hi
        })
    });
    let rows = execution_rows(&alg, &exec, |_| None);
    let summary = json!({
        "command": "approx",
        "regime": regime,
        "n": n,
        "delta": args.delta,
        "eps": args.eps,
        "decision_round": alg.decision_round(),
        "rounds": rounds,
        "pattern": spec,
        "seed": args.common.seed,
        "all_decided": decided.len() == n,
        "decisions": decisions,
        "max_gap": max_gap,
        "eps_agreement": max_gap <= args.eps,
        "validity": valid,
    });
    finish(&args.common, Some(csv(&rows)?), &summary, &[])
}
