use conlab::algorithms::{approx_wrapper, AmortizedMidpoint, MassSplit, Midpoint, Regime, Thirds};
use conlab::engine::{
    contraction_estimate, diameter, greedy_adversary, indistinguishable, initial_configuration,
    run, step_configuration, valency_bracket, Algorithm, BracketConfig, Constant, Cyclic,
    GraphClass, IidRandom, Point, RandomClass, Recorded,
};
use conlab::graphs::{
    h0, h1, h2, random_graph, random_rooted, two_agent_graphs, CommGraph, NetworkModel,
};
use conlab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Point> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn coordinate_bounds(ys: &[&[f64]], k: usize) -> (f64, f64) {
    ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
        (lo.min(y[k]), hi.max(y[k]))
    })
}

fn hull_nests<A: Algorithm>(alg: &A, inputs: &[Point], graphs: &[CommGraph]) -> bool {
    let mut src = Recorded::new(graphs.to_vec()).unwrap();
    let exec = run(alg, inputs, &mut src, graphs.len()).unwrap();
    let d = inputs[0].len();
    (1..=graphs.len()).all(|t| {
        let before = exec.config(t - 1).outputs(alg);
        let after = exec.config(t).outputs(alg);
        (0..d).all(|k| {
            let (lo0, hi0) = coordinate_bounds(&before, k);
            let (lo1, hi1) = coordinate_bounds(&after, k);
            lo1 >= lo0 && hi1 <= hi0
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reruns_are_identical(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = points(&mut rng, n, 1);
        let alg = AmortizedMidpoint::new(n).unwrap();
        let go = || {
            let mut src = RandomClass::new(n, GraphClass::Rooted, 0.3, seed).unwrap();
            serde_json::to_string(&run(&alg, &inputs, &mut src, 25).unwrap()).unwrap()
        };
        prop_assert_eq!(go(), go());
    }

    #[test]
    fn convex_algorithms_nest_hulls(seed in any::<u64>(), n in 2usize..=6, d in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = points(&mut rng, n, d);
        let graphs: Vec<CommGraph> = (0..12).map(|_| random_graph(n, 0.4, &mut rng)).collect();
        prop_assert!(hull_nests(&Midpoint, &inputs, &graphs));
        prop_assert!(hull_nests(&AmortizedMidpoint::new(n).unwrap(), &inputs, &graphs));
        if n == 2 {
            prop_assert!(hull_nests(&Thirds, &inputs, &graphs));
        }
    }

    #[test]
    fn recorded_executions_verify(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = points(&mut rng, n, 2);
        let model = NetworkModel::new((0..4).map(|_| random_rooted(n, 0.3, &mut rng))).unwrap();
        let mut src = IidRandom::new(model, seed);
        let exec = run(&Midpoint, &inputs, &mut src, 10).unwrap();
        prop_assert!(exec.verify(&Midpoint).unwrap());
        prop_assert_eq!(exec.len(), 10);
        for (t, d) in exec.deltas.iter().enumerate() {
            let ys = exec.config(t).outputs(&Midpoint);
            prop_assert_eq!(*d, diameter(&ys).unwrap());
        }
    }

    #[test]
    fn brackets_are_sound(seed in any::<u64>(), n in 2usize..=5, depth in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = points(&mut rng, n, 1);
        let model = NetworkModel::new((0..3).map(|_| random_rooted(n, 0.3, &mut rng))).unwrap();
        let c = initial_configuration(&Midpoint, &inputs).unwrap();
        let cfg = BracketConfig { depth, seed, ..BracketConfig::default() };
        let b = valency_bracket(&Midpoint, &model, &c, &cfg).unwrap();
        prop_assert!(b.lower <= b.upper + 2.0 * cfg.tol);
        prop_assert!(b.lower >= 0.0);
        prop_assert_eq!(b.prefixes, model.len().pow(depth as u32));
    }

    #[test]
    fn successor_lower_bounds_stay_under_predecessor_spread(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = points(&mut rng, n, 1);
        let model = NetworkModel::new((0..3).map(|_| random_rooted(n, 0.3, &mut rng))).unwrap();
        let cfg = BracketConfig { seed, ..BracketConfig::default() };
        let mut src = IidRandom::new(model.clone(), seed);
        let exec = run(&Midpoint, &inputs, &mut src, 6).unwrap();
        for t in 1..=6 {
            let b = valency_bracket(&Midpoint, &model, exec.config(t), &cfg).unwrap();
            prop_assert!(b.lower <= exec.deltas[t - 1] + 2.0 * cfg.tol);
        }
    }

    #[test]
    fn agents_with_equal_views_step_alike(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(n, 0.4, &mut rng);
        let i = rng.gen_range(0..n);
        let a = points(&mut rng, n, 1);
        let mut b = points(&mut rng, n, 1);
        for j in g.in_neighbors(i) {
            b[j] = a[j].clone();
        }
        let mut rows = random_graph(n, 0.4, &mut rng).rows().to_vec();
        rows[i] = g.in_mask(i);
        let h = CommGraph::from_rows(n, rows).unwrap();

        let ca = initial_configuration(&Midpoint, &a).unwrap();
        let cb = initial_configuration(&Midpoint, &b).unwrap();
        let na = step_configuration(&Midpoint, &ca, &g).unwrap();
        let nb = step_configuration(&Midpoint, &cb, &h).unwrap();
        prop_assert!(indistinguishable(&na, &nb, i));

        let alg = AmortizedMidpoint::new(n).unwrap();
        let ca = initial_configuration(&alg, &a).unwrap();
        let cb = initial_configuration(&alg, &b).unwrap();
        let na = step_configuration(&alg, &ca, &g).unwrap();
        let nb = step_configuration(&alg, &cb, &h).unwrap();
        prop_assert!(indistinguishable(&na, &nb, i));
    }

    #[test]
    fn equal_inputs_give_indistinguishable_initial_states(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = points(&mut rng, n, 1);
        let mut b = points(&mut rng, n, 1);
        let i = rng.gen_range(0..n);
        b[i] = a[i].clone();
        let ca = initial_configuration(&Midpoint, &a).unwrap();
        let cb = initial_configuration(&Midpoint, &b).unwrap();
        prop_assert!(indistinguishable(&ca, &cb, i));
    }

    #[test]
    fn approx_decisions_agree_on_nonsplit_patterns(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = approx_wrapper(Regime::NonsplitMidpoint, n, 1.0, 0.01).unwrap();
        let inputs: Vec<Point> = (0..n).map(|_| vec![rng.gen::<f64>()]).collect();
        let mut src = RandomClass::new(n, GraphClass::NonSplit, 0.3, seed).unwrap();
        let exec = run(&alg, &inputs, &mut src, alg.decision_round()).unwrap();
        let decisions: Vec<Point> = exec
            .last()
            .states
            .iter()
            .map(|s| s.decision.clone().expect("decided"))
            .collect();
        prop_assert!(diameter(&decisions).unwrap() <= 0.01);
    }
}

#[test]
fn thirds_contracts_by_a_third_under_h0() {
    let mut src = Constant::in_model(two_agent_graphs(), h0()).unwrap();
    let exec = run(&Thirds, &[vec![0.0], vec![1.0]], &mut src, 10).unwrap();
    let est = contraction_estimate(&exec.deltas).unwrap();
    assert!((est.sup_ratio - 1.0 / 3.0).abs() < 1e-12);
    assert!(exec.rounds.iter().all(|r| r.graph_id == two_agent_graphs().index_of(&h0())));
}

#[test]
fn thirds_limits_cover_the_inputs() {
    let c = initial_configuration(&Thirds, &[vec![0.0], vec![1.0]]).unwrap();
    let b = valency_bracket(&Thirds, &two_agent_graphs(), &c, &BracketConfig::default()).unwrap();
    assert!(b.lower >= 1.0 - 10.0 * b.tol);
    assert_eq!(b.upper, 1.0);
}

#[test]
fn greedy_adversary_is_reproducible() {
    let cfg = BracketConfig::default();
    let a = greedy_adversary(&Thirds, &two_agent_graphs(), &[vec![0.0], vec![1.0]], 5, &cfg).unwrap();
    let b = greedy_adversary(&Thirds, &two_agent_graphs(), &[vec![0.0], vec![1.0]], 5, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.choices.len(), 5);
    assert!(a.execution.verify(&Thirds).unwrap());
}

#[test]
fn mass_split_can_leave_the_hull_and_refuses_other_graphs() {
    let alg = MassSplit::new(h1());
    assert!(!alg.is_convex());
    let mut src = Constant::new(h2());
    let err = run(&alg, &[vec![0.0], vec![1.0]], &mut src, 1).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
}

#[test]
fn source_contract_and_dimension_errors() {
    let mut src = Cyclic::new(vec![h1(), h2()]).unwrap();
    let err = run(&Midpoint, &[vec![0.0]], &mut src, 1).unwrap_err();
    assert!(matches!(err, Error::Dimension { .. }));
    let err = initial_configuration(&Midpoint, &[vec![0.0], vec![0.0, 1.0]]).unwrap_err();
    assert!(matches!(err, Error::Dimension { .. } | Error::Argument(_)));
    let err = initial_configuration(&Midpoint, &[vec![f64::NAN], vec![0.0]]).unwrap_err();
    assert!(matches!(err, Error::Argument(_) | Error::Validation(_)));
    let mut short = Recorded::new(vec![h0()]).unwrap();
    let err = run(&Midpoint, &[vec![0.0], vec![1.0]], &mut short, 2).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
}

#[test]
fn approx_rejects_graphs_outside_its_regime() {
    let alg = approx_wrapper(Regime::NonsplitMidpoint, 3, 1.0, 0.1).unwrap();
    let mut src = Constant::new(CommGraph::identity(3).unwrap());
    let err = run(&alg, &[vec![0.0], vec![1.0], vec![0.5]], &mut src, 2).unwrap_err();
    assert!(matches!(err, Error::Contract(_)));
}
