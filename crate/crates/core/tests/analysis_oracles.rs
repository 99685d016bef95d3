use conlab::analysis::oracle::{beta_oracle, roots_by_bfs};
use conlab::analysis::{
    alpha_diameter, alpha_diameter_pairwise, alpha_related, alpha_star, analyze,
    asymptotic_solvable, beta_classes, closure_property_holds, consensus_solvable,
    min_alpha_diameter_unsolvable, AlphaDiameter,
};
use conlab::graphs::{
    async_model, deaf_family, h0, h1, h2, psi_model, random_graph, random_rooted,
    two_agent_graphs, CommGraph, NetworkModel, DEFAULT_MODEL_CAP,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model_from_seed(seed: u64, n: usize, max_graphs: usize) -> NetworkModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=max_graphs);
    let rooted = rng.gen_bool(0.5);
    NetworkModel::new((0..k).map(|_| {
        if rooted {
            random_rooted(n, rng.gen_range(0.0..0.6), &mut rng)
        } else {
            random_graph(n, rng.gen_range(0.0..0.8), &mut rng)
        }
    }))
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn beta_matches_brute_force(seed in any::<u64>(), n in 2usize..=4) {
        let model = model_from_seed(seed, n, 6);
        prop_assert_eq!(beta_classes(&model), beta_oracle(&model).unwrap());
    }

    #[test]
    fn beta_refines_alpha_star_and_is_closed(seed in any::<u64>(), n in 2usize..=5) {
        let model = model_from_seed(seed, n, 10);
        let beta = beta_classes(&model);
        prop_assert!(beta.refines(&alpha_star(&model)));
        prop_assert!(closure_property_holds(&model, &beta));
    }

    #[test]
    fn hyperedge_diameter_matches_pairwise(seed in any::<u64>(), n in 2usize..=4) {
        let model = model_from_seed(seed, n, 30);
        prop_assert_eq!(alpha_diameter(&model), alpha_diameter_pairwise(&model));
    }

    #[test]
    fn finite_diameter_iff_alpha_star_connected(seed in any::<u64>(), n in 2usize..=4) {
        let model = model_from_seed(seed, n, 12);
        prop_assert_eq!(
            alpha_diameter(&model).finite().is_some(),
            alpha_star(&model).len() == 1
        );
    }

    #[test]
    fn roots_match_bfs(seed in any::<u64>(), n in 1usize..=7) {
        let model = model_from_seed(seed, n, 4);
        for (i, g) in model.iter().enumerate() {
            prop_assert_eq!(g.roots(), roots_by_bfs(&model, i));
        }
    }

    #[test]
    fn asymptotic_iff_all_rooted(seed in any::<u64>(), n in 2usize..=5) {
        let model = model_from_seed(seed, n, 6);
        let oracle = (0..model.len()).all(|i| !roots_by_bfs(&model, i).is_empty());
        prop_assert_eq!(asymptotic_solvable(&model), oracle);
    }

    #[test]
    fn alpha_is_reflexive_and_symmetric(seed in any::<u64>(), n in 2usize..=4) {
        let model = model_from_seed(seed, n, 6);
        for g in 0..model.len() {
            prop_assert_eq!(alpha_related(&model, g, g).witnesses.len(), model.len());
            for h in 0..model.len() {
                prop_assert_eq!(
                    alpha_related(&model, g, h).witnesses,
                    alpha_related(&model, h, g).witnesses
                );
            }
        }
    }

    #[test]
    fn exact_consensus_implies_asymptotic(seed in any::<u64>(), n in 2usize..=4) {
        let model = model_from_seed(seed, n, 6);
        if consensus_solvable(&model) {
            prop_assert!(asymptotic_solvable(&model));
        }
    }
}

#[test]
fn two_agent_model_report() {
    let report = analyze(&two_agent_graphs());
    assert_eq!(report.graphs, 3);
    assert!(report.asymptotic_solvable);
    assert!(!report.consensus_solvable);
    assert_eq!(report.alpha_diameter, AlphaDiameter::Finite(2));
    assert_eq!(report.beta_blocks.len(), 1);
}

#[test]
fn pairs_of_two_agent_graphs() {
    let with_h0 = NetworkModel::new([h0(), h1()]).unwrap();
    assert!(consensus_solvable(&with_h0));
    let opposite = NetworkModel::new([h1(), h2()]).unwrap();
    assert!(consensus_solvable(&opposite));
    assert_eq!(alpha_diameter(&opposite), AlphaDiameter::Infinite);
    assert_eq!(beta_classes(&opposite).len(), 2);
}

#[test]
fn single_graph_models() {
    let k3 = NetworkModel::singleton(CommGraph::complete(3).unwrap());
    assert!(consensus_solvable(&k3));
    assert_eq!(alpha_diameter(&k3), AlphaDiameter::Finite(1));
    let split = NetworkModel::singleton(CommGraph::identity(3).unwrap());
    assert!(!asymptotic_solvable(&split));
    assert!(!consensus_solvable(&split));
}

#[test]
fn deaf_families_have_diameter_one() {
    for n in 3..=6 {
        let model = deaf_family(&CommGraph::complete(n).unwrap());
        assert_eq!(alpha_diameter(&model), AlphaDiameter::Finite(1), "n = {n}");
        assert!(!consensus_solvable(&model));
    }
}

#[test]
fn psi_models_are_rooted_and_unsolvable() {
    for n in 4..=7 {
        let model = psi_model(n).unwrap();
        assert!(asymptotic_solvable(&model));
        assert!(!consensus_solvable(&model));
    }
}

#[test]
fn async_models_within_ceiling_bound() {
    for (n, f) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
        let model = async_model(n, f, DEFAULT_MODEL_CAP).unwrap();
        let d = alpha_diameter(&model).finite().expect("finite");
        assert!(d <= n.div_ceil(f), "({n},{f}): {d}");
    }
}

#[test]
fn smallest_unsolvable_submodel() {
    let d = min_alpha_diameter_unsolvable(&two_agent_graphs(), 12).unwrap();
    assert_eq!(d, AlphaDiameter::Finite(2));
    let k3 = NetworkModel::singleton(CommGraph::complete(3).unwrap());
    assert_eq!(
        min_alpha_diameter_unsolvable(&k3, 12).unwrap(),
        AlphaDiameter::Infinite
    );
}
