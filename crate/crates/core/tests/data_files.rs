use conlab::graphs::{
    async_model, deaf_family, h0, h1, h2, parse_graph, parse_model, parse_pattern, psi_model,
    serialize_graph, serialize_model, serialize_pattern, two_agent_graphs, CommGraph,
    DEFAULT_MODEL_CAP,
};
use conlab::Error;

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn bundled_models_match_their_constructors() {
    let cases = [
        ("two_agent.json", two_agent_graphs()),
        ("k3.json", conlab::graphs::NetworkModel::singleton(CommGraph::complete(3).unwrap())),
        ("deaf_k3.json", deaf_family(&CommGraph::complete(3).unwrap())),
        ("deaf_k4.json", deaf_family(&CommGraph::complete(4).unwrap())),
        ("psi5.json", psi_model(5).unwrap()),
        ("async_3_1.json", async_model(3, 1, DEFAULT_MODEL_CAP).unwrap()),
    ];
    for (file, expected) in cases {
        let text = data(file);
        let model = parse_model(&text).unwrap();
        assert_eq!(model, expected, "{file}");
        assert_eq!(serialize_model(&model), text, "{file}");
    }
}

#[test]
fn bundled_graph_and_pattern() {
    let text = data("k2_graph.json");
    let g = parse_graph(&text).unwrap();
    assert_eq!(g, CommGraph::complete(2).unwrap());
    assert_eq!(serialize_graph(&g), text);

    let text = data("two_agent_pattern.json");
    let pattern = parse_pattern(&text).unwrap();
    assert_eq!(pattern, vec![h1(), h2(), h0()]);
    assert_eq!(serialize_pattern(&pattern).unwrap(), text);
}

#[test]
fn malformed_files_are_parse_errors() {
    for text in [
        "",
        "{",
        r#"{"n": 2, "graphs": []}"#,
        r#"{"n": 2, "in": {"1": [3], "2": [2]}}"#,
        r#"{"n": 0, "graphs": [{"in": {}}]}"#,
    ] {
        let err = parse_model(text).and_then(|_| parse_graph(text).map(|_| ()));
        assert!(
            matches!(err, Err(Error::Parse { .. }) | Err(Error::Validation(_)) | Err(Error::Argument(_))),
            "{text:?}: {err:?}"
        );
    }
}
