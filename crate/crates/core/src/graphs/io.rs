//! JSON file formats for graphs and models.
//!
//! Graph: `{"n": 3, "in": {"1": [1, 2], "2": [2], "3": [1, 3]}}`.
//! Model: `{"n": 3, "graphs": [{"in": {...}}, ...]}`.
//! Agents are 1-based and self-loops must be listed explicitly.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{CommGraph, NetworkModel};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    #[serde(rename = "in")]
    in_sets: BTreeMap<String, Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelGraph {
    #[serde(default)]
    n: Option<usize>,
    #[serde(rename = "in")]
    in_sets: BTreeMap<String, Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    graphs: Vec<ModelGraph>,
}

fn build(n: usize, in_sets: &BTreeMap<String, Vec<usize>>, ctx: &str) -> Result<CommGraph> {
    if n == 0 || n > super::MAX_AGENTS {
        return Err(Error::Validation(format!(
            "{ctx}agent count must lie in 1..={}, got {n}",
            super::MAX_AGENTS
        )));
    }
    let mut rows = vec![None::<u64>; n];
    for (key, list) in in_sets {
        let agent: usize = key
            .parse()
            .ok()
            .filter(|a| (1..=n).contains(a))
            .ok_or_else(|| Error::Validation(format!("{ctx}unknown agent key {key:?}")))?;
        let mut row = 0u64;
        for &j in list {
            if !(1..=n).contains(&j) {
                return Err(Error::Validation(format!(
                    "{ctx}agent {agent} lists in-neighbor {j} outside 1..={n}"
                )));
            }
            row |= 1 << (j - 1);
        }
        rows[agent - 1] = Some(row);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.ok_or_else(|| {
                Error::Validation(format!("{ctx}agent {} has no in-neighbor entry", i + 1))
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    CommGraph::from_rows(n, rows).map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("{ctx}{msg}")),
        other => other,
    })
}

/// Parses a graph file.
pub fn parse_graph(text: &str) -> Result<CommGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    build(file.n, &file.in_sets, "")
}

fn parse_graph_list(text: &str) -> Result<(usize, Vec<CommGraph>)> {
    let file: ModelFile = serde_json::from_str(text)?;
    let mut graphs = Vec::with_capacity(file.graphs.len());
    for (idx, g) in file.graphs.iter().enumerate() {
        let ctx = format!("graph {idx}: ");
        if let Some(m) = g.n {
            if m != file.n {
                return Err(Error::Validation(format!(
                    "{ctx}declares n = {m} but the model has n = {}",
                    file.n
                )));
            }
        }
        graphs.push(build(file.n, &g.in_sets, &ctx)?);
    }
    Ok((file.n, graphs))
}

/// Parses a model file. Graph order in the file is not preserved: the
/// model is stored in canonical order with duplicates merged.
pub fn parse_model(text: &str) -> Result<NetworkModel> {
    let (_, graphs) = parse_graph_list(text)?;
    NetworkModel::new(graphs)
}

/// Parses a pattern file: same layout as a model file, but order and
/// repetitions are kept.
pub fn parse_pattern(text: &str) -> Result<Vec<CommGraph>> {
    let (n, graphs) = parse_graph_list(text)?;
    if graphs.is_empty() {
        return Err(Error::Validation(format!("pattern on {n} agents has no graphs")));
    }
    Ok(graphs)
}

fn in_object(g: &CommGraph) -> Value {
    let mut map = Map::new();
    for i in 0..g.n() {
        let list: Vec<usize> = g.in_neighbors(i).map(|j| j + 1).collect();
        map.insert((i + 1).to_string(), json!(list));
    }
    Value::Object(map)
}

pub fn graph_to_json(g: &CommGraph) -> Value {
    json!({ "n": g.n(), "in": in_object(g) })
}

pub fn graph_from_json(v: &Value) -> Result<CommGraph> {
    parse_graph(&v.to_string())
}

pub fn model_to_json(m: &NetworkModel) -> Value {
    let graphs: Vec<Value> = m.iter().map(|g| json!({ "in": in_object(g) })).collect();
    json!({ "n": m.n(), "graphs": graphs })
}

pub fn model_from_json(v: &Value) -> Result<NetworkModel> {
    parse_model(&v.to_string())
}

/// Normalized pretty-printed graph file.
pub fn serialize_graph(g: &CommGraph) -> String {
    let mut s = serde_json::to_string_pretty(&graph_to_json(g)).expect("json value");
    s.push('\n');
    s
}

/// Normalized pretty-printed model file (canonical graph order).
pub fn serialize_model(m: &NetworkModel) -> String {
    let mut s = serde_json::to_string_pretty(&model_to_json(m)).expect("json value");
    s.push('\n');
    s
}

/// Pretty-printed pattern file in sequence order.
pub fn serialize_pattern(graphs: &[CommGraph]) -> Result<String> {
    let n = graphs
        .first()
        .ok_or_else(|| Error::Argument("empty pattern".into()))?
        .n();
    if graphs.iter().any(|g| g.n() != n) {
        return Err(Error::Argument("pattern mixes agent counts".into()));
    }
    let list: Vec<Value> = graphs.iter().map(|g| json!({ "in": in_object(g) })).collect();
    let mut s = serde_json::to_string_pretty(&json!({ "n": n, "graphs": list })).expect("json value");
    s.push('\n');
    Ok(s)
}
