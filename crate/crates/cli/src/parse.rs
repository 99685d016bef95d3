use std::path::Path;

use conlab::async_sim::DelayPolicy;
use conlab::engine::{
    Constant, Cyclic, GraphClass, IidRandom, PatternSource, Point, RandomClass, Recorded,
    SigmaConcat,
};
use conlab::graphs::{parse_graph, parse_model, parse_pattern, NetworkModel};
use conlab::{Error, Result};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

pub fn load_model(model: Option<&Path>, graph: Option<&Path>) -> Result<Option<NetworkModel>> {
    match (model, graph) {
        (Some(m), _) => Ok(Some(parse_model(&read(m)?)?)),
        (None, Some(g)) => Ok(Some(NetworkModel::singleton(parse_graph(&read(g)?)?))),
        (None, None) => Ok(None),
    }
}

fn number(s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Argument(format!("not a number: {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Argument(format!("not a finite number: {s:?}")));
    }
    Ok(x)
}

/// `0,1,0.5` gives scalar inputs; `0,1;2,3` gives one point per `;` part.
pub fn inputs(spec: &str) -> Result<Vec<Point>> {
    let agents: Vec<Point> = if spec.contains(';') {
        spec.split(';')
            .map(|p| p.split(',').map(number).collect())
            .collect::<Result<_>>()?
    } else {
        spec.split(',').map(|x| number(x).map(|v| vec![v])).collect::<Result<_>>()?
    };
    if agents.is_empty() {
        return Err(Error::Argument("no inputs".into()));
    }
    Ok(agents)
}

fn indices(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Argument(format!("not an index: {s:?}")))
        })
        .collect()
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Argument(format!("--seed is required for {what}")))
}

fn need_model<'a>(model: Option<&'a NetworkModel>, what: &str) -> Result<&'a NetworkModel> {
    model.ok_or_else(|| Error::Argument(format!("pattern '{what}' needs --model or --graph")))
}

fn graph_at(model: &NetworkModel, i: usize) -> Result<conlab::graphs::CommGraph> {
    if i >= model.len() {
        return Err(Error::Argument(format!(
            "graph index {i} outside 0..{} (canonical model order)",
            model.len()
        )));
    }
    Ok(model.get(i).clone())
}

/// Builds a pattern source; graph indices refer to the canonical model order.
pub fn pattern(
    spec: &str,
    model: Option<&NetworkModel>,
    n: usize,
    edge_prob: f64,
    seed: Option<u64>,
) -> Result<Box<dyn PatternSource>> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    Ok(match (kind, arg) {
        ("constant", Some(i)) => {
            let m = need_model(model, kind)?;
            let g = graph_at(m, indices(i)?[0])?;
            Box::new(Constant::in_model(m.clone(), g)?)
        }
        ("cyclic", Some(list)) => {
            let m = need_model(model, kind)?;
            let gs = indices(list)?
                .into_iter()
                .map(|i| graph_at(m, i))
                .collect::<Result<Vec<_>>>()?;
            Box::new(Cyclic::in_model(m.clone(), gs)?)
        }
        ("iid", None) => Box::new(IidRandom::new(
            need_model(model, kind)?.clone(),
            need_seed(seed, "iid patterns")?,
        )),
        ("sigma", None) => Box::new(SigmaConcat::random(n, need_seed(seed, "sigma patterns")?)?),
        ("sigma", Some(list)) => Box::new(SigmaConcat::fixed(n, indices(list)?)?),
        ("recorded", Some(path)) => {
            let graphs = parse_pattern(&read(Path::new(path))?)?;
            match model {
                Some(m) => Box::new(Recorded::in_model(m.clone(), graphs)?),
                None => Box::new(Recorded::new(graphs)?),
            }
        }
        ("rooted", None) => Box::new(RandomClass::new(
            n,
            GraphClass::Rooted,
            edge_prob,
            need_seed(seed, "random rooted patterns")?,
        )?),
        ("nonsplit", None) => Box::new(RandomClass::new(
            n,
            GraphClass::NonSplit,
            edge_prob,
            need_seed(seed, "random non-split patterns")?,
        )?),
        _ => return Err(Error::Argument(format!("unknown pattern {spec:?}"))),
    })
}

pub fn delays(spec: &str, seed: Option<u64>) -> Result<DelayPolicy> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("constant", Some(d)) => Ok(DelayPolicy::Constant(number(d)?)),
        ("uniform", None) => Ok(DelayPolicy::Uniform {
            seed: need_seed(seed, "random delays")?,
        }),
        ("lattice", Some(steps)) => Ok(DelayPolicy::Lattice {
            seed: need_seed(seed, "random delays")?,
            steps: steps
                .parse()
                .map_err(|_| Error::Argument(format!("not a step count: {steps:?}")))?,
        }),
        _ => Err(Error::Argument(format!("unknown delay policy {spec:?}"))),
    }
}
