use std::fs;
use std::path::Path;

use conlab::engine::{Algorithm, Execution};
use conlab::{Error, Result};
use serde_json::Value;

use crate::{Common, Format};

/// One line of a per-round CSV series.
pub struct TraceRow {
    pub round: usize,
    pub graph_id: Option<usize>,
    pub outputs: Vec<Vec<f64>>,
    pub delta: f64,
    pub delta_lb: Option<f64>,
    pub delta_ub: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// JSON number, or the string `"inf"` / `"-inf"` when infinite.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(fmt_num(x))
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Rows of an execution, lower and upper bounds filled in where known.
pub fn execution_rows<A: Algorithm>(
    alg: &A,
    exec: &Execution<A::State>,
    bounds: impl Fn(usize) -> Option<(f64, f64)>,
) -> Vec<TraceRow> {
    (0..=exec.len())
        .map(|t| {
            let b = bounds(t);
            TraceRow {
                round: t,
                graph_id: if t == 0 { None } else { exec.rounds[t - 1].graph_id },
                outputs: exec.config(t).states.iter().map(|s| alg.output(s).to_vec()).collect(),
                delta: exec.deltas[t],
                delta_lb: b.map(|b| b.0),
                delta_ub: b.map(|b| b.1),
                ratio: (t > 0 && exec.deltas[t - 1] > 0.0).then(|| exec.deltas[t] / exec.deltas[t - 1]),
            }
        })
        .collect()
}

pub fn csv(rows: &[TraceRow]) -> Result<String> {
    let n = rows.first().map_or(0, |r| r.outputs.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["round".to_string(), "graph_id".to_string()];
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.extend(["delta", "delta_lb", "delta_ub", "ratio"].map(String::from));
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![
            r.round.to_string(),
            r.graph_id.map(|g| g.to_string()).unwrap_or_default(),
        ];
        rec.extend(r.outputs.iter().map(|p| {
            p.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(";")
        }));
        rec.extend([fmt_num(r.delta), opt(r.delta_lb), opt(r.delta_ub), opt(r.ratio)]);
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

/// Writes through a temporary file and a rename.
fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Argument(format!("cannot write {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, content).map_err(io)?;
    fs::rename(&tmp, dir.join(name)).map_err(io)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

/// Emits a run's results: every file into `--out-dir` if given, otherwise
/// the CSV trace or the JSON summary on stdout.
pub fn finish(
    common: &Common,
    trace: Option<String>,
    summary: &Value,
    extra: &[(&str, String)],
) -> Result<()> {
    match &common.out_dir {
        Some(dir) => {
            if let Some(t) = &trace {
                write_atomic(dir, "trace.csv", t)?;
            }
            for (name, content) in extra {
                write_atomic(dir, name, content)?;
            }
            write_atomic(dir, "summary.json", &pretty(summary))
        }
        None => {
            let format = common
                .format
                .unwrap_or(if trace.is_some() { Format::Csv } else { Format::Json });
            match (format, trace) {
                (Format::Csv, Some(t)) => print!("{t}"),
                (Format::Csv, None) => {
                    return Err(Error::Argument("this command has no CSV output".into()))
                }
                (Format::Json, _) => print!("{}", pretty(summary)),
            }
            Ok(())
        }
    }
}
