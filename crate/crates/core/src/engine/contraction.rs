use serde::Serialize;

use crate::error::{Error, Result};

/// Empirical contraction of a diameter series `s_0, s_1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionEstimate {
    /// `s_t / s_{t-1}` while the predecessor is positive.
    pub ratios: Vec<f64>,
    /// `(s_t / s_0)^{1/t}`, same length as `ratios`.
    pub roots: Vec<f64>,
    pub sup_ratio: f64,
    pub sup_root: f64,
}

/// Per-round ratios and geometric-mean rates. The series must start
/// positive; it is read up to and including its first zero.
pub fn contraction_estimate(series: &[f64]) -> Result<ContractionEstimate> {
    let s0 = *series
        .first()
        .ok_or_else(|| Error::Argument("empty diameter series".into()))?;
    if !(s0 > 0.0) || series.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::Argument(
            "diameter series must be finite, nonnegative and start positive".into(),
        ));
    }
    let mut ratios = Vec::new();
    let mut roots = Vec::new();
    for t in 1..series.len() {
        if series[t - 1] == 0.0 {
            break;
        }
        ratios.push(series[t] / series[t - 1]);
        roots.push((series[t] / s0).powf(1.0 / t as f64));
    }
    Ok(ContractionEstimate {
        sup_ratio: ratios.iter().copied().fold(0.0, f64::max),
        sup_root: roots.iter().copied().fold(0.0, f64::max),
        ratios,
        roots,
    })
}
