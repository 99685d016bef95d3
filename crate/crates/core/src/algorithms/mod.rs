//! Consensus algorithms as transition functions.

mod amortized;
mod any;
mod approx;
mod mass_split;
mod midpoint;
mod min_relay;
mod thirds;

pub use amortized::{AmortizedMidpoint, AmortizedState};
pub use any::{AnyAlgorithm, AnyState};
pub use approx::{approx_wrapper, decision_round, Approx, DecisionState, Regime};
pub use mass_split::MassSplit;
pub use midpoint::Midpoint;
pub use min_relay::{MinRelay, MinRelayState};
pub use thirds::Thirds;

use serde::{Deserialize, Serialize};

use crate::engine::Point;

/// State holding only the output variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointState {
    pub y: Point,
}

/// Coordinate-wise minimum and maximum of a nonempty set of points.
pub(crate) fn bounds<'a>(points: impl Iterator<Item = &'a [f64]>) -> (Point, Point) {
    let mut lo: Option<Point> = None;
    let mut hi: Option<Point> = None;
    for p in points {
        match (&mut lo, &mut hi) {
            (Some(l), Some(h)) => {
                for (k, &x) in p.iter().enumerate() {
                    l[k] = l[k].min(x);
                    h[k] = h[k].max(x);
                }
            }
            _ => {
                lo = Some(p.to_vec());
                hi = Some(p.to_vec());
            }
        }
    }
    (lo.expect("nonempty"), hi.expect("nonempty"))
}

pub(crate) fn midpoint_of(lo: &[f64], hi: &[f64]) -> Point {
    lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect()
}
