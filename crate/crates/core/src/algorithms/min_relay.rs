use std::collections::BTreeSet;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

/// Asynchronous relay of the values seen so far; outputs their minimum.
/// An agent broadcasts its set initially and whenever the set grows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MinRelay;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinRelayState {
    pub set: BTreeSet<OrderedFloat<f64>>,
    pub y: OrderedFloat<f64>,
    /// A broadcast of the current set is pending.
    pub dirty: bool,
}

impl MinRelay {
    pub fn init(&self, input: f64) -> MinRelayState {
        MinRelayState {
            set: BTreeSet::from([OrderedFloat(input)]),
            y: OrderedFloat(input),
            dirty: true,
        }
    }

    /// Merges a received set; returns whether the local set grew.
    pub fn receive(&self, state: &mut MinRelayState, incoming: &BTreeSet<OrderedFloat<f64>>) -> bool {
        if incoming.is_subset(&state.set) {
            return false;
        }
        state.set.extend(incoming.iter().copied());
        state.y = *state.set.first().expect("never empty");
        state.dirty = true;
        true
    }

    /// The set to broadcast, if one is pending.
    pub fn take_broadcast(&self, state: &mut MinRelayState) -> Option<BTreeSet<OrderedFloat<f64>>> {
        if state.dirty {
            state.dirty = false;
            Some(state.set.clone())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grows_and_tracks_minimum() {
        let mut s = MinRelay.init(3.0);
        assert_eq!(MinRelay.take_broadcast(&mut s).unwrap().len(), 1);
        assert!(MinRelay.take_broadcast(&mut s).is_none());
        let incoming = BTreeSet::from([OrderedFloat(1.0), OrderedFloat(5.0)]);
        assert!(MinRelay.receive(&mut s, &incoming));
        assert_eq!(s.y, OrderedFloat(1.0));
        assert!(!MinRelay.receive(&mut s, &BTreeSet::from([OrderedFloat(5.0)])));
        assert_eq!(MinRelay.take_broadcast(&mut s).unwrap().len(), 3);
    }
}
