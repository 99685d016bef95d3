//! Laboratory for asymptotic and approximate consensus on dynamic directed
//! networks.

pub mod algorithms;
pub mod analysis;
pub mod async_sim;
pub mod engine;
pub mod error;
pub mod graphs;

pub use error::{Error, Result};
