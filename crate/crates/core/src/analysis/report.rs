use serde::Serialize;

use super::{
    alpha_diameter, alpha_star, asymptotic_solvable, beta_classes, consensus_solvable,
    AlphaDiameter, Partition,
};
use crate::graphs::NetworkModel;

/// Structural summary of a network model. Graph indices are 0-based
/// positions in the model's canonical order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub graphs: usize,
    pub rooted: Vec<bool>,
    pub nonsplit: Vec<bool>,
    pub asymptotic_solvable: bool,
    pub alpha_star_blocks: Partition,
    pub beta_blocks: Partition,
    pub consensus_solvable: bool,
    pub alpha_diameter: AlphaDiameter,
}

pub fn analyze(model: &NetworkModel) -> AnalysisReport {
    AnalysisReport {
        n: model.n(),
        graphs: model.len(),
        rooted: model.iter().map(|g| g.is_rooted()).collect(),
        nonsplit: model.iter().map(|g| g.is_nonsplit()).collect(),
        asymptotic_solvable: asymptotic_solvable(model),
        alpha_star_blocks: alpha_star(model),
        beta_blocks: beta_classes(model),
        consensus_solvable: consensus_solvable(model),
        alpha_diameter: alpha_diameter(model),
    }
}
