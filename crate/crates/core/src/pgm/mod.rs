//! Status-data analysis: Pearson grouping of nodes, Chow-Liu tree learning
//! over group representatives, and exact inference on the tree.

mod correlation;
mod tree;

pub use correlation::{pearson_matrix, variable_grouping, CorrelationMatrix, Group, GroupKind, GroupPartition};
pub use tree::{
    chow_liu_fit, mutual_information, tree_condition, ChowLiuTree, Evidence, TreeEdge, TreeInference, DEFAULT_ALPHA,
};

use crate::error::Result;
use crate::propagation::StatusDataset;

/// Grouping threshold used when nothing else is configured.
pub const DEFAULT_XI: f64 = 0.9;

/// A fitted tree together with the correlations needed to score any node
/// through its representative.
#[derive(Clone, Debug)]
pub struct FittedPgm {
    pub tree: ChowLiuTree,
    pub correlation: CorrelationMatrix,
}

impl FittedPgm {
    /// Groups the dataset's nodes and fits a tree over the representatives.
    pub fn fit(d: &StatusDataset, xi: f64, alpha: f64) -> Result<Self> {
        let correlation = pearson_matrix(d)?;
        let partition = variable_grouping(d, &correlation, xi)?;
        let tree = chow_liu_fit(d, &partition, alpha)?;
        Ok(FittedPgm { tree, correlation })
    }

    pub fn partition(&self) -> &GroupPartition {
        &self.tree.partition
    }

    /// Pearson weight between `u` and its representative. Nodes in constant
    /// groups get weight 1.
    pub fn weight(&self, u: crate::network::NodeId) -> f64 {
        let g = self.partition().group_of(u);
        match g.kind {
            GroupKind::Correlated => self.correlation.get(u, g.representative).unwrap_or(1.0),
            GroupKind::AlwaysActive | GroupKind::NeverActive => 1.0,
        }
    }
}
