//! BIRCH clustering: clustering features, the CF-tree, and a global
//! refinement pass producing exactly `k` clusters from the leaf entries.

mod cf;
mod global;
mod tree;

pub use cf::{cf_from_point, cf_merge, ClusteringFeature};
pub use global::{global_cluster, GlobalClustering};
pub use tree::{CfTree, LeafEntry, TreeAudit};
