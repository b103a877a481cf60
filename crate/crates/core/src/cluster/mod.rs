//! Relation discovery: NGD distances between top terms and a deterministic
//! ant-style hierarchical clustering over them.

mod matrix;
mod ngd;
mod tta;

pub use matrix::{build_distance_matrix, DistanceMatrix};
pub use ngd::{ngd_distance, HitCountProvider};
pub use tta::{
    isolate_outliers, label_concepts, medoid, tta_cluster, tta_cluster_traced, ClusterNode, ClusterParams, NodeKind,
    PassTrace,
};
