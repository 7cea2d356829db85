//! Typicality rankings, prototypical-organization maps, the continuity check
//! and the clustering evaluation.

pub mod kmeans;
pub mod metrics;
pub mod organization;
pub mod ranking;
pub mod sweep;

pub use kmeans::{kmeans, KMeansResult};
pub use metrics::{cluster_metrics, ClusterReport, ClusterScores};
pub use organization::{
    map_gamma, map_rho, verify_continuity_bound, ContinuityReport, OrganizationPoint, PointSource,
};
pub use ranking::{
    closest, closest_and_farthest, farthest, rank_members, rank_signatures, RankingEntry,
};
pub use sweep::cluster_eval_sweep;
