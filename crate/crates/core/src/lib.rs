//! Spectral clustering on a refined k-nearest-neighbor graph.
//!
//! The pipeline keeps every data point but prunes the k-nn graph hard:
//!
//! 1. [`knn_graph`] builds an exact k-nn table with a kd-tree, cuts each
//!    point's neighbor list where the running mean + standard deviation of
//!    its distances leaves the baseline distribution, and keeps only edges
//!    both endpoints agree on.
//! 2. [`affinity`] weights the surviving edges with locally scaled
//!    similarities and forms `D^-1/2 A D^-1/2`.
//! 3. [`eigen`] computes the leading eigenpairs of that operator.
//! 4. [`spectral`] picks the number of clusters from the eigenvalue
//!    spectrum, runs [`kmeans`] in a sweep of embeddings and keeps the
//!    labeling that cuts the least affinity weight.
//!
//! [`dataset`] loads, generates and perturbs point sets and [`metrics`]
//! scores labelings against ground truth.

pub mod affinity;
pub mod dataset;
pub mod eigen;
mod error;
pub mod kmeans;
pub mod knn_graph;
pub mod metrics;
pub mod rng;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};

pub use affinity::{build_affinity, local_scales, normalized_operator, AffinityMatrix, NormalizedOperator};
pub use dataset::{generate, inject_noise, load_csv, GeneratorSpec, PointSet, Shape};
pub use eigen::{decompose, EigenSystem};
pub use kmeans::{kmeans, KMeansResult};
pub use knn_graph::{build_neighbor_table, NeighborTable, RefinedGraph};
pub use spectral::{cluster, ClusterConfig, ClusterCount, ClusteringReport};
