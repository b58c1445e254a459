//! Node-adaptive feature smoothing (NAFS): training-free node embeddings.
//!
//! The pipeline propagates node features through normalized adjacency
//! operators `Â_r = D̃^(r-1) (A + I) D̃^(-r)`, weights every propagation depth
//! per node by how far it still is from the over-smoothed limit, and pools the
//! results of several operators. [`evaluation`] scores the embeddings on node
//! clustering and link prediction.

pub mod cli;
pub mod dataio;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod matrix;
pub mod smoothing;

pub use ensemble::{nafs_ensemble, EnsembleConfig, EnsembleStrategy};
pub use error::{NafsError, Result};
pub use graph::{generate_er, normal_features, ComponentMap, Graph, NormalizedOperator};
pub use matrix::{DenseMatrix, Embedding, FeatureMatrix};
pub use smoothing::{nafs_single, DistanceMode, SmoothingConfig, Weighting};
