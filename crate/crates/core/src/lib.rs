//! Multiscale community detection as max-sum vector partitioning.
//!
//! Nodes of a weighted undirected graph are embedded as time-dependent
//! vectors built from the eigenvectors of the random-walk transition matrix.
//! Markov Stability of a partition equals the sum over groups of the squared
//! length of each group's sum vector; linearised stability and modularity are
//! the same problem under an indefinite (pseudo-Euclidean) quadratic form.
//! Partitions are optimised by a Louvain-style agglomeration over vectors.
//!
//! ```
//! use msvp::{graph, spectral, vp};
//!
//! let g = graph::pair_graph();
//! let basis = spectral::decompose_transition(&g).unwrap();
//! let emb = spectral::build_embedding(&basis, spectral::EmbeddingMode::Exponential, 5.0, 3).unwrap();
//! let out = vp::partition_vectors(&emb, &vp::VPConfig::default()).unwrap();
//! assert_eq!(out.partition.labels(), &[0, 0, 1, 1]);
//! ```

pub mod error;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod objective;
pub mod partition;
pub mod spectral;
pub mod vp;

pub use error::Error;
pub use graph::{Graph, GroundTruth};
pub use partition::Partition;
pub use spectral::{Embedding, EmbeddingMode, SpectralBasis};
