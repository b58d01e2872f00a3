use msvp::harness::ScanRecord;
use msvp::vp::Diagnostics;
use msvp::Graph;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identity of the input graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphDigest {
    pub n: usize,
    /// Total edge weight.
    pub m: f64,
    pub edges: usize,
    /// SHA-256 of the canonical edge list (`i j w` per line, `i < j`, sorted).
    pub sha256: String,
}

impl GraphDigest {
    pub fn of(g: &Graph) -> Self {
        Self {
            n: g.node_count(),
            m: g.total_weight(),
            edges: g.edge_count(),
            sha256: hex::encode(Sha256::digest(g.to_edge_list().as_bytes())),
        }
    }
}

/// One optimised partition together with the optimiser's trace.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionRecord {
    #[serde(flatten)]
    pub record: ScanRecord,
    pub diagnostics: Diagnostics,
}

/// Top-level JSON document written by `partition` and `scan`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport<P, R> {
    pub version: &'static str,
    pub graph: GraphDigest,
    pub params: P,
    pub records: Vec<R>,
    pub timing_ms: u64,
}
