use std::path::PathBuf;

use msvp::graph::GraphError;
use msvp::metrics::MetricsError;
use msvp::spectral::SpectralError;
use msvp::Error as CoreError;
use thiserror::Error;

/// Process exit codes. `0` is success; clap's own usage errors also exit with
/// [`exit::USAGE`].
pub mod exit {
    /// Invalid flags or flag values (including grids, times and dimensions
    /// the input cannot support).
    pub const USAGE: i32 = 2;
    /// A file could not be read or written.
    pub const IO: i32 = 3;
    /// A graph or partition file was read but its content is invalid.
    pub const INPUT: i32 = 4;
    /// Two partitions (or a partition and a graph) cover different node sets.
    pub const SIZE_MISMATCH: i32 = 5;
    /// The eigensolver or the optimiser failed.
    pub const COMPUTATION: i32 = 6;
    /// A report could not be serialised.
    pub const SERIALISATION: i32 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        #[source]
        source: GraphError,
    },
    #[error("{path}: line {line}: malformed partition entry: {reason}")]
    PartitionLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}: node {node} has no group (nodes must be 0..n without gaps)")]
    PartitionGap { path: PathBuf, node: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("serialising report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Stable, machine-greppable name of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Graph { source, .. } => graph_kind(source),
            CliError::PartitionLine { .. } => "MalformedLine",
            CliError::PartitionGap { .. } => "MissingNode",
            CliError::Core(e) => core_kind(e),
            CliError::Json(_) => "Serialisation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Graph {
                source: GraphError::Io(_),
                ..
            } => exit::IO,
            CliError::Graph { .. }
            | CliError::PartitionLine { .. }
            | CliError::PartitionGap { .. } => exit::INPUT,
            CliError::Core(e) => match e {
                CoreError::Graph(GraphError::Io(_)) => exit::IO,
                CoreError::Graph(_) => exit::INPUT,
                CoreError::Metrics(_)
                | CoreError::Objective(msvp::objective::ObjectiveError::SizeMismatch { .. }) => {
                    exit::SIZE_MISMATCH
                }
                CoreError::InvalidGrid(_)
                | CoreError::Spectral(SpectralError::DimOutOfRange { .. })
                | CoreError::Spectral(SpectralError::InvalidTime { .. })
                | CoreError::Spectral(SpectralError::ModeBasisMismatch { .. }) => exit::USAGE,
                CoreError::Spectral(_) | CoreError::Vp(_) | CoreError::Objective(_) => {
                    exit::COMPUTATION
                }
            },
            CliError::Json(_) => exit::SERIALISATION,
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<msvp::vp::VpError> for CliError {
    fn from(e: msvp::vp::VpError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<msvp::objective::ObjectiveError> for CliError {
    fn from(e: msvp::objective::ObjectiveError) -> Self {
        CliError::Core(e.into())
    }
}

fn graph_kind(e: &GraphError) -> &'static str {
    match e {
        GraphError::MalformedLine { .. } => "MalformedLine",
        GraphError::NonPositiveWeight { .. } => "NonPositiveWeight",
        GraphError::SelfLoop { .. } => "SelfLoop",
        GraphError::ConflictingDuplicateEdge { .. } => "ConflictingDuplicateEdge",
        GraphError::Disconnected { .. } => "Disconnected",
        GraphError::EmptyGraph => "EmptyGraph",
        GraphError::AsymmetricEdgeList { .. } => "AsymmetricEdgeList",
        GraphError::MissingCommunityLabel { .. } => "MissingCommunityLabel",
        GraphError::InvalidParameters(_) => "InvalidParameters",
        GraphError::GenerationFailed { .. } => "GenerationFailed",
        GraphError::Io(_) => "Io",
    }
}

fn core_kind(e: &CoreError) -> &'static str {
    use msvp::objective::ObjectiveError;
    use msvp::vp::VpError;
    match e {
        CoreError::Graph(g) => graph_kind(g),
        CoreError::Spectral(s) => match s {
            SpectralError::ZeroDegree { .. } => "ZeroDegree",
            SpectralError::EigensolverFailure => "EigensolverFailure",
            SpectralError::DimOutOfRange { .. } => "DimOutOfRange",
            SpectralError::ModeBasisMismatch { .. } => "ModeBasisMismatch",
            SpectralError::InvalidTime { .. } => "InvalidTime",
        },
        CoreError::Objective(o) => match o {
            ObjectiveError::SizeMismatch { .. } => "SizeMismatch",
            ObjectiveError::NonEuclideanEmbedding => "NonEuclideanEmbedding",
        },
        CoreError::Vp(v) => match v {
            VpError::SameGroup { .. } => "SameGroup",
            VpError::LevelCapExceeded { .. } => "LevelCapExceeded",
            VpError::TooLarge { .. } => "TooLarge",
            VpError::EmptyInput => "EmptyInput",
            VpError::InvalidConfig(_) => "InvalidConfig",
        },
        CoreError::Metrics(MetricsError::SizeMismatch { .. }) => "SizeMismatch",
        CoreError::InvalidGrid(_) => "InvalidGrid",
    }
}
