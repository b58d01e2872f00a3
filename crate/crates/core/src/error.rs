use thiserror::Error;

use crate::graph::GraphError;
use crate::metrics::MetricsError;
use crate::objective::ObjectiveError;
use crate::spectral::SpectralError;
use crate::vp::VpError;

/// Any failure surfaced by the orchestration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Vp(#[from] VpError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),
}
