use thiserror::Error;

use crate::dof::DofError;
use crate::linalg::LinalgError;
use crate::network::{NetworkConfig, NetworkError};

/// Failures raised while building or running a transmission scheme.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("scheme needs at least one DL and one UL user, got {0}")]
    UnsupportedTopology(NetworkConfig),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A probability-zero channel event (vanishing gain, rank loss).
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
    #[error(transparent)]
    Allocation(#[from] DofError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}
