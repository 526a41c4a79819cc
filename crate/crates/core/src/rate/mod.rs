//! Finite-SNR sum rates by Monte Carlo simulation.
//!
//! Four systems are compared: the two full-duplex (FD) alignment schemes and
//! a half-duplex (HD) TDD baseline under each CSI model. Rates are
//! Gaussian-input mutual informations in bits per slot, with every
//! interference term treated as Gaussian noise. Noise has unit power, so the
//! transmit power `P` is also the SNR.
//!
//! Trials are independent and run in parallel. Per-trial results are
//! collected in trial order before any summation, so a sweep is a pure
//! function of its inputs.

mod fd;
pub mod geometry;
pub mod multicell;
pub mod scheduler;
pub mod single_cell;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::SchemeError;
use crate::network::{NetworkConfig, NetworkError};

pub use multicell::{multicell_samples, multicell_sweep, MulticellRow, MulticellScenario};
pub use scheduler::Scheduler;
pub use single_cell::{
    fd_rate_single_trial, hd_rate_single_trial, high_snr_slope, single_cell_samples, single_cell_sweep,
    SingleCellScenario, SweepRow,
};
pub use stats::Summary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsiModel {
    NoCsit,
    PartialCsit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Duplex {
    FdProposed,
    HdTdd,
}

/// A (duplex, CSI model) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    FdPartial,
    FdNoCsit,
    HdPartial,
    HdNoCsit,
}

impl System {
    pub const ALL: [System; 4] = [System::FdPartial, System::FdNoCsit, System::HdPartial, System::HdNoCsit];

    pub fn new(duplex: Duplex, model: CsiModel) -> Self {
        match (duplex, model) {
            (Duplex::FdProposed, CsiModel::PartialCsit) => System::FdPartial,
            (Duplex::FdProposed, CsiModel::NoCsit) => System::FdNoCsit,
            (Duplex::HdTdd, CsiModel::PartialCsit) => System::HdPartial,
            (Duplex::HdTdd, CsiModel::NoCsit) => System::HdNoCsit,
        }
    }

    pub fn duplex(self) -> Duplex {
        match self {
            System::FdPartial | System::FdNoCsit => Duplex::FdProposed,
            System::HdPartial | System::HdNoCsit => Duplex::HdTdd,
        }
    }

    pub fn model(self) -> CsiModel {
        match self {
            System::FdPartial | System::HdPartial => CsiModel::PartialCsit,
            System::FdNoCsit | System::HdNoCsit => CsiModel::NoCsit,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::FdPartial => "fd-partial",
            System::FdNoCsit => "fd-no-csit",
            System::HdPartial => "hd-partial",
            System::HdNoCsit => "hd-no-csit",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        System::ALL
            .into_iter()
            .find(|sys| sys.name() == s)
            .ok_or_else(|| RateError::InvalidScenario(format!("unknown system '{s}' (expected fd-partial, fd-no-csit, hd-partial or hd-no-csit)")))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RateError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl From<NetworkError> for RateError {
    fn from(e: NetworkError) -> Self {
        RateError::Scheme(e.into())
    }
}

impl From<crate::linalg::LinalgError> for RateError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        RateError::Scheme(e.into())
    }
}

/// Per-link rates of one trial, in bits per slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    /// One entry per DL user of the configuration; users left unserved get 0.
    pub per_dl_rates: Vec<f64>,
    /// One entry per UL user. Under joint decoding the split follows
    /// successive decoding in user order, which sums to the joint rate.
    pub per_ul_rates: Vec<f64>,
    pub sum_rate: f64,
    pub metadata: ReportMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub system: System,
    pub config: NetworkConfig,
    pub snr_db: f64,
    pub residual_si_power: f64,
    pub seed: u64,
    pub trials: usize,
}

impl RateReport {
    pub(crate) fn new(per_dl_rates: Vec<f64>, per_ul_rates: Vec<f64>, metadata: ReportMetadata) -> Self {
        let sum_rate = per_dl_rates.iter().chain(&per_ul_rates).sum();
        RateReport { per_dl_rates, per_ul_rates, sum_rate, metadata }
    }
}

/// `10^(dB/10)`; `-inf` maps to 0.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Attempts per trial before a degenerate channel draw is reported.
pub const RETRY_BUDGET: u64 = 4;

/// Trial index used for retry `attempt` of trial `trial`.
pub(crate) fn retry_trial(trial: u64, attempt: u64) -> u64 {
    trial | (attempt << 48)
}

/// Runs `f` on successive retry indices until it stops failing with a
/// degenerate channel.
pub(crate) fn with_retries<T>(trial: u64, mut f: impl FnMut(u64) -> Result<T, RateError>) -> Result<T, RateError> {
    let mut last = None;
    for attempt in 0..RETRY_BUDGET {
        match f(retry_trial(trial, attempt)) {
            Err(RateError::Scheme(SchemeError::DegenerateChannel(msg))) => last = Some(msg),
            other => return other,
        }
    }
    Err(RateError::Scheme(SchemeError::DegenerateChannel(format!(
        "trial {trial}: {} after {RETRY_BUDGET} attempts",
        last.unwrap_or_default()
    ))))
}
