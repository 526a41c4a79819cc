//! Blind interference alignment for full-duplex cellular networks whose base
//! station carries reconfigurable (mode-switching) transmit and receive
//! antennas.
//!
//! The crate covers the closed-form sum degrees of freedom, the two
//! transmission schemes that achieve them (one for a BS without transmit CSI,
//! one for a BS with its own DL CSI), numerical checks of the rank claims the
//! schemes rely on, and a Monte Carlo rate engine comparing the schemes with a
//! half-duplex TDD baseline in single-cell and 7-cell layouts.

pub mod dof;
pub mod error;
pub mod linalg;
pub mod network;
pub mod no_csit;
pub mod partial_csit;
pub mod rate;
pub mod rng;
pub mod verify;
