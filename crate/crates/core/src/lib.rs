//! Numerical toolkit for one-shot error bounds of hybrid classical-quantum
//! information transmission through noisy channels with entanglement assistance.

pub mod capacity;
pub mod dataset;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod quantum;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
