//! Truncated constrained Hardy spaces on the disk and the annulus.

pub mod boundary;
pub mod chain;
pub mod config;
pub mod error;
pub mod linalg;
pub mod report;
pub mod rkhs;
pub mod series;
pub mod szego;
pub mod toeplitz;

pub use error::{Error, Result};
