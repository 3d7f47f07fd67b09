//! Exact cluster combinatorics of valued quivers.
//!
//! The crate computes real Schur roots, semi-invariant stability domains,
//! c-vectors and reduced weights for hereditary algebras given as valued
//! quivers, and cross-checks them against a finite-field representation
//! oracle that computes genuine Hom and Ext spaces.

#![allow(clippy::needless_range_loop)]

pub mod braid;
pub mod cluster;
pub mod error;
pub mod exec;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod picture;
pub mod quiver;
pub mod report;
pub mod stability;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::{IntMatrix, IntVector};
pub use quiver::{EulerData, ValuedQuiver};

/// Version string embedded in reports and cache entries.
pub const TOOL_VERSION: &str = concat!("modroot ", env!("CARGO_PKG_VERSION"));
