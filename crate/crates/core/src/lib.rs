//! Cusp resolutions, vanishing thresholds and Sturm certificates for
//! Hilbert modular forms over real quadratic fields.

pub mod bounds;
pub mod cuspres;
pub mod error;
pub mod fourier;
pub mod ideals;
pub mod invariants;
pub mod qfield;
pub mod qforms;
pub mod sturmcheck;

pub use error::{Error, Result};
