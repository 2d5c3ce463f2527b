//! Spectral neuro-symbolic reasoning.
//!
//! Knowledge graphs are filtered in their Laplacian eigenbasis by learnable
//! Chebyshev filters and spectral rule templates, thresholded into
//! predicates, and handed to a forward-chaining Horn clause engine.

pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod laplacian;
pub mod pipeline;
pub mod rules;
pub mod sparse;
pub mod spectral;
pub mod symbolic;
pub mod trainer;

pub use error::{Error, Result};
