//! Linear and nonlinear AC response of disordered lattice fermions.

pub mod dynamics;
pub mod config;
pub mod error;
pub mod lattice;
pub mod measure;
pub mod pipeline;
pub mod quad;
pub mod response;
pub mod spectral;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};

use rayon::prelude::*;

/// Order-preserving parallel map.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}
