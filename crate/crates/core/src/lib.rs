// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact lattice computations for Enriques involutions on K3 surfaces of
//! Barth–Peters type: discriminant forms, genera and masses, Niemeier frames
//! and counts of Enriques involutions modulo automorphisms.

pub mod arith;
pub mod cache;
pub mod definite;
pub mod enriques;
pub mod error;
pub mod forms;
pub mod frames;
pub mod genus;
pub mod lattice;
pub mod matrix;
pub mod niemeier;
pub mod reference;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{DiscriminantForm, FiniteQuadraticForm, NormalForm};
pub use lattice::{Isometry, Lattice, Sublattice};

/// Sets the number of worker threads used by parallel enumerations. Must be
/// called before the first parallel computation; later calls fail.
pub fn set_jobs(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Verification(format!("worker pool: {e}")))
}
