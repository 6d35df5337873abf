//! Deterministic and quasideterministic measurement matrices with certified
//! ℓ2 → ℓ1 restricted isometry, the exact ℓ2 → ℓ4 Golomb embedding, and the
//! spherical-design view of isometric embeddings.

pub mod analysis;
pub mod certify;
pub mod cmx;
pub mod constructors;
pub mod designs;
pub mod error;
pub mod golomb;
pub mod matrix;
pub mod num_theory;
pub mod recovery;
pub mod seed;

pub use error::{Error, Result};
pub use matrix::{Field, Matrix, Meta, Vector};
