//! Exact localization computations for the Futaki invariant of a Kähler
//! blowup at a nondegenerate zero of a holomorphic vector field.
//!
//! Everything is exact rational arithmetic. The pipeline starts from the
//! Jordan data of the linearization at the blown-up point, lifts the field to
//! the first blowup chart, builds certificate matrices for the degenerate
//! zeros on the exceptional divisor, evaluates their residues, and checks the
//! resulting `eps`-expansion of the Futaki defect order by order.

pub mod bmatrix;
pub mod combinat;
pub mod error;
pub mod futaki;
pub mod gksums;
pub mod jordan;
pub mod kernel;
pub mod residues;
pub mod sampling;

pub use error::{Error, Result};
