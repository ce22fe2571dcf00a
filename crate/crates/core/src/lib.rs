//! Exact Arakelov slopes of Euclidean lattices over the integers, the
//! calculus of rational filtrations, GIT semistability of tensors via
//! Kempf minimization, and randomized verification campaigns.

pub mod error;
pub mod exactnum;
pub mod linalg;
pub mod lattice;
pub mod filtration;
pub mod gitstab;
pub mod invariants;
pub mod harness;

pub use error::{Error, Result};
pub use exactnum::{LogValue, Rational};
