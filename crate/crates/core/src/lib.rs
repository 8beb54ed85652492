//! Locally decodable codes built from irreducible matrix-group
//! representations, together with the entropy machinery that turns them into
//! checked lower bounds on `rank(g - I)`.
//!
//! Everything is exact: scalars live in `GF(p)` or `Q`, code rates are
//! rationals, and every inequality involving `log2` is decided by big-integer
//! power comparisons.

pub mod bounds;
pub mod construct;
pub mod error;
pub mod exactla;
pub mod fixtures;
pub mod grouprep;
pub mod ldc;

pub use error::{Error, Result};
pub use exactla::{Field, Matrix, Scalar, Subspace};
