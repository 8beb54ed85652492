//! Exact arithmetic over `GF(p)` and `Q`, and the linear-algebra kernel the
//! rest of the crate is built on.

pub mod field;
pub mod matrix;
pub mod subspace;

pub use field::{Field, Scalar};
pub use matrix::{dot, unit_vector, vec_axpy, vec_scale, vec_sub, Matrix, Rref};
pub use subspace::Subspace;
