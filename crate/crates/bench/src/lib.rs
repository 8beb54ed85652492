//! Shared inputs for the criterion benches.

use rep2ldc::grouprep::{ElemRef, MatrixGroup};
use rep2ldc::{Field, Matrix};

/// First element with `rank(rho(h) - I) = 1`.
pub fn reflection(group: &MatrixGroup) -> ElemRef {
    group
        .refs()
        .find(|&h| group.minus_identity(h).rank() == 1)
        .expect("group has a reflection")
}

/// A dense `n x n` matrix with entries `(i * i + 3 j + 1) mod 7`, lifted to `field`.
pub fn dense(field: Field, n: usize) -> Matrix {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| ((i * i + 3 * j + 1) % 7) as i64).collect())
        .collect();
    Matrix::from_i64(field, &rows)
}
