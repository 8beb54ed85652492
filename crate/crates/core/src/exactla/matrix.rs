use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{Field, FieldJson, Scalar};
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Dense row-major matrix over a [`Field`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar_identity(n: usize, lambda: &Scalar) -> Self {
        let field = lambda.field();
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, lambda.clone());
        }
        m
    }

    /// Builds a matrix from rows of scalars. Every row must have the same
    /// length; an empty row list gives a `0 x 0` matrix.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, rows, cols)
    }

    pub fn from_rows_with_cols(field: Field, rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::FieldMismatch(format!("entry over {} in matrix over {field}", s.field())));
                }
                entries.push(s);
            }
        }
        Ok(Matrix {
            field,
            rows: n,
            cols,
            entries,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, rows).expect("ragged integer rows")
    }

    /// `n x k` matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, n: usize, cols: &[Vec<Scalar>]) -> Result<Self> {
        let mut m = Self::zeros(field, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {n}",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn diagonal(field: Field, diag: &[i64]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, field.from_i64(d));
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.field(), self.field);
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on shape or field mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("incompatible matrix product")
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Reduced row-echelon form. Pivots are the first nonzero entry found
    /// scanning columns left to right.
    pub fn rref(&self) -> Rref {
        let mut rows = self.row_vectors();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][c].inv().expect("nonzero pivot");
            for v in rows[r].iter_mut() {
                *v = &*v * &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !pv.is_zero() {
                        *v = &*v - &(&factor * pv);
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        let reduced = Matrix::from_rows_with_cols(self.field, rows, self.cols).expect("shape preserved");
        Rref {
            reduced,
            rank: r,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Right kernel `{v : Mv = 0}`.
    pub fn nullspace(&self) -> Subspace {
        let Rref {
            reduced, pivot_cols, ..
        } = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivot_cols {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); n];
            v[free] = self.field.one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -reduced.get(row, free);
            }
            basis.push(v);
        }
        Subspace::span(self.field, n, basis).expect("kernel vectors have ambient length")
    }

    /// Factors a nonzero `D` as `Y * X^t` with `Y`, `X` both `n x R` of full
    /// column rank `R = rank(D)`.
    ///
    /// `Y` holds the columns of `D` at the pivot columns of its RREF, and
    /// `X^t` is the nonzero block of that RREF.
    pub fn rank_factorize(&self) -> Result<(Matrix, Matrix)> {
        if self.is_zero() {
            return Err(Error::ZeroMatrix);
        }
        let Rref {
            reduced,
            rank,
            pivot_cols,
        } = self.rref();
        let y_cols: Vec<Vec<Scalar>> = pivot_cols.iter().map(|&c| self.column(c)).collect();
        let y = Matrix::from_columns(self.field, self.rows, &y_cols)?;
        let xt_rows: Vec<Vec<Scalar>> = (0..rank).map(|i| reduced.row(i).to_vec()).collect();
        let x = Matrix::from_rows_with_cols(self.field, xt_rows, self.cols)?.transpose();
        Ok((y, x))
    }

    /// Column span as a subspace of `F^rows`.
    pub fn column_space(&self) -> Subspace {
        Subspace::span(self.field, self.rows, self.column_vectors()).expect("columns have ambient length")
    }

    /// Row-major vectorization into `F^(rows*cols)`.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.entries.clone()
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// Standard bilinear form `u^t w`.
pub fn dot(u: &[Scalar], w: &[Scalar]) -> Scalar {
    assert_eq!(u.len(), w.len(), "dot product length mismatch");
    let mut it = u.iter().zip(w);
    let Some((a, b)) = it.next() else {
        panic!("dot product of empty vectors has no field");
    };
    let mut acc = a * b;
    for (a, b) in it {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * b);
        }
    }
    acc
}

pub fn vec_sub(u: &[Scalar], w: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(u.len(), w.len());
    u.iter().zip(w).map(|(a, b)| a - b).collect()
}

pub fn vec_scale(u: &[Scalar], c: &Scalar) -> Vec<Scalar> {
    u.iter().map(|a| a * c).collect()
}

pub fn vec_axpy(acc: &mut [Scalar], c: &Scalar, u: &[Scalar]) {
    assert_eq!(acc.len(), u.len());
    for (a, b) in acc.iter_mut().zip(u) {
        *a = &*a + &(c * b);
    }
}

pub fn unit_vector(field: Field, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// One JSON matrix/vector entry: a residue/integer or an `"a/b"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    UInt(u64),
    Int(i64),
    Str(String),
}

impl EntryJson {
    pub fn from_scalar(s: &Scalar) -> Self {
        match s {
            Scalar::Fp { value, .. } => EntryJson::UInt(*value),
            Scalar::Q(r) => EntryJson::Str(super::field::format_rational(r)),
        }
    }

    pub fn to_scalar(&self, field: Field) -> Result<Scalar> {
        match self {
            EntryJson::UInt(v) => Ok(field.from_u64(*v)),
            EntryJson::Int(v) => Ok(field.from_i64(*v)),
            EntryJson::Str(s) => field.parse_scalar(s),
        }
    }
}

pub fn vector_to_json(v: &[Scalar]) -> Vec<EntryJson> {
    v.iter().map(EntryJson::from_scalar).collect()
}

pub fn vector_from_json(field: Field, v: &[EntryJson]) -> Result<Vec<Scalar>> {
    v.iter().map(|e| e.to_scalar(field)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: FieldJson,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<EntryJson>>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            field: m.field.into(),
            rows: m.rows,
            cols: m.cols,
            entries: (0..m.rows).map(|i| vector_to_json(m.row(i))).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Matrix> {
        let field = Field::try_from(j.field)?;
        if j.entries.len() != j.rows {
            return Err(Error::Parse(format!("expected {} rows, found {}", j.rows, j.entries.len())));
        }
        let rows = j
            .entries
            .iter()
            .map(|r| vector_from_json(field, r))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows_with_cols(field, rows, j.cols).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Matrix::try_from(j).map_err(serde::de::Error::custom)
    }
}
