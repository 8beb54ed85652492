use super::field::{Field, Scalar};
use super::matrix::{dot, Matrix};
use crate::error::{Error, Result};

/// A linear subspace of `F^n`, stored as the nonzero rows of an RREF basis.
///
/// Because the RREF of a subspace is unique, two subspaces are equal exactly
/// when their stored bases are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of arbitrary (possibly dependent or zero) vectors.
    pub fn span(field: Field, ambient: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in F^{ambient}",
                v.len()
            )));
        }
        let m = Matrix::from_rows_with_cols(field, vectors, ambient)?;
        Ok(Self::from_rref(m))
    }

    fn from_rref(m: Matrix) -> Self {
        let r = m.rref();
        let field = m.field();
        let rows = (0..r.rank).map(|i| r.reduced.row(i).to_vec()).collect();
        Subspace {
            ambient: m.cols(),
            basis: Matrix::from_rows_with_cols(field, rows, m.cols()).expect("rref rows"),
            pivots: r.pivot_cols,
        }
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// RREF basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vectors()
    }

    /// Residue of `v` after eliminating against the basis pivots.
    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (x, b) in v.iter_mut().zip(self.basis.row(k)) {
                if !b.is_zero() {
                    *x = &*x - &(&c * b);
                }
            }
        }
        v
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Whether `other` is a subspace of `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok((0..other.dim()).all(|i| self.contains_vector(other.basis.row(i))))
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field(), other.field())));
        }
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Sum of a nonempty list of subspaces.
    pub fn sum(spaces: &[&Subspace]) -> Result<Subspace> {
        let first = spaces
            .first()
            .ok_or_else(|| Error::InvalidInput("sum of an empty list of subspaces".into()))?;
        let mut vectors = Vec::new();
        for s in spaces {
            first.check_compatible(s)?;
            vectors.extend(s.basis_vectors());
        }
        Subspace::span(first.field(), first.ambient, vectors)
    }

    /// Image `{g u : u in U}`.
    pub fn apply(&self, g: &Matrix) -> Result<Subspace> {
        if g.field() != self.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", g.field(), self.field())));
        }
        if g.cols() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to subspace of F^{}",
                g.rows(),
                g.cols(),
                self.ambient
            )));
        }
        let images = (0..self.dim()).map(|i| g.mul_vec(self.basis.row(i))).collect();
        Subspace::span(self.field(), g.rows(), images)
    }

    /// `{w : u^t w = 0 for all u in U}`. Over a prime field this may meet `U`
    /// nontrivially; only the dimension identity is guaranteed.
    pub fn orth_complement(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.field(), self.ambient);
        }
        self.basis.nullspace()
    }

    /// Whether `w` is orthogonal to every vector of the subspace.
    pub fn is_orthogonal_to(&self, w: &[Scalar]) -> bool {
        (0..self.dim()).all(|i| dot(self.basis.row(i), w).is_zero())
    }
}

/// Incrementally grown echelon basis, used where a span is built one vector
/// at a time and may stop early.
#[derive(Debug, Clone)]
pub(crate) struct EchelonBuilder {
    field: Field,
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl EchelonBuilder {
    pub fn new(field: Field, ambient: usize) -> Self {
        EchelonBuilder {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the current rows; returns whether it
    /// was added.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (x, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x = &*x - &(&c * b);
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero");
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn finish(self) -> Subspace {
        Subspace::span(self.field, self.ambient, self.rows).expect("rows have ambient length")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::matrix::unit_vector;

    fn gf(p: u64) -> Field {
        Field::Prime(p)
    }

    fn line(f: Field, n: usize, i: usize) -> Subspace {
        Subspace::span(f, n, vec![unit_vector(f, n, i)]).unwrap()
    }

    #[test]
    fn orth_complement_examples() {
        let f = gf(5);
        let e1 = line(f, 3, 0);
        let c = e1.orth_complement();
        assert_eq!(c, Subspace::span(f, 3, vec![unit_vector(f, 3, 1), unit_vector(f, 3, 2)]).unwrap());
        assert_eq!(Subspace::full(f, 3).orth_complement(), Subspace::zero(f, 3));
        assert_eq!(Subspace::zero(f, 3).orth_complement(), Subspace::full(f, 3));

        // (1,1) is self-orthogonal over GF(2).
        let g2 = gf(2);
        let diag = Subspace::span(g2, 2, vec![vec![g2.one(), g2.one()]]).unwrap();
        assert_eq!(diag.orth_complement(), diag);
    }

    #[test]
    fn sum_and_containment() {
        let f = gf(3);
        let s = Subspace::sum(&[&line(f, 3, 0), &line(f, 3, 1)]).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&line(f, 3, 0)).unwrap());
        assert!(!s.contains(&line(f, 3, 2)).unwrap());
        assert!(Subspace::sum(&[]).is_err());
        assert!(matches!(
            Subspace::sum(&[&line(f, 3, 0), &line(f, 2, 0)]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn apply_examples() {
        let f = gf(7);
        let u = line(f, 4, 0);
        assert_eq!(u.apply(&Matrix::identity(f, 4)).unwrap(), u);
        // Shift sending e_i to e_{i+1}.
        let mut shift = Matrix::zeros(f, 4, 4);
        for i in 0..4 {
            shift.set((i + 1) % 4, i, f.one());
        }
        assert_eq!(u.apply(&shift).unwrap(), line(f, 4, 1));
        assert!(u.apply(&Matrix::identity(f, 3)).is_err());
    }

    /// Every subspace of GF(2)^3, via spans of all sets of nonzero vectors.
    #[test]
    fn orth_dimension_identity_exhaustive_gf2_cubed() {
        let f = gf(2);
        let vectors: Vec<Vec<Scalar>> = (1u64..8)
            .map(|b| (0..3).map(|i| f.from_u64((b >> i) & 1)).collect())
            .collect();
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..(1 << 7) {
            let chosen = (0..7).filter(|i| mask >> i & 1 == 1).map(|i| vectors[i].clone()).collect();
            let u = Subspace::span(f, 3, chosen).unwrap();
            let c = u.orth_complement();
            assert_eq!(u.dim() + c.dim(), 3);
            for b in c.basis_vectors() {
                assert!(u.is_orthogonal_to(&b));
            }
            seen.insert(u);
        }
        // 1 + 7 + 7 + 1 subspaces of GF(2)^3.
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn builder_matches_span() {
        let f = gf(5);
        let mut b = EchelonBuilder::new(f, 3);
        assert!(b.insert(&[f.from_i64(1), f.from_i64(2), f.from_i64(0)]));
        assert!(!b.insert(&[f.from_i64(2), f.from_i64(4), f.from_i64(0)]));
        assert!(b.insert(&[f.from_i64(0), f.from_i64(0), f.from_i64(3)]));
        assert_eq!(b.dim(), 2);
        let s = b.finish();
        assert!(s.contains_vector(&[f.from_i64(3), f.from_i64(1), f.from_i64(4)]));
    }
}
