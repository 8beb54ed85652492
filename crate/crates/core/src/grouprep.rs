//! Finite matrix groups enumerated from generators.
//!
//! A representation is given concretely by its image: the group *is* a set of
//! invertible matrices. Elements are numbered in breadth-first order from the
//! identity, and that numbering is the canonical indexing used everywhere else.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactla::field::FieldJson;
use crate::exactla::matrix::{EntryJson, MatrixJson};
use crate::exactla::subspace::EchelonBuilder;
use crate::exactla::{Field, Matrix, Scalar, Subspace};

pub const DEFAULT_CAP: usize = 200_000;

/// Position of an element in a [`MatrixGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElemRef(pub usize);

impl fmt::Display for ElemRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// Generators plus the field and dimension they act on; the input to
/// [`MatrixGroup::close`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub field: Field,
    pub dim: usize,
    pub generators: Vec<Matrix>,
    pub cap: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GeneratorJson {
    Full(MatrixJson),
    Rows(Vec<Vec<EntryJson>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GroupSpecJson {
    field: FieldJson,
    dim: usize,
    generators: Vec<GeneratorJson>,
    #[serde(default = "default_cap")]
    cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

impl GroupSpec {
    pub fn new(field: Field, dim: usize, generators: Vec<Matrix>) -> Self {
        GroupSpec {
            field,
            dim,
            generators,
            cap: DEFAULT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn to_json_repr(&self) -> GroupSpecJson {
        GroupSpecJson {
            field: self.field.into(),
            dim: self.dim,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorJson::Full(MatrixJson::from(g)))
                .collect(),
            cap: self.cap,
        }
    }

    fn from_json_repr(j: GroupSpecJson) -> Result<Self> {
        let field = Field::try_from(j.field)?;
        let mut generators = Vec::with_capacity(j.generators.len());
        for g in j.generators {
            let m = match g {
                GeneratorJson::Full(m) => Matrix::try_from(m)?,
                GeneratorJson::Rows(rows) => {
                    let rows = rows
                        .iter()
                        .map(|r| crate::exactla::matrix::vector_from_json(field, r))
                        .collect::<Result<Vec<_>>>()?;
                    Matrix::from_rows_with_cols(field, rows, j.dim)?
                }
            };
            generators.push(m);
        }
        Ok(GroupSpec {
            field,
            dim: j.dim,
            generators,
            cap: j.cap,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: GroupSpecJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_repr(j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("group spec serializes")
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GroupSpecJson::deserialize(d)?;
        GroupSpec::from_json_repr(j).map_err(serde::de::Error::custom)
    }
}

/// The cycles of `s -> h s` on the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleDecomposition {
    pub h: ElemRef,
    pub cycles: Vec<Vec<ElemRef>>,
}

/// A fully enumerated finite group of invertible `n x n` matrices.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    spec: GroupSpec,
    elements: Vec<Matrix>,
    index: HashMap<Matrix, usize>,
    generators: Vec<ElemRef>,
    words: Vec<Vec<usize>>,
}

impl MatrixGroup {
    /// Breadth-first closure of the generators under left multiplication.
    /// A finite monoid of invertible matrices is a group, so this is the
    /// generated group.
    pub fn close(spec: GroupSpec) -> Result<Self> {
        let n = spec.dim;
        for (k, g) in spec.generators.iter().enumerate() {
            if g.field() != spec.field {
                return Err(Error::FieldMismatch(format!("generator {k} is over {}", g.field())));
            }
            if g.rows() != n || g.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator {k} is {}x{}, expected {n}x{n}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.rank() != n {
                return Err(Error::NotInvertible(k));
            }
        }
        let identity = Matrix::identity(spec.field, n);
        let mut elements = vec![identity.clone()];
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(pos) = queue.pop_front() {
            for (k, g) in spec.generators.iter().enumerate() {
                let y = g.mul(&elements[pos]);
                if index.contains_key(&y) {
                    continue;
                }
                if elements.len() >= spec.cap {
                    return Err(Error::CapExceeded(spec.cap));
                }
                let mut w = Vec::with_capacity(words[pos].len() + 1);
                w.push(k);
                w.extend_from_slice(&words[pos]);
                index.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
                words.push(w);
            }
        }
        let generators = spec.generators.iter().map(|g| ElemRef(index[g])).collect();
        Ok(MatrixGroup {
            spec,
            elements,
            index,
            generators,
            words,
        })
    }

    pub fn from_generators(field: Field, dim: usize, generators: Vec<Matrix>) -> Result<Self> {
        Self::close(GroupSpec::new(field, dim, generators))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn field(&self) -> Field {
        self.spec.field
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> ElemRef {
        ElemRef(0)
    }

    pub fn generators(&self) -> &[ElemRef] {
        &self.generators
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn refs(&self) -> impl Iterator<Item = ElemRef> {
        (0..self.elements.len()).map(ElemRef)
    }

    /// Generator word for an element: `g = gen[w[0]] * gen[w[1]] * ...`.
    pub fn word(&self, g: ElemRef) -> &[usize] {
        &self.words[g.0]
    }

    pub fn check(&self, g: ElemRef) -> Result<ElemRef> {
        if g.0 < self.elements.len() {
            Ok(g)
        } else {
            Err(Error::BadElement(g.0))
        }
    }

    pub fn matrix(&self, g: ElemRef) -> &Matrix {
        &self.elements[g.0]
    }

    pub fn position(&self, m: &Matrix) -> Option<ElemRef> {
        self.index.get(m).copied().map(ElemRef)
    }

    /// Position of `a * b`.
    pub fn mul(&self, a: ElemRef, b: ElemRef) -> ElemRef {
        let p = self.matrix(a).mul(self.matrix(b));
        self.position(&p).expect("group is closed under products")
    }

    pub fn mul3(&self, a: ElemRef, b: ElemRef, c: ElemRef) -> ElemRef {
        let p = self.matrix(a).mul(self.matrix(b)).mul(self.matrix(c));
        self.position(&p).expect("group is closed under products")
    }

    pub fn inverse(&self, a: ElemRef) -> ElemRef {
        let ord = self.element_order(a);
        let inv = self.matrix(a).pow(ord as u64 - 1);
        self.position(&inv).expect("group is closed under inverses")
    }

    /// Smallest `k >= 1` with `g^k = I`.
    pub fn element_order(&self, g: ElemRef) -> usize {
        let m = self.matrix(g);
        let mut x = m.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = m.mul(&x);
            k += 1;
            assert!(k <= self.order(), "element order exceeds group order");
        }
        k
    }

    /// Exhaustive check that products and inverses stay inside the element
    /// list. Quadratic in the order.
    pub fn verify_closure(&self) -> bool {
        let all_products = self
            .elements
            .iter()
            .all(|a| self.elements.iter().all(|b| self.index.contains_key(&a.mul(b))));
        let all_inverses = self.refs().all(|g| {
            let inv = self.inverse(g);
            self.matrix(g).mul(self.matrix(inv)).is_identity()
        });
        all_products && all_inverses
    }

    /// Permutation `s -> h s` as a position table.
    pub fn left_mult_table(&self, h: ElemRef) -> Vec<ElemRef> {
        self.refs().map(|s| self.mul(h, s)).collect()
    }

    /// Cycles of `s -> h s`, each started at its smallest unvisited position.
    pub fn mult_cycles(&self, h: ElemRef) -> CycleDecomposition {
        let perm = self.left_mult_table(h);
        let mut seen = vec![false; self.order()];
        let mut cycles = Vec::new();
        for start in 0..self.order() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(ElemRef(cur));
                cur = perm[cur].0;
            }
            cycles.push(cycle);
        }
        CycleDecomposition { h, cycles }
    }

    /// Burnside's criterion: the group acts absolutely irreducibly iff its
    /// elements span all `n x n` matrices. `false` is inconclusive for
    /// irreducibility over a non-splitting field.
    pub fn burnside_irreducible(&self) -> bool {
        let n = self.dim();
        let target = n * n;
        let mut span = EchelonBuilder::new(self.field(), target);
        for g in &self.elements {
            span.insert(&g.flatten());
            if span.dim() == target {
                return true;
            }
        }
        false
    }

    /// Smallest invariant subspace containing `v`.
    pub fn spin(&self, v: &[Scalar]) -> Result<Subspace> {
        self.spin_many(&[v.to_vec()])
    }

    /// Smallest invariant subspace containing all of `vs`.
    pub fn spin_many(&self, vs: &[Vec<Scalar>]) -> Result<Subspace> {
        let n = self.dim();
        if let Some(v) = vs.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("vector of length {} in F^{n}", v.len())));
        }
        if vs.iter().all(|v| v.iter().all(Scalar::is_zero)) {
            return Err(Error::ZeroVector);
        }
        let mut span = EchelonBuilder::new(self.field(), n);
        let mut queue = VecDeque::new();
        for v in vs {
            if span.insert(v) {
                queue.push_back(v.clone());
            }
        }
        while let Some(u) = queue.pop_front() {
            if span.dim() == n {
                break;
            }
            for &g in &self.generators {
                let gu = self.matrix(g).mul_vec(&u);
                if span.insert(&gu) {
                    queue.push_back(gu);
                }
            }
        }
        Ok(span.finish())
    }

    /// `C(h) = {v : h v = v}`.
    pub fn fixed_space(&self, h: ElemRef) -> Subspace {
        self.minus_identity(h).nullspace()
    }

    /// `rho(h) - I`.
    pub fn minus_identity(&self, h: ElemRef) -> Matrix {
        let n = self.dim();
        self.matrix(h)
            .try_sub(&Matrix::identity(self.field(), n))
            .expect("square matrix")
    }

    pub fn export(&self) -> GroupExport {
        GroupExport {
            spec: self.spec.clone(),
            spec_sha256: self.spec.digest(),
            order: self.order(),
            generator_positions: self.generators.clone(),
            elements: self.elements.clone(),
            words: self.words.clone(),
        }
    }
}

/// Audit form of an enumerated group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupExport {
    pub spec: GroupSpec,
    pub spec_sha256: String,
    pub order: usize,
    pub generator_positions: Vec<ElemRef>,
    pub elements: Vec<Matrix>,
    pub words: Vec<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::Prime(p)
    }

    fn shift(f: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            m.set((i + 1) % n, i, f.one());
        }
        m
    }

    fn signed_shift_4_3() -> MatrixGroup {
        let f = gf(3);
        MatrixGroup::from_generators(f, 4, vec![Matrix::diagonal(f, &[-1, 1, 1, 1]), shift(f, 4)]).unwrap()
    }

    fn d5() -> MatrixGroup {
        let f = gf(11);
        MatrixGroup::from_generators(
            f,
            2,
            vec![Matrix::diagonal(f, &[9, 5]), Matrix::from_i64(f, &[vec![0, 1], vec![1, 0]])],
        )
        .unwrap()
    }

    fn c6() -> MatrixGroup {
        // 3 has order 6 modulo 7.
        let f = gf(7);
        MatrixGroup::from_generators(f, 1, vec![Matrix::diagonal(f, &[3])]).unwrap()
    }

    #[test]
    fn trivial_group() {
        let g = MatrixGroup::from_generators(gf(5), 2, vec![Matrix::identity(gf(5), 2)]).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.matrix(g.identity()).is_identity());
        assert!(!g.burnside_irreducible());
        let empty = MatrixGroup::from_generators(gf(5), 2, vec![]).unwrap();
        assert_eq!(empty.order(), 1);
    }

    #[test]
    fn signed_shift_has_n_times_2_to_n_elements() {
        let g = signed_shift_4_3();
        assert_eq!(g.order(), 64);
        assert!(g.verify_closure());
        assert!(g.burnside_irreducible());
        assert_eq!(g.generators(), &[ElemRef(1), ElemRef(2)]);
    }

    #[test]
    fn dihedral_closure() {
        let g = d5();
        assert_eq!(g.order(), 10);
        assert!(g.verify_closure());
        assert!(g.burnside_irreducible());
    }

    #[test]
    fn cap_and_invertibility_errors() {
        let f = gf(3);
        let gens = vec![Matrix::diagonal(f, &[-1, 1, 1, 1]), shift(f, 4)];
        let spec = GroupSpec::new(f, 4, gens).with_cap(10);
        assert_eq!(MatrixGroup::close(spec).unwrap_err(), Error::CapExceeded(10));
        let sing = MatrixGroup::from_generators(f, 2, vec![Matrix::diagonal(f, &[1, 0])]);
        assert_eq!(sing.unwrap_err(), Error::NotInvertible(0));
        let wrong = MatrixGroup::from_generators(f, 3, vec![Matrix::identity(f, 2)]);
        assert!(matches!(wrong, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn words_reproduce_elements() {
        let g = signed_shift_4_3();
        for s in g.refs() {
            let mut m = Matrix::identity(g.field(), 4);
            for &k in g.word(s) {
                m = m.mul(g.matrix(g.generators()[k]));
            }
            assert_eq!(&m, g.matrix(s));
        }
    }

    #[test]
    fn element_orders() {
        let g = signed_shift_4_3();
        assert_eq!(g.element_order(g.identity()), 1);
        assert_eq!(g.element_order(ElemRef(1)), 2);
        assert_eq!(g.element_order(ElemRef(2)), 4);
        for s in g.refs() {
            assert!(g.matrix(s).mul(g.matrix(g.inverse(s))).is_identity());
        }
    }

    #[test]
    fn cycle_decompositions() {
        let g = signed_shift_4_3();
        let id = g.mult_cycles(g.identity());
        assert_eq!(id.cycles.len(), 64);
        assert!(id.cycles.iter().all(|c| c.len() == 1));

        let refl = g.mult_cycles(ElemRef(1));
        assert_eq!(refl.cycles.len(), 32);
        assert!(refl.cycles.iter().all(|c| c.len() == 2));

        let c = c6();
        assert_eq!(c.order(), 6);
        let h = c.position(&Matrix::diagonal(gf(7), &[2])).unwrap();
        assert_eq!(c.element_order(h), 3);
        let cyc = c.mult_cycles(h);
        assert_eq!(cyc.cycles.len(), 2);
        assert!(cyc.cycles.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn cycles_partition_group() {
        let g = d5();
        for h in g.refs() {
            let d = g.mult_cycles(h);
            let ord = g.element_order(h);
            assert_eq!(d.cycles.iter().map(Vec::len).sum::<usize>(), g.order());
            assert!(d.cycles.iter().all(|c| c.len() == ord));
            for c in &d.cycles {
                for w in c.windows(2) {
                    assert_eq!(g.mul(h, w[0]), w[1]);
                }
            }
        }
    }

    #[test]
    fn spin_examples() {
        let f = gf(3);
        let g = signed_shift_4_3();
        let e1 = crate::exactla::unit_vector(f, 4, 0);
        assert!(g.spin(&e1).unwrap().is_full());

        let shifts = MatrixGroup::from_generators(f, 4, vec![shift(f, 4)]).unwrap();
        let ones = vec![f.one(); 4];
        let s = shifts.spin(&ones).unwrap();
        assert_eq!(s.dim(), 1);
        for &gen in shifts.generators() {
            assert_eq!(s.apply(shifts.matrix(gen)).unwrap(), s);
        }
        assert_eq!(g.spin(&[f.zero(), f.zero(), f.zero(), f.zero()]), Err(Error::ZeroVector));
    }

    #[test]
    fn fixed_space_examples() {
        let g = signed_shift_4_3();
        assert_eq!(g.fixed_space(g.identity()).dim(), 4);
        assert_eq!(g.fixed_space(ElemRef(1)).dim(), 3);
        let d = d5();
        let rot = d.position(&Matrix::diagonal(gf(11), &[9, 5])).unwrap();
        assert_eq!(d.fixed_space(rot).dim(), 0);
        for h in g.refs() {
            assert_eq!(g.fixed_space(h).dim() + g.minus_identity(h).rank(), 4);
        }
    }

    #[test]
    fn spec_json_round_trip_and_bare_rows() {
        let g = d5();
        let s = g.spec().to_json();
        let back = GroupSpec::from_json(&s).unwrap();
        assert_eq!(&back, g.spec());
        assert_eq!(back.digest(), g.spec().digest());

        let bare = r#"{"field":{"char":11},"dim":2,"generators":[[[9,0],[0,5]],[[0,1],[1,0]]]}"#;
        let spec = GroupSpec::from_json(bare).unwrap();
        assert_eq!(spec.cap, DEFAULT_CAP);
        assert_eq!(MatrixGroup::close(spec).unwrap().order(), 10);
        assert!(GroupSpec::from_json("{not json").is_err());
    }
}
