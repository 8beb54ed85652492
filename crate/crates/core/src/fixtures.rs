//! Small matrix groups written down by their generators, closed on demand,
//! and checked against their known invariants every time they are built.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::field::{is_prime, multiplicative_order};
use crate::exactla::{Field, Matrix, Scalar};
use crate::grouprep::{ElemRef, GroupSpec, MatrixGroup, DEFAULT_CAP};
use crate::ldc::{hadamard, LdcInstance};

/// Cyclic shift `e_i -> e_{i+1}`.
pub fn shift_matrix(field: Field, n: usize) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    for i in 0..n {
        m.set((i + 1) % n, i, field.one());
    }
    m
}

/// Generators: the reflection `diag(-1, 1, ..., 1)` and the cyclic shift.
/// The group is every signed permutation matrix with cyclic support pattern.
pub fn signed_shift_spec(n: usize, field: Field) -> Result<GroupSpec> {
    if field.characteristic() == 2 {
        return Err(Error::CharTwo);
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("signed shift needs n >= 2, got {n}")));
    }
    let mut diag = vec![1i64; n];
    diag[0] = -1;
    Ok(GroupSpec::new(field, n, vec![Matrix::diagonal(field, &diag), shift_matrix(field, n)]))
}

pub fn signed_shift_group(n: usize, field: Field) -> Result<MatrixGroup> {
    Fixture::SignedShift { n, field }.generate(DEFAULT_CAP)
}

/// Smallest residue of multiplicative order exactly `k` modulo `p`.
pub fn root_of_unity(k: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    (1..p)
        .find(|&a| multiplicative_order(a, p) == Some(k))
        .ok_or(Error::NoRootOfUnity { order: k, p })
}

/// Generators `diag(zeta, zeta^-1)` and the coordinate swap.
pub fn dihedral_spec(k: usize, p: u64) -> Result<GroupSpec> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("dihedral needs k >= 2, got {k}")));
    }
    let zeta = root_of_unity(k as u64, p)?;
    let field = Field::prime(p)?;
    let z = field.from_u64(zeta);
    let rot = Matrix::from_rows(field, vec![vec![z.clone(), field.zero()], vec![field.zero(), z.inv().expect("unit")]])?;
    let swap = Matrix::from_i64(field, &[vec![0, 1], vec![1, 0]]);
    Ok(GroupSpec::new(field, 2, vec![rot, swap]))
}

pub fn dihedral_rep(k: usize, p: u64) -> Result<MatrixGroup> {
    Fixture::Dihedral { k, p }.generate(DEFAULT_CAP)
}

/// Matrix of the permutation `perm` (sending letter `i` to `perm[i]`) on the
/// sum-zero subspace, in the basis `b_i = e_i - e_{i+1}`.
fn standard_action(field: Field, perm: &[usize]) -> Matrix {
    let k = perm.len();
    let mut m = Matrix::zeros(field, k - 1, k - 1);
    for i in 0..k - 1 {
        // Image of b_i is e_{perm[i]} - e_{perm[i+1]}; its b-coordinates are
        // prefix sums of its e-coordinates.
        let mut v = vec![0i64; k];
        v[perm[i]] += 1;
        v[perm[i + 1]] -= 1;
        let mut acc = 0i64;
        for (j, x) in v.iter().take(k - 1).enumerate() {
            acc += x;
            m.set(j, i, field.from_i64(acc));
        }
    }
    m
}

fn factorial(k: usize) -> Option<usize> {
    (1..=k).try_fold(1usize, |acc, x| acc.checked_mul(x))
}

/// The `(k-1)`-dimensional standard representation of the symmetric group
/// on `k` letters, generated by a transposition and a `k`-cycle.
pub fn symmetric_standard_spec(k: usize, field: Field) -> Result<GroupSpec> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("symmetric needs k >= 3, got {k}")));
    }
    let c = field.characteristic() as usize;
    if c != 0 && k.is_multiple_of(c) {
        return Err(Error::BadCharacteristic(k));
    }
    let mut transposition: Vec<usize> = (0..k).collect();
    transposition.swap(0, 1);
    let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
    Ok(GroupSpec::new(
        field,
        k - 1,
        vec![standard_action(field, &transposition), standard_action(field, &cycle)],
    ))
}

pub fn symmetric_standard_rep(k: usize, field: Field) -> Result<MatrixGroup> {
    Fixture::Symmetric { k, field }.generate(DEFAULT_CAP)
}

/// The one-dimensional group generated by the scalar `a` in `GF(p)`.
pub fn cyclic_spec(p: u64, a: u64) -> Result<GroupSpec> {
    let field = Field::prime(p)?;
    if a.is_multiple_of(p) {
        return Err(Error::InvalidInput("generator must be a unit".into()));
    }
    Ok(GroupSpec::new(field, 1, vec![Matrix::from_rows(field, vec![vec![field.from_u64(a)]])?]))
}

/// Shifts alone: reducible for `n >= 2`, since the all-ones line is fixed.
pub fn shift_spec(n: usize, field: Field) -> Result<GroupSpec> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    Ok(GroupSpec::new(field, n, vec![shift_matrix(field, n)]))
}

/// A named fixture with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    SignedShift { n: usize, field: Field },
    Dihedral { k: usize, p: u64 },
    Symmetric { k: usize, field: Field },
    Cyclic { p: u64, a: u64 },
    Shift { n: usize, field: Field },
    Hadamard { n: usize },
}

/// Invariants a fixture is known to have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub order: usize,
    pub dim: usize,
    pub irreducible: bool,
    /// An element and its `rank(rho(h) - I)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(ElemRef, usize)>,
}

/// Name, syntax and one-line description of every fixture family.
pub const CATALOG: &[(&str, &str, &str)] = &[
    ("signed-shift", "signed-shift(n,p)", "signed cyclic permutations of F^n, order n 2^n; p = 0 for Q"),
    ("dihedral", "dihedral(k,p)", "dihedral group of order 2k on GF(p)^2; needs k | p - 1"),
    ("symmetric", "symmetric(k,p)", "standard (k-1)-dim representation of S_k; needs p not dividing k"),
    ("cyclic", "cyclic(p,a)", "the scalars <a> in GF(p)^*, one-dimensional"),
    ("shift", "shift(n,p)", "cyclic shifts only; reducible"),
    ("hadamard", "hadamard(n)", "the 2^n zero-one vectors as a special 2-query code over GF(2)"),
];

fn field_param(p: u64) -> Result<Field> {
    Field::from_char(p)
}

impl Fixture {
    /// Parses `name(a,b)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::Parse(format!("fixture {s:?}: {why}"));
        let (name, rest) = s.split_once('(').ok_or_else(|| bad("expected name(params)"))?;
        let inner = rest.strip_suffix(')').ok_or_else(|| bad("missing closing parenthesis"))?;
        let params = inner
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| bad("parameters must be nonnegative integers")))
            .collect::<Result<Vec<u64>>>()?;
        let want = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(bad(&format!("expected {k} parameters")))
            }
        };
        let fixture = match name.trim() {
            "signed-shift" => {
                want(2)?;
                Fixture::SignedShift {
                    n: params[0] as usize,
                    field: field_param(params[1])?,
                }
            }
            "dihedral" => {
                want(2)?;
                Fixture::Dihedral {
                    k: params[0] as usize,
                    p: params[1],
                }
            }
            "symmetric" => {
                want(2)?;
                Fixture::Symmetric {
                    k: params[0] as usize,
                    field: field_param(params[1])?,
                }
            }
            "cyclic" => {
                want(2)?;
                Fixture::Cyclic {
                    p: params[0],
                    a: params[1],
                }
            }
            "shift" => {
                want(2)?;
                Fixture::Shift {
                    n: params[0] as usize,
                    field: field_param(params[1])?,
                }
            }
            "hadamard" => {
                want(1)?;
                Fixture::Hadamard { n: params[0] as usize }
            }
            other => return Err(bad(&format!("unknown fixture {other:?}"))),
        };
        Ok(fixture)
    }

    pub fn is_group(&self) -> bool {
        !matches!(self, Fixture::Hadamard { .. })
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        match *self {
            Fixture::SignedShift { n, field } => signed_shift_spec(n, field),
            Fixture::Dihedral { k, p } => dihedral_spec(k, p),
            Fixture::Symmetric { k, field } => symmetric_standard_spec(k, field),
            Fixture::Cyclic { p, a } => cyclic_spec(p, a),
            Fixture::Shift { n, field } => shift_spec(n, field),
            Fixture::Hadamard { .. } => Err(Error::InvalidInput("hadamard is a code, not a group".into())),
        }
    }

    pub fn expected(&self) -> Result<Expected> {
        Ok(match *self {
            Fixture::SignedShift { n, .. } => Expected {
                order: n << n,
                dim: n,
                irreducible: true,
                witness: Some((ElemRef(1), 1)),
            },
            Fixture::Dihedral { k, .. } => Expected {
                order: 2 * k,
                dim: 2,
                irreducible: k >= 3,
                witness: Some((ElemRef(2), 1)),
            },
            Fixture::Symmetric { k, .. } => Expected {
                order: factorial(k).ok_or(Error::CapExceeded(usize::MAX))?,
                dim: k - 1,
                irreducible: true,
                witness: Some((ElemRef(1), 1)),
            },
            Fixture::Cyclic { p, a } => Expected {
                order: multiplicative_order(a, p).ok_or_else(|| Error::InvalidInput("generator must be a unit".into()))?
                    as usize,
                dim: 1,
                irreducible: true,
                witness: None,
            },
            Fixture::Shift { n, .. } => Expected {
                order: n,
                dim: n,
                irreducible: n == 1,
                witness: None,
            },
            Fixture::Hadamard { .. } => return Err(Error::InvalidInput("hadamard is a code, not a group".into())),
        })
    }

    /// Closes the generators under `cap` and checks the known invariants.
    pub fn generate(&self, cap: usize) -> Result<MatrixGroup> {
        let spec = self.spec()?.with_cap(cap);
        let expected = self.expected()?;
        if expected.order > cap {
            return Err(Error::CapExceeded(cap));
        }
        let group = MatrixGroup::close(spec)?;
        let mismatch = |what: String| Err(Error::InternalInconsistency(format!("fixture {self}: {what}")));
        if group.order() != expected.order || group.dim() != expected.dim {
            return mismatch(format!(
                "order {} and dimension {}, expected {} and {}",
                group.order(),
                group.dim(),
                expected.order,
                expected.dim
            ));
        }
        if expected.irreducible && !group.burnside_irreducible() {
            return mismatch("not irreducible".into());
        }
        if let Some((h, rank)) = expected.witness {
            let got = group.minus_identity(h).rank();
            if got != rank {
                return mismatch(format!("rank(rho({h}) - I) = {got}, expected {rank}"));
            }
        }
        Ok(group)
    }

    pub fn ldc(&self) -> Result<LdcInstance> {
        match *self {
            Fixture::Hadamard { n } => hadamard(n, Field::Prime(2)),
            _ => Err(Error::InvalidInput(format!("{self} is a group, not a code"))),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::SignedShift { n, field } => write!(f, "signed-shift({n},{})", field.characteristic()),
            Fixture::Dihedral { k, p } => write!(f, "dihedral({k},{p})"),
            Fixture::Symmetric { k, field } => write!(f, "symmetric({k},{})", field.characteristic()),
            Fixture::Cyclic { p, a } => write!(f, "cyclic({p},{a})"),
            Fixture::Shift { n, field } => write!(f, "shift({n},{})", field.characteristic()),
            Fixture::Hadamard { n } => write!(f, "hadamard({n})"),
        }
    }
}

/// `rho(h)` for a scalar group element, handy for one-dimensional fixtures.
pub fn scalar_element(group: &MatrixGroup, value: &Scalar) -> Option<ElemRef> {
    let m = Matrix::from_rows(group.field(), vec![vec![value.clone()]]).ok()?;
    group.position(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_shift_examples() {
        let g = signed_shift_group(4, Field::Prime(3)).unwrap();
        assert_eq!(g.order(), 64);
        assert!(g.burnside_irreducible());
        assert_eq!(g.minus_identity(ElemRef(1)).rank(), 1);
        let g = signed_shift_group(2, Field::Prime(5)).unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.burnside_irreducible());
        assert_eq!(signed_shift_group(4, Field::Prime(2)).unwrap_err(), Error::CharTwo);
        for n in 2..=5 {
            for p in [3, 5] {
                assert_eq!(signed_shift_group(n, Field::Prime(p)).unwrap().order(), n << n);
            }
        }
        assert_eq!(signed_shift_group(3, Field::Rational).unwrap().order(), 24);
    }

    #[test]
    fn dihedral_examples() {
        let g = dihedral_rep(5, 11).unwrap();
        assert_eq!(g.order(), 10);
        assert!(g.burnside_irreducible());
        assert_eq!(root_of_unity(5, 11).unwrap(), 3);
        assert_eq!(multiplicative_order(9, 11), Some(5));
        let nine = Matrix::diagonal(Field::Prime(11), &[9, 5]);
        assert!(g.position(&nine).is_some());
        assert_eq!(dihedral_rep(3, 7).unwrap().order(), 6);
        assert_eq!(root_of_unity(3, 7).unwrap(), 2);
        assert_eq!(dihedral_rep(5, 7).unwrap_err(), Error::NoRootOfUnity { order: 5, p: 7 });
    }

    #[test]
    fn symmetric_examples() {
        let g = symmetric_standard_rep(4, Field::Prime(5)).unwrap();
        assert_eq!((g.order(), g.dim()), (24, 3));
        assert!(g.burnside_irreducible());
        let g = symmetric_standard_rep(3, Field::Prime(2)).unwrap();
        assert_eq!((g.order(), g.dim()), (6, 2));
        assert_eq!(symmetric_standard_rep(5, Field::Prime(5)).unwrap_err(), Error::BadCharacteristic(5));
        assert_eq!(
            Fixture::Symmetric {
                k: 5,
                field: Field::Prime(3)
            }
            .generate(100)
            .unwrap_err(),
            Error::CapExceeded(100)
        );
        // Every transposition moves exactly one direction.
        let g = symmetric_standard_rep(4, Field::Rational).unwrap();
        let rank_one = g.refs().filter(|&h| g.minus_identity(h).rank() == 1).count();
        assert_eq!(rank_one, 6);
    }

    #[test]
    fn cyclic_and_shift() {
        let g = Fixture::Cyclic { p: 7, a: 3 }.generate(DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 6);
        let two = scalar_element(&g, &Field::Prime(7).from_u64(2)).unwrap();
        assert_eq!(g.element_order(two), 3);
        let s = Fixture::Shift {
            n: 4,
            field: Field::Prime(3),
        }
        .generate(DEFAULT_CAP)
        .unwrap();
        assert_eq!(s.order(), 4);
        assert!(!s.burnside_irreducible());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["signed-shift(4,3)", "dihedral(5,11)", "symmetric(4,0)", "cyclic(7,3)", "shift(4,3)", "hadamard(3)"] {
            assert_eq!(Fixture::parse(s).unwrap().to_string(), s);
        }
        assert!(matches!(Fixture::parse("signed-shift(4)"), Err(Error::Parse(_))));
        assert!(matches!(Fixture::parse("nope(1,2)"), Err(Error::Parse(_))));
        assert!(matches!(Fixture::parse("dihedral 5 11"), Err(Error::Parse(_))));
        assert_eq!(Fixture::parse("signed-shift(4,4)").unwrap_err(), Error::NotPrime(4));
    }
}
