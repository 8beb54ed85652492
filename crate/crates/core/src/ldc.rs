//! Linear locally decodable codes in their combinatorial form: code vectors
//! `a_1..a_m` in `F^t` plus one `q`-matching per message coordinate.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::field::{rational_string, FieldJson};
use crate::exactla::matrix::{unit_vector, vector_from_json, vector_to_json, EntryJson};
use crate::exactla::{Field, Scalar, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeForm {
    /// Every matched set spans `e_i`.
    General,
    /// Pairs whose difference is a nonzero multiple of `e_i`.
    Special2,
}

/// A family of pairwise disjoint index sets, nominally of size `q`.
///
/// Construction does not enforce the invariants; [`LdcInstance::verify`]
/// reports violations instead.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QMatching {
    pub q: usize,
    pub sets: Vec<Vec<usize>>,
}

impl QMatching {
    pub fn new(q: usize) -> Self {
        QMatching { q, sets: Vec::new() }
    }

    pub fn from_sets(q: usize, sets: Vec<Vec<usize>>) -> Self {
        QMatching { q, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// True when every set has exactly `q` distinct members and no index is
    /// shared between sets.
    pub fn is_valid(&self) -> bool {
        let mut used = HashSet::new();
        self.sets
            .iter()
            .all(|s| s.len() == self.q && s.iter().all(|j| used.insert(*j)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdcInstance {
    pub field: Field,
    /// Message length (number of coordinates).
    pub t: usize,
    pub vectors: Vec<Vec<Scalar>>,
    pub matchings: Vec<QMatching>,
    pub form: CodeForm,
    pub q: usize,
    pub claimed_delta: BigRational,
}

/// Why a particular matched set failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetFailure {
    pub set: usize,
    pub members: Vec<usize>,
    pub reason: String,
    /// For special-form failures: the first coordinate other than `i` where
    /// the two vectors disagree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offending_coordinate: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoordinateReport {
    pub coordinate: usize,
    pub sets: usize,
    pub sizes_ok: bool,
    pub disjoint: bool,
    pub failures: Vec<SetFailure>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub form: CodeForm,
    pub q: usize,
    pub t: usize,
    pub m: usize,
    pub coordinates: Vec<CoordinateReport>,
    pub total_matched: usize,
    #[serde(with = "rational_string")]
    pub achieved_delta: BigRational,
    #[serde(with = "rational_string")]
    pub claimed_delta: BigRational,
    pub delta_ok: bool,
    pub pass: bool,
}

impl LdcInstance {
    /// Checks shapes only: `t` coordinates per vector, one matching per
    /// coordinate, `q = 2` for special form.
    pub fn new(
        field: Field,
        t: usize,
        vectors: Vec<Vec<Scalar>>,
        matchings: Vec<QMatching>,
        form: CodeForm,
        q: usize,
        claimed_delta: BigRational,
    ) -> Result<Self> {
        if t == 0 || vectors.is_empty() {
            return Err(Error::InvalidInput("a code needs t >= 1 and m >= 1".into()));
        }
        if let Some((j, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != t) {
            return Err(Error::DimensionMismatch(format!("vector {j} has length {}, expected {t}", v.len())));
        }
        if vectors.iter().flatten().any(|s| s.field() != field) {
            return Err(Error::FieldMismatch(format!("code vectors not all over {field}")));
        }
        if matchings.len() != t {
            return Err(Error::DimensionMismatch(format!("{} matchings for {t} coordinates", matchings.len())));
        }
        if q == 0 {
            return Err(Error::InvalidInput("q must be at least 1".into()));
        }
        if form == CodeForm::Special2 && q != 2 {
            return Err(Error::InvalidInput("special form requires q = 2".into()));
        }
        Ok(LdcInstance {
            field,
            t,
            vectors,
            matchings,
            form,
            q,
            claimed_delta,
        })
    }

    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    pub fn total_matched(&self) -> usize {
        self.matchings.iter().map(QMatching::len).sum()
    }

    /// `sum |M_i| / (m t)`, exactly.
    pub fn achieved_delta(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.total_matched()),
            BigInt::from(self.m() * self.t),
        )
    }

    /// The same code viewed under the general definition with `q = 2`.
    pub fn as_general(&self) -> LdcInstance {
        LdcInstance {
            form: CodeForm::General,
            ..self.clone()
        }
    }

    pub fn verify(&self) -> VerificationReport {
        let coordinates: Vec<CoordinateReport> = (0..self.t).map(|i| self.verify_coordinate(i)).collect();
        let achieved = self.achieved_delta();
        let delta_ok = achieved >= self.claimed_delta;
        let pass = delta_ok && coordinates.iter().all(|c| c.pass);
        VerificationReport {
            form: self.form,
            q: self.q,
            t: self.t,
            m: self.m(),
            total_matched: self.total_matched(),
            coordinates,
            achieved_delta: achieved,
            claimed_delta: self.claimed_delta.clone(),
            delta_ok,
            pass,
        }
    }

    fn verify_coordinate(&self, i: usize) -> CoordinateReport {
        let matching = &self.matchings[i];
        let m = self.m();
        let mut failures = Vec::new();
        let mut sizes_ok = true;
        let mut disjoint = true;
        let mut used = HashSet::new();
        for (k, set) in matching.sets.iter().enumerate() {
            let fail = |reason: String, coord: Option<usize>| SetFailure {
                set: k,
                members: set.clone(),
                reason,
                offending_coordinate: coord,
            };
            if set.len() != self.q || set.iter().collect::<HashSet<_>>().len() != set.len() {
                sizes_ok = false;
                failures.push(fail(format!("set does not have {} distinct members", self.q), None));
                continue;
            }
            if let Some(&j) = set.iter().find(|&&j| j >= m) {
                failures.push(fail(format!("index {j} out of range for m = {m}"), None));
                continue;
            }
            for &j in set {
                if !used.insert(j) {
                    disjoint = false;
                    failures.push(fail(format!("index {j} appears in more than one set"), None));
                }
            }
            match self.form {
                CodeForm::Special2 => {
                    if let Some((reason, coord)) = special_pair_failure(&self.vectors[set[0]], &self.vectors[set[1]], i) {
                        failures.push(fail(reason, coord));
                    }
                }
                CodeForm::General => {
                    let span = Subspace::span(
                        self.field,
                        self.t,
                        set.iter().map(|&j| self.vectors[j].clone()).collect(),
                    )
                    .expect("code vectors have length t");
                    if !span.contains_vector(&unit_vector(self.field, self.t, i)) {
                        failures.push(fail(format!("e_{i} is not in the span of the set"), None));
                    }
                }
            }
        }
        CoordinateReport {
            coordinate: i,
            sets: matching.len(),
            sizes_ok,
            disjoint,
            pass: failures.is_empty(),
            failures,
        }
    }

    pub fn to_json(&self) -> LdcJson {
        LdcJson {
            field: self.field.into(),
            t: self.t,
            m: self.m(),
            vectors: self.vectors.iter().map(|v| vector_to_json(v)).collect(),
            matchings: self.matchings.iter().map(|mt| mt.sets.clone()).collect(),
            form: self.form,
            q: self.q,
            claimed_delta: self.claimed_delta.clone(),
        }
    }

    pub fn from_json(j: LdcJson) -> Result<Self> {
        let field = Field::try_from(j.field)?;
        if j.vectors.len() != j.m {
            return Err(Error::Parse(format!("m = {} but {} vectors given", j.m, j.vectors.len())));
        }
        let vectors = j
            .vectors
            .iter()
            .map(|v| vector_from_json(field, v))
            .collect::<Result<Vec<_>>>()?;
        let matchings = j.matchings.into_iter().map(|s| QMatching::from_sets(j.q, s)).collect();
        LdcInstance::new(field, j.t, vectors, matchings, j.form, j.q, j.claimed_delta)
    }
}

/// `None` when `a - b` is a nonzero multiple of `e_i`.
fn special_pair_failure(a: &[Scalar], b: &[Scalar], i: usize) -> Option<(String, Option<usize>)> {
    if let Some(k) = (0..a.len()).find(|&k| k != i && a[k] != b[k]) {
        return Some((format!("pair differs at coordinate {k}, not only at {i}"), Some(k)));
    }
    if a[i] == b[i] {
        return Some((format!("pair agrees at coordinate {i}"), None));
    }
    None
}

/// JSON form of an [`LdcInstance`]. Matching indices are 0-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LdcJson {
    pub field: FieldJson,
    pub t: usize,
    pub m: usize,
    pub vectors: Vec<Vec<EntryJson>>,
    pub matchings: Vec<Vec<Vec<usize>>>,
    pub form: CodeForm,
    pub q: usize,
    #[serde(with = "rational_string")]
    pub claimed_delta: BigRational,
}

/// Maximum set of disjoint pairs that agree off coordinate `i` and differ at
/// it.
///
/// Vectors sharing a punctured projection form a complete multipartite graph
/// (parts = value at `i`). Such a graph with `L` vertices and largest part `a`
/// has maximum matching `min(floor(L/2), L - a)`, realized below per bucket.
pub fn max_special_matching(vectors: &[Vec<Scalar>], i: usize) -> QMatching {
    let mut buckets: BTreeMap<Vec<&Scalar>, BTreeMap<&Scalar, Vec<usize>>> = BTreeMap::new();
    for (j, v) in vectors.iter().enumerate() {
        let punctured: Vec<&Scalar> = v.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, s)| s).collect();
        buckets.entry(punctured).or_default().entry(&v[i]).or_default().push(j);
    }
    let mut sets = Vec::new();
    for parts in buckets.into_values() {
        let mut parts: Vec<Vec<usize>> = parts.into_values().collect();
        // Largest part first; stable so ties keep value order.
        parts.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let largest = parts[0].len();
        let total: usize = parts.iter().map(Vec::len).sum();
        let flat: Vec<usize> = parts.concat();
        if largest >= total - largest {
            for (k, &other) in flat[largest..].iter().enumerate() {
                sets.push(sorted_pair(flat[k], other));
            }
        } else {
            let half = total / 2;
            for k in 0..half {
                sets.push(sorted_pair(flat[k], flat[k + half]));
            }
        }
    }
    sets.sort();
    QMatching::from_sets(2, sets)
}

fn sorted_pair(a: usize, b: usize) -> Vec<usize> {
    if a < b {
        vec![a, b]
    } else {
        vec![b, a]
    }
}

/// Scans candidates in order and keeps each one disjoint from everything kept
/// so far. Candidates without `q` distinct members are skipped.
///
/// If every index lies in at most `q` candidates, each kept set blocks at most
/// `q^2` candidates, so at least `|candidates| / q^2` survive.
pub fn greedy_matching(q: usize, candidates: &[Vec<usize>]) -> QMatching {
    let mut used = HashSet::new();
    let mut kept = QMatching::new(q);
    for c in candidates {
        let distinct: HashSet<_> = c.iter().collect();
        if c.len() != q || distinct.len() != q {
            continue;
        }
        if c.iter().any(|j| used.contains(j)) {
            continue;
        }
        used.extend(c.iter().copied());
        kept.sets.push(c.clone());
    }
    kept
}

/// All `2^n` zero-one vectors; vector `b` has bit `i` of `b` at coordinate
/// `i`, and coordinate `i` is matched by pairs `{b, b | 1 << i}`.
pub fn hadamard(n: usize, field: Field) -> Result<LdcInstance> {
    if n == 0 || n > 24 {
        return Err(Error::InvalidInput(format!("Hadamard dimension {n} not in 1..=24")));
    }
    let m = 1usize << n;
    let vectors = (0..m)
        .map(|b| (0..n).map(|i| field.from_u64(((b >> i) & 1) as u64)).collect())
        .collect();
    let matchings = (0..n)
        .map(|i| {
            let sets = (0..m).filter(|b| b >> i & 1 == 0).map(|b| vec![b, b | 1 << i]).collect();
            QMatching::from_sets(2, sets)
        })
        .collect();
    LdcInstance::new(
        field,
        n,
        vectors,
        matchings,
        CodeForm::Special2,
        2,
        BigRational::new(1.into(), 2.into()),
    )
}

/// Exact `sum |M_i| / (m t)`.
pub fn achieved_delta(instance: &LdcInstance) -> BigRational {
    instance.achieved_delta()
}
