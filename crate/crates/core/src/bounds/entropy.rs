use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{power_product_ge, scaled_log2_ge, PowerProduct};
use crate::error::{Error, Result};
use crate::exactla::field::rational_string;
use crate::exactla::Scalar;
use crate::ldc::{CodeForm, LdcInstance};

/// Shannon entropy in bits of an exact distribution; zero weights contribute
/// nothing.
pub fn entropy(weights: &[BigRational]) -> Result<f64> {
    if let Some(w) = weights.iter().find(|w| w.is_negative()) {
        return Err(Error::NotADistribution(format!("negative weight {w}")));
    }
    let total: BigRational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::NotADistribution(format!("weights sum to {total}")));
    }
    Ok(weights
        .iter()
        .filter(|w| !w.is_zero())
        .map(|w| {
            let p = w.to_f64().expect("finite weight");
            -p * p.log2()
        })
        .sum())
}

/// Entropy of the empirical distribution given by occurrence counts.
pub fn entropy_of_counts(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    // log2 n - (1/n) sum c log2 c keeps exact zeros for point masses.
    let s: f64 = counts.iter().filter(|&&c| c > 1).map(|&c| c as f64 * (c as f64).log2()).sum();
    (nf.log2() - s / nf).max(0.0)
}

/// Factors of `n^n / prod c^c`, i.e. `2^(n H)` for the count distribution,
/// split into numerator and denominator.
fn counts_power(counts: &[usize]) -> (PowerProduct, PowerProduct) {
    let n: usize = counts.iter().sum();
    let num = vec![(n as u64, n as u64)];
    let den = counts.iter().filter(|&&c| c > 1).map(|&c| (c as u64, c as u64)).collect();
    (num, den)
}

/// Exact test of `n H(counts) >= k` bits for integer `k`.
fn scaled_entropy_ge(groups: &[Vec<usize>], k: u64) -> bool {
    let mut num = Vec::new();
    let mut den = vec![(2u64, k)];
    for g in groups {
        let (a, b) = counts_power(g);
        num.extend(a);
        den.extend(b);
    }
    power_product_ge(&num, &den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchEntropy {
    pub entropy: f64,
    #[serde(with = "rational_string")]
    pub bound: BigRational,
    pub pass: bool,
}

/// For `X` uniform on `0..t` and a function `f` separating every matched pair,
/// compares `H(f(X))` against `2 s / t`. The verdict is exact.
pub fn match_entropy_check<T: Ord>(t: usize, pairs: &[(usize, usize)], f: &[T]) -> Result<MatchEntropy> {
    if f.len() != t || t == 0 {
        return Err(Error::InvalidInput(format!("function table has {} entries for t = {t}", f.len())));
    }
    let mut used = vec![false; t];
    for &(a, b) in pairs {
        if a >= t || b >= t || a == b || used[a] || used[b] {
            return Err(Error::InvalidInput(format!("({a}, {b}) breaks the matching on 0..{t}")));
        }
        used[a] = true;
        used[b] = true;
        if f[a] == f[b] {
            return Err(Error::PairNotSeparated(a, b));
        }
    }
    let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
    for v in f {
        *counts.entry(v).or_default() += 1;
    }
    let counts: Vec<usize> = counts.into_values().collect();
    let s = pairs.len();
    Ok(MatchEntropy {
        entropy: entropy_of_counts(&counts),
        bound: BigRational::new(BigInt::from(2 * s), BigInt::from(t)),
        pass: scaled_entropy_ge(&[counts], 2 * s as u64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateAudit {
    pub coordinate: usize,
    /// Sizes of the prefix classes `J_i^b`, in first-appearance order.
    pub class_sizes: Vec<usize>,
    /// `|M_i^b|` for each class.
    pub class_matched: Vec<usize>,
    pub matched: usize,
    /// `H(X_i | X_1..X_{i-1})`.
    pub chain_term: f64,
    /// `2 |M_i| / m`.
    #[serde(with = "rational_string")]
    pub bound_term: BigRational,
    pub chain_ge_bound: bool,
    /// Every class satisfies `H(X_i | prefix = b) >= 2 |M_i^b| / |J_i^b|`.
    pub classes_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyAudit {
    pub m: usize,
    pub t: usize,
    pub entropy: f64,
    pub log2_m: f64,
    pub coordinates: Vec<CoordinateAudit>,
    pub chain_sum: f64,
    pub chain_identity_ok: bool,
    pub entropy_le_log_m: bool,
    /// `sum_i 2 |M_i| / m = 2 delta t`.
    #[serde(with = "rational_string")]
    pub matching_bound: BigRational,
    pub entropy_ge_matching_bound: bool,
    #[serde(with = "rational_string")]
    pub achieved_delta: BigRational,
    /// `log2 m >= 2 delta t` for the achieved rate.
    pub length_bound_ok: bool,
    /// `log2 m >= 2 delta t` for the claimed rate.
    pub claimed_length_bound_ok: bool,
    /// `m = 2^(2 delta t)` exactly.
    pub tight: bool,
    pub pass: bool,
}

pub const CHAIN_TOLERANCE: f64 = 1e-12;

/// Replays the chain-rule argument on a special-form code: coordinates are
/// processed in index order, each matching is split along the prefix classes
/// of the earlier coordinates, and every inequality of the argument is checked.
pub fn entropy_audit(instance: &LdcInstance) -> Result<EntropyAudit> {
    if instance.form != CodeForm::Special2 {
        return Err(Error::NotSpecialForm);
    }
    let m = instance.m();
    let t = instance.t;
    let vectors = &instance.vectors;

    let mut distinct: HashMap<&[Scalar], usize> = HashMap::new();
    for v in vectors {
        *distinct.entry(v.as_slice()).or_default() += 1;
    }
    let mut vector_counts: Vec<usize> = distinct.into_values().collect();
    vector_counts.sort_unstable();
    let h_x = entropy_of_counts(&vector_counts);

    // class[j] identifies the prefix (a_j)_{0..i} at step i.
    let mut class = vec![0usize; m];
    let mut num_classes = 1usize;
    let mut coordinates = Vec::with_capacity(t);
    for i in 0..t {
        if i > 0 {
            let mut ids: HashMap<(usize, &Scalar), usize> = HashMap::new();
            for (j, v) in vectors.iter().enumerate() {
                let next = ids.len();
                class[j] = *ids.entry((class[j], &v[i - 1])).or_insert(next);
            }
            num_classes = ids.len();
        }
        let mut class_sizes = vec![0usize; num_classes];
        let mut value_counts: Vec<BTreeMap<&Scalar, usize>> = vec![BTreeMap::new(); num_classes];
        for (j, v) in vectors.iter().enumerate() {
            class_sizes[class[j]] += 1;
            *value_counts[class[j]].entry(&v[i]).or_default() += 1;
        }
        let mut class_matched = vec![0usize; num_classes];
        for set in &instance.matchings[i].sets {
            let &[a, b] = set.as_slice() else {
                return Err(Error::InvalidInput(format!("coordinate {i} has a set of size {}", set.len())));
            };
            if a >= m || b >= m {
                return Err(Error::InvalidInput(format!("pair ({a}, {b}) out of range")));
            }
            if class[a] != class[b] {
                return Err(Error::MatchingCrossesPrefixClass {
                    coordinate: i,
                    first: a,
                    second: b,
                });
            }
            if vectors[a][i] == vectors[b][i] {
                return Err(Error::PairNotSeparated(a, b));
            }
            class_matched[class[a]] += 1;
        }
        let matched: usize = class_matched.iter().sum();
        debug_assert_eq!(matched, instance.matchings[i].len());
        let groups: Vec<Vec<usize>> = value_counts.iter().map(|c| c.values().copied().collect()).collect();
        let chain_term = groups
            .iter()
            .zip(&class_sizes)
            .map(|(g, &size)| size as f64 / m as f64 * entropy_of_counts(g))
            .sum();
        let classes_ok = groups
            .iter()
            .zip(&class_matched)
            .all(|(g, &k)| scaled_entropy_ge(std::slice::from_ref(g), 2 * k as u64));
        coordinates.push(CoordinateAudit {
            coordinate: i,
            chain_ge_bound: scaled_entropy_ge(&groups, 2 * matched as u64),
            bound_term: BigRational::new(BigInt::from(2 * matched), BigInt::from(m)),
            class_sizes,
            class_matched,
            matched,
            chain_term,
            classes_ok,
        });
    }

    let chain_sum: f64 = coordinates.iter().map(|c| c.chain_term).sum();
    let total = instance.total_matched();
    let delta = instance.achieved_delta();
    let two_t = BigRational::from_integer(BigInt::from(2 * t));
    let matching_bound = BigRational::new(BigInt::from(2 * total), BigInt::from(m));
    let length_bound_ok = scaled_log2_ge(&BigRational::one(), m as u64, &(&delta * &two_t));
    let claimed_length_bound_ok = scaled_log2_ge(&BigRational::one(), m as u64, &(&instance.claimed_delta * &two_t));
    let exponent = &delta * &two_t;
    let tight = exponent.is_integer()
        && exponent
            .to_integer()
            .to_u32()
            .is_some_and(|k| k < 64 && (m as u64) == 1u64 << k);

    let chain_identity_ok = (chain_sum - h_x).abs() <= CHAIN_TOLERANCE;
    // m H = m log2 m - sum c log2 c, so this is prod c^c >= 1.
    let entropy_le_log_m = power_product_ge(&counts_power(&vector_counts).1, &[]);
    let entropy_ge_matching_bound = scaled_entropy_ge(&[vector_counts.clone()], 2 * total as u64);
    let pass = chain_identity_ok
        && entropy_le_log_m
        && entropy_ge_matching_bound
        && length_bound_ok
        && coordinates.iter().all(|c| c.chain_ge_bound && c.classes_ok);

    Ok(EntropyAudit {
        m,
        t,
        entropy: h_x,
        log2_m: (m as f64).log2(),
        coordinates,
        chain_sum,
        chain_identity_ok,
        entropy_le_log_m,
        matching_bound,
        entropy_ge_matching_bound,
        achieved_delta: delta,
        length_bound_ok,
        claimed_length_bound_ok,
        tight,
        pass,
    })
}
