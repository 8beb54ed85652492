use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{dot, Field, Scalar};

/// How `z` is searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZSearch {
    pub seed: u64,
    /// Random draws before the survivor bound is first tested.
    pub trials: usize,
    /// Enumerate all of `F^n` when `|F|^n` is at most this.
    pub exhaustive_limit: u64,
}

impl Default for ZSearch {
    fn default() -> Self {
        ZSearch {
            seed: 0,
            trials: 64,
            exhaustive_limit: 100_000,
        }
    }
}

impl ZSearch {
    pub fn with_seed(seed: u64) -> Self {
        ZSearch {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZMethod {
    Exhaustive,
    Random,
    MomentCurve,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZChoice {
    pub z: Vec<Scalar>,
    /// `kept[k]` iff `<normals[k], z> != 0`.
    pub kept: Vec<bool>,
    pub survivors: usize,
    pub total: usize,
    pub method: ZMethod,
    /// Points evaluated before stopping.
    pub draws: usize,
}

/// Whether `survivors` meets the hyperplane-avoidance expectation
/// `(1 - 1/|F|) total`. Always demands everything over `Q`.
pub fn survivor_bound_met(field: Field, survivors: usize, total: usize) -> bool {
    match field.order() {
        Some(q) => survivors as u128 * q as u128 >= (q as u128 - 1) * total as u128,
        None => survivors == total,
    }
}

/// Picks `z` avoiding as many of the hyperplanes `<normal, z> = 0` as it can.
///
/// Over a finite field the search is exhaustive (lexicographic, first maximum
/// wins) when `|F|^n` is small and seeded-random otherwise. Over `Q` the
/// moment curve `(1, c, c^2, ...)` is walked for `c = 1, 2, ...` until every
/// hyperplane is avoided; each nonzero normal vanishes at fewer than `n`
/// values of `c`.
pub fn choose_z(field: Field, n: usize, normals: &[Vec<Scalar>], search: &ZSearch) -> Result<ZChoice> {
    if let Some(v) = normals.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("normal of length {} in F^{n}", v.len())));
    }
    match field {
        Field::Prime(p) => {
            let residues: Vec<Vec<u64>> = normals
                .iter()
                .map(|v| v.iter().map(|s| s.residue().expect("prime-field scalar")).collect())
                .collect();
            let exhaustive = p
                .checked_pow(n as u32)
                .is_some_and(|size| size <= search.exhaustive_limit);
            let (z, draws, method) = if exhaustive {
                let (z, draws) = exhaustive_search(p, n, &residues);
                (z, draws, ZMethod::Exhaustive)
            } else {
                let (z, draws) = random_search(p, n, &residues, search)?;
                (z, draws, ZMethod::Random)
            };
            let z: Vec<Scalar> = z.into_iter().map(|x| field.from_u64(x)).collect();
            finish(field, normals, z, method, draws)
        }
        Field::Rational => {
            for c in 1u64.. {
                let cs = field.from_u64(c);
                let mut z = Vec::with_capacity(n);
                let mut x = field.one();
                for _ in 0..n {
                    z.push(x.clone());
                    x = &x * &cs;
                }
                if normals.iter().all(|v| !dot(v, &z).is_zero()) {
                    return finish(field, normals, z, ZMethod::MomentCurve, c as usize);
                }
                if c as usize > n * normals.len() + 1 {
                    return Err(Error::InternalInconsistency("a normal vector is zero".into()));
                }
            }
            unreachable!()
        }
    }
}

fn finish(field: Field, normals: &[Vec<Scalar>], z: Vec<Scalar>, method: ZMethod, draws: usize) -> Result<ZChoice> {
    let kept: Vec<bool> = normals.iter().map(|v| !dot(v, &z).is_zero()).collect();
    let survivors = kept.iter().filter(|&&k| k).count();
    let total = normals.len();
    if !survivor_bound_met(field, survivors, total) {
        return Err(Error::InternalInconsistency(format!(
            "best z keeps {survivors} of {total}, below the expectation bound"
        )));
    }
    Ok(ZChoice {
        z,
        kept,
        survivors,
        total,
        method,
        draws,
    })
}

fn survivors_mod(p: u64, normals: &[Vec<u64>], z: &[u64]) -> usize {
    normals
        .iter()
        .filter(|v| v.iter().zip(z).fold(0u64, |acc, (a, b)| (acc + a * b) % p) != 0)
        .count()
}

fn exhaustive_search(p: u64, n: usize, normals: &[Vec<u64>]) -> (Vec<u64>, usize) {
    let mut z = vec![0u64; n];
    let mut best = (survivors_mod(p, normals, &z), z.clone());
    let mut draws = 1;
    // Odometer with the first coordinate most significant.
    while let Some(k) = (0..n).rev().find(|&k| z[k] + 1 < p) {
        z[k] += 1;
        z[k + 1..].iter_mut().for_each(|x| *x = 0);
        draws += 1;
        let s = survivors_mod(p, normals, &z);
        if s > best.0 {
            best = (s, z.clone());
        }
    }
    (best.1, draws)
}

fn random_search(p: u64, n: usize, normals: &[Vec<u64>], search: &ZSearch) -> Result<(Vec<u64>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let trials = search.trials.max(1);
    let budget = trials.saturating_mul(100);
    let field = Field::Prime(p);
    let mut best: Option<(usize, Vec<u64>)> = None;
    for draw in 1..=budget {
        let z: Vec<u64> = (0..n).map(|_| rng.random_range(0..p)).collect();
        let s = survivors_mod(p, normals, &z);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, z));
        }
        let (b, z) = best.as_ref().expect("at least one draw");
        if draw >= trials && survivor_bound_met(field, *b, normals.len()) {
            return Ok((z.clone(), draw));
        }
    }
    Err(Error::BudgetExhausted(budget))
}
