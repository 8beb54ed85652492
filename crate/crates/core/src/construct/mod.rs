//! From a low-rank combination `D = sum_l alpha_l rho(h_l)` to a certified
//! linear LDC.
//!
//! With `D = Y X^t`, `U = colspan(Y)` and a minimal family `g_1..g_t` whose
//! translates of `U` span, the code vectors are `a_s = W^t rho(s) z` for
//! `s` in the group. Every tuple `{g_j h_l s}` then satisfies
//! `sum_l alpha_l a_{g_j h_l s} = beta_{j,s}(z) e_j` with
//! `beta_{j,s}(z) = <X hat_w_j, rho(s) z>`, and tuples with `beta != 0` are
//! kept.

mod cert;
mod family;
mod zsearch;

pub use cert::{verify_cert, CertCheck, CertJson, CertVerification};
pub use family::{check_family, dual_vectors, minimal_spanning_family, translate, FamilyCheck, SpanningFamily};
pub use zsearch::{choose_z, survivor_bound_met, ZChoice, ZMethod, ZSearch};

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bounds::{general_delta, special_delta};
use crate::error::{Error, Result};
use crate::exactla::{dot, unit_vector, vec_axpy, vec_scale, vec_sub, Matrix, Scalar};
use crate::grouprep::{ElemRef, MatrixGroup};
use crate::ldc::{greedy_matching, CodeForm, LdcInstance, QMatching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionKind {
    /// `q` arbitrary, greedy tuple matchings, general-form code.
    General,
    /// `D = rho(h) - I`, cycle matchings, special-form code.
    Special2,
    /// `D = rho(h) - lambda I` on the doubled code `A, lambda A`.
    Lambda,
}

/// `sum_l alpha_l rho(h_l)`.
pub fn combine(group: &MatrixGroup, hs: &[ElemRef], alphas: &[Scalar]) -> Result<Matrix> {
    if hs.is_empty() || hs.len() != alphas.len() {
        return Err(Error::InvalidInput(format!(
            "{} elements with {} coefficients",
            hs.len(),
            alphas.len()
        )));
    }
    let field = group.field();
    let mut d = Matrix::zeros(field, group.dim(), group.dim());
    for (&h, a) in hs.iter().zip(alphas) {
        group.check(h)?;
        if a.field() != field {
            return Err(Error::FieldMismatch(format!("coefficient over {} for a group over {field}", a.field())));
        }
        d = d.try_add(&group.matrix(h).scale(a))?;
    }
    Ok(d)
}

/// Everything the pipeline derives before `z` is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub hs: Vec<ElemRef>,
    pub alphas: Vec<Scalar>,
    pub d: Matrix,
    pub y: Matrix,
    pub x: Matrix,
    pub family: SpanningFamily,
}

impl Reduction {
    pub fn new(group: &MatrixGroup, hs: Vec<ElemRef>, alphas: Vec<Scalar>) -> Result<Self> {
        let d = combine(group, &hs, &alphas)?;
        let (y, x) = d.rank_factorize()?;
        let family = SpanningFamily::build(group, &y)?;
        Ok(Reduction {
            hs,
            alphas,
            d,
            y,
            x,
            family,
        })
    }

    /// `R = rank(D)`.
    pub fn rank(&self) -> usize {
        self.y.cols()
    }

    pub fn t(&self) -> usize {
        self.family.t()
    }

    pub fn q(&self) -> usize {
        self.hs.len()
    }

    /// `X hat_w_j`.
    pub fn x_hat_w(&self, j: usize) -> Vec<Scalar> {
        self.x.mul_vec(&self.family.hat_w[j])
    }

    /// `rho(s)^t X hat_w_j`, the normal of the hyperplane `beta_{j,s} = 0`.
    pub fn normal(&self, group: &MatrixGroup, j: usize, s: ElemRef) -> Vec<Scalar> {
        group.matrix(s).transpose().mul_vec(&self.x_hat_w(j))
    }

    /// `beta_{j,s}(z) = <X hat_w_j, rho(s) z>`.
    pub fn beta(&self, group: &MatrixGroup, j: usize, s: ElemRef, z: &[Scalar]) -> Scalar {
        dot(&self.x_hat_w(j), &group.matrix(s).mul_vec(z))
    }

    /// `a_s = W^t rho(s) z`.
    pub fn code_vector(&self, group: &MatrixGroup, s: ElemRef, z: &[Scalar]) -> Vec<Scalar> {
        self.family.w.transpose().mul_vec(&group.matrix(s).mul_vec(z))
    }

    /// `(g_j h_1 s, ..., g_j h_q s)`.
    pub fn tuple(&self, group: &MatrixGroup, j: usize, s: ElemRef) -> Vec<ElemRef> {
        let g = self.family.g_refs[j];
        self.hs.iter().map(|&h| group.mul3(g, h, s)).collect()
    }
}

/// A matched set before filtering: coordinate, the `s` it came from, and
/// its code indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub coordinate: usize,
    pub s: ElemRef,
    pub members: Vec<usize>,
}

/// `s = c_0, c_2, c_4, ...` along each cycle `c` of `s -> h s`, so that the
/// edges `{s, h s}` are pairwise disjoint: all of them for even cycle length,
/// `(len - 1) / 2` for odd.
pub fn cycle_edge_starts(group: &MatrixGroup, h: ElemRef) -> Vec<ElemRef> {
    group
        .mult_cycles(h)
        .cycles
        .iter()
        .flat_map(|c| (0..c.len() / 2).map(move |k| c[2 * k]))
        .collect()
}

/// Pre-filter candidates for every coordinate.
pub fn candidates(group: &MatrixGroup, red: &Reduction, kind: ConstructionKind) -> Vec<Candidate> {
    let m = group.order();
    let mut out = Vec::new();
    match kind {
        ConstructionKind::General => {
            for j in 0..red.t() {
                let tuples: Vec<Vec<usize>> = group
                    .refs()
                    .map(|s| red.tuple(group, j, s).into_iter().map(|e| e.0).collect())
                    .collect();
                // Distinct s give distinct first members, so this inverts the tuple map.
                let origin: HashMap<&[usize], ElemRef> =
                    tuples.iter().enumerate().map(|(k, t)| (t.as_slice(), ElemRef(k))).collect();
                for set in greedy_matching(red.q(), &tuples).sets {
                    out.push(Candidate {
                        coordinate: j,
                        s: origin[set.as_slice()],
                        members: set,
                    });
                }
            }
        }
        ConstructionKind::Special2 | ConstructionKind::Lambda => {
            let starts = cycle_edge_starts(group, red.hs[0]);
            for j in 0..red.t() {
                for &s in &starts {
                    let pair = red.tuple(group, j, s);
                    let second = if kind == ConstructionKind::Lambda {
                        m + pair[1].0
                    } else {
                        pair[1].0
                    };
                    out.push(Candidate {
                        coordinate: j,
                        s,
                        members: vec![pair[0].0, second],
                    });
                }
            }
        }
    }
    out
}

/// A finished construction with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionCert {
    pub kind: ConstructionKind,
    pub group: crate::grouprep::GroupSpec,
    pub group_sha256: String,
    pub group_order: usize,
    pub lambda: Option<Scalar>,
    pub reduction: Reduction,
    pub t_lower_bound: usize,
    pub z: Vec<Scalar>,
    pub z_method: ZMethod,
    pub z_draws: usize,
    pub seed: u64,
    /// Candidate sets per coordinate before filtering.
    pub pre_filter_counts: Vec<usize>,
    /// Sets per coordinate with `beta != 0`, i.e. the final matching sizes.
    pub beta_nonzero_count: Vec<usize>,
    /// For each kept set, the `s` it came from.
    pub sources: Vec<Vec<ElemRef>>,
    /// General form only: whether every greedy matching reached `|G| / q^2`.
    pub greedy_bound_ok: Option<bool>,
    pub code: LdcInstance,
    pub achieved_delta: BigRational,
}

impl ConstructionCert {
    pub fn m(&self) -> usize {
        self.code.m()
    }

    pub fn t(&self) -> usize {
        self.code.t
    }

    pub fn rank(&self) -> usize {
        self.reduction.rank()
    }

    pub fn beta(&self, group: &MatrixGroup, j: usize, s: ElemRef) -> Scalar {
        self.reduction.beta(group, j, s, &self.z)
    }

    /// Left side of the tuple identity for `(j, s)`, read off the code
    /// vectors; it should equal `beta_{j,s}(z) e_j`.
    pub fn spanning_tuple_identity(&self, group: &MatrixGroup, j: usize, s: ElemRef) -> Vec<Scalar> {
        let red = &self.reduction;
        let tuple = red.tuple(group, j, s);
        let v = &self.code.vectors;
        if self.kind == ConstructionKind::Lambda {
            let m = group.order();
            return vec_sub(&v[tuple[0].0], &v[m + tuple[1].0]);
        }
        let mut acc = vec![group.field().zero(); self.t()];
        for (e, a) in tuple.iter().zip(&red.alphas) {
            vec_axpy(&mut acc, a, &v[e.0]);
        }
        acc
    }

    pub fn tuple_identity_holds(&self, group: &MatrixGroup, j: usize, s: ElemRef) -> bool {
        let rhs = vec_scale(&unit_vector(group.field(), self.t(), j), &self.beta(group, j, s));
        self.spanning_tuple_identity(group, j, s) == rhs
    }

    /// First `s` (or `m + s` in the scaled half) whose code vector is not
    /// `W^t rho(s) z`.
    pub fn orbit_projection_mismatch(&self, group: &MatrixGroup) -> Option<usize> {
        let m = group.order();
        for s in group.refs() {
            let a = self.reduction.code_vector(group, s, &self.z);
            if self.code.vectors[s.0] != a {
                return Some(s.0);
            }
            if let Some(l) = &self.lambda {
                if self.code.vectors[m + s.0] != vec_scale(&a, l) {
                    return Some(m + s.0);
                }
            }
        }
        None
    }

    pub fn orbit_projection_check(&self, group: &MatrixGroup) -> bool {
        self.orbit_projection_mismatch(group).is_none()
    }

    /// The rate this construction is designed to reach.
    pub fn target_delta(&self, group: &MatrixGroup) -> BigRational {
        target_delta(group, self.kind, &self.reduction)
    }
}

fn target_delta(group: &MatrixGroup, kind: ConstructionKind, red: &Reduction) -> BigRational {
    let field = group.field();
    match kind {
        ConstructionKind::General => general_delta(field, red.q()),
        ConstructionKind::Special2 => special_delta(field, group.element_order(red.hs[0])),
        ConstructionKind::Lambda => {
            special_delta(field, group.element_order(red.hs[0])) / BigRational::from_integer(BigInt::from(2))
        }
    }
}

fn assemble(
    group: &MatrixGroup,
    kind: ConstructionKind,
    red: Reduction,
    lambda: Option<Scalar>,
    search: &ZSearch,
) -> Result<ConstructionCert> {
    let field = group.field();
    let n = group.dim();
    let t = red.t();
    let cands = candidates(group, &red, kind);
    let normals: Vec<Vec<Scalar>> = cands.iter().map(|c| red.normal(group, c.coordinate, c.s)).collect();
    let choice = choose_z(field, n, &normals, search)?;

    let mut vectors: Vec<Vec<Scalar>> = group.refs().map(|s| red.code_vector(group, s, &choice.z)).collect();
    if let Some(l) = &lambda {
        let scaled: Vec<Vec<Scalar>> = vectors.iter().map(|a| vec_scale(a, l)).collect();
        vectors.extend(scaled);
    }

    let q = red.q();
    let mut pre = vec![0usize; t];
    let mut sets = vec![Vec::new(); t];
    let mut sources = vec![Vec::new(); t];
    for (c, &kept) in cands.iter().zip(&choice.kept) {
        pre[c.coordinate] += 1;
        if kept {
            sets[c.coordinate].push(c.members.clone());
            sources[c.coordinate].push(c.s);
        }
    }
    let beta_nonzero_count: Vec<usize> = sets.iter().map(Vec::len).collect();
    let greedy_bound_ok = (kind == ConstructionKind::General).then(|| pre.iter().all(|&k| k * q * q >= group.order()));
    let form = if kind == ConstructionKind::General {
        CodeForm::General
    } else {
        CodeForm::Special2
    };
    let claimed = target_delta(group, kind, &red);
    let matchings = sets.into_iter().map(|s| QMatching::from_sets(q, s)).collect();
    let code = LdcInstance::new(field, t, vectors, matchings, form, q, claimed)?;
    Ok(ConstructionCert {
        kind,
        group: group.spec().clone(),
        group_sha256: group.spec().digest(),
        group_order: group.order(),
        lambda,
        t_lower_bound: n.div_ceil(red.rank()),
        z: choice.z,
        z_method: choice.method,
        z_draws: choice.draws,
        seed: search.seed,
        pre_filter_counts: pre,
        beta_nonzero_count,
        sources,
        greedy_bound_ok,
        achieved_delta: code.achieved_delta(),
        code,
        reduction: red,
    })
}

/// General `q`-query construction from arbitrary distinct `h_l` and
/// coefficients `alpha_l`.
pub fn build_q_ldc(group: &MatrixGroup, hs: &[ElemRef], alphas: &[Scalar], search: &ZSearch) -> Result<ConstructionCert> {
    for (k, h) in hs.iter().enumerate() {
        group.check(*h)?;
        if hs[..k].contains(h) {
            return Err(Error::InvalidInput(format!("{h} is listed twice")));
        }
    }
    let red = Reduction::new(group, hs.to_vec(), alphas.to_vec())?;
    assemble(group, ConstructionKind::General, red, None, search)
}

/// Special 2-query construction from `D = rho(h) - I`.
pub fn build_special_2ldc(group: &MatrixGroup, h: ElemRef, search: &ZSearch) -> Result<ConstructionCert> {
    group.check(h)?;
    if group.matrix(h).is_identity() {
        return Err(Error::IdentityElement);
    }
    let f = group.field();
    let red = Reduction::new(group, vec![h, group.identity()], vec![f.one(), -f.one()])?;
    assemble(group, ConstructionKind::Special2, red, None, search)
}

/// Special 2-query construction from `D = rho(h) - lambda I`, on the code
/// `a_1..a_m, lambda a_1..lambda a_m` with pairs `(g_j h s, m + g_j s)`.
pub fn lambda_variant(group: &MatrixGroup, h: ElemRef, lambda: &Scalar, search: &ZSearch) -> Result<ConstructionCert> {
    group.check(h)?;
    if lambda.field() != group.field() {
        return Err(Error::FieldMismatch(format!("lambda over {}", lambda.field())));
    }
    if lambda.is_zero() {
        return Err(Error::InvalidInput("lambda must be nonzero".into()));
    }
    let scalar = Matrix::scalar_identity(group.dim(), lambda);
    if *group.matrix(h) == scalar {
        return Err(Error::ScalarMultipleOfIdentity);
    }
    let red = Reduction::new(group, vec![h, group.identity()], vec![group.field().one(), -lambda.clone()])?;
    assemble(group, ConstructionKind::Lambda, red, Some(lambda.clone()), search)
}

#[cfg(test)]
mod tests;
