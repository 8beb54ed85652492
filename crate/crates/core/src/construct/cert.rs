use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::family::{check_family, FamilyCheck, SpanningFamily};
use super::zsearch::{survivor_bound_met, ZMethod};
use super::{combine, cycle_edge_starts, ConstructionCert, ConstructionKind, Reduction};
use crate::bounds::{entropy_audit, EntropyAudit};
use crate::error::{Error, Result};
use crate::exactla::field::rational_string;
use crate::exactla::matrix::{vector_from_json, vector_to_json, EntryJson};
use crate::exactla::{Matrix, Subspace};
use crate::grouprep::{ElemRef, GroupSpec, MatrixGroup};
use crate::ldc::{CodeForm, LdcInstance, LdcJson, VerificationReport};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    pub g_refs: Vec<ElemRef>,
    /// RREF basis of `U`, one vector per row.
    pub u: Matrix,
    pub w: Matrix,
    pub hat_w: Vec<Vec<EntryJson>>,
}

/// On-disk form of a [`ConstructionCert`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertJson {
    pub kind: ConstructionKind,
    pub group: GroupSpec,
    pub group_sha256: String,
    pub group_order: usize,
    pub hs: Vec<ElemRef>,
    pub alphas: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<EntryJson>,
    pub d: Matrix,
    pub rank: usize,
    pub y: Matrix,
    pub x: Matrix,
    pub family: FamilyJson,
    pub t: usize,
    pub t_lower_bound: usize,
    pub z: Vec<EntryJson>,
    pub z_method: ZMethod,
    pub z_draws: usize,
    pub seed: u64,
    pub pre_filter_counts: Vec<usize>,
    pub beta_nonzero_count: Vec<usize>,
    pub sources: Vec<Vec<ElemRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_bound_ok: Option<bool>,
    #[serde(with = "rational_string")]
    pub achieved_delta: BigRational,
    pub code: LdcJson,
}

impl ConstructionCert {
    pub fn to_json_repr(&self) -> CertJson {
        let red = &self.reduction;
        CertJson {
            kind: self.kind,
            group: self.group.clone(),
            group_sha256: self.group_sha256.clone(),
            group_order: self.group_order,
            hs: red.hs.clone(),
            alphas: vector_to_json(&red.alphas),
            lambda: self.lambda.as_ref().map(EntryJson::from_scalar),
            d: red.d.clone(),
            rank: red.rank(),
            y: red.y.clone(),
            x: red.x.clone(),
            family: FamilyJson {
                g_refs: red.family.g_refs.clone(),
                u: red.family.u.basis().clone(),
                w: red.family.w.clone(),
                hat_w: red.family.hat_w.iter().map(|v| vector_to_json(v)).collect(),
            },
            t: self.t(),
            t_lower_bound: self.t_lower_bound,
            z: vector_to_json(&self.z),
            z_method: self.z_method,
            z_draws: self.z_draws,
            seed: self.seed,
            pre_filter_counts: self.pre_filter_counts.clone(),
            beta_nonzero_count: self.beta_nonzero_count.clone(),
            sources: self.sources.clone(),
            greedy_bound_ok: self.greedy_bound_ok,
            achieved_delta: self.achieved_delta.clone(),
            code: self.code.to_json(),
        }
    }

    /// Pretty JSON; identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_repr()).expect("certificate serializes")
    }

    pub fn from_json_repr(j: CertJson) -> Result<Self> {
        let field = j.group.field;
        let n = j.group.dim;
        let u_rows = j.family.u.row_vectors();
        if u_rows.iter().any(|r| r.len() != n) || j.family.u.field() != field {
            return Err(Error::Parse("U basis does not live in the group's space".into()));
        }
        let family = SpanningFamily {
            g_refs: j.family.g_refs,
            u: Subspace::span(field, n, u_rows)?,
            w: j.family.w,
            hat_w: j
                .family
                .hat_w
                .iter()
                .map(|v| vector_from_json(field, v))
                .collect::<Result<_>>()?,
        };
        let reduction = Reduction {
            hs: j.hs,
            alphas: vector_from_json(field, &j.alphas)?,
            d: j.d,
            y: j.y,
            x: j.x,
            family,
        };
        let code = LdcInstance::from_json(j.code)?;
        if code.t != j.t {
            return Err(Error::Parse(format!("t = {} but the code has {} coordinates", j.t, code.t)));
        }
        Ok(ConstructionCert {
            kind: j.kind,
            group: j.group,
            group_sha256: j.group_sha256,
            group_order: j.group_order,
            lambda: j.lambda.map(|l| l.to_scalar(field)).transpose()?,
            reduction,
            t_lower_bound: j.t_lower_bound,
            z: vector_from_json(field, &j.z)?,
            z_method: j.z_method,
            z_draws: j.z_draws,
            seed: j.seed,
            pre_filter_counts: j.pre_filter_counts,
            beta_nonzero_count: j.beta_nonzero_count,
            sources: j.sources,
            greedy_bound_ok: j.greedy_bound_ok,
            achieved_delta: j.achieved_delta,
            code,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CertJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_repr(j)
    }

    /// Re-derives every invariant against `group`, which must be the closure
    /// of the embedded spec.
    pub fn verify(&self, group: &MatrixGroup) -> CertVerification {
        let mut v = Verifier::default();
        let structural = self.check_structure(group, &mut v);
        if !structural {
            return v.finish(None, None, None);
        }
        let red = &self.reduction;
        let field = group.field();
        let m = group.order();

        match combine(group, &red.hs, &red.alphas) {
            Ok(d) => v.check("combination", d == red.d, || "D differs from sum alpha_l rho(h_l)".into()),
            Err(e) => v.fail("combination", e.to_string()),
        }
        v.check("kind_shape", self.kind_shape_ok(group), || {
            format!("elements/coefficients do not fit a {:?} construction", self.kind)
        });
        v.check("factorization", red.y.mul(&red.x.transpose()) == red.d, || "D != Y X^t".into());
        let rank = red.d.rank();
        v.check(
            "rank",
            rank == red.rank() && red.y.rank() == rank && red.x.rank() == rank,
            || format!("rank(D) = {rank} but the factors have {} columns or are rank deficient", red.rank()),
        );
        let family = check_family(group, &red.y, &red.family);
        v.check("spanning_family", family.pass(), || family.failures.join("; "));
        v.check("t_lower_bound", self.t_lower_bound == group.dim().div_ceil(rank.max(1)), || {
            "recorded ceil(n/R) is wrong".into()
        });

        if let Some(s) = self.orbit_projection_mismatch(group) {
            v.fail("orbit_projection", format!("code vector {s} is not the projection W^t rho(s) z"));
        } else {
            v.pass("orbit_projection");
        }

        let bad_identity = (0..self.t())
            .flat_map(|j| group.refs().map(move |s| (j, s)))
            .find(|&(j, s)| !self.tuple_identity_holds(group, j, s));
        match bad_identity {
            Some((j, s)) => v.fail(
                "tuple_identity",
                format!("sum_l alpha_l a_(g_{j} h_l {s}) is not beta e_{j}"),
            ),
            None => v.pass("tuple_identity"),
        }

        self.check_sources(group, &mut v);

        let total_pre: usize = self.pre_filter_counts.iter().sum();
        let total_kept: usize = self.beta_nonzero_count.iter().sum();
        v.check("survivor_fraction", survivor_bound_met(field, total_kept, total_pre), || {
            format!("{total_kept} of {total_pre} candidates kept")
        });
        if self.kind == ConstructionKind::General {
            let q = red.q();
            let ok = self.pre_filter_counts.iter().all(|&k| k * q * q >= m);
            v.check("greedy_bound", ok && self.greedy_bound_ok == Some(true), || {
                format!("a greedy matching has fewer than |G|/q^2 = {m}/{} sets", q * q)
            });
        }

        let target = self.target_delta(group);
        v.check("claimed_delta", self.code.claimed_delta == target, || {
            format!("claimed delta {} but the construction targets {target}", self.code.claimed_delta)
        });
        let achieved = self.code.achieved_delta();
        v.check("achieved_delta", achieved == self.achieved_delta, || {
            format!("recorded delta {} but the code achieves {achieved}", self.achieved_delta)
        });

        let report = self.code.verify();
        match report.coordinates.iter().find(|c| !c.pass) {
            Some(c) => v.fail(
                "ldc",
                format!("coordinate {}: {}", c.coordinate, c.failures[0].reason),
            ),
            None if !report.delta_ok => v.fail("ldc", format!("delta {achieved} below {target}")),
            None => v.pass("ldc"),
        }

        let audit = (self.code.form == CodeForm::Special2).then(|| entropy_audit(&self.code));
        let audit = match audit {
            Some(Ok(a)) => {
                v.check("entropy_audit", a.pass, || "an entropy inequality fails".into());
                Some(a)
            }
            Some(Err(e)) => {
                v.fail("entropy_audit", e.to_string());
                None
            }
            None => None,
        };
        v.finish(Some(report), audit, Some(family))
    }

    fn check_structure(&self, group: &MatrixGroup, v: &mut Verifier) -> bool {
        let red = &self.reduction;
        let n = group.dim();
        let m = group.order();
        let field = group.field();
        let t = self.t();
        let sq = |a: &Matrix, r: usize, c: usize| a.field() == field && a.rows() == r && a.cols() == c;
        let mut problems = Vec::new();
        if self.group_sha256 != self.group.digest() {
            problems.push("group digest does not match the embedded spec".to_string());
        }
        if self.group_order != m {
            problems.push(format!("recorded order {} but the group has {m} elements", self.group_order));
        }
        if red.hs.is_empty() || red.hs.len() != red.alphas.len() || red.hs.iter().any(|h| group.check(*h).is_err()) {
            problems.push("element list is empty, out of range, or mismatched with its coefficients".into());
        }
        let r = red.y.cols();
        if r == 0 || !sq(&red.d, n, n) || !sq(&red.y, n, r) || !sq(&red.x, n, r) {
            problems.push("D, Y, X have the wrong shapes".into());
        }
        let fam = &red.family;
        if fam.g_refs.len() != t
            || fam.g_refs.iter().any(|g| group.check(*g).is_err())
            || !sq(&fam.w, n, t)
            || fam.hat_w.len() != t
            || fam.hat_w.iter().any(|h| h.len() != r)
        {
            problems.push("spanning family has the wrong shape".into());
        }
        if self.z.len() != n {
            problems.push(format!("z has length {}", self.z.len()));
        }
        let expected_m = if self.kind == ConstructionKind::Lambda { 2 * m } else { m };
        if self.code.m() != expected_m || self.code.field != field {
            problems.push(format!("code has {} vectors, expected {expected_m}", self.code.m()));
        }
        if self.lambda.is_some() != (self.kind == ConstructionKind::Lambda) {
            problems.push("lambda present exactly for the lambda construction".into());
        }
        if self.pre_filter_counts.len() != t
            || self.beta_nonzero_count.len() != t
            || self.sources.len() != t
            || self.sources.iter().flatten().any(|s| group.check(*s).is_err())
        {
            problems.push("per-coordinate tables have the wrong length".into());
        }
        if problems.is_empty() {
            v.pass("structure");
            true
        } else {
            v.fail("structure", problems.join("; "));
            false
        }
    }

    fn kind_shape_ok(&self, group: &MatrixGroup) -> bool {
        let red = &self.reduction;
        let f = group.field();
        match self.kind {
            ConstructionKind::General => {
                self.code.form == CodeForm::General
                    && self.code.q == red.q()
                    && red.hs.iter().enumerate().all(|(k, h)| !red.hs[..k].contains(h))
            }
            ConstructionKind::Special2 | ConstructionKind::Lambda => {
                let scale = match (&self.kind, &self.lambda) {
                    (ConstructionKind::Lambda, Some(l)) => l.clone(),
                    _ => f.one(),
                };
                self.code.form == CodeForm::Special2
                    && red.hs.len() == 2
                    && red.hs[1] == group.identity()
                    && red.alphas[0].is_one()
                    && red.alphas[1] == -scale
            }
        }
    }

    /// Every kept set is the tuple of its recorded `s`, with `beta != 0`, and
    /// the counts agree.
    fn check_sources(&self, group: &MatrixGroup, v: &mut Verifier) {
        let m = group.order();
        let starts: Option<Vec<ElemRef>> =
            (self.kind != ConstructionKind::General).then(|| cycle_edge_starts(group, self.reduction.hs[0]));
        for j in 0..self.t() {
            let sets = &self.code.matchings[j].sets;
            if sets.len() != self.sources[j].len() || sets.len() != self.beta_nonzero_count[j] {
                v.fail("sources", format!("coordinate {j}: set, source and count tables disagree"));
                return;
            }
            if let Some(starts) = &starts {
                if self.pre_filter_counts[j] != starts.len() {
                    v.fail("sources", format!("coordinate {j}: pre-filter count is not the cycle edge count"));
                    return;
                }
            }
            for (k, (set, &s)) in sets.iter().zip(&self.sources[j]).enumerate() {
                let mut expect: Vec<usize> = self.reduction.tuple(group, j, s).iter().map(|e| e.0).collect();
                if self.kind == ConstructionKind::Lambda {
                    expect[1] += m;
                }
                let from_cycles = starts.as_ref().is_none_or(|st| st.contains(&s));
                if *set != expect || !from_cycles {
                    v.fail("sources", format!("coordinate {j}, set {k} is not the tuple of {s}"));
                    return;
                }
                if self.beta(group, j, s).is_zero() {
                    v.fail("sources", format!("coordinate {j}, set {k} has beta = 0"));
                    return;
                }
            }
        }
        v.pass("sources");
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertCheck {
    pub name: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertVerification {
    pub checks: Vec<CertCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ldc: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyAudit>,
    pub pass: bool,
}

impl CertVerification {
    pub fn failures(&self) -> impl Iterator<Item = &CertCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Default)]
struct Verifier {
    checks: Vec<CertCheck>,
}

impl Verifier {
    fn pass(&mut self, name: &'static str) {
        self.checks.push(CertCheck {
            name,
            pass: true,
            detail: None,
        });
    }

    fn fail(&mut self, name: &'static str, detail: String) {
        self.checks.push(CertCheck {
            name,
            pass: false,
            detail: Some(detail),
        });
    }

    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.pass(name)
        } else {
            self.fail(name, detail())
        }
    }

    fn finish(
        self,
        ldc: Option<VerificationReport>,
        entropy: Option<EntropyAudit>,
        family: Option<FamilyCheck>,
    ) -> CertVerification {
        CertVerification {
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
            family,
            ldc,
            entropy,
        }
    }
}

/// Parses a certificate, re-closes its group from the embedded spec and runs
/// [`ConstructionCert::verify`].
pub fn verify_cert(json: &str) -> Result<(ConstructionCert, CertVerification)> {
    let cert = ConstructionCert::from_json(json)?;
    let group = MatrixGroup::close(cert.group.clone())?;
    let report = cert.verify(&group);
    Ok((cert, report))
}
