use crate::error::{Error, Result};
use crate::exactla::subspace::EchelonBuilder;
use crate::exactla::{Matrix, Scalar, Subspace};
use crate::grouprep::{ElemRef, MatrixGroup};

/// Translates `U^{g_1}, ..., U^{g_t}` summing to `F^n`, none redundant, with
/// dual vectors `w_i` (columns of `w`) orthogonal to every translate but the
/// `i`-th.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningFamily {
    pub g_refs: Vec<ElemRef>,
    pub u: Subspace,
    pub w: Matrix,
    pub hat_w: Vec<Vec<Scalar>>,
}

impl SpanningFamily {
    /// Family and duals for `U = colspan(Y)`.
    pub fn build(group: &MatrixGroup, y: &Matrix) -> Result<Self> {
        let u = y.column_space();
        let g_refs = minimal_spanning_family(group, &u)?;
        let (w, hat_w) = dual_vectors(group, y, &g_refs)?;
        Ok(SpanningFamily { g_refs, u, w, hat_w })
    }

    pub fn t(&self) -> usize {
        self.g_refs.len()
    }
}

/// `rho(g) Y`.
pub fn translate(group: &MatrixGroup, g: ElemRef, y: &Matrix) -> Matrix {
    group.matrix(g).mul(y)
}

fn translates(group: &MatrixGroup, u: &Subspace, gs: &[ElemRef]) -> Vec<Subspace> {
    gs.iter()
        .map(|&g| u.apply(group.matrix(g)).expect("group acts on the ambient space"))
        .collect()
}

fn sum_except(field: crate::Field, n: usize, spaces: &[Subspace], skip: usize) -> Subspace {
    let mut b = EchelonBuilder::new(field, n);
    for (k, s) in spaces.iter().enumerate() {
        if k != skip {
            for v in s.basis_vectors() {
                b.insert(&v);
            }
        }
    }
    b.finish()
}

/// Greedy scan in element order, keeping `g` whenever `U^g` adds something,
/// followed by deletion of redundant members until none is removable.
pub fn minimal_spanning_family(group: &MatrixGroup, u: &Subspace) -> Result<Vec<ElemRef>> {
    let n = group.dim();
    let field = group.field();
    if u.ambient_dim() != n || u.field() != field {
        return Err(Error::DimensionMismatch(format!(
            "subspace of {}^{} for a group acting on {field}^{n}",
            u.field(),
            u.ambient_dim()
        )));
    }
    if u.dim() == 0 {
        return Err(Error::ZeroVector);
    }
    if !group.spin_many(&u.basis_vectors())?.is_full() {
        return Err(Error::OrbitDoesNotSpan);
    }

    let mut chosen = Vec::new();
    let mut sum = EchelonBuilder::new(field, n);
    for g in group.refs() {
        let image = u.apply(group.matrix(g))?;
        let mut grew = false;
        for v in image.basis_vectors() {
            grew |= sum.insert(&v);
        }
        if grew {
            chosen.push(g);
        }
        if sum.dim() == n {
            break;
        }
    }
    if sum.dim() != n {
        return Err(Error::InternalInconsistency("translates span less than the spin".into()));
    }

    let mut spaces = translates(group, u, &chosen);
    'prune: loop {
        for i in 0..chosen.len() {
            if chosen.len() > 1 && sum_except(field, n, &spaces, i).is_full() {
                chosen.remove(i);
                spaces.remove(i);
                continue 'prune;
            }
        }
        break;
    }
    Ok(chosen)
}

/// For each `i`, the first basis vector `w` of `(sum_{j != i} U^{g_j})^perp`
/// with `(rho(g_i) Y)^t w != 0`, and `hat_w_i = (rho(g_i) Y)^t w_i`.
pub fn dual_vectors(group: &MatrixGroup, y: &Matrix, g_refs: &[ElemRef]) -> Result<(Matrix, Vec<Vec<Scalar>>)> {
    let n = group.dim();
    let field = group.field();
    let u = y.column_space();
    let spaces = translates(group, &u, g_refs);
    let mut ws = Vec::with_capacity(g_refs.len());
    let mut hat = Vec::with_capacity(g_refs.len());
    for (i, &g) in g_refs.iter().enumerate() {
        let yg_t = translate(group, g, y).transpose();
        let others = sum_except(field, n, &spaces, i);
        let found = others
            .orth_complement()
            .basis_vectors()
            .into_iter()
            .map(|w| {
                let h = yg_t.mul_vec(&w);
                (w, h)
            })
            .find(|(_, h)| h.iter().any(|x| !x.is_zero()));
        let Some((w, h)) = found else {
            return Err(Error::InternalInconsistency(format!(
                "no dual vector for family member {i}; the family is not minimal"
            )));
        };
        ws.push(w);
        hat.push(h);
    }
    let w = Matrix::from_columns(field, n, &ws)?;
    Ok((w, hat))
}

/// Outcome of re-checking every property of a [`SpanningFamily`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FamilyCheck {
    pub u_matches_y: bool,
    pub spans: bool,
    pub minimal: bool,
    pub duality: bool,
    pub hat_w_ok: bool,
    pub rank_one: bool,
    pub t: usize,
    pub t_lower_bound: usize,
    pub failures: Vec<String>,
}

impl FamilyCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_family(group: &MatrixGroup, y: &Matrix, family: &SpanningFamily) -> FamilyCheck {
    let n = group.dim();
    let field = group.field();
    let t = family.t();
    let r = y.cols();
    let mut failures = Vec::new();

    let u_matches_y = y.column_space() == family.u;
    if !u_matches_y {
        failures.push("U is not the column span of Y".to_string());
    }
    let shapes_ok = family.w.rows() == n && family.w.cols() == t && family.hat_w.len() == t;
    if !shapes_ok {
        failures.push(format!(
            "W is {}x{} with {} hat vectors, expected {n}x{t}",
            family.w.rows(),
            family.w.cols(),
            family.hat_w.len()
        ));
    }
    if let Some(g) = family.g_refs.iter().find(|g| group.check(**g).is_err()) {
        failures.push(format!("{g} is not a group element"));
        return FamilyCheck {
            u_matches_y,
            spans: false,
            minimal: false,
            duality: false,
            hat_w_ok: false,
            rank_one: false,
            t,
            t_lower_bound: n.div_ceil(r.max(1)),
            failures,
        };
    }

    let spaces = translates(group, &family.u, &family.g_refs);
    let spans = t > 0 && sum_except(field, n, &spaces, usize::MAX).is_full();
    if !spans {
        failures.push("the translates do not sum to the whole space".to_string());
    }
    let mut minimal = true;
    for i in 0..t {
        if sum_except(field, n, &spaces, i).contains(&spaces[i]).unwrap_or(true) {
            minimal = false;
            failures.push(format!("translate {i} lies in the sum of the others"));
        }
    }

    let (mut duality, mut hat_w_ok, mut rank_one) = (shapes_ok, shapes_ok, shapes_ok);
    if shapes_ok {
        let wt = family.w.transpose();
        for (j, &g) in family.g_refs.iter().enumerate() {
            let yg = translate(group, g, y);
            for i in 0..t {
                let orth = spaces[j].is_orthogonal_to(wt.row(i));
                if orth != (i != j) {
                    duality = false;
                    failures.push(format!("w_{i} orthogonality to translate {j} is {orth}"));
                }
            }
            let expect = yg.transpose().mul_vec(wt.row(j));
            if family.hat_w[j].len() != r || family.hat_w[j] != expect || expect.iter().all(Scalar::is_zero) {
                hat_w_ok = false;
                failures.push(format!("hat_w_{j} is wrong or zero"));
                continue;
            }
            // W^t rho(g_j) Y must be e_j hat_w_j^t.
            let prod = wt.mul(&yg);
            for i in 0..t {
                let ok = if i == j {
                    prod.row(i) == family.hat_w[j].as_slice()
                } else {
                    prod.row(i).iter().all(Scalar::is_zero)
                };
                if !ok {
                    rank_one = false;
                    failures.push(format!("row {i} of W^t Y^(g_{j}) is wrong"));
                }
            }
        }
    }

    let t_lower_bound = n.div_ceil(r.max(1));
    if t < t_lower_bound {
        failures.push(format!("t = {t} is below ceil(n/R) = {t_lower_bound}"));
    }
    FamilyCheck {
        u_matches_y,
        spans,
        minimal,
        duality,
        hat_w_ok,
        rank_one,
        t,
        t_lower_bound,
        failures,
    }
}

