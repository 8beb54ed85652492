use num_traits::One;

use super::*;
use crate::exactla::field::parse_rational;
use crate::exactla::{Field, Subspace};
use crate::fixtures::{dihedral_rep, scalar_element, signed_shift_group, Fixture};
use crate::grouprep::DEFAULT_CAP;

fn r(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn gf3_shift4() -> MatrixGroup {
    signed_shift_group(4, Field::Prime(3)).unwrap()
}

/// Dimension of the sum of the translates, by stacking bases and row reducing.
fn sum_dim(group: &MatrixGroup, u: &Subspace, gs: &[ElemRef]) -> usize {
    let rows: Vec<Vec<Scalar>> = gs
        .iter()
        .flat_map(|&g| u.basis_vectors().into_iter().map(move |v| group.matrix(g).mul_vec(&v)))
        .collect();
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(group.field(), rows).unwrap().rank()
}

#[test]
fn combine_examples() {
    let g = gf3_shift4();
    let f = g.field();
    let d = combine(&g, &[ElemRef(1), g.identity()], &[f.one(), -f.one()]).unwrap();
    assert_eq!(d, Matrix::diagonal(f, &[1, 0, 0, 0]));
    let z = combine(&g, &[ElemRef(1), ElemRef(2)], &[f.zero(), f.zero()]).unwrap();
    assert!(z.is_zero());
    assert!(combine(&g, &[ElemRef(1)], &[]).is_err());
}

#[test]
fn spanning_family_examples() {
    let g = gf3_shift4();
    let f = g.field();
    assert_eq!(minimal_spanning_family(&g, &Subspace::full(f, 4)).unwrap(), vec![g.identity()]);

    let e1 = Subspace::span(f, 4, vec![unit_vector(f, 4, 0)]).unwrap();
    let fam = minimal_spanning_family(&g, &e1).unwrap();
    assert_eq!(fam.len(), 4);
    assert_eq!(sum_dim(&g, &e1, &fam), 4);
    for i in 0..fam.len() {
        let mut rest = fam.clone();
        rest.remove(i);
        assert!(sum_dim(&g, &e1, &rest) < 4);
    }

    let shifts = Fixture::Shift { n: 4, field: f }.generate(DEFAULT_CAP).unwrap();
    assert_eq!(minimal_spanning_family(&shifts, &e1).unwrap().len(), 4);
    let ones = Subspace::span(f, 4, vec![vec![f.one(); 4]]).unwrap();
    assert_eq!(minimal_spanning_family(&shifts, &ones).unwrap_err(), Error::OrbitDoesNotSpan);
}

#[test]
fn dual_vectors_for_signed_shift_are_coordinate_directions() {
    let g = gf3_shift4();
    let f = g.field();
    let y = Matrix::from_columns(f, 4, &[unit_vector(f, 4, 0)]).unwrap();
    let fam = SpanningFamily::build(&g, &y).unwrap();
    let check = check_family(&g, &y, &fam);
    assert!(check.pass(), "{:?}", check.failures);
    // Each translate is a coordinate line, so w_i must be supported on it.
    for (j, &gj) in fam.g_refs.iter().enumerate() {
        let line = fam.u.apply(g.matrix(gj)).unwrap();
        let k = (0..4).find(|&k| line.contains_vector(&unit_vector(f, 4, k))).unwrap();
        let w = fam.w.column(j);
        assert!((0..4).all(|c| (c == k) != w[c].is_zero()));
    }
}

#[test]
fn dihedral_family_satisfies_rank_one_products() {
    let g = dihedral_rep(5, 11).unwrap();
    let f = g.field();
    let d = g.minus_identity(ElemRef(2));
    assert_eq!(d.rank(), 1);
    let (y, _) = d.rank_factorize().unwrap();
    let fam = SpanningFamily::build(&g, &y).unwrap();
    assert_eq!(fam.t(), 2);
    let wt = fam.w.transpose();
    for (j, &gj) in fam.g_refs.iter().enumerate() {
        let prod = wt.mul(&translate(&g, gj, &y));
        for i in 0..2 {
            let expect = if i == j { fam.hat_w[j].clone() } else { vec![f.zero()] };
            assert_eq!(prod.row(i), expect.as_slice());
        }
    }
}

#[test]
fn beta_vanishes_on_a_third_of_gf3() {
    let g = gf3_shift4();
    let f = g.field();
    let red = Reduction::new(&g, vec![ElemRef(1), g.identity()], vec![f.one(), -f.one()]).unwrap();
    let zero = vec![f.zero(); 4];
    assert!(g.refs().all(|s| red.beta(&g, 0, s, &zero).is_zero()));

    let points: Vec<Vec<Scalar>> = (0..81u64)
        .map(|k| (0..4).map(|i| f.from_u64(k / 3u64.pow(3 - i) % 3)).collect())
        .collect();
    let mut nonzero = 0usize;
    for z in &points {
        for j in 0..red.t() {
            nonzero += g.refs().filter(|&s| !red.beta(&g, j, s, z).is_zero()).count();
        }
    }
    // Each beta is a nonzero linear form, nonzero at exactly 54 of 81 points.
    assert_eq!(nonzero, 54 * red.t() * g.order());
}

#[test]
fn choose_z_keeps_two_thirds_of_twelve() {
    let g = gf3_shift4();
    let f = g.field();
    let red = Reduction::new(&g, vec![ElemRef(1), g.identity()], vec![f.one(), -f.one()]).unwrap();
    let cands: Vec<Candidate> = candidates(&g, &red, ConstructionKind::Special2).into_iter().take(12).collect();
    let normals: Vec<Vec<Scalar>> = cands.iter().map(|c| red.normal(&g, c.coordinate, c.s)).collect();
    let best = (0..81u64)
        .map(|k| {
            let z: Vec<Scalar> = (0..4).map(|i| f.from_u64(k / 3u64.pow(3 - i) % 3)).collect();
            cands.iter().filter(|c| !red.beta(&g, c.coordinate, c.s, &z).is_zero()).count()
        })
        .max()
        .unwrap();
    let choice = choose_z(f, 4, &normals, &ZSearch::default()).unwrap();
    assert!(choice.survivors >= 8);
    assert_eq!(choice.survivors, best);
}

#[test]
fn special_signed_shift_reflection() {
    let g = gf3_shift4();
    let cert = build_special_2ldc(&g, ElemRef(1), &ZSearch::default()).unwrap();
    assert_eq!((cert.rank(), cert.t(), cert.m()), (1, 4, 64));
    assert_eq!(cert.pre_filter_counts, vec![32; 4]);
    assert!(cert.achieved_delta >= r("1/3"));
    assert_eq!(cert.code.claimed_delta, r("1/3"));
    assert!(cert.code.verify().pass);
    for j in 0..4 {
        for s in g.refs() {
            assert!(cert.tuple_identity_holds(&g, j, s));
            if cert.beta(&g, j, s).is_zero() {
                assert!(cert.spanning_tuple_identity(&g, j, s).iter().all(Scalar::is_zero));
            }
        }
    }
    assert!(cert.orbit_projection_check(&g));
    let report = cert.verify(&g);
    assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());
}

#[test]
fn rational_signed_shift_loses_nothing() {
    let g = signed_shift_group(4, Field::Rational).unwrap();
    let cert = build_special_2ldc(&g, ElemRef(1), &ZSearch::default()).unwrap();
    assert_eq!(cert.achieved_delta, r("1/2"));
    assert_eq!(cert.beta_nonzero_count, cert.pre_filter_counts);
    assert_eq!(cert.z_method, ZMethod::MomentCurve);
    assert!(cert.verify(&g).pass);
}

#[test]
fn odd_order_element_in_cyclic_group() {
    let g = Fixture::Cyclic { p: 7, a: 3 }.generate(DEFAULT_CAP).unwrap();
    let h = scalar_element(&g, &Field::Prime(7).from_u64(2)).unwrap();
    let cert = build_special_2ldc(&g, h, &ZSearch::default()).unwrap();
    assert_eq!(cert.t(), 1);
    assert_eq!(cert.pre_filter_counts, vec![2]);
    assert_eq!(cert.code.claimed_delta, r("6/7") * r("1/3"));
    assert!(cert.verify(&g).pass);
}

#[test]
fn q3_dihedral_with_rank_one_combination() {
    let g = dihedral_rep(5, 11).unwrap();
    let f = g.field();
    let hs = [ElemRef(1), ElemRef(2), g.identity()];
    let alphas = (1..11u64)
        .flat_map(|a| (0..11u64).flat_map(move |b| (0..11u64).map(move |c| [a, b, c])))
        .map(|abc| abc.map(|x| f.from_u64(x)).to_vec())
        .find(|al| combine(&g, &hs, al).unwrap().rank() == 1)
        .unwrap();
    let cert = build_q_ldc(&g, &hs, &alphas, &ZSearch::default()).unwrap();
    assert_eq!((cert.m(), cert.t()), (10, 2));
    assert_eq!(cert.code.claimed_delta, r("10/99"));
    assert_eq!(cert.greedy_bound_ok, Some(true));
    assert!(cert.code.verify().pass);
    assert!(cert.verify(&g).pass);
    assert!(build_q_ldc(&g, &[ElemRef(1), ElemRef(1)], &alphas[..2], &ZSearch::default()).is_err());
}

#[test]
fn q2_general_matches_special_counts() {
    let g = gf3_shift4();
    let f = g.field();
    let cert = build_q_ldc(&g, &[ElemRef(1), g.identity()], &[f.one(), -f.one()], &ZSearch::default()).unwrap();
    let special = build_special_2ldc(&g, ElemRef(1), &ZSearch::default()).unwrap();
    assert_eq!((cert.m(), cert.t()), (64, 4));
    assert_eq!(cert.pre_filter_counts, special.pre_filter_counts);
    assert!(cert.verify(&g).pass);
}

#[test]
fn degenerate_inputs() {
    let g = gf3_shift4();
    let f = g.field();
    assert_eq!(
        build_special_2ldc(&g, g.identity(), &ZSearch::default()).unwrap_err(),
        Error::IdentityElement
    );
    assert_eq!(
        build_q_ldc(&g, &[ElemRef(1), ElemRef(2)], &[f.zero(), f.zero()], &ZSearch::default()).unwrap_err(),
        Error::ZeroMatrix
    );
    let c = Fixture::Cyclic { p: 7, a: 3 }.generate(DEFAULT_CAP).unwrap();
    let h = scalar_element(&c, &Field::Prime(7).from_u64(2)).unwrap();
    assert_eq!(
        lambda_variant(&c, h, &Field::Prime(7).from_u64(2), &ZSearch::default()).unwrap_err(),
        Error::ScalarMultipleOfIdentity
    );
    assert!(lambda_variant(&g, ElemRef(1), &f.zero(), &ZSearch::default()).is_err());
}

#[test]
fn lambda_one_halves_delta() {
    let g = gf3_shift4();
    let f = g.field();
    let special = build_special_2ldc(&g, ElemRef(1), &ZSearch::default()).unwrap();
    let lam = lambda_variant(&g, ElemRef(1), &f.one(), &ZSearch::default()).unwrap();
    assert_eq!(lam.m(), 128);
    assert_eq!(lam.code.vectors[..64], lam.code.vectors[64..]);
    assert_eq!(lam.pre_filter_counts, special.pre_filter_counts);
    assert_eq!(&lam.achieved_delta * BigRational::from_integer(2.into()), special.achieved_delta);
    assert!(lam.verify(&g).pass);
}

#[test]
fn lambda_on_dihedral_rotation() {
    let g = dihedral_rep(5, 11).unwrap();
    let f = g.field();
    let h = g.position(&Matrix::diagonal(f, &[9, 5])).unwrap();
    let nine = f.from_u64(9);
    assert_eq!(g.matrix(h).try_sub(&Matrix::scalar_identity(2, &nine)).unwrap().rank(), 1);
    let cert = lambda_variant(&g, h, &nine, &ZSearch::default()).unwrap();
    assert_eq!((cert.m(), cert.t()), (20, 2));
    assert_eq!(cert.code.claimed_delta, r("10/11") * r("4/5") / r("4"));
    assert!(cert.orbit_projection_check(&g));
    let report = cert.verify(&g);
    assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());
}

#[test]
fn perturbed_vector_breaks_the_projection() {
    let g = gf3_shift4();
    let mut cert = build_special_2ldc(&g, ElemRef(1), &ZSearch::default()).unwrap();
    let x = &cert.code.vectors[5][2] + &g.field().one();
    cert.code.vectors[5][2] = x;
    assert!(!cert.orbit_projection_check(&g));
    assert_eq!(cert.orbit_projection_mismatch(&g), Some(5));
    let report = cert.verify(&g);
    assert!(!report.pass);
    assert!(report.failures().any(|c| c.name == "orbit_projection"));
}

#[test]
fn scaled_half_is_checked_too() {
    let g = dihedral_rep(5, 11).unwrap();
    let f = g.field();
    let h = g.position(&Matrix::diagonal(f, &[9, 5])).unwrap();
    let mut cert = lambda_variant(&g, h, &f.from_u64(9), &ZSearch::default()).unwrap();
    let x = &cert.code.vectors[13][0] + &f.one();
    cert.code.vectors[13][0] = x;
    assert_eq!(cert.orbit_projection_mismatch(&g), Some(13));
}

#[test]
fn json_round_trip_and_determinism() {
    let g = gf3_shift4();
    let a = build_special_2ldc(&g, ElemRef(1), &ZSearch::with_seed(9)).unwrap();
    let b = build_special_2ldc(&g, ElemRef(1), &ZSearch::with_seed(9)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let back = ConstructionCert::from_json(&a.to_json()).unwrap();
    assert_eq!(back, a);
    let (_, report) = verify_cert(&a.to_json()).unwrap();
    assert!(report.pass);
    assert!(report.entropy.as_ref().unwrap().pass);
    assert!(matches!(ConstructionCert::from_json("{"), Err(Error::Parse(_))));
}

#[test]
fn random_z_path_verifies() {
    let g = gf3_shift4();
    let search = ZSearch {
        seed: 3,
        trials: 16,
        exhaustive_limit: 0,
    };
    let cert = build_special_2ldc(&g, ElemRef(1), &search).unwrap();
    assert_eq!(cert.z_method, ZMethod::Random);
    assert!(cert.achieved_delta >= r("1/3"));
    assert!(cert.verify(&g).pass);
    assert!(BigRational::one() > cert.achieved_delta);
}
