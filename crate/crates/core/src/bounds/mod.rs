//! Rank lower bounds for `g - I` (and `g - lambda I`) in irreducible matrix
//! groups, plus the entropy audit behind the `m >= 2^(2 delta t)` bound for
//! special 2-query codes.
//!
//! Any inequality that mixes `log2` with rationals is decided exactly: after
//! clearing denominators it becomes a comparison between products of integer
//! powers, evaluated with big integers whenever floating point cannot
//! separate the two sides with a wide margin.

mod entropy;

pub use entropy::{
    entropy, entropy_audit, entropy_of_counts, match_entropy_check, CoordinateAudit, EntropyAudit,
    MatchEntropy,
};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exactla::field::{rational_string, rational_to_f64};
use crate::exactla::Field;
use crate::grouprep::{ElemRef, MatrixGroup};

pub fn theta(field: Field) -> BigRational {
    field.theta()
}

/// 1 for even order, `1 - 1/ord` for odd order (so 0 for the identity).
pub fn gamma(ord: usize) -> BigRational {
    assert!(ord >= 1, "element orders are positive");
    if ord.is_multiple_of(2) {
        BigRational::one()
    } else {
        BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(ord))
    }
}

/// `prod base^exp` for small bases and exponents, as factors.
pub(crate) type PowerProduct = Vec<(u64, u64)>;

fn approx_log2(p: &[(u64, u64)]) -> f64 {
    p.iter()
        .filter(|(b, e)| *e > 0 && *b > 1)
        .map(|&(b, e)| e as f64 * (b as f64).log2())
        .sum()
}

fn exact_value(p: &[(u64, u64)]) -> BigUint {
    p.iter().fold(BigUint::one(), |acc, &(b, e)| acc * Pow::pow(BigUint::from(b), e))
}

/// Decides `prod lhs >= prod rhs` for products of nonnegative integer powers.
pub(crate) fn power_product_ge(lhs: &[(u64, u64)], rhs: &[(u64, u64)]) -> bool {
    let zero_in = |p: &[(u64, u64)]| p.iter().any(|&(b, e)| b == 0 && e > 0);
    match (zero_in(lhs), zero_in(rhs)) {
        (_, true) => return true,
        (true, false) => return false,
        _ => {}
    }
    let l = approx_log2(lhs);
    let r = approx_log2(rhs);
    let margin = 1e-9 * l.abs().max(r.abs()).max(1.0);
    if l > r + margin {
        return true;
    }
    if l < r - margin {
        return false;
    }
    exact_value(lhs) >= exact_value(rhs)
}

fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("exponent fits in u64")
}

/// Decides `coeff * log2(base) >= rhs` exactly, for `coeff >= 0`, `base >= 1`.
pub fn scaled_log2_ge(coeff: &BigRational, base: u64, rhs: &BigRational) -> bool {
    assert!(!coeff.is_negative(), "coefficient must be nonnegative");
    assert!(base >= 1, "logarithm of zero");
    if !rhs.is_positive() {
        return true;
    }
    if coeff.is_zero() || base == 1 {
        return false;
    }
    // (c/d) log2 b >= r/s  <=>  b^(c s) >= 2^(r d)
    let lhs_exp = to_u64(&(coeff.numer() * rhs.denom()));
    let rhs_exp = to_u64(&(rhs.numer() * coeff.denom()));
    power_product_ge(&[(base, lhs_exp)], &[(2, rhs_exp)])
}

/// A bound of the form `numerator / (log_coeff * log2(log_arg))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogRatio {
    #[serde(with = "rational_string")]
    pub numerator: BigRational,
    #[serde(with = "rational_string")]
    pub log_coeff: BigRational,
    pub log_arg: u64,
}

impl LogRatio {
    pub fn to_f64(&self) -> f64 {
        let denom = rational_to_f64(&self.log_coeff) * (self.log_arg as f64).log2();
        if self.numerator.is_zero() {
            return 0.0;
        }
        rational_to_f64(&self.numerator) / denom
    }

    /// Exact test of `value >= bound`.
    pub fn satisfied_by(&self, value: usize) -> bool {
        let coeff = &self.log_coeff * BigRational::from_integer(BigInt::from(value));
        scaled_log2_ge(&coeff, self.log_arg, &self.numerator)
    }
}

/// `theta * gamma * n / log2 |G|`.
pub fn rank_bound(n: usize, group_size: usize, theta: &BigRational, gamma: &BigRational) -> LogRatio {
    LogRatio {
        numerator: theta * gamma * BigRational::from_integer(BigInt::from(n)),
        log_coeff: BigRational::one(),
        log_arg: group_size as u64,
    }
}

/// `n / (3 log2 |G|)`, the field- and order-free form.
pub fn uniform_rank_bound(n: usize, group_size: usize) -> LogRatio {
    LogRatio {
        numerator: BigRational::from_integer(BigInt::from(n)),
        log_coeff: BigRational::from_integer(BigInt::from(3)),
        log_arg: group_size as u64,
    }
}

/// `theta * gamma * n / (2 log2(2 |G|))`, the bound on `rank(g - lambda I)`.
pub fn lambda_bound(n: usize, group_size: usize, theta: &BigRational, gamma: &BigRational) -> LogRatio {
    LogRatio {
        numerator: theta * gamma * BigRational::from_integer(BigInt::from(n)),
        log_coeff: BigRational::from_integer(BigInt::from(2)),
        log_arg: 2 * group_size as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub h: ElemRef,
    pub ord: usize,
    #[serde(with = "rational_string")]
    pub gamma: BigRational,
    #[serde(with = "rational_string")]
    pub theta: BigRational,
    pub n: usize,
    pub group_size: usize,
    pub lower_bound: LogRatio,
    pub lower_bound_value: f64,
    pub actual_rank: usize,
    pub satisfied: bool,
    pub uniform_bound_value: f64,
    pub uniform_satisfied: bool,
}

/// One report per element acting nontrivially.
pub fn check_rank_separation(group: &MatrixGroup) -> Vec<BoundReport> {
    let n = group.dim();
    let m = group.order();
    let th = group.field().theta();
    group
        .refs()
        .filter(|&h| !group.matrix(h).is_identity())
        .map(|h| {
            let ord = group.element_order(h);
            let ga = gamma(ord);
            let rank = group.minus_identity(h).rank();
            let bound = rank_bound(n, m, &th, &ga);
            let uniform = uniform_rank_bound(n, m);
            BoundReport {
                h,
                ord,
                n,
                group_size: m,
                lower_bound_value: bound.to_f64(),
                satisfied: bound.satisfied_by(rank),
                uniform_bound_value: uniform.to_f64(),
                uniform_satisfied: uniform.satisfied_by(rank),
                lower_bound: bound,
                actual_rank: rank,
                gamma: ga,
                theta: th.clone(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedSpaceAverage {
    #[serde(with = "rational_string")]
    pub average: BigRational,
    #[serde(with = "rational_string")]
    pub bound: BigRational,
    pub pass: bool,
    /// Whether the group is certified irreducible, which the bound assumes.
    pub applicable: bool,
}

/// Exact mean of `dim C(h)` over the group, against `n/2`.
pub fn avg_fixed_space(group: &MatrixGroup) -> FixedSpaceAverage {
    let total: usize = group.refs().map(|h| group.fixed_space(h).dim()).sum();
    let average = BigRational::new(BigInt::from(total), BigInt::from(group.order()));
    let bound = BigRational::new(BigInt::from(group.dim()), BigInt::from(2));
    FixedSpaceAverage {
        pass: average <= bound,
        average,
        bound,
        applicable: group.burnside_irreducible(),
    }
}

/// Theoretical target rate for the special 2-query construction.
pub fn special_delta(field: Field, ord: usize) -> BigRational {
    field.theta() * gamma(ord) / BigRational::from_integer(BigInt::from(2))
}

/// Theoretical target rate for the general `q`-query construction.
pub fn general_delta(field: Field, q: usize) -> BigRational {
    field.theta() / BigRational::from_integer(BigInt::from(q * q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::field::parse_rational;
    use crate::exactla::Matrix;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn theta_gamma_values() {
        assert_eq!(theta(Field::Rational), r("1"));
        assert_eq!(theta(Field::Prime(2)), r("1/2"));
        assert_eq!(theta(Field::Prime(3)), r("2/3"));
        assert_eq!(gamma(2), r("1"));
        assert_eq!(gamma(3), r("2/3"));
        assert_eq!(gamma(1), r("0"));
    }

    #[test]
    fn theta_gamma_monotone() {
        let primes = [2u64, 3, 5, 7, 11, 13];
        for w in primes.windows(2) {
            assert!(theta(Field::Prime(w[0])) < theta(Field::Prime(w[1])));
        }
        for k in (1..40).step_by(2) {
            assert!(gamma(k) < gamma(k + 2));
            assert!(gamma(k) < r("1"));
        }
    }

    #[test]
    fn scaled_log_comparisons() {
        // log2 64 = 6 exactly.
        assert!(scaled_log2_ge(&r("1"), 64, &r("6")));
        assert!(!scaled_log2_ge(&r("1"), 64, &r("6000001/1000000")));
        assert!(scaled_log2_ge(&r("1/2"), 64, &r("3")));
        assert!(scaled_log2_ge(&r("0"), 10, &r("0")));
        assert!(!scaled_log2_ge(&r("0"), 10, &r("1/10")));
        // log2 10 = 3.3219...
        assert!(scaled_log2_ge(&r("1"), 10, &r("3321/1000")));
        assert!(!scaled_log2_ge(&r("1"), 10, &r("3322/1000")));
    }

    #[test]
    fn power_products_decide_ties_exactly() {
        assert!(power_product_ge(&[(8, 2)], &[(2, 6)]));
        assert!(power_product_ge(&[(2, 6)], &[(8, 2)]));
        assert!(!power_product_ge(&[(3, 4)], &[(2, 7)]));
        assert!(power_product_ge(&[(3, 4)], &[(2, 6)]));
    }

    #[test]
    fn rank_bound_for_signed_shift_reflection() {
        let b = rank_bound(4, 64, &r("2/3"), &r("1"));
        assert!((b.to_f64() - 4.0 / 9.0).abs() < 1e-12);
        assert!(b.satisfied_by(1));
        assert!(!b.satisfied_by(0));
    }

    #[test]
    fn rank_bound_for_dihedral_reflection() {
        let b = rank_bound(2, 10, &r("10/11"), &r("1"));
        let expected = (20.0 / 11.0) / 10f64.log2();
        assert!((b.to_f64() - expected).abs() < 1e-12);
        assert!((b.to_f64() - 0.547).abs() < 1e-3);
        assert!(b.satisfied_by(1));
    }

    #[test]
    fn lambda_bound_examples() {
        let b = lambda_bound(2, 10, &r("10/11"), &r("4/5"));
        let expected = (10.0 / 11.0 * 0.8 * 2.0) / (2.0 * 20f64.log2());
        assert!((b.to_f64() - expected).abs() < 1e-12);
        assert!((b.to_f64() - 0.168).abs() < 1e-3);
        assert!(b.satisfied_by(1));
        assert_eq!(lambda_bound(0, 10, &r("1"), &r("1")).to_f64(), 0.0);
        assert!(lambda_bound(0, 10, &r("1"), &r("1")).satisfied_by(0));
        // Never stronger than the identity-case bound.
        for m in [2usize, 6, 64, 1000] {
            for n in 1..6 {
                let a = lambda_bound(n, m, &r("2/3"), &r("1")).to_f64();
                let b = rank_bound(n, m, &r("2/3"), &r("1")).to_f64();
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn trivial_group_average_is_n() {
        let g = MatrixGroup::from_generators(Field::Prime(5), 3, vec![Matrix::identity(Field::Prime(5), 3)]).unwrap();
        let a = avg_fixed_space(&g);
        assert_eq!(a.average, r("3"));
        assert!(!a.pass);
        assert!(!a.applicable);
        assert!(check_rank_separation(&g).is_empty());
    }
}
