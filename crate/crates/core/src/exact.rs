//! Exact rational arithmetic for discounted sums, recoverable gaps, lasso
//! closed forms, and rational recovery from intervals.
//!
//! Every verdict-bearing computation in this crate goes through the functions
//! here; there is no floating point anywhere on those paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lasso::LassoWeights;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type ExactNumber = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("discount factor must be > 1, got {0}")]
    DiscountNotGreaterThanOne(String),
    #[error("lasso loop must be nonempty")]
    EmptyLoop,
    #[error("empty interval: lo > hi")]
    EmptyInterval,
    #[error("denominator bound must be positive")]
    ZeroDenominatorBound,
}

pub fn rational(n: i64, d: i64) -> ExactNumber {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> ExactNumber {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders `p/q` with an explicit denominator, even when it is 1.
pub fn format_exact(x: &ExactNumber) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a plain integer.
pub fn parse_exact(s: &str) -> Option<ExactNumber> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.trim().parse().ok()?;
            Some(BigRational::from_integer(n))
        }
    }
}

fn check_discount(d: &ExactNumber) -> Result<(), ExactError> {
    if *d <= BigRational::one() {
        return Err(ExactError::DiscountNotGreaterThanOne(format_exact(d)));
    }
    Ok(())
}

/// Discounted sum of a finite weight sequence: sum of w\[i\]/d^i.
///
/// The empty sequence sums to 0.
pub fn ds_finite(w: &[i64], d: &ExactNumber) -> Result<ExactNumber, ExactError> {
    check_discount(d)?;
    // Horner from the right keeps intermediate values small.
    let mut acc = BigRational::zero();
    for &x in w.iter().rev() {
        acc = integer(x) + acc / d;
    }
    Ok(acc)
}

/// Plain sum of a finite weight sequence.
pub fn sum_finite(w: &[i64]) -> i64 {
    w.iter().sum()
}

/// Recoverable gap of a finite weight sequence: d^(|w|-1) * DS(w, d),
/// computed by the inductive rule gap(eps) = 0, gap(W.v) = d*gap(W) + v.
pub fn gap(w: &[i64], d: &ExactNumber) -> Result<ExactNumber, ExactError> {
    check_discount(d)?;
    let mut g = BigRational::zero();
    for &v in w {
        g = d * g + integer(v);
    }
    Ok(g)
}

/// Exact discounted sum of head . loop^omega via the closed form
/// DS(head) + d^(-|head|) * d^|loop| / (d^|loop| - 1) * DS(loop).
///
/// For d = p/q in lowest terms the denominator divides
/// (p^|loop| - q^|loop|) * p^(|head| + |loop|).
pub fn ds_lasso(l: &LassoWeights, d: &ExactNumber) -> Result<ExactNumber, ExactError> {
    check_discount(d)?;
    if l.cycle.is_empty() {
        return Err(ExactError::EmptyLoop);
    }
    let head_ds = ds_finite(&l.head, d)?;
    let loop_ds = ds_finite(&l.cycle, d)?;
    let d_head = pow_rational(d, l.head.len() as u32);
    let d_loop = pow_rational(d, l.cycle.len() as u32);
    let factor = &d_loop / (&d_loop - BigRational::one());
    Ok(head_ds + factor * loop_ds / d_head)
}

/// Largest integer appearing infinitely often: the maximum of the loop.
pub fn limsup_lasso(l: &LassoWeights) -> Result<i64, ExactError> {
    l.cycle.iter().copied().max().ok_or(ExactError::EmptyLoop)
}

/// Smallest integer appearing infinitely often: the minimum of the loop.
pub fn liminf_lasso(l: &LassoWeights) -> Result<i64, ExactError> {
    l.cycle.iter().copied().min().ok_or(ExactError::EmptyLoop)
}

pub fn pow_rational(d: &ExactNumber, e: u32) -> ExactNumber {
    BigRational::new(d.numer().pow(e), d.denom().pow(e))
}

/// Result of searching an interval for a rational with bounded denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalRecovery {
    /// Exactly one rational with denominator <= bound lies in the interval.
    Unique(ExactNumber),
    /// Several exist; this is the smallest-denominator one.
    Ambiguous(ExactNumber),
    /// None exists.
    None,
}

/// Finds the rational with denominator <= `denom_bound` inside `[lo, hi]`,
/// by Stern-Brocot / continued-fraction descent to the simplest rational in
/// the interval, then a Farey-neighbor scan for uniqueness.
pub fn best_rational_in_interval(
    lo: &ExactNumber,
    hi: &ExactNumber,
    denom_bound: &BigInt,
) -> Result<RationalRecovery, ExactError> {
    if lo > hi {
        return Err(ExactError::EmptyInterval);
    }
    if denom_bound <= &BigInt::zero() {
        return Err(ExactError::ZeroDenominatorBound);
    }
    let simplest = simplest_in_interval(lo, hi);
    if simplest.denom() > denom_bound {
        return Ok(RationalRecovery::None);
    }
    // A second candidate, if any, is a Farey neighbor of `simplest` at level
    // `denom_bound` in one of the two directions.
    let right = farey_neighbor(&simplest, denom_bound, true);
    let left = farey_neighbor(&simplest, denom_bound, false);
    let another = (right <= *hi && right >= *lo) || (left >= *lo && left <= *hi);
    if another {
        Ok(RationalRecovery::Ambiguous(simplest))
    } else {
        Ok(RationalRecovery::Unique(simplest))
    }
}

/// The unique rational of minimal denominator (ties broken towards smaller
/// numerator magnitude) in the closed interval `[lo, hi]`.
fn simplest_in_interval(lo: &ExactNumber, hi: &ExactNumber) -> ExactNumber {
    if lo == hi {
        return lo.clone();
    }
    if lo <= &BigRational::zero() && hi >= &BigRational::zero() {
        return BigRational::zero();
    }
    if hi < &BigRational::zero() {
        return -simplest_in_interval(&-hi.clone(), &-lo.clone());
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &ExactNumber, hi: &ExactNumber) -> ExactNumber {
    // 0 < lo < hi here.
    let lo_ceil = lo.ceil();
    if lo_ceil <= hi.floor() {
        return lo_ceil;
    }
    let a = lo.floor();
    // lo and hi share the integer part a; recurse on reciprocals of the
    // fractional parts (order swaps).
    let inner = simplest_positive(&(hi - &a).recip(), &(lo - &a).recip());
    a + inner.recip()
}

/// The closest fraction to `r` with denominator <= `bound` strictly on the
/// given side (true = right/larger). `r` must be in lowest terms with
/// denominator <= `bound`.
fn farey_neighbor(r: &ExactNumber, bound: &BigInt, right: bool) -> ExactNumber {
    let a = r.numer().clone();
    let b = r.denom().clone();
    // Solve b*c - a*d = 1 (right) or = -1 (left) with 0 < d <= bound, d
    // maximal; then c/d is the neighbor.
    let sign: BigInt = if right { BigInt::one() } else { -BigInt::one() };
    if b.is_one() {
        // Integers: neighbor is a +- 1/bound.
        let c = &a * bound + &sign;
        return BigRational::new(c, bound.clone());
    }
    let a_inv = mod_inverse(&a, &b).expect("numerator invertible mod denominator in lowest terms");
    // d ≡ -sign * a^{-1} (mod b)
    let mut d0 = (-&sign * a_inv) % &b;
    if d0.sign() == num_bigint::Sign::Minus {
        d0 += &b;
    }
    if d0.is_zero() {
        d0 = b.clone();
    }
    let d = &d0 + (&(bound - &d0) / &b) * &b;
    let c = (&sign + &a * &d) / &b;
    BigRational::new(c, d)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (mut t, mut new_t) = (BigInt::zero(), BigInt::one());
    let (mut r, mut new_r) = (m.clone(), ((a % m) + m) % m);
    while !new_r.is_zero() {
        let q = &r / &new_r;
        let tmp_t = &t - &q * &new_t;
        t = std::mem::replace(&mut new_t, tmp_t);
        let tmp_r = &r - &q * &new_r;
        r = std::mem::replace(&mut new_r, tmp_r);
    }
    if !r.is_one() {
        return None;
    }
    if t.is_negative() {
        t += m;
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::Xorshift64Star;

    fn d2() -> ExactNumber {
        integer(2)
    }

    #[test]
    fn ds_finite_basics() {
        assert_eq!(ds_finite(&[], &d2()).unwrap(), integer(0));
        assert_eq!(ds_finite(&[1, 0, 0], &d2()).unwrap(), integer(1));
        assert_eq!(ds_finite(&[3, -1], &d2()).unwrap(), rational(5, 2));
    }

    #[test]
    fn ds_finite_matches_term_by_term_oracle() {
        let mut rng = Xorshift64Star::new(11);
        for _ in 0..200 {
            let n = (rng.next_u64() % 12) as usize;
            let w: Vec<i64> = (0..n).map(|_| rng.next_range(13) as i64 - 6).collect();
            let d = rational(3, 2);
            // Independent oracle: literal sum of w[i]/d^i.
            let mut oracle = BigRational::zero();
            for (i, &x) in w.iter().enumerate() {
                oracle += integer(x) / pow_rational(&d, i as u32);
            }
            assert_eq!(ds_finite(&w, &d).unwrap(), oracle);
        }
    }

    #[test]
    fn ds_finite_rejects_small_discount() {
        assert!(ds_finite(&[1], &integer(1)).is_err());
        assert!(ds_finite(&[1], &rational(1, 2)).is_err());
    }

    #[test]
    fn ds_lasso_basics() {
        let l = LassoWeights::new(vec![1], vec![0]).unwrap();
        assert_eq!(ds_lasso(&l, &d2()).unwrap(), integer(1));
        let l = LassoWeights::new(vec![], vec![1]).unwrap();
        assert_eq!(ds_lasso(&l, &d2()).unwrap(), integer(2));
        let l = LassoWeights::new(vec![1], vec![2, 0]).unwrap();
        assert_eq!(ds_lasso(&l, &d2()).unwrap(), rational(7, 3));
        assert!(ds_lasso(&LassoWeights { head: vec![], cycle: vec![] }, &d2()).is_err());
    }

    #[test]
    fn ds_lasso_agrees_with_long_partial_sums() {
        let mut rng = Xorshift64Star::new(23);
        let d = d2();
        for _ in 0..100 {
            let h = (rng.next_u64() % 4) as usize;
            let c = 1 + (rng.next_u64() % 4) as usize;
            let head: Vec<i64> = (0..h).map(|_| rng.next_range(9) as i64 - 4).collect();
            let cycle: Vec<i64> = (0..c).map(|_| rng.next_range(9) as i64 - 4).collect();
            let l = LassoWeights::new(head, cycle).unwrap();
            let mu = l.bound().max(1);
            let prefix = l.unroll(60);
            let partial = ds_finite(&prefix, &d).unwrap();
            // |DS(lasso) - partial| <= mu*d/(d-1) / d^60
            let tail = integer(mu) * &d / (&d - integer(1)) / pow_rational(&d, 60);
            let got = ds_lasso(&l, &d).unwrap();
            assert!((&got - &partial).abs() <= tail, "lasso {:?}", l);
        }
    }

    #[test]
    fn ds_lasso_denominator_divides_bound() {
        let mut rng = Xorshift64Star::new(37);
        for _ in 0..200 {
            let h = (rng.next_u64() % 3) as usize;
            let c = 1 + (rng.next_u64() % 3) as usize;
            let head: Vec<i64> = (0..h).map(|_| rng.next_range(7) as i64 - 3).collect();
            let cycle: Vec<i64> = (0..c).map(|_| rng.next_range(7) as i64 - 3).collect();
            let l = LassoWeights::new(head, cycle).unwrap();
            for d in [d2(), rational(3, 2), integer(3)] {
                let v = ds_lasso(&l, &d).unwrap();
                let p = d.numer();
                let q = d.denom();
                let e_loop = l.cycle.len() as u32;
                let e_all = (l.head.len() + l.cycle.len()) as u32;
                let bound = (p.pow(e_loop) - q.pow(e_loop)) * p.pow(e_all);
                assert!(
                    (&bound % v.denom()).is_zero(),
                    "denominator {} of {} does not divide {}",
                    v.denom(),
                    format_exact(&v),
                    bound
                );
            }
        }
    }

    #[test]
    fn gap_basics() {
        assert_eq!(gap(&[], &d2()).unwrap(), integer(0));
        assert_eq!(gap(&[3, -1], &d2()).unwrap(), integer(5));
    }

    #[test]
    fn gap_equals_normalized_ds() {
        let mut rng = Xorshift64Star::new(41);
        for _ in 0..300 {
            let n = 1 + (rng.next_u64() % 10) as usize;
            let w: Vec<i64> = (0..n).map(|_| rng.next_range(11) as i64 - 5).collect();
            for d in [d2(), rational(5, 2), integer(4)] {
                let lhs = gap(&w, &d).unwrap();
                let rhs = pow_rational(&d, (w.len() - 1) as u32) * ds_finite(&w, &d).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn sum_finite_basics() {
        assert_eq!(sum_finite(&[]), 0);
        assert_eq!(sum_finite(&[1, 2, 3]), 6);
        let mut rng = Xorshift64Star::new(5);
        for _ in 0..100 {
            let n = (rng.next_u64() % 20) as usize;
            let w: Vec<i64> = (0..n).map(|_| rng.next_range(21) as i64 - 10).collect();
            let fold = w.iter().fold(0i64, |a, b| a + b);
            assert_eq!(sum_finite(&w), fold);
        }
    }

    #[test]
    fn limsup_liminf_basics() {
        let l = LassoWeights::new(vec![], vec![1, 2]).unwrap();
        assert_eq!(limsup_lasso(&l).unwrap(), 2);
        assert_eq!(liminf_lasso(&l).unwrap(), 1);
        let l = LassoWeights::new(vec![9], vec![0]).unwrap();
        assert_eq!(limsup_lasso(&l).unwrap(), 0);
    }

    #[test]
    fn limsup_matches_unrolled_scan() {
        let mut rng = Xorshift64Star::new(99);
        for _ in 0..200 {
            let h = (rng.next_u64() % 4) as usize;
            let c = 1 + (rng.next_u64() % 5) as usize;
            let head: Vec<i64> = (0..h).map(|_| rng.next_range(9) as i64 - 4).collect();
            let cycle: Vec<i64> = (0..c).map(|_| rng.next_range(9) as i64 - 4).collect();
            let l = LassoWeights::new(head, cycle).unwrap();
            let n = 10 * (l.head.len() + l.cycle.len());
            let unrolled = l.unroll(n);
            // Values appearing infinitely often are exactly those appearing in
            // the unrolled suffix past the head.
            let sup = *unrolled[l.head.len()..].iter().max().unwrap();
            let inf = *unrolled[l.head.len()..].iter().min().unwrap();
            assert_eq!(limsup_lasso(&l).unwrap(), sup);
            assert_eq!(liminf_lasso(&l).unwrap(), inf);
        }
    }

    #[test]
    fn best_rational_point_interval() {
        let third = rational(1, 3);
        let got = best_rational_in_interval(&third, &third, &BigInt::from(3)).unwrap();
        assert_eq!(got, RationalRecovery::Unique(third));
    }

    #[test]
    fn best_rational_examples() {
        let got = best_rational_in_interval(&rational(32, 100), &rational(35, 100), &BigInt::from(3)).unwrap();
        assert_eq!(got, RationalRecovery::Unique(rational(1, 3)));
        let got = best_rational_in_interval(&rational(40, 100), &rational(45, 100), &BigInt::from(2)).unwrap();
        assert_eq!(got, RationalRecovery::None);
        assert!(best_rational_in_interval(&integer(1), &integer(0), &BigInt::from(5)).is_err());
    }

    /// Exhaustive enumeration oracle for denominators up to 50.
    #[test]
    fn best_rational_agrees_with_enumeration() {
        let mut rng = Xorshift64Star::new(7);
        for _ in 0..400 {
            let denb = 1 + (rng.next_u64() % 50) as i64;
            let a = rng.next_range(801) as i64 - 400;
            let width = rng.next_range(120) as i64;
            let lo = rational(a, 100);
            let hi = rational(a + width, 100);
            let mut hits: Vec<ExactNumber> = Vec::new();
            for q in 1..=denb {
                // p/q in [lo, hi] means p in [ceil(lo*q), floor(hi*q)].
                let lo_p = (&lo * integer(q)).ceil().to_integer();
                let hi_p = (&hi * integer(q)).floor().to_integer();
                let mut p = lo_p.clone();
                while p <= hi_p {
                    let cand = BigRational::new(p.clone(), BigInt::from(q));
                    if !hits.contains(&cand) {
                        hits.push(cand);
                    }
                    p += 1;
                }
            }
            let got = best_rational_in_interval(&lo, &hi, &BigInt::from(denb)).unwrap();
            match got {
                RationalRecovery::None => assert!(hits.is_empty(), "expected no hits in [{},{}] q<={}", lo, hi, denb),
                RationalRecovery::Unique(r) => {
                    assert_eq!(hits.len(), 1, "interval [{},{}] q<={}", lo, hi, denb);
                    assert_eq!(hits[0], r);
                }
                RationalRecovery::Ambiguous(r) => {
                    assert!(hits.len() > 1);
                    let min_den = hits.iter().map(|h| h.denom().clone()).min().unwrap();
                    assert_eq!(*r.denom(), min_den);
                    assert!(hits.contains(&r));
                }
            }
        }
    }
}
