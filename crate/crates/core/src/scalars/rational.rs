use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn bigint_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Square root of a non-negative rational when it is itself rational.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = bigint_sqrt_exact(q.numer())?;
    let d = bigint_sqrt_exact(q.denom())?;
    Some(BigRational::new(n, d))
}

/// Splits a positive integer as `s² · r`, pulling out square factors of
/// primes below a small bound and a trailing perfect square.
pub fn split_square_part(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2u32);
    let bound = BigInt::from(2000u32);
    while p <= bound && &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= &p;
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if let Some(r) = bigint_sqrt_exact(&rest) {
        square *= r;
        rest = BigInt::one();
    }
    (square, rest)
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    let mut g = BigInt::zero();
    for x in xs {
        g = g.gcd(x);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_parts() {
        let (s, r) = split_square_part(&BigInt::from(72));
        assert_eq!((s, r), (BigInt::from(6), BigInt::from(2)));
        let (s, r) = split_square_part(&BigInt::from(17));
        assert_eq!((s, r), (BigInt::from(1), BigInt::from(17)));
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(8, 1)), None);
    }
}
