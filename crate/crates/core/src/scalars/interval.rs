//! Dyadic interval enclosures of the real embedding, used for sign decisions
//! and decimal renderings. Never used for equality.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::qsqrt17::QSqrt17;
use super::tower::TowerScalar;

static START_DIGITS: AtomicU32 = AtomicU32::new(64);

/// Sets the decimal precision the sign refinement starts from.
pub fn set_start_precision(digits: u32) {
    START_DIGITS.store(digits.max(8), AtomicOrdering::Relaxed);
}

pub fn start_precision() -> u32 {
    START_DIGITS.load(AtomicOrdering::Relaxed)
}

/// `[lo, hi] / 2^bits`.
#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Interval {
    pub fn exact_int(n: BigInt, bits: u32) -> Self {
        let v = n << bits;
        Interval { lo: v.clone(), hi: v, bits }
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let num = r.numer() << bits;
        Interval { lo: num.div_floor(r.denom()), hi: ceil_div(&num, r.denom()), bits }
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let ps = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let min = ps.iter().min().unwrap();
        let max = ps.iter().max().unwrap();
        let scale = BigInt::from(1) << self.bits;
        Interval { lo: min.div_floor(&scale), hi: ceil_div(max, &scale), bits: self.bits }
    }

    /// Enclosure of the square root; the lower end is clamped at zero.
    pub fn sqrt(&self) -> Self {
        let lo = if self.lo.is_negative() { BigInt::zero() } else { (&self.lo << self.bits).sqrt() };
        let hi_sq = if self.hi.is_negative() { BigInt::zero() } else { &self.hi << self.bits };
        let mut hi = hi_sq.sqrt();
        if &hi * &hi < hi_sq {
            hi += 1;
        }
        Interval { lo, hi, bits: self.bits }
    }

    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

fn sqrt17_interval(bits: u32) -> Interval {
    Interval::exact_int(BigInt::from(17), bits).sqrt()
}

pub fn q_interval(q: &QSqrt17, bits: u32) -> Interval {
    let a = Interval::from_rational(&q.a, bits);
    if q.b.is_zero() {
        return a;
    }
    let b = Interval::from_rational(&q.b, bits);
    a.add(&b.mul(&sqrt17_interval(bits)))
}

pub fn tower_interval(x: &TowerScalar, bits: u32) -> Interval {
    let mut acc = Interval::exact_int(BigInt::zero(), bits);
    for (class, c) in x.terms() {
        let mut t = q_interval(c, bits);
        if !class.is_one() {
            t = t.mul(&q_interval(&class.radicand(), bits).sqrt());
        }
        acc = acc.add(&t);
    }
    acc
}

/// Anything with an exact zero test and interval enclosures at any precision.
pub trait Enclosable {
    fn is_exact_zero(&self) -> bool;
    fn enclose(&self, bits: u32) -> Interval;
}

impl Enclosable for TowerScalar {
    fn is_exact_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn enclose(&self, bits: u32) -> Interval {
        tower_interval(self, bits)
    }
}

fn digits_to_bits(digits: u32) -> u32 {
    digits * 3322 / 1000 + 8
}

/// Sign of a nonzero canonical form by doubling precision; zero is decided
/// structurally.
pub fn certified_sign_of<T: Enclosable>(x: &T) -> Ordering {
    if x.is_exact_zero() {
        return Ordering::Equal;
    }
    let mut digits = start_precision();
    loop {
        if let Some(s) = x.enclose(digits_to_bits(digits)).sign() {
            return s;
        }
        digits *= 2;
    }
}

pub fn certified_sign(x: &TowerScalar) -> Ordering {
    certified_sign_of(x)
}

/// Decimal rendering truncated toward −∞ with `digits` places after the point.
pub fn to_decimal<T: Enclosable>(x: &T, digits: u32) -> String {
    let iv = x.enclose(digits_to_bits(digits + 20));
    let scaled = (&iv.lo * BigInt::from(10).pow(digits)) >> iv.bits;
    let neg = scaled.is_negative();
    // floor of a negative value: shift rounds toward −∞ already
    let mag = scaled.abs().to_string();
    let width = digits as usize + 1;
    let padded = if mag.len() < width { format!("{}{}", "0".repeat(width - mag.len()), mag) } else { mag };
    let (int, frac) = padded.split_at(padded.len() - digits as usize);
    let body = if digits == 0 { int.to_string() } else { format!("{}.{}", int, frac) };
    if neg {
        format!("-{}", body)
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::rat;
    use num_traits::One;

    #[test]
    fn beta_difference_is_positive() {
        let x = &TowerScalar::beta(1).unwrap() - &TowerScalar::beta(2).unwrap();
        assert_eq!(certified_sign(&x), Ordering::Greater);
    }

    #[test]
    fn exact_cancellation_is_zero() {
        let a = TowerScalar::from_q(QSqrt17::new(rat(7, 16), rat(-1, 16)));
        let b = TowerScalar::from_q(QSqrt17::new(rat(9, 16), rat(1, 16)));
        let x = &(&a + &b) - &TowerScalar::one();
        assert_eq!(certified_sign(&x), Ordering::Equal);
    }

    #[test]
    fn minus_inverse_beta1_squared() {
        let b1 = TowerScalar::beta(1).unwrap();
        let x = -(&TowerScalar::one() / &(&b1 * &b1));
        assert_eq!(certified_sign(&x), Ordering::Less);
        assert!(to_decimal(&x, 50).starts_with("-0.21922359"));
    }

    #[test]
    fn decimal_rendering_of_sqrt17() {
        assert_eq!(to_decimal(&TowerScalar::sqrt17(), 10), "4.1231056256");
    }
}
