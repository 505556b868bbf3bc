use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{rational_sqrt, rat};

/// An element `a + b·√17` of the real quadratic field ℚ(√17).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QSqrt17 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt17 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt17 { a, b }
    }

    pub fn from_int(n: i64) -> Self {
        QSqrt17 { a: rat(n, 1), b: BigRational::zero() }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QSqrt17 { a, b: BigRational::zero() }
    }

    pub fn sqrt17() -> Self {
        QSqrt17 { a: BigRational::zero(), b: BigRational::one() }
    }

    /// `d = (7 + √17)/2`, the index of the AH+1 subfactor.
    pub fn d() -> Self {
        QSqrt17 { a: rat(7, 2), b: rat(1, 2) }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a − b√17`.
    pub fn conj(&self) -> Self {
        QSqrt17 { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a² − 17b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(17, 1) * &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QSqrt17 { a: &self.a / &n, b: -&self.b / &n })
    }

    /// Exact sign under the embedding with √17 > 0.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                // opposite signs: compare a² with 17b²
                let lhs = &self.a * &self.a;
                let rhs = rat(17, 1) * &self.b * &self.b;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Square root inside ℚ(√17) if one exists (the non-negative one when the
    /// input is positive under the real embedding).
    ///
    /// Solves `x² + 17y² = A`, `2xy = B` over ℚ.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let big_a = &self.a;
        let big_b = &self.b;
        let root = if big_b.is_zero() {
            if let Some(x) = rational_sqrt(big_a) {
                QSqrt17::from_rational(x)
            } else if let Some(y) = rational_sqrt(&(big_a / rat(17, 1))) {
                QSqrt17 { a: BigRational::zero(), b: y }
            } else {
                return None;
            }
        } else {
            let s = rational_sqrt(&self.norm())?;
            let mut found = None;
            for cand in [(big_a + &s) / rat(2, 1), (big_a - &s) / rat(2, 1)] {
                if cand.is_positive() {
                    if let Some(x) = rational_sqrt(&cand) {
                        let y = big_b / (rat(2, 1) * &x);
                        found = Some(QSqrt17 { a: x, b: y });
                        break;
                    }
                }
            }
            found?
        };
        debug_assert_eq!(&(&root * &root), self);
        if root.signum() == Ordering::Less {
            Some(-root)
        } else {
            Some(root)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 17f64.sqrt()
    }

    /// Least common denominator of both coordinates.
    pub fn denominator_lcm(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Zero for QSqrt17 {
    fn zero() -> Self {
        QSqrt17 { a: BigRational::zero(), b: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt17 {
    fn one() -> Self {
        QSqrt17::from_int(1)
    }
}

impl PartialOrd for QSqrt17 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt17 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a QSqrt17> for &'a QSqrt17 {
    type Output = QSqrt17;
    fn add(self, o: &QSqrt17) -> QSqrt17 {
        QSqrt17 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a QSqrt17> for &'a QSqrt17 {
    type Output = QSqrt17;
    fn sub(self, o: &QSqrt17) -> QSqrt17 {
        QSqrt17 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a QSqrt17> for &'a QSqrt17 {
    type Output = QSqrt17;
    fn mul(self, o: &QSqrt17) -> QSqrt17 {
        let a = &self.a * &o.a + rat(17, 1) * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        QSqrt17 { a, b }
    }
}

impl<'a> Div<&'a QSqrt17> for &'a QSqrt17 {
    type Output = QSqrt17;
    fn div(self, o: &QSqrt17) -> QSqrt17 {
        self * &o.inv().expect("division by zero in Q(sqrt17)")
    }
}

impl Neg for QSqrt17 {
    type Output = QSqrt17;
    fn neg(self) -> QSqrt17 {
        QSqrt17 { a: -self.a, b: -self.b }
    }
}

impl<'a> Neg for &'a QSqrt17 {
    type Output = QSqrt17;
    fn neg(self) -> QSqrt17 {
        QSqrt17 { a: -self.a.clone(), b: -self.b.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QSqrt17> for QSqrt17 {
            type Output = QSqrt17;
            fn $m(self, o: QSqrt17) -> QSqrt17 {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&QSqrt17> for QSqrt17 {
    fn add_assign(&mut self, o: &QSqrt17) {
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl SubAssign<&QSqrt17> for QSqrt17 {
    fn sub_assign(&mut self, o: &QSqrt17) {
        self.a -= &o.a;
        self.b -= &o.b;
    }
}

impl MulAssign<&QSqrt17> for QSqrt17 {
    fn mul_assign(&mut self, o: &QSqrt17) {
        *self = &*self * o;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QSqrt17 {
    /// Emits the scalar grammar, e.g. `7/2+1/2*sqrt17`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", fmt_rational(&self.a)),
            (a_zero, false) => {
                let bpart = if self.b.is_one() {
                    "sqrt17".to_string()
                } else if (-&self.b).is_one() {
                    "-sqrt17".to_string()
                } else {
                    format!("{}*sqrt17", fmt_rational(&self.b))
                };
                if a_zero {
                    write!(f, "{}", bpart)
                } else if bpart.starts_with('-') {
                    write!(f, "{}{}", fmt_rational(&self.a), bpart)
                } else {
                    write!(f, "{}+{}", fmt_rational(&self.a), bpart)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_one_plus_sqrt17() {
        let x = QSqrt17::new(rat(1, 1), rat(1, 1));
        let inv = x.inv().unwrap();
        assert_eq!(inv, QSqrt17::new(rat(-1, 16), rat(1, 16)));
    }

    #[test]
    fn sign_is_exact_near_cancellation() {
        // 33 − 8√17 ≈ 0.0152 > 0
        assert!(QSqrt17::new(rat(33, 1), rat(-8, 1)).is_positive());
        assert_eq!(QSqrt17::new(rat(-33, 1), rat(8, 1)).signum(), Ordering::Less);
    }

    #[test]
    fn squareness_in_the_field() {
        let s = QSqrt17::new(rat(18, 1), rat(2, 1)).sqrt_exact().unwrap();
        assert_eq!(s, QSqrt17::new(rat(1, 1), rat(1, 1)));
        assert_eq!(QSqrt17::from_int(17).sqrt_exact().unwrap(), QSqrt17::sqrt17());
        assert!(QSqrt17::from_int(2).sqrt_exact().is_none());
        assert!(QSqrt17::d().sqrt_exact().is_none());
    }
}
