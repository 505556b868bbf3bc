use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::classes::{class_product, reduce_square_class, SquareClass};
use super::interval;
use super::qsqrt17::QSqrt17;
use super::rational::rat;
use super::ScalarError;

/// An element `Σ c_q·√q` of the multiquadratic tower over ℚ(√17).
///
/// Terms are kept sorted by class with no zero coefficients, so structural
/// equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TowerScalar {
    terms: Vec<(SquareClass, QSqrt17)>,
}

impl TowerScalar {
    pub fn from_q(q: QSqrt17) -> Self {
        if q.is_zero() {
            Self::default()
        } else {
            TowerScalar { terms: vec![(SquareClass::ONE, q)] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_q(QSqrt17::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_q(QSqrt17::from_rational(rat(n, d)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::from_q(QSqrt17::from_rational(r))
    }

    pub fn sqrt17() -> Self {
        Self::from_q(QSqrt17::sqrt17())
    }

    /// `d = (7+√17)/2`.
    pub fn d() -> Self {
        Self::from_q(QSqrt17::d())
    }

    /// Non-negative square root of a non-negative element of ℚ(√17).
    pub fn sqrt_q(q: &QSqrt17) -> Result<Self, ScalarError> {
        if q.is_zero() {
            return Ok(Self::zero());
        }
        let (class, m) = reduce_square_class(q)?;
        Ok(Self::from_class(class, m))
    }

    /// `β_n = √(d − n)`, defined whenever `d − n > 0`.
    pub fn beta(n: i64) -> Result<Self, ScalarError> {
        let r = &QSqrt17::d() - &QSqrt17::from_int(n);
        if !r.is_positive() {
            return Err(ScalarError::BetaOutOfRange(n));
        }
        Self::sqrt_q(&r)
    }

    pub(crate) fn from_class(class: SquareClass, c: QSqrt17) -> Self {
        if c.is_zero() {
            Self::default()
        } else {
            TowerScalar { terms: vec![(class, c)] }
        }
    }

    pub fn terms(&self) -> &[(SquareClass, QSqrt17)] {
        &self.terms
    }

    /// The value as an element of ℚ(√17), if it lies there.
    pub fn as_q(&self) -> Option<QSqrt17> {
        match self.terms.as_slice() {
            [] => Some(QSqrt17::zero()),
            [(c, q)] if c.is_one() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn is_q(&self) -> bool {
        self.as_q().is_some()
    }

    /// Union of the generator masks of all terms.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |m, (c, _)| m | c.0)
    }

    /// Image under the automorphism `√g_i ↦ −√g_i`.
    pub fn flip_generator(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, q)| if c.0 >> i & 1 == 1 { (*c, -q) } else { (*c, q.clone()) })
            .collect();
        TowerScalar { terms }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let support = self.support();
        if support == 0 {
            return Some(Self::from_q(self.terms[0].1.inv()?));
        }
        let i = support.trailing_zeros() as usize;
        let conj = self.flip_generator(i);
        let reduced = self * &conj;
        debug_assert_eq!(reduced.support() >> i & 1, 0);
        Some(&conj * &reduced.inv()?)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        Ok(self * &o.inv().ok_or(ScalarError::DivisionByZero)?)
    }

    pub fn pow(&self, e: i32) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inv().ok_or(ScalarError::DivisionByZero)? } else { self.clone() };
        let mut acc = Self::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Certified sign under the real embedding.
    pub fn signum(&self) -> Ordering {
        interval::certified_sign(self)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, q)| q.to_f64() * c.radicand().to_f64().sqrt())
            .sum()
    }

    /// Square root when the value is a square of an element of ℚ(√17)
    /// times a stored radicand, i.e. a non-negative element of ℚ(√17).
    pub fn sqrt_exact(&self) -> Option<Self> {
        let q = self.as_q()?;
        if q.signum() == Ordering::Less {
            return None;
        }
        Self::sqrt_q(&q).ok()
    }

    fn merge(mut terms: Vec<(SquareClass, QSqrt17)>) -> Self {
        terms.sort_by(|x, y| x.0.cmp(&y.0));
        let mut out: Vec<(SquareClass, QSqrt17)> = Vec::with_capacity(terms.len());
        for (c, q) in terms {
            match out.last_mut() {
                Some((lc, lq)) if *lc == c => *lq += &q,
                _ => out.push((c, q)),
            }
        }
        out.retain(|(_, q)| !q.is_zero());
        TowerScalar { terms: out }
    }
}

impl Zero for TowerScalar {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for TowerScalar {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl PartialOrd for TowerScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TowerScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a TowerScalar> for &'a TowerScalar {
    type Output = TowerScalar;
    fn add(self, o: &TowerScalar) -> TowerScalar {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        TowerScalar::merge(terms)
    }
}

impl<'a> Sub<&'a TowerScalar> for &'a TowerScalar {
    type Output = TowerScalar;
    fn sub(self, o: &TowerScalar) -> TowerScalar {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().map(|(c, q)| (*c, -q)));
        TowerScalar::merge(terms)
    }
}

impl<'a> Mul<&'a TowerScalar> for &'a TowerScalar {
    type Output = TowerScalar;
    fn mul(self, o: &TowerScalar) -> TowerScalar {
        if self.is_zero() || o.is_zero() {
            return TowerScalar::zero();
        }
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (c1, q1) in &self.terms {
            for (c2, q2) in &o.terms {
                let (c, factor) = class_product(*c1, *c2);
                let mut q = q1 * q2;
                if let Some(f) = factor {
                    q = &q * &f;
                }
                terms.push((c, q));
            }
        }
        TowerScalar::merge(terms)
    }
}

impl<'a> Div<&'a TowerScalar> for &'a TowerScalar {
    type Output = TowerScalar;
    fn div(self, o: &TowerScalar) -> TowerScalar {
        self.checked_div(o).expect("division by zero")
    }
}

impl Neg for TowerScalar {
    type Output = TowerScalar;
    fn neg(self) -> TowerScalar {
        -&self
    }
}

impl<'a> Neg for &'a TowerScalar {
    type Output = TowerScalar;
    fn neg(self) -> TowerScalar {
        TowerScalar { terms: self.terms.iter().map(|(c, q)| (*c, -q)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<TowerScalar> for TowerScalar {
            type Output = TowerScalar;
            fn $m(self, o: TowerScalar) -> TowerScalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&TowerScalar> for TowerScalar {
    fn add_assign(&mut self, o: &TowerScalar) {
        if !o.is_zero() {
            *self = &*self + o;
        }
    }
}

impl SubAssign<&TowerScalar> for TowerScalar {
    fn sub_assign(&mut self, o: &TowerScalar) {
        if !o.is_zero() {
            *self = &*self - o;
        }
    }
}

impl MulAssign<&TowerScalar> for TowerScalar {
    fn mul_assign(&mut self, o: &TowerScalar) {
        *self = &*self * o;
    }
}

impl From<QSqrt17> for TowerScalar {
    fn from(q: QSqrt17) -> Self {
        TowerScalar::from_q(q)
    }
}

impl From<i64> for TowerScalar {
    fn from(n: i64) -> Self {
        TowerScalar::from_int(n)
    }
}

/// Writes `c` as a grammar factor, parenthesised when it has two parts.
pub(crate) fn coefficient_factor(c: &QSqrt17) -> (bool, String) {
    let (neg, abs) = if c.a.is_zero() {
        (c.b < BigRational::zero(), if c.b < BigRational::zero() { -c } else { c.clone() })
    } else if c.b.is_zero() {
        (c.a < BigRational::zero(), if c.a < BigRational::zero() { -c } else { c.clone() })
    } else {
        // lead with the rational part's sign
        (c.a < BigRational::zero(), if c.a < BigRational::zero() { -c } else { c.clone() })
    };
    let body = abs.to_string();
    let body = if !abs.a.is_zero() && !abs.b.is_zero() { format!("({})", body) } else { body };
    (neg, body)
}

/// Joins signed factor strings into a grammar sum.
pub(crate) fn join_terms(parts: Vec<(bool, String)>) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push('-'),
            (_, false) => s.push('+'),
        }
        s.push_str(&body);
    }
    s
}

impl TowerScalar {
    /// Signed grammar factors, one per term, sorted by radicand value so the
    /// output does not depend on registry insertion order.
    pub(crate) fn grammar_parts(&self) -> Vec<(bool, String)> {
        let mut keyed: Vec<(QSqrt17, (bool, String))> = self
            .terms
            .iter()
            .map(|(c, q)| {
                let (m, r) = c.display_form();
                let (neg, coeff) = coefficient_factor(&(q * &m));
                let part = if c.is_one() {
                    coeff
                } else if coeff == "1" {
                    format!("sqrt({})", r)
                } else {
                    format!("{}*sqrt({})", coeff, r)
                };
                (r, (neg, part))
            })
            .collect();
        keyed.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1 .1.cmp(&y.1 .1)));
        keyed.into_iter().map(|(_, p)| p).collect()
    }
}

impl fmt::Display for TowerScalar {
    /// Emits the scalar grammar, e.g. `-1/2*sqrt(2)+sqrt(7/2+1/2*sqrt17)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_terms(self.grammar_parts()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> TowerScalar {
        TowerScalar::beta(n).unwrap()
    }

    #[test]
    fn sqrt2_squared() {
        let s = TowerScalar::sqrt_q(&QSqrt17::from_int(2)).unwrap();
        assert_eq!(&s * &s, TowerScalar::from_int(2));
    }

    #[test]
    fn beta_squares_land_in_base_field() {
        for n in -1..=5 {
            let x = b(n);
            let d_minus_n = &TowerScalar::d() - &TowerScalar::from_int(n);
            assert_eq!(&x * &x, d_minus_n);
        }
    }

    #[test]
    fn b2_block_row_is_a_unit_vector() {
        let b1sq = &b(1) * &b(1);
        let x = &TowerScalar::one() / &b1sq;
        let y = &(&b(0) * &b(2)) / &b1sq;
        assert_eq!(&(&x * &x) + &(&y * &y), TowerScalar::one());
    }

    #[test]
    fn inverse_through_two_generators() {
        let x = &(&b(1) + &b(3)) + &TowerScalar::sqrt_q(&QSqrt17::from_int(2)).unwrap();
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, TowerScalar::one());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(TowerScalar::from_ratio(-3, 4).to_string(), "-3/4");
        let s = TowerScalar::sqrt_q(&QSqrt17::from_int(2)).unwrap();
        assert_eq!((-&s).to_string(), "-sqrt(2)");
        assert_eq!(TowerScalar::zero().to_string(), "0");
    }
}
