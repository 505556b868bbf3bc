//! Fourth roots of `d − n` on top of the tower.
//!
//! Diagram prefactors such as `√β` and `√(β/β₁)` are fourth roots of
//! elements of ℚ(√17), which is outside the multiquadratic tower. An
//! [`ExtScalar`] is `Σ_S t_S · Π_{n∈S} (d−n)^{1/4}` with tower coefficients
//! `t_S`; the product of two such roots with the same `n` folds back into the
//! tower as `β_n`.
//!
//! The roots are not independent: whenever `Π_T (d−n)` is a square in
//! ℚ(√17) the matching product of fourth roots already lies in the tower
//! (for instance `d−3` and `d(d−2)` share a square class). Masks therefore
//! range over a fixed independent subset of the roots, and every other root
//! is rewritten as a tower multiple of basis roots.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::classes::reduce_square_class;
use super::interval::{q_interval, tower_interval, Enclosable, Interval};
use super::qsqrt17::QSqrt17;
use super::tower::{join_terms, TowerScalar};
use super::ScalarError;

/// Lowest `n` admitted in a fourth-root mask.
const N_MIN: i64 = -16;
/// Range searched when recognising `sqrt(c·Π β_n)`.
const SQRT_SEARCH: std::ops::RangeInclusive<i64> = -1..=5;

fn bit(n: i64) -> u32 {
    1 << (n - N_MIN)
}

fn mask_ns(mask: u32) -> impl Iterator<Item = i64> {
    (0..32).filter(move |i| mask >> i & 1 == 1).map(|i| i as i64 + N_MIN)
}

/// How `(d−n)^{1/4}` is written: a basis root, or `κ · Π_{basis mask}` roots.
#[derive(Clone, Debug)]
enum RootForm {
    Basis,
    Dependent(u32, TowerScalar),
}

fn root_table() -> &'static BTreeMap<i64, RootForm> {
    static T: OnceLock<BTreeMap<i64, RootForm>> = OnceLock::new();
    T.get_or_init(|| {
        // paper indices first so they become the basis
        let order: Vec<i64> = (-1..=5).chain((N_MIN..-1).rev()).collect();
        // reduced rows: (square-class mask, combination of basis roots)
        let mut rows: Vec<(u64, u32)> = Vec::new();
        let mut table = BTreeMap::new();
        for n in order {
            let r = &QSqrt17::d() - &QSqrt17::from_int(n);
            let (class, _) = reduce_square_class(&r).expect("d - n > 0 for n <= 5");
            let mut v = class.0;
            let mut combo = 0u32;
            for &(rv, rc) in &rows {
                let pivot = 63 - rv.leading_zeros();
                if v >> pivot & 1 == 1 {
                    v ^= rv;
                    combo ^= rc;
                }
            }
            if v != 0 {
                rows.push((v, combo ^ bit(n)));
                rows.sort_by(|a, b| b.0.cmp(&a.0));
                table.insert(n, RootForm::Basis);
            } else {
                // β_n / Π_combo β_m lies in ℚ(√17) and is positive
                let mut prod = TowerScalar::one();
                for m in mask_ns(combo) {
                    prod = &prod * &TowerScalar::beta(m).unwrap();
                }
                let ratio = (&TowerScalar::beta(n).unwrap() / &prod).as_q().expect("dependent root");
                let kappa = TowerScalar::sqrt_q(&ratio).unwrap();
                table.insert(n, RootForm::Dependent(combo, kappa));
            }
        }
        table
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExtScalar {
    terms: Vec<(u32, TowerScalar)>,
}

impl ExtScalar {
    pub fn from_tower(t: TowerScalar) -> Self {
        if t.is_zero() {
            Self::default()
        } else {
            ExtScalar { terms: vec![(0, t)] }
        }
    }

    /// `(d − n)^{1/4} = √β_n`.
    pub fn sqrt_beta(n: i64) -> Result<Self, ScalarError> {
        TowerScalar::beta(n)?;
        match root_table().get(&n) {
            None => Err(ScalarError::BetaOutOfRange(n)),
            Some(RootForm::Basis) => Ok(ExtScalar { terms: vec![(bit(n), TowerScalar::one())] }),
            Some(RootForm::Dependent(mask, kappa)) => Ok(ExtScalar { terms: vec![(*mask, kappa.clone())] }),
        }
    }

    pub fn terms(&self) -> &[(u32, TowerScalar)] {
        &self.terms
    }

    pub fn as_tower(&self) -> Option<TowerScalar> {
        match self.terms.as_slice() {
            [] => Some(TowerScalar::zero()),
            [(0, t)] => Some(t.clone()),
            _ => None,
        }
    }

    pub fn into_tower(self) -> Result<TowerScalar, ScalarError> {
        let s = self.to_string();
        self.as_tower().ok_or(ScalarError::NotInTower(s))
    }

    fn support(&self) -> u32 {
        self.terms.iter().fold(0, |m, (s, _)| m | s)
    }

    fn flip(&self, b: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(s, t)| if s & b != 0 { (*s, -t) } else { (*s, t.clone()) })
            .collect();
        ExtScalar { terms }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let support = self.support();
        if support == 0 {
            return Some(Self::from_tower(self.terms[0].1.inv()?));
        }
        let b = 1 << support.trailing_zeros();
        let conj = self.flip(b);
        let reduced = self * &conj;
        Some(&conj * &reduced.inv()?)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        Ok(self * &o.inv().ok_or(ScalarError::DivisionByZero)?)
    }

    pub fn pow(&self, e: i32) -> Result<Self, ScalarError> {
        let mut b = if e < 0 { self.inv().ok_or(ScalarError::DivisionByZero)? } else { self.clone() };
        let mut acc = Self::one();
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

    pub fn signum(&self) -> Ordering {
        super::interval::certified_sign_of(self)
    }

    /// Non-negative square root, for radicands of the form `c·Π β_n` with `c`
    /// in ℚ(√17) (which covers every radical printed in the source tables).
    pub fn sqrt(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if self.signum() == Ordering::Less {
            return Err(ScalarError::NonPositiveRadicand(self.to_string()));
        }
        let t = self.as_tower().ok_or_else(|| ScalarError::UnsupportedRadical(self.to_string()))?;
        let ns: Vec<i64> = SQRT_SEARCH
            .filter(|n| matches!(root_table().get(n), Some(RootForm::Basis)))
            .collect();
        for subset in 0u32..(1 << ns.len()) {
            let mut prod = TowerScalar::one();
            let mut mask = 0u32;
            for (j, &n) in ns.iter().enumerate() {
                if subset >> j & 1 == 1 {
                    prod = &prod * &TowerScalar::beta(n)?;
                    mask |= bit(n);
                }
            }
            if let Some(c) = (&t / &prod).as_q() {
                let root = TowerScalar::sqrt_q(&c)?;
                let mut acc = Self::from_tower(root);
                for n in mask_ns(mask) {
                    acc = &acc * &Self::sqrt_beta(n)?;
                }
                return Ok(acc);
            }
        }
        Err(ScalarError::UnsupportedRadical(self.to_string()))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, t)| {
                let r: f64 = mask_ns(*s)
                    .map(|n| (QSqrt17::d().to_f64() - n as f64).powf(0.25))
                    .product();
                t.to_f64() * r
            })
            .sum()
    }

    fn merge(terms: Vec<(u32, TowerScalar)>) -> Self {
        let mut acc: BTreeMap<u32, TowerScalar> = BTreeMap::new();
        for (s, t) in terms {
            *acc.entry(s).or_default() += &t;
        }
        ExtScalar { terms: acc.into_iter().filter(|(_, t)| !t.is_zero()).collect() }
    }
}

impl Zero for ExtScalar {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExtScalar {
    fn one() -> Self {
        Self::from_tower(TowerScalar::one())
    }
}

impl From<TowerScalar> for ExtScalar {
    fn from(t: TowerScalar) -> Self {
        Self::from_tower(t)
    }
}

impl From<i64> for ExtScalar {
    fn from(n: i64) -> Self {
        Self::from_tower(TowerScalar::from_int(n))
    }
}

impl<'a> Add<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: &ExtScalar) -> ExtScalar {
        ExtScalar::merge(self.terms.iter().chain(o.terms.iter()).cloned().collect())
    }
}

impl<'a> Sub<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn sub(self, o: &ExtScalar) -> ExtScalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn mul(self, o: &ExtScalar) -> ExtScalar {
        let mut terms = Vec::new();
        for (s1, t1) in &self.terms {
            for (s2, t2) in &o.terms {
                let mut t = t1 * t2;
                for n in mask_ns(s1 & s2) {
                    t = &t * &TowerScalar::beta(n).expect("beta index checked on construction");
                }
                terms.push((s1 ^ s2, t));
            }
        }
        ExtScalar::merge(terms)
    }
}

impl<'a> Neg for &'a ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        ExtScalar { terms: self.terms.iter().map(|(s, t)| (*s, -t)).collect() }
    }
}

impl Neg for ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        -&self
    }
}

impl Mul<ExtScalar> for ExtScalar {
    type Output = ExtScalar;
    fn mul(self, o: ExtScalar) -> ExtScalar {
        &self * &o
    }
}

impl Add<ExtScalar> for ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: ExtScalar) -> ExtScalar {
        &self + &o
    }
}

impl Enclosable for ExtScalar {
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn enclose(&self, bits: u32) -> Interval {
        let mut acc = Interval::exact_int(BigInt::zero(), bits);
        for (s, t) in &self.terms {
            let mut iv = tower_interval(t, bits);
            for n in mask_ns(*s) {
                let r = &QSqrt17::d() - &QSqrt17::from_int(n);
                iv = iv.mul(&q_interval(&r, bits).sqrt().sqrt());
            }
            acc = acc.add(&iv);
        }
        acc
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (s, t) in &self.terms {
            let roots: Vec<String> = mask_ns(*s).map(|n| format!("sqrt(b({}))", n)).collect();
            let tp = t.grammar_parts();
            let (neg, coeff) = if tp.len() == 1 {
                tp.into_iter().next().unwrap()
            } else {
                (false, format!("({})", join_terms(tp)))
            };
            let body = if roots.is_empty() {
                coeff
            } else if coeff == "1" {
                roots.join("*")
            } else {
                format!("{}*{}", coeff, roots.join("*"))
            };
            parts.push((neg, body));
        }
        write!(f, "{}", join_terms(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_roots_square_to_betas() {
        let r = ExtScalar::sqrt_beta(1).unwrap();
        assert_eq!(&r * &r, ExtScalar::from(TowerScalar::beta(1).unwrap()));
    }

    #[test]
    fn sqrt_recognises_beta_products() {
        let b1 = ExtScalar::from(TowerScalar::beta(1).unwrap());
        let half = ExtScalar::from(TowerScalar::from_ratio(1, 2));
        let x = (&b1 * &half).sqrt().unwrap();
        assert_eq!(&x * &x, &b1 * &half);
        assert_eq!(x.signum(), Ordering::Greater);
    }

    #[test]
    fn dependent_roots_are_canonicalised() {
        // (d−3)^{1/4} is a tower multiple of (d(d−2))^{1/4}
        let r3 = ExtScalar::sqrt_beta(3).unwrap();
        let r02 = &ExtScalar::sqrt_beta(0).unwrap() * &ExtScalar::sqrt_beta(2).unwrap();
        assert_eq!(r3.terms().len(), 1);
        assert_eq!(r3.terms()[0].0, r02.terms()[0].0);
        assert_eq!(&r3 * &r3, ExtScalar::from(TowerScalar::beta(3).unwrap()));
        assert_eq!(r3.signum(), Ordering::Greater);
    }

    #[test]
    fn inverse_of_mixed_sum() {
        let x = &ExtScalar::sqrt_beta(1).unwrap() + &ExtScalar::from(2);
        assert_eq!(&x * &x.inv().unwrap(), ExtScalar::one());
    }
}
