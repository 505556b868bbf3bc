//! Square classes of ℚ(√17)^×.
//!
//! Every positive radicand met during a session is written as
//! `multiplier² · Π gᵢ` over a growing list of independent generators `gᵢ`.
//! A class is therefore a bit mask over generators, and
//! `√(Π_{m₁} g) · √(Π_{m₂} g) = Π_{m₁∧m₂} g · √(Π_{m₁⊕m₂} g)`.
//!
//! Independence of a new radicand is decided with quadratic characters
//! (Legendre symbols under both embeddings into small prime fields, plus the
//! sign under the conjugate real embedding) and confirmed by an exact
//! squareness test. Characters are homomorphisms to F₂, so a mask that fails
//! them can never work; a mask that passes them is still checked exactly.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::qsqrt17::QSqrt17;
use super::rational::{gcd_all, split_square_part};
use super::ScalarError;

/// A square class, encoded as a set of registered generators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct SquareClass(pub u64);

impl SquareClass {
    pub const ONE: SquareClass = SquareClass(0);

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// Stored representative radicand (product of the generators in the class).
    pub fn radicand(self) -> QSqrt17 {
        registry().read().unwrap().product(self.0)
    }

    /// `(m, r)` with `m²·r = radicand()` and the rational square part of `r`
    /// removed, so rational classes print as `sqrt(2)` whichever generators
    /// happen to represent them.
    pub fn display_form(self) -> (QSqrt17, QSqrt17) {
        let p = self.radicand();
        let den = p.denominator_lcm();
        let den2 = BigRational::from_integer(&den * &den);
        let ai = (&p.a * &den2).to_integer();
        let bi = (&p.b * &den2).to_integer();
        let g = gcd_all([&ai, &bi]);
        let (s, _) = split_square_part(&g.abs());
        let s2 = &s * &s;
        let r = QSqrt17::new(BigRational::from_integer(&ai / &s2), BigRational::from_integer(&bi / &s2));
        (QSqrt17::from_rational(BigRational::new(s, den)), r)
    }
}

const CHAR_PRIMES: usize = 60;

struct CharTable {
    // (prime, sqrt(17) mod prime)
    primes: Vec<(u64, u64)>,
}

fn char_table() -> &'static CharTable {
    static T: OnceLock<CharTable> = OnceLock::new();
    T.get_or_init(|| {
        let mut primes = Vec::new();
        let mut p = 19u64;
        while primes.len() < CHAR_PRIMES {
            if is_prime(p) {
                if let Some(s) = (1..p).find(|s| s * s % p == 17 % p) {
                    primes.push((p, s));
                }
            }
            p += 2;
        }
        CharTable { primes }
    })
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn residue(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = r.denom().mod_floor(&pb).to_u64()?;
    if d == 0 {
        return None;
    }
    let n = r.numer().mod_floor(&pb).to_u64()?;
    Some(n * pow_mod(d, p - 2, p) % p)
}

/// Character vector: bit set means the character is −1; `defined` marks
/// coordinates where the element is a unit.
#[derive(Clone, Copy, Debug)]
struct Chars {
    values: u128,
    defined: u128,
}

fn characters(q: &QSqrt17) -> Chars {
    let mut values = 0u128;
    let mut defined = 0u128;
    for (k, &(p, s)) in char_table().primes.iter().enumerate() {
        if let (Some(a), Some(b)) = (residue(&q.a, p), residue(&q.b, p)) {
            for (j, emb) in [(a + b * s) % p, (a + p * p - b * s) % p].into_iter().enumerate() {
                if emb != 0 {
                    let bit = 2 * k + j;
                    defined |= 1 << bit;
                    if pow_mod(emb, (p - 1) / 2, p) != 1 {
                        values |= 1 << bit;
                    }
                }
            }
        }
    }
    let bit = 2 * CHAR_PRIMES;
    defined |= 1 << bit;
    if q.conj().signum() == std::cmp::Ordering::Less {
        values |= 1 << bit;
    }
    Chars { values, defined }
}

struct Registry {
    gens: Vec<QSqrt17>,
    chars: Vec<Chars>,
    cache: HashMap<QSqrt17, (SquareClass, QSqrt17)>,
    products: HashMap<u64, QSqrt17>,
}

impl Registry {
    fn product(&self, mask: u64) -> QSqrt17 {
        if let Some(p) = self.products.get(&mask) {
            return p.clone();
        }
        let mut acc = QSqrt17::one();
        for (i, g) in self.gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = &acc * g;
            }
        }
        acc
    }

    /// All masks whose characters agree with `target` on commonly defined
    /// coordinates.
    fn candidate_masks(&self, target: Chars) -> Vec<u64> {
        let m = self.gens.len();
        let mut common = target.defined;
        for c in &self.chars {
            common &= c.defined;
        }
        // rows: (coefficient mask over generators, rhs)
        let mut rows: Vec<(u64, bool)> = Vec::new();
        for bit in 0..128 {
            if common >> bit & 1 == 0 {
                continue;
            }
            let mut coeffs = 0u64;
            for (i, c) in self.chars.iter().enumerate() {
                if c.values >> bit & 1 == 1 {
                    coeffs |= 1 << i;
                }
            }
            rows.push((coeffs, target.values >> bit & 1 == 1));
        }
        let mut pivots: Vec<(usize, u64, bool)> = Vec::new();
        for (mut coeffs, mut rhs) in rows {
            for &(col, pc, pr) in &pivots {
                if coeffs >> col & 1 == 1 {
                    coeffs ^= pc;
                    rhs ^= pr;
                }
            }
            if coeffs == 0 {
                if rhs {
                    return Vec::new();
                }
                continue;
            }
            let col = coeffs.trailing_zeros() as usize;
            for p in pivots.iter_mut() {
                if p.1 >> col & 1 == 1 {
                    p.1 ^= coeffs;
                    p.2 ^= rhs;
                }
            }
            pivots.push((col, coeffs, rhs));
        }
        let pivot_cols: u64 = pivots.iter().fold(0, |acc, p| acc | 1 << p.0);
        let free: Vec<usize> = (0..m).filter(|i| pivot_cols >> i & 1 == 0).collect();
        let limit = free.len().min(16);
        let mut out = Vec::new();
        for choice in 0u64..(1u64 << limit) {
            let mut x = 0u64;
            for (j, &f) in free.iter().take(limit).enumerate() {
                if choice >> j & 1 == 1 {
                    x |= 1 << f;
                }
            }
            for &(col, pc, pr) in &pivots {
                let others = (pc & !(1 << col)) & x;
                if (others.count_ones() % 2 == 1) != pr {
                    x |= 1 << col;
                }
            }
            out.push(x);
        }
        out
    }

    fn reduce(&mut self, q: &QSqrt17) -> (SquareClass, QSqrt17) {
        if let Some(hit) = self.cache.get(q) {
            return hit.clone();
        }
        // clear denominators and pull out the rational square part
        let den = q.denominator_lcm();
        let den2 = BigRational::from_integer(&den * &den);
        let ai = (&q.a * &den2).to_integer();
        let bi = (&q.b * &den2).to_integer();
        let g = gcd_all([&ai, &bi]);
        let (s, _) = split_square_part(&g.abs());
        let s2 = &s * &s;
        let q0 = QSqrt17::new(
            BigRational::from_integer(&ai / &s2),
            BigRational::from_integer(&bi / &s2),
        );
        let scale = QSqrt17::from_rational(BigRational::new(s, den));

        let result = if let Some(r) = q0.sqrt_exact() {
            (SquareClass::ONE, &scale * &r)
        } else {
            let found = self.candidate_masks(characters(&q0)).into_iter().find_map(|mask| {
                let p = self.product(mask);
                (&q0 * &p).sqrt_exact().map(|r| (mask, &r / &p))
            });
            match found {
                Some((mask, m)) => (SquareClass(mask), &scale * &m),
                None => {
                    let idx = self.gens.len();
                    assert!(idx < 64, "square-class registry exhausted");
                    self.chars.push(characters(&q0));
                    self.gens.push(q0);
                    (SquareClass(1 << idx), scale)
                }
            }
        };
        self.cache.insert(q.clone(), result.clone());
        if !self.products.contains_key(&result.0 .0) {
            let p = self.product(result.0 .0);
            self.products.insert(result.0 .0, p);
        }
        result
    }
}

fn registry() -> &'static RwLock<Registry> {
    static R: OnceLock<RwLock<Registry>> = OnceLock::new();
    R.get_or_init(|| {
        RwLock::new(Registry {
            gens: Vec::new(),
            chars: Vec::new(),
            cache: HashMap::new(),
            products: HashMap::new(),
        })
    })
}

/// Writes a positive `q` as `multiplier² · class.radicand()`.
pub fn reduce_square_class(q: &QSqrt17) -> Result<(SquareClass, QSqrt17), ScalarError> {
    if !q.is_positive() {
        return Err(ScalarError::NonPositiveRadicand(q.to_string()));
    }
    if let Some(hit) = registry().read().unwrap().cache.get(q) {
        return Ok(hit.clone());
    }
    Ok(registry().write().unwrap().reduce(q))
}

/// Product of two classes: `√c₁·√c₂ = factor·√(c₁c₂)`.
pub fn class_product(c1: SquareClass, c2: SquareClass) -> (SquareClass, Option<QSqrt17>) {
    let common = c1.0 & c2.0;
    let class = SquareClass(c1.0 ^ c2.0);
    if common == 0 {
        return (class, None);
    }
    let reg = registry().read().unwrap();
    if let Some(p) = reg.products.get(&common) {
        return (class, Some(p.clone()));
    }
    let p = reg.product(common);
    drop(reg);
    registry().write().unwrap().products.insert(common, p.clone());
    (class, Some(p))
}

/// Radicand of a single generator.
pub fn generator(i: usize) -> QSqrt17 {
    registry().read().unwrap().gens[i].clone()
}

pub fn generator_count() -> usize {
    registry().read().unwrap().gens.len()
}

impl SquareClass {
    pub fn generators(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.0 >> i & 1 == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational::rat;

    #[test]
    fn reduction_examples() {
        let (c, m) = reduce_square_class(&QSqrt17::new(rat(18, 1), rat(2, 1))).unwrap();
        assert!(c.is_one());
        assert_eq!(m, QSqrt17::new(rat(1, 1), rat(1, 1)));

        let (c8, m8) = reduce_square_class(&QSqrt17::from_int(8)).unwrap();
        let (c2, m2) = reduce_square_class(&QSqrt17::from_int(2)).unwrap();
        assert_eq!(c8, c2);
        assert_eq!(m8, &m2 * &QSqrt17::from_int(2));

        let (c17, m17) = reduce_square_class(&QSqrt17::from_int(17)).unwrap();
        assert!(c17.is_one());
        assert_eq!(m17, QSqrt17::sqrt17());
    }

    #[test]
    fn reduction_is_idempotent_on_representatives() {
        let q = QSqrt17::new(rat(23, 2), rat(-1, 2));
        let (c, _) = reduce_square_class(&q).unwrap();
        let (c2, m2) = reduce_square_class(&c.radicand()).unwrap();
        assert_eq!(c, c2);
        assert_eq!(m2, QSqrt17::one());
    }

    #[test]
    fn classes_multiply_consistently() {
        // (d−1)(d−2) and d(d−2) live in different classes from d−1 alone
        let d = QSqrt17::d();
        let one = QSqrt17::one();
        let two = QSqrt17::from_int(2);
        let (c1, _) = reduce_square_class(&(&d - &one)).unwrap();
        let (c2, _) = reduce_square_class(&(&d - &two)).unwrap();
        let (c12, _) = reduce_square_class(&(&(&d - &one) * &(&d - &two))).unwrap();
        assert_eq!(class_product(c1, c2).0, c12);
    }

    #[test]
    fn non_positive_radicands_are_rejected() {
        assert!(reduce_square_class(&QSqrt17::from_int(0)).is_err());
        assert!(reduce_square_class(&QSqrt17::new(rat(4, 1), rat(-1, 1))).is_err());
    }
}
