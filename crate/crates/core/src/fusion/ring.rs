//! Based rings with nonnegative integer structure constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{FusionError, IntMatrix};
use crate::scalars::{QSqrt17, TowerScalar};

/// `N[i][j][k]` is the multiplicity of `k` in `i·j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRing {
    pub name: String,
    pub labels: Vec<String>,
    pub n: Vec<Vec<Vec<u32>>>,
    pub unit: usize,
    pub dual: Vec<usize>,
}

/// An axiom violation with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct RingReport {
    pub violations: Vec<Violation>,
}

impl RingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A Frobenius–Perron dimension: exact when its minimal polynomial over ℚ
/// has degree at most 2, otherwise a float together with the
/// characteristic polynomial it is a root of.
#[derive(Clone, Debug, PartialEq)]
pub enum FpDim {
    Exact(TowerScalar),
    Approx { value: f64, charpoly: Vec<BigInt> },
}

impl FpDim {
    pub fn to_f64(&self) -> f64 {
        match self {
            FpDim::Exact(x) => x.to_f64(),
            FpDim::Approx { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&TowerScalar> {
        match self {
            FpDim::Exact(x) => Some(x),
            _ => None,
        }
    }
}

impl FusionRing {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Builds a ring from a product function; `dual` is derived from where
    /// the unit occurs.
    pub fn from_products(
        name: &str,
        labels: Vec<String>,
        unit: usize,
        mut product: impl FnMut(usize, usize) -> Vec<(usize, u32)>,
    ) -> Result<Self, FusionError> {
        let r = labels.len();
        let mut n = vec![vec![vec![0u32; r]; r]; r];
        for i in 0..r {
            for j in 0..r {
                for (k, m) in product(i, j) {
                    n[i][j][k] += m;
                }
            }
        }
        let mut dual = vec![usize::MAX; r];
        for i in 0..r {
            let js: Vec<usize> = (0..r).filter(|&j| n[i][j][unit] > 0).collect();
            if js.len() != 1 || n[i][js[0]][unit] != 1 {
                return Err(FusionError::Axiom(Violation {
                    axiom: "dual",
                    detail: format!("{} has {} candidate duals", labels[i], js.len()),
                }));
            }
            dual[i] = js[0];
        }
        Ok(FusionRing { name: name.to_string(), labels, n, unit, dual })
    }

    /// Left multiplication by `i`: `L_i[j][k] = N[i][j][k]`.
    pub fn left_matrix(&self, i: usize) -> IntMatrix {
        self.n[i].clone()
    }

    /// Right multiplication by `i`: `R_i[j][k] = N[j][i][k]`.
    pub fn right_matrix(&self, i: usize) -> IntMatrix {
        (0..self.rank()).map(|j| self.n[j][i].clone()).collect()
    }

    pub fn check(&self) -> RingReport {
        let r = self.rank();
        let mut v = Vec::new();
        let mut push = |axiom: &'static str, detail: String| v.push(Violation { axiom, detail });
        if self.n.len() != r || self.n.iter().any(|x| x.len() != r || x.iter().any(|y| y.len() != r)) {
            push("shape", format!("structure constants are not {}x{}x{}", r, r, r));
            return RingReport { violations: v };
        }
        if self.unit >= r || self.dual.len() != r || self.dual.iter().any(|&d| d >= r) {
            push("shape", "unit or dual out of range".into());
            return RingReport { violations: v };
        }
        let l = &self.labels;
        let u = self.unit;
        for i in 0..r {
            for k in 0..r {
                let want = u32::from(i == k);
                if self.n[u][i][k] != want || self.n[i][u][k] != want {
                    push("unit", format!("1·{0} or {0}·1 has {1} in position {1}", l[i], l[k]));
                }
            }
            if self.dual[self.dual[i]] != i {
                push("dual involution", format!("{}** != {}", l[i], l[i]));
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for m in 0..r {
                        let lhs: u64 = (0..r).map(|p| self.n[i][j][p] as u64 * self.n[p][k][m] as u64).sum();
                        let rhs: u64 = (0..r).map(|p| self.n[j][k][p] as u64 * self.n[i][p][m] as u64).sum();
                        if lhs != rhs {
                            push("associativity", format!("({}{}){} vs {}({}{}) at {}: {} != {}", l[i], l[j], l[k], l[i], l[j], l[k], l[m], lhs, rhs));
                        }
                    }
                }
            }
        }
        let d = &self.dual;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let x = self.n[i][j][k];
                    if x != self.n[d[i]][k][j] || x != self.n[k][d[j]][i] {
                        push("frobenius reciprocity", format!("N({},{};{}) = {}", l[i], l[j], l[k], x));
                    }
                    if x != self.n[d[j]][d[i]][d[k]] {
                        push("dual anti-automorphism", format!("({}{})* vs {}*{}* at {}", l[i], l[j], l[j], l[i], l[k]));
                    }
                }
            }
        }
        RingReport { violations: v }
    }

    /// Frobenius–Perron dimensions as floats, from the positive eigenvector
    /// of `Σ L_i`.
    pub fn fp_dims_f64(&self) -> Vec<f64> {
        let mats: Vec<IntMatrix> = (0..self.rank()).map(|i| self.left_matrix(i)).collect();
        let mut v = super::perron_vector(&mats, self.rank());
        let s = v[self.unit];
        v.iter_mut().for_each(|x| *x /= s);
        v
    }

    /// Exact dimensions where possible; see [`FpDim`].
    pub fn fp_dims(&self) -> Vec<FpDim> {
        let approx = self.fp_dims_f64();
        (0..self.rank())
            .map(|i| {
                let cp = charpoly(&self.left_matrix(i));
                match exact_root(&cp, approx[i]) {
                    Some(x) => FpDim::Exact(x),
                    None => FpDim::Approx { value: approx[i], charpoly: cp },
                }
            })
            .collect()
    }

    /// Σ dim², exact when all dimensions are.
    pub fn global_dim(&self) -> FpDim {
        let dims = self.fp_dims();
        if dims.iter().all(|d| d.exact().is_some()) {
            FpDim::Exact(dims.iter().fold(TowerScalar::zero(), |acc, d| {
                let x = d.exact().unwrap();
                &acc + &(x * x)
            }))
        } else {
            let v: f64 = dims.iter().map(|d| d.to_f64().powi(2)).sum();
            FpDim::Approx { value: v, charpoly: Vec::new() }
        }
    }

    /// Whether exact dimensions satisfy `d_i d_j = Σ N[i][j][k] d_k`.
    pub fn dims_multiplicative(&self, dims: &[TowerScalar]) -> bool {
        let r = self.rank();
        (0..r).all(|i| {
            (0..r).all(|j| {
                let rhs = (0..r).fold(TowerScalar::zero(), |acc, k| &acc + &(&TowerScalar::from_int(self.n[i][j][k] as i64) * &dims[k]));
                &dims[i] * &dims[j] == rhs
            })
        })
    }

    /// The ring with the basis reordered: new index `p` is old `perm[p]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let r = self.rank();
        let mut inv = vec![0; r];
        for (p, &o) in perm.iter().enumerate() {
            inv[o] = p;
        }
        let n = (0..r).map(|i| (0..r).map(|j| (0..r).map(|k| self.n[perm[i]][perm[j]][perm[k]]).collect()).collect()).collect();
        FusionRing {
            name: self.name.clone(),
            labels: perm.iter().map(|&o| self.labels[o].clone()).collect(),
            n,
            unit: inv[self.unit],
            dual: perm.iter().map(|&o| inv[self.dual[o]]).collect(),
        }
    }
}

/// Characteristic polynomial `det(xI − M)`, coefficients from the constant
/// term up, by Faddeev–LeVerrier over ℚ.
pub fn charpoly(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.len();
    let a: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::from_integer(1.into());
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for p in 0..n {
                    if !a[i][p].is_zero() && !mk[p][j].is_zero() {
                        s += &a[i][p] * &mk[p][j];
                    }
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for p in 0..n {
                tr += &a[i][p] * &mk[p][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    c.into_iter().map(|x| x.to_integer()).collect()
}

fn eval_poly(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Remainder of `p` divided by the monic `x² − a x − b`.
fn rem_quadratic(p: &[BigInt], a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    // synthetic division from the top
    let mut coeffs: Vec<BigInt> = p.to_vec();
    for deg in (2..coeffs.len()).rev() {
        let lead = coeffs[deg].clone();
        if lead.is_zero() {
            continue;
        }
        coeffs[deg] = BigInt::zero();
        coeffs[deg - 1] += &lead * a;
        coeffs[deg - 2] += &lead * b;
    }
    (coeffs.first().cloned().unwrap_or_default(), coeffs.get(1).cloned().unwrap_or_default())
}

/// The root of `p` near `approx` as an exact scalar, when it is rational or
/// a quadratic irrationality with an integer monic minimal polynomial.
fn exact_root(p: &[BigInt], approx: f64) -> Option<TowerScalar> {
    let k = approx.round();
    if (approx - k).abs() < 1e-6 && eval_poly(p, &BigInt::from(k as i64)).is_zero() {
        return Some(TowerScalar::from_int(k as i64));
    }
    // x² − a x − b with the conjugate root μ in [−approx, approx]
    let top = (2.0 * approx).ceil() as i64 + 1;
    for a in -1..=top {
        let b = (approx * approx - a as f64 * approx).round() as i64;
        let disc = a * a + 4 * b;
        if disc <= 0 {
            continue;
        }
        let root = (a as f64 + (disc as f64).sqrt()) / 2.0;
        if (root - approx).abs() > 1e-6 * approx.max(1.0) {
            continue;
        }
        let (r0, r1) = rem_quadratic(p, &BigInt::from(a), &BigInt::from(b));
        if r0.is_zero() && r1.is_zero() {
            let s = TowerScalar::sqrt_q(&QSqrt17::from_int(disc)).ok()?;
            return Some(&(&TowerScalar::from_int(a) + &s) * &TowerScalar::from_ratio(1, 2));
        }
    }
    None
}

fn involutions(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for mut inv in involutions(rest) {
        inv.push((first, first));
        out.push(inv);
    }
    for (idx, &partner) in rest.iter().enumerate() {
        let others: Vec<usize> = rest.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, &x)| x).collect();
        for mut inv in involutions(&others) {
            inv.push((first, partner));
            inv.push((partner, first));
            out.push(inv);
        }
    }
    out
}

/// Every fusion ring of rank ≤ `max_rank` whose structure constants are at
/// most `max_entry`, one per isomorphism class, by exhaustive search over
/// the non-unit products.
pub fn enumerate_small_rings(max_rank: usize, max_entry: u32) -> Vec<FusionRing> {
    let mut out = Vec::new();
    for r in 1..=max_rank {
        let nonunit: Vec<usize> = (1..r).collect();
        let mut seen = std::collections::BTreeSet::new();
        for inv in involutions(&nonunit) {
            let mut dual = vec![0usize; r];
            for (a, b) in inv {
                dual[a] = b;
            }
            let cells: Vec<(usize, usize, usize)> =
                (1..r).flat_map(|i| (1..r).flat_map(move |j| (1..r).map(move |k| (i, j, k)))).collect();
            let mut digits = vec![0u32; cells.len()];
            loop {
                let mut n = vec![vec![vec![0u32; r]; r]; r];
                for i in 0..r {
                    n[0][i][i] = 1;
                    n[i][0][i] = 1;
                }
                for i in 1..r {
                    n[i][dual[i]][0] = 1;
                }
                for (&(i, j, k), &x) in cells.iter().zip(&digits) {
                    n[i][j][k] = x;
                }
                let ring = FusionRing {
                    name: String::new(),
                    labels: (0..r).map(|i| if i == 0 { "1".to_string() } else { format!("x{}", i) }).collect(),
                    n,
                    unit: 0,
                    dual: dual.clone(),
                };
                if ring.check().passed() {
                    let key = canonical_key(&ring);
                    if seen.insert(key) {
                        out.push(ring);
                    }
                }
                let mut p = 0;
                while p < digits.len() {
                    if digits[p] < max_entry {
                        digits[p] += 1;
                        break;
                    }
                    digits[p] = 0;
                    p += 1;
                }
                if p == digits.len() {
                    break;
                }
            }
        }
    }
    for (i, r) in out.iter_mut().enumerate() {
        r.name = format!("R{}_{}", r.rank(), i + 1);
    }
    out
}

fn canonical_key(r: &FusionRing) -> (Vec<Vec<Vec<u32>>>, Vec<usize>) {
    let rest: Vec<usize> = (1..r.rank()).collect();
    let mut best: Option<(Vec<Vec<Vec<u32>>>, Vec<usize>)> = None;
    let mut items = rest.clone();
    fn perms(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            perms(items, k + 1, f);
            items.swap(k, i);
        }
    }
    perms(&mut items, 0, &mut |p| {
        let mut perm = vec![0];
        perm.extend_from_slice(p);
        let q = r.permuted(&perm);
        let key = (q.n, q.dual);
        if best.as_ref().map_or(true, |b| key < *b) {
            best = Some(key);
        }
    });
    best.unwrap()
}
