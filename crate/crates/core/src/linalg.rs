//! Exact linear algebra over the tower: sparse row reduction, nullspaces and
//! small dense matrix helpers.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalars::TowerScalar;

pub type SparseRow = BTreeMap<usize, TowerScalar>;
pub type Matrix = Vec<Vec<TowerScalar>>;

/// Reduced row echelon form built incrementally. Pivots are the first
/// nonzero column of each incoming row after reduction, normalised to 1.
#[derive(Default, Debug, Clone)]
pub struct Echelon {
    /// pivot column -> fully reduced row
    rows: BTreeMap<usize, SparseRow>,
}

fn axpy(target: &mut SparseRow, factor: &TowerScalar, src: &SparseRow) {
    for (c, v) in src {
        let delta = factor * v;
        let e = target.entry(*c).or_default();
        *e -= &delta;
        if e.is_zero() {
            target.remove(c);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !v.is_zero());
        let cols: Vec<usize> = row.keys().copied().filter(|c| self.rows.contains_key(c)).collect();
        for c in cols {
            if let Some(f) = row.get(&c).cloned() {
                axpy(&mut row, &f, &self.rows[&c]);
            }
        }
        row
    }

    /// Adds a row; returns false when it was already in the span.
    pub fn push(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce(row);
        let Some((&pivot, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        for other in self.rows.values_mut() {
            if let Some(f) = other.get(&pivot).cloned() {
                axpy(other, &f, &row);
            }
        }
        self.rows.insert(pivot, row);
        true
    }

    /// Basis of the solution space of `row · x = 0` for all rows pushed,
    /// one vector per free column in increasing order.
    pub fn nullspace(&self, ncols: usize) -> Vec<Vec<TowerScalar>> {
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !self.rows.contains_key(c)) {
            let mut v = vec![TowerScalar::zero(); ncols];
            v[free] = TowerScalar::one();
            for (&p, row) in &self.rows {
                if let Some(x) = row.get(&free) {
                    v[p] = -x;
                }
            }
            out.push(v);
        }
        out
    }
}

pub fn nullspace(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> Vec<Vec<TowerScalar>> {
    let mut e = Echelon::new();
    for r in rows {
        e.push(r);
    }
    e.nullspace(ncols)
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![TowerScalar::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    out[i][j] += &(&a[i][t] * &b[t][j]);
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { TowerScalar::one() } else { TowerScalar::zero() }).collect())
        .collect()
}

/// Nonzero entries of `M·Mᵀ − I` and `Mᵀ·M − I` (both, so non-square
/// matrices always report a defect).
pub fn unitarity_defect(m: &Matrix) -> Vec<(usize, usize, TowerScalar)> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut out = Vec::new();
    let mmt = matmul(m, &transpose(m));
    for (i, r) in mmt.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            let target = if i == j { TowerScalar::one() } else { TowerScalar::zero() };
            if *x != target {
                out.push((i, j, x - &target));
            }
        }
    }
    if rows != cols {
        // the other product is also checked so the shape problem is visible
        let mtm = matmul(&transpose(m), m);
        for (i, r) in mtm.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                let target = if i == j { TowerScalar::one() } else { TowerScalar::zero() };
                if *x != target {
                    out.push((rows + i, j, x - &target));
                }
            }
        }
    }
    out
}

pub fn is_unitary(m: &Matrix) -> bool {
    let rows = m.len();
    rows == 0 || (rows == m[0].len() && unitarity_defect(m).is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: i64) -> TowerScalar {
        TowerScalar::from_int(n)
    }

    #[test]
    fn nullspace_of_rank_one_system() {
        let row: SparseRow = [(0, t(1)), (1, t(2)), (2, t(3))].into_iter().collect();
        let ns = nullspace(vec![row.clone()], 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = row.iter().fold(TowerScalar::zero(), |acc, (c, x)| &acc + &(x * &v[*c]));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn dependent_rows_do_not_raise_rank() {
        let mut e = Echelon::new();
        assert!(e.push([(0, t(1)), (1, t(1))].into_iter().collect()));
        assert!(!e.push([(0, t(2)), (1, t(2))].into_iter().collect()));
        assert_eq!(e.rank(), 1);
    }

    #[test]
    fn rotation_is_unitary() {
        let s = TowerScalar::sqrt_q(&crate::scalars::QSqrt17::from_int(2)).unwrap();
        let h = &TowerScalar::one() / &s;
        let m = vec![vec![h.clone(), h.clone()], vec![h.clone(), -&h]];
        assert!(is_unitary(&m));
        assert!(!is_unitary(&vec![vec![h.clone(), h.clone()]]));
    }
}
