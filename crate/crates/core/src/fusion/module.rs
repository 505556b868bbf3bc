//! Based (right) modules over a fusion ring.
//!
//! `mats[i][k][j] = (κ_k ξ_i, κ_j)`, so with row vectors `κ_k ↦ e_k·M_i`
//! and associativity reads `M_i·M_j = Σ_m N[i][j][m]·M_m`.

use std::collections::BTreeSet;

use super::ring::{FusionRing, Violation};
use super::{identity, matmul, perron_vector, transpose, FusionError, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionModule {
    pub name: String,
    pub ring: String,
    pub labels: Vec<String>,
    pub mats: Vec<IntMatrix>,
}

/// Which product order the associativity axiom uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionOrder {
    /// `M_i·M_j = Σ N[i][j][m] M_m`
    Right,
    /// `M_j·M_i = Σ N[i][j][m] M_m`
    Left,
}

impl FusionModule {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// The ring acting on itself from the right.
    pub fn regular(r: &FusionRing) -> Self {
        let n = r.rank();
        FusionModule {
            name: format!("{}_regular", r.name),
            ring: r.name.clone(),
            labels: r.labels.clone(),
            mats: (0..n).map(|i| (0..n).map(|k| (0..n).map(|j| r.n[k][i][j]).collect()).collect()).collect(),
        }
    }

    /// All axioms of a based module under `order`. Written without any of the
    /// enumeration code.
    pub fn check(&self, r: &FusionRing, order: ActionOrder) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut push = |axiom: &'static str, detail: String| v.push(Violation { axiom, detail });
        let n = self.rank();
        if self.mats.len() != r.rank() || self.mats.iter().any(|m| m.len() != n || m.iter().any(|row| row.len() != n)) {
            push("shape", format!("expected {} matrices of size {}x{}", r.rank(), n, n));
            return v;
        }
        if self.mats[r.unit] != identity(n) {
            push("unit", "the unit does not act as the identity".into());
        }
        for i in 0..r.rank() {
            if self.mats[r.dual[i]] != transpose(&self.mats[i]) {
                push("reciprocity", format!("M_{}* is not the transpose of M_{}", r.labels[i], r.labels[i]));
            }
        }
        for i in 0..r.rank() {
            for j in 0..r.rank() {
                let lhs = match order {
                    ActionOrder::Right => matmul(&self.mats[i], &self.mats[j]),
                    ActionOrder::Left => matmul(&self.mats[j], &self.mats[i]),
                };
                let mut rhs = vec![vec![0u32; n]; n];
                for m in 0..r.rank() {
                    let c = r.n[i][j][m];
                    if c == 0 {
                        continue;
                    }
                    for (a, row) in rhs.iter_mut().enumerate() {
                        for (b, x) in row.iter_mut().enumerate() {
                            *x += c * self.mats[m][a][b];
                        }
                    }
                }
                if lhs != rhs {
                    push("associativity", format!("{}·{}", r.labels[i], r.labels[j]));
                }
            }
        }
        drop(push);
        if v.is_empty() && self.is_transitive() {
            let dims = r.fp_dims_f64();
            let w = self.fp_weights();
            for (i, m) in self.mats.iter().enumerate() {
                for k in 0..n {
                    let lhs: f64 = (0..n).map(|j| m[k][j] as f64 * w[j]).sum();
                    if (lhs - dims[i] * w[k]).abs() > 1e-8 * (1.0 + lhs.abs()) {
                        let detail = format!("M_{} has no eigenvector of eigenvalue {}", r.labels[i], dims[i]);
                        v.push(Violation { axiom: "fp weight", detail });
                        return v;
                    }
                }
            }
        }
        v
    }

    /// Whether the basis is connected under the action.
    pub fn is_transitive(&self) -> bool {
        let n = self.rank();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(k) = stack.pop() {
            for m in &self.mats {
                for j in 0..n {
                    if (m[k][j] > 0 || m[j][k] > 0) && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Positive weights with `M_i w = d_i w`, normalised to unit length.
    pub fn fp_weights(&self) -> Vec<f64> {
        perron_vector(&self.mats, self.rank())
    }

    /// The module with basis reordered: new index `p` is old `perm[p]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        FusionModule {
            name: self.name.clone(),
            ring: self.ring.clone(),
            labels: perm.iter().map(|&o| self.labels[o].clone()).collect(),
            mats: self.mats.iter().map(|m| permute_matrix(m, perm)).collect(),
        }
    }

    /// Lexicographically least matrix list over basis permutations. Basis
    /// elements are first sorted by an isomorphism invariant, so only
    /// permutations inside invariant classes are tried.
    pub fn canonical(&self) -> Vec<IntMatrix> {
        let n = self.rank();
        let inv: Vec<Vec<Vec<u32>>> = (0..n)
            .map(|k| {
                self.mats
                    .iter()
                    .map(|m| {
                        let mut row = m[k].clone();
                        row.sort_unstable();
                        row.insert(0, m[k][k]);
                        row
                    })
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|a, b| inv[*a].cmp(&inv[*b]));
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &k in &order {
            match classes.last_mut() {
                Some(c) if inv[c[0]] == inv[k] => c.push(k),
                _ => classes.push(vec![k]),
            }
        }
        let mut best: Option<Vec<IntMatrix>> = None;
        let mut perm = Vec::with_capacity(n);
        canonical_rec(self, &classes, 0, &mut perm, &mut best);
        best.unwrap_or_default()
    }
}

fn permute_matrix(m: &IntMatrix, perm: &[usize]) -> IntMatrix {
    perm.iter().map(|&a| perm.iter().map(|&b| m[a][b]).collect()).collect()
}

fn canonical_rec(m: &FusionModule, classes: &[Vec<usize>], ci: usize, perm: &mut Vec<usize>, best: &mut Option<Vec<IntMatrix>>) {
    if ci == classes.len() {
        let cand: Vec<IntMatrix> = m.mats.iter().map(|x| permute_matrix(x, perm)).collect();
        if best.as_ref().map_or(true, |b| cand < *b) {
            *best = Some(cand);
        }
        return;
    }
    let class = &classes[ci];
    let mut items = class.clone();
    permutations(&mut items, 0, &mut |p| {
        let len = perm.len();
        perm.extend_from_slice(p);
        canonical_rec(m, classes, ci + 1, perm, best);
        perm.truncate(len);
    });
}

fn permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

/// The objects `Σ_i M_i[j][j] ξ_i` read off the `j`-th column of the
/// `j`-th positional matrix, one per basis element, duplicates merged.
pub fn algebra_objects(m: &FusionModule) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = Vec::new();
    for j in 0..m.rank() {
        let obj: Vec<u32> = m.mats.iter().map(|x| x[j][j]).collect();
        if !out.contains(&obj) {
            out.push(obj);
        }
    }
    out
}

/// Free entries of a module of rank `n`: for each non-unit `i` with
/// `i ≤ i*`, the whole matrix, or its upper triangle when `i` is self-dual.
fn free_cells(r: &FusionRing, n: usize) -> Vec<(usize, usize, usize)> {
    let mut cells = Vec::new();
    for t in 0..n {
        for i in 0..r.rank() {
            if i == r.unit || r.dual[i] < i {
                continue;
            }
            for k in 0..=t {
                for j in 0..=t {
                    if k.max(j) != t || (r.dual[i] == i && k > j) {
                        continue;
                    }
                    cells.push((i, k, j));
                }
            }
        }
    }
    cells
}

fn entry_bounds(r: &FusionRing) -> Vec<u32> {
    r.fp_dims_f64().iter().map(|d| (d + 1e-9).floor() as u32).collect()
}

fn blank(r: &FusionRing, n: usize) -> Vec<IntMatrix> {
    let mut mats = vec![vec![vec![0u32; n]; n]; r.rank()];
    mats[r.unit] = identity(n);
    mats
}

fn set(r: &FusionRing, mats: &mut [IntMatrix], (i, k, j): (usize, usize, usize), x: u32) {
    mats[i][k][j] = x;
    let d = r.dual[i];
    mats[d][j][k] = x;
    if d == i {
        mats[i][j][k] = x;
    }
}

fn dedup_push(out: &mut Vec<FusionModule>, seen: &mut BTreeSet<Vec<IntMatrix>>, m: FusionModule) {
    let c = m.canonical();
    if seen.insert(c.clone()) {
        let mut m = m;
        m.mats = c;
        out.push(m);
    }
}

fn named(r: &FusionRing, n: usize, mats: Vec<IntMatrix>) -> FusionModule {
    FusionModule { name: String::new(), ring: r.name.clone(), labels: (0..n).map(|k| format!("k{}", k)).collect(), mats }
}

fn finish(mut out: Vec<FusionModule>) -> Vec<FusionModule> {
    out.sort_by(|a, b| (a.rank(), &a.mats).cmp(&(b.rank(), &b.mats)));
    for (idx, m) in out.iter_mut().enumerate() {
        m.name = format!("{}_{}", idx + 1, m.ring);
    }
    out
}

struct Pruned<'a> {
    r: &'a FusionRing,
    n: usize,
    cells: Vec<(usize, usize, usize)>,
    bounds: Vec<u32>,
    dims2: Vec<f64>,
    nodes: u64,
    budget: u64,
}

impl Pruned<'_> {
    /// Leading `(t+1)×(t+1)` blocks: partial products can only grow as more
    /// rows and columns are filled, so they may not exceed the right side.
    fn block_ok(&self, mats: &[IntMatrix], t: usize, last: bool) -> bool {
        let r = self.r;
        for i in 0..r.rank() {
            for j in 0..r.rank() {
                for a in 0..=t {
                    for b in 0..=t {
                        let lhs: u32 = (0..=t).map(|p| mats[i][a][p] * mats[j][p][b]).sum();
                        let rhs: u32 = (0..r.rank()).map(|m| r.n[i][j][m] * mats[m][a][b]).sum();
                        if lhs > rhs || (last && lhs != rhs) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn row_ok(&self, mats: &[IntMatrix], i: usize, k: usize) -> bool {
        let s: f64 = mats[i][k].iter().map(|&x| (x as f64).powi(2)).sum();
        let c: f64 = (0..self.n).map(|k2| (mats[i][k2][k] as f64).powi(2)).sum();
        s <= self.dims2[i] + 1e-9 && c <= self.dims2[i] + 1e-9
    }

    fn rec(&mut self, mats: &mut Vec<IntMatrix>, pos: usize, out: &mut Vec<Vec<IntMatrix>>) -> Result<(), FusionError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(FusionError::Budget { budget: self.budget, frontier: format!("rank {} cell {}/{}", self.n, pos, self.cells.len()) });
        }
        if pos == self.cells.len() {
            out.push(mats.clone());
            return Ok(());
        }
        let cell = self.cells[pos];
        let (i, k, j) = cell;
        let t = k.max(j);
        let level_end = self.cells.get(pos + 1).map_or(true, |c| c.1.max(c.2) != t);
        for x in 0..=self.bounds[i] {
            set(self.r, mats, cell, x);
            if !self.row_ok(mats, i, k) || !self.row_ok(mats, i, j) {
                break;
            }
            if level_end && !self.block_ok(mats, t, t + 1 == self.n) {
                continue;
            }
            self.rec(mats, pos + 1, out)?;
        }
        set(self.r, mats, cell, 0);
        Ok(())
    }
}

/// Transitive based modules of rank ≤ `max_rank`, up to basis permutation,
/// by backtracking with pruning. Results are in canonical form, sorted by
/// rank, and named `<index>_<ring>`.
pub fn enumerate_modules(r: &FusionRing, max_rank: usize, budget: u64) -> Result<Vec<FusionModule>, FusionError> {
    let dims = r.fp_dims_f64();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut nodes = 0;
    for n in 1..=max_rank {
        let mut p = Pruned {
            r,
            n,
            cells: free_cells(r, n),
            bounds: entry_bounds(r),
            dims2: dims.iter().map(|d| d * d).collect(),
            nodes,
            budget,
        };
        let mut found = Vec::new();
        let mut mats = blank(r, n);
        if p.cells.is_empty() {
            if p.block_ok(&mats, n - 1, true) {
                found.push(mats.clone());
            }
        } else {
            p.rec(&mut mats, 0, &mut found)?;
        }
        nodes = p.nodes;
        for mats in found {
            let m = named(r, n, mats);
            if m.is_transitive() && m.check(r, ActionOrder::Right).is_empty() {
                dedup_push(&mut out, &mut seen, m);
            }
        }
    }
    Ok(finish(out))
}

/// A plan for deriving every action matrix from one generator: each step
/// `(i, j, m)` says `M_m = (M_i·M_j − Σ_{k known} N[i][j][k]·M_k) / N[i][j][m]`.
fn derivation_plan(r: &FusionRing, g: usize) -> Option<Vec<(usize, usize, usize)>> {
    let mut known = vec![false; r.rank()];
    known[r.unit] = true;
    known[g] = true;
    known[r.dual[g]] = true;
    let mut plan = Vec::new();
    loop {
        if known.iter().all(|&k| k) {
            return Some(plan);
        }
        let mut progress = false;
        'outer: for i in 0..r.rank() {
            for j in 0..r.rank() {
                if !known[i] || !known[j] {
                    continue;
                }
                let unknown: Vec<usize> = (0..r.rank()).filter(|&m| r.n[i][j][m] > 0 && !known[m]).collect();
                if unknown.len() == 1 {
                    let m = unknown[0];
                    plan.push((i, j, m));
                    known[m] = true;
                    known[r.dual[m]] = true;
                    progress = true;
                    break 'outer;
                }
            }
        }
        if !progress {
            return None;
        }
    }
}

fn derive(r: &FusionRing, mats: &mut [IntMatrix], plan: &[(usize, usize, usize)]) -> bool {
    let n = mats[r.unit].len();
    for &(i, j, m) in plan {
        let prod = matmul(&mats[i], &mats[j]);
        let c = r.n[i][j][m] as i64;
        let mut out = vec![vec![0u32; n]; n];
        for a in 0..n {
            for b in 0..n {
                let mut x = prod[a][b] as i64;
                for k in 0..r.rank() {
                    if k != m && r.n[i][j][k] > 0 {
                        x -= r.n[i][j][k] as i64 * mats[k][a][b] as i64;
                    }
                }
                if x < 0 || x % c != 0 {
                    return false;
                }
                out[a][b] = (x / c) as u32;
            }
        }
        mats[r.dual[m]] = transpose(&out);
        mats[m] = out;
    }
    true
}

/// The same list as [`enumerate_modules`] without pruning: every matrix of
/// a generating element with entries up to its dimension is tried, the
/// other matrices follow from the ring relations, and the result is
/// filtered with [`FusionModule::check`]. Rings with no single generator
/// fall back to trying every assignment of all free entries. Fails when the
/// search space exceeds `budget`.
pub fn brute_force_modules(r: &FusionRing, max_rank: usize, budget: u64) -> Result<Vec<FusionModule>, FusionError> {
    let bounds = entry_bounds(r);
    let generator = (0..r.rank())
        .filter(|&g| g != r.unit && r.dual[g] >= g)
        .filter_map(|g| derivation_plan(r, g).map(|p| (g, p)))
        .min_by_key(|(g, _)| bounds[*g]);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 1..=max_rank {
        let cells: Vec<(usize, usize, usize)> = match &generator {
            Some((g, _)) => free_cells(r, n).into_iter().filter(|c| c.0 == *g).collect(),
            None => free_cells(r, n),
        };
        let size = cells.iter().try_fold(1u64, |acc, c| acc.checked_mul(bounds[c.0] as u64 + 1));
        match size {
            Some(s) if s <= budget => {}
            _ => return Err(FusionError::Budget { budget, frontier: format!("rank {} brute force space", n) }),
        }
        let mut digits = vec![0u32; cells.len()];
        loop {
            let mut mats = blank(r, n);
            for (c, &x) in cells.iter().zip(&digits) {
                set(r, &mut mats, *c, x);
            }
            let ok = generator.as_ref().map_or(true, |(_, plan)| derive(r, &mut mats, plan));
            if ok {
                let m = named(r, n, mats);
                if m.is_transitive() && m.check(r, ActionOrder::Right).is_empty() {
                    dedup_push(&mut out, &mut seen, m);
                }
            }
            // odometer
            let mut p = 0;
            while p < digits.len() {
                if digits[p] < bounds[cells[p].0] {
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
    Ok(finish(out))
}

/// Builds a module from matrices in the positional convention
/// (`positional[k][i][j] = (κ_k ξ_i, κ_j)`), choosing the product order under
/// which the axioms hold. A module valid only in the left order is returned
/// transposed, which makes it valid in the right order.
pub fn import_positional(
    r: &FusionRing,
    name: &str,
    positional: &[IntMatrix],
) -> Result<(FusionModule, ActionOrder), FusionError> {
    let n = positional.len();
    for (k, p) in positional.iter().enumerate() {
        if p.len() != r.rank() || p.iter().any(|row| row.len() != n) {
            return Err(FusionError::Mismatch(format!("matrix {} of {} is not {}x{}", k + 1, name, r.rank(), n)));
        }
    }
    let mats = (0..r.rank()).map(|i| (0..n).map(|k| positional[k][i].clone()).collect()).collect();
    let m = FusionModule { name: name.to_string(), ring: r.name.clone(), labels: (0..n).map(|k| format!("k{}", k)).collect(), mats };
    let mut first = None;
    for order in [ActionOrder::Right, ActionOrder::Left] {
        let v = m.check(r, order);
        if v.is_empty() {
            let mut m = m;
            if order == ActionOrder::Left {
                m.mats = m.mats.iter().map(transpose).collect();
            }
            return Ok((m, order));
        }
        first.get_or_insert(v);
    }
    Err(FusionError::Axiom(first.unwrap().remove(0)))
}
