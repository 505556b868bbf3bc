//! Maps between vertical edge spaces: intertwiners, gauges and complements.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{restrict, Connection, ConnectionError};
use crate::graphs::{BipartiteGraph, EdgeWord};
use crate::linalg::{matmul, transpose, unitarity_defect, Echelon, Matrix, SparseRow};
use crate::scalars::TowerScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// edges of G3, from V0 to V3
    Left,
    /// edges of G1, from V1 to V2
    Right,
}

/// Block-diagonal linear map from the vertical edges of one connection to
/// those of another. Keys are `(source edge, target edge)` indices into the
/// respective G3 (left) or G1 (right) edge lists; absent entries are 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeSpaceMap {
    pub left: BTreeMap<(usize, usize), TowerScalar>,
    pub right: BTreeMap<(usize, usize), TowerScalar>,
}

/// One block of an [`EdgeSpaceMap`]: rows are target edges, columns source
/// edges, all running from `from` to `to`.
#[derive(Clone, Debug)]
pub struct GaugeBlock {
    pub side: Side,
    pub from: String,
    pub to: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub row_words: Vec<String>,
    pub col_words: Vec<String>,
    pub matrix: Matrix,
}

fn side_graph(c: &Connection, side: Side) -> &BipartiteGraph {
    match side {
        Side::Left => &c.fg.g3,
        Side::Right => &c.fg.g1,
    }
}

impl EdgeSpaceMap {
    pub fn side(&self, side: Side) -> &BTreeMap<(usize, usize), TowerScalar> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut BTreeMap<(usize, usize), TowerScalar> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn scaled(&self, f: &TowerScalar) -> Self {
        let sc = |m: &BTreeMap<(usize, usize), TowerScalar>| {
            m.iter().map(|(k, v)| (*k, v * f)).filter(|(_, v)| !v.is_zero()).collect()
        };
        EdgeSpaceMap { left: sc(&self.left), right: sc(&self.right) }
    }

    pub fn transpose(&self) -> Self {
        let tr = |m: &BTreeMap<(usize, usize), TowerScalar>| m.iter().map(|((s, t), v)| ((*t, *s), v.clone())).collect();
        EdgeSpaceMap { left: tr(&self.left), right: tr(&self.right) }
    }

    /// The identity map of a connection onto itself.
    pub fn identity(c: &Connection) -> Self {
        let id = |g: &BipartiteGraph| (0..g.edges.len()).map(|i| ((i, i), TowerScalar::one())).collect();
        EdgeSpaceMap { left: id(&c.fg.g3), right: id(&c.fg.g1) }
    }

    /// Builds a map from `(source word, target word, value)` triples; each
    /// pair is looked up among the left edges first, then the right ones.
    pub fn from_words<'a>(
        source: &Connection,
        target: &Connection,
        entries: impl IntoIterator<Item = (&'a str, &'a str, TowerScalar)>,
    ) -> Result<Self, ConnectionError> {
        let mut out = EdgeSpaceMap::default();
        for (s, t, v) in entries {
            let sw = EdgeWord::parse(s).map_err(ConnectionError::Shape)?;
            let tw = EdgeWord::parse(t).map_err(ConnectionError::Shape)?;
            let mut placed = false;
            for side in [Side::Left, Side::Right] {
                let (gs, gt) = (side_graph(source, side), side_graph(target, side));
                if let (Some(i), Some(j)) = (gs.edge_index(&sw), gt.edge_index(&tw)) {
                    if gs.edges[i].src != gt.edges[j].src || gs.odd[gs.edges[i].dst] != gt.odd[gt.edges[j].dst] {
                        return Err(ConnectionError::Shape(format!("'{}' and '{}' have different endpoints", s, t)));
                    }
                    if !v.is_zero() {
                        out.side_mut(side).insert((i, j), v.clone());
                    }
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(ConnectionError::Shape(format!("no vertical edge pair '{}' -> '{}'", s, t)));
            }
        }
        Ok(out)
    }

    /// All blocks, left before right, ordered by (initial, terminal) vertex
    /// index. Blocks are included whenever either side has edges.
    pub fn blocks(&self, source: &Connection, target: &Connection) -> Vec<GaugeBlock> {
        let mut out = Vec::new();
        for side in [Side::Left, Side::Right] {
            let (gs, gt) = (side_graph(source, side), side_graph(target, side));
            let mut keys: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
            for (i, e) in gs.edges.iter().enumerate() {
                let to = gt.odd_idx(&gs.odd[e.dst]).unwrap_or(usize::MAX);
                keys.entry((e.src, to)).or_default().1.push(i);
            }
            for (j, e) in gt.edges.iter().enumerate() {
                keys.entry((e.src, e.dst)).or_default().0.push(j);
            }
            let m = self.side(side);
            for ((x, y), (rows, cols)) in keys {
                let matrix = rows
                    .iter()
                    .map(|&r| cols.iter().map(|&c| m.get(&(c, r)).cloned().unwrap_or_default()).collect())
                    .collect();
                let to = if y == usize::MAX { String::from("?") } else { gt.odd[y].clone() };
                out.push(GaugeBlock {
                    side,
                    from: gs.even[x].clone(),
                    to,
                    row_words: rows.iter().map(|&r| gt.edges[r].word.to_string()).collect(),
                    col_words: cols.iter().map(|&c| gs.edges[c].word.to_string()).collect(),
                    rows,
                    cols,
                    matrix,
                });
            }
        }
        out
    }

    /// First nonzero entry in block order (row-major within blocks).
    pub fn first_nonzero(&self, source: &Connection, target: &Connection) -> Option<TowerScalar> {
        self.blocks(source, target)
            .into_iter()
            .flat_map(|b| b.matrix.into_iter().flatten())
            .find(|x| !x.is_zero())
    }
}

/// An exact defect in one intertwining equation.
#[derive(Clone, Debug)]
pub struct Residual {
    /// `(t3, e2, e0, e1)` as edge words
    pub key: [String; 4],
    pub lhs: TowerScalar,
    pub rhs: TowerScalar,
}

type EqKey = (usize, usize, usize, usize);

fn check_pair(c1: &Connection, c2: &Connection) -> Result<(), ConnectionError> {
    if !c1.same_horizontal(c2) {
        return Err(ConnectionError::Mismatch("horizontal graphs differ".into()));
    }
    Ok(())
}

/// Collects `Σ_{e3} W1(e0,e1,e2,e3)·T_L[e3→t3] − Σ_{f1} W2(e0,f1,e2,t3)·T_R[e1→f1]`
/// for every key `(t3, e2, e0, e1)`, as linear forms in the unknowns.
fn equations(
    c1: &Connection,
    c2: &Connection,
    left_vars: &HashMap<usize, Vec<(usize, usize)>>,
    right_vars: &HashMap<usize, Vec<(usize, usize)>>,
) -> BTreeMap<EqKey, SparseRow> {
    let mut eqs: BTreeMap<EqKey, SparseRow> = BTreeMap::new();
    for (cell, w) in &c1.values {
        for &(t3, var) in left_vars.get(&cell.e3).map(|v| v.as_slice()).unwrap_or(&[]) {
            *eqs.entry((t3, cell.e2, cell.e0, cell.e1)).or_default().entry(var).or_default() += w;
        }
    }
    for (cell, w) in &c2.values {
        for &(s, var) in right_vars.get(&cell.e1).map(|v| v.as_slice()).unwrap_or(&[]) {
            *eqs.entry((cell.e3, cell.e2, cell.e0, s)).or_default().entry(var).or_default() -= w;
        }
    }
    for row in eqs.values_mut() {
        row.retain(|_, v| !v.is_zero());
    }
    eqs
}

/// Unknowns of the intertwining system: one per pair of same-endpoint edges.
struct Unknowns {
    vars: Vec<(Side, usize, usize)>,
    /// left: source edge e3 -> [(target t3, var)]
    left_by_src: HashMap<usize, Vec<(usize, usize)>>,
    /// right: target edge f1 -> [(source s, var)]
    right_by_tgt: HashMap<usize, Vec<(usize, usize)>>,
}

fn unknowns(c1: &Connection, c2: &Connection) -> Unknowns {
    let mut u = Unknowns { vars: Vec::new(), left_by_src: HashMap::new(), right_by_tgt: HashMap::new() };
    for side in [Side::Left, Side::Right] {
        let (gs, gt) = (side_graph(c1, side), side_graph(c2, side));
        for (i, e) in gs.edges.iter().enumerate() {
            let Some(y) = gt.odd_idx(&gs.odd[e.dst]) else { continue };
            for j in gt.edges_between(e.src, y) {
                let var = u.vars.len();
                u.vars.push((side, i, j));
                match side {
                    Side::Left => u.left_by_src.entry(i).or_default().push((j, var)),
                    Side::Right => u.right_by_tgt.entry(j).or_default().push((i, var)),
                }
            }
        }
    }
    u
}

fn map_from_vector(u: &Unknowns, x: &[TowerScalar]) -> EdgeSpaceMap {
    let mut m = EdgeSpaceMap::default();
    for (k, &(side, i, j)) in u.vars.iter().enumerate() {
        if !x[k].is_zero() {
            m.side_mut(side).insert((i, j), x[k].clone());
        }
    }
    m
}

/// Exact intertwiner space between two connections on the same horizontal
/// graphs.
#[derive(Clone, Debug)]
pub struct IntertwinerSpace {
    pub dim: usize,
    pub basis: Vec<EdgeSpaceMap>,
    pub unknowns: usize,
    pub equations: usize,
}

pub fn intertwiner_space(c1: &Connection, c2: &Connection) -> Result<IntertwinerSpace, ConnectionError> {
    check_pair(c1, c2)?;
    let u = unknowns(c1, c2);
    let eqs = equations(c1, c2, &u.left_by_src, &u.right_by_tgt);
    let mut ech = Echelon::new();
    let n = eqs.len();
    for (_, row) in eqs {
        if !row.is_empty() {
            ech.push(row);
        }
        if ech.rank() == u.vars.len() {
            break;
        }
    }
    let basis: Vec<EdgeSpaceMap> = ech.nullspace(u.vars.len()).iter().map(|x| map_from_vector(&u, x)).collect();
    Ok(IntertwinerSpace { dim: basis.len(), basis, unknowns: u.vars.len(), equations: n })
}

/// Nonzero residuals of the intertwining equations for a given map.
pub fn intertwining_residuals(
    c1: &Connection,
    c2: &Connection,
    t: &EdgeSpaceMap,
) -> Result<Vec<Residual>, ConnectionError> {
    check_pair(c1, c2)?;
    let mut lhs: BTreeMap<EqKey, TowerScalar> = BTreeMap::new();
    let mut rhs: BTreeMap<EqKey, TowerScalar> = BTreeMap::new();
    let mut left: HashMap<usize, Vec<(usize, &TowerScalar)>> = HashMap::new();
    for ((s, tt), v) in &t.left {
        left.entry(*s).or_default().push((*tt, v));
    }
    let mut right: HashMap<usize, Vec<(usize, &TowerScalar)>> = HashMap::new();
    for ((s, tt), v) in &t.right {
        right.entry(*tt).or_default().push((*s, v));
    }
    for (cell, w) in &c1.values {
        for (t3, x) in left.get(&cell.e3).map(|v| v.as_slice()).unwrap_or(&[]) {
            *lhs.entry((*t3, cell.e2, cell.e0, cell.e1)).or_default() += &(w * *x);
        }
    }
    for (cell, w) in &c2.values {
        for (s, x) in right.get(&cell.e1).map(|v| v.as_slice()).unwrap_or(&[]) {
            *rhs.entry((cell.e3, cell.e2, cell.e0, *s)).or_default() += &(w * *x);
        }
    }
    let mut keys: Vec<EqKey> = lhs.keys().chain(rhs.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for k in keys {
        let l = lhs.get(&k).cloned().unwrap_or_default();
        let r = rhs.get(&k).cloned().unwrap_or_default();
        if l != r {
            out.push(Residual {
                key: [
                    c2.fg.g3.edges[k.0].word.to_string(),
                    c1.fg.g2.edges[k.1].word.to_string(),
                    c1.fg.g0.edges[k.2].word.to_string(),
                    c1.fg.g1.edges[k.3].word.to_string(),
                ],
                lhs: l,
                rhs: r,
            });
        }
    }
    Ok(out)
}

/// Result of [`find_vertical_gauge`].
#[derive(Clone, Debug)]
pub enum GaugeOutcome {
    Found(EdgeSpaceMap),
    /// the intertwiner space does not have dimension 1
    NotUnique { dim: usize },
    /// the generator is not a multiple of a unitary with a tower normaliser
    NotUnitary { reason: String },
}

impl GaugeOutcome {
    pub fn gauge(&self) -> Option<&EdgeSpaceMap> {
        match self {
            GaugeOutcome::Found(g) => Some(g),
            _ => None,
        }
    }
}

fn gram(m: &Matrix) -> Matrix {
    matmul(m, &transpose(m))
}

/// A unitary vertical gauge from `c1` to `c2` when the intertwiner space is
/// one-dimensional, normalised so that its first nonzero entry (left blocks
/// before right blocks, each ordered by initial then terminal vertex,
/// row-major inside a block) is positive.
pub fn find_vertical_gauge(c1: &Connection, c2: &Connection) -> Result<GaugeOutcome, ConnectionError> {
    let space = intertwiner_space(c1, c2)?;
    if space.dim != 1 {
        return Ok(GaugeOutcome::NotUnique { dim: space.dim });
    }
    let t = &space.basis[0];
    let blocks = t.blocks(c1, c2);
    let mut lambda: Option<TowerScalar> = None;
    for b in &blocks {
        if b.rows.len() != b.cols.len() {
            return Ok(GaugeOutcome::NotUnitary { reason: format!("block {}-{} is not square", b.from, b.to) });
        }
        let g = gram(&b.matrix);
        let l = g[0][0].clone();
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { l.clone() } else { TowerScalar::zero() };
                if *x != want {
                    return Ok(GaugeOutcome::NotUnitary {
                        reason: format!("block {}-{} is not a multiple of a unitary", b.from, b.to),
                    });
                }
            }
        }
        match &lambda {
            None => lambda = Some(l),
            Some(prev) if *prev != l => {
                return Ok(GaugeOutcome::NotUnitary { reason: "blocks have different norms".into() });
            }
            _ => {}
        }
    }
    let Some(lambda) = lambda else {
        return Ok(GaugeOutcome::Found(t.clone()));
    };
    // a 1×1 block gives the normaliser without square roots
    let root = blocks
        .iter()
        .find(|b| b.rows.len() == 1)
        .map(|b| b.matrix[0][0].clone())
        .map(|x| if x.is_positive() { x } else { -x })
        .or_else(|| lambda.sqrt_exact());
    let Some(root) = root else {
        return Ok(GaugeOutcome::NotUnitary { reason: format!("normaliser sqrt({}) is not in the tower", lambda) });
    };
    let mut g = t.scaled(&root.inv().expect("nonzero block"));
    if let Some(first) = g.first_nonzero(c1, c2) {
        if !first.is_positive() {
            g = g.scaled(&-TowerScalar::one());
        }
    }
    Ok(GaugeOutcome::Found(g))
}

#[derive(Clone, Debug, Default)]
pub struct GaugeReport {
    pub blocks: usize,
    pub block_sizes: BTreeMap<usize, usize>,
    pub nonunitary: Vec<(String, String, Vec<(usize, usize, TowerScalar)>)>,
    pub residuals: Vec<Residual>,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.nonunitary.is_empty() && self.residuals.is_empty()
    }
}

/// Checks that `g` is blockwise unitary and intertwines `c1` with `c2`.
pub fn verify_gauge(c1: &Connection, c2: &Connection, g: &EdgeSpaceMap) -> Result<GaugeReport, ConnectionError> {
    let mut report = GaugeReport::default();
    for b in g.blocks(c1, c2) {
        report.blocks += 1;
        *report.block_sizes.entry(b.rows.len().max(b.cols.len())).or_insert(0) += 1;
        let defect = unitarity_defect(&b.matrix);
        if !defect.is_empty() || b.rows.len() != b.cols.len() {
            report.nonunitary.push((b.from.clone(), b.to.clone(), defect));
        }
    }
    report.residuals = intertwining_residuals(c1, c2, g)?;
    Ok(report)
}

fn dot(u: &[TowerScalar], v: &[TowerScalar]) -> TowerScalar {
    u.iter().zip(v).fold(TowerScalar::zero(), |acc, (x, y)| &acc + &(x * y))
}

/// Determinant by cofactor expansion (blocks here are at most 5×5).
fn det(m: &[Vec<TowerScalar>]) -> TowerScalar {
    let n = m.len();
    if n == 0 {
        return TowerScalar::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = TowerScalar::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<TowerScalar>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * &det(&minor);
        if j % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

/// Unit vector orthogonal to `n − 1` orthonormal vectors in dimension `n`
/// (generalised cross product; needs no square roots).
fn cross(vs: &[Vec<TowerScalar>], n: usize) -> Vec<TowerScalar> {
    (0..n)
        .map(|i| {
            let minor: Vec<Vec<TowerScalar>> =
                vs.iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| x.clone()).collect()).collect();
            let d = det(&minor);
            if (i + n - 1) % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Orthonormal basis of the orthogonal complement of the orthonormal
/// columns `image` in dimension `n`, or `None` if no Gram–Schmidt order
/// keeps the norms inside the tower.
fn complement_basis(image: &[Vec<TowerScalar>], n: usize) -> Option<Vec<Vec<TowerScalar>>> {
    let m = n - image.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let mut orders: Vec<Vec<usize>> = Vec::new();
    permutations(n, &mut Vec::new(), &mut orders);
    'order: for order in orders {
        let mut basis: Vec<Vec<TowerScalar>> = image.to_vec();
        let mut found: Vec<Vec<TowerScalar>> = Vec::new();
        for &i in &order {
            if found.len() + 1 == m {
                break;
            }
            let mut v = vec![TowerScalar::zero(); n];
            v[i] = TowerScalar::one();
            for u in &basis {
                let p = dot(u, &v);
                if !p.is_zero() {
                    for k in 0..n {
                        v[k] = &v[k] - &(&p * &u[k]);
                    }
                }
            }
            let norm_sq = dot(&v, &v);
            if norm_sq.is_zero() {
                continue;
            }
            let Some(root) = norm_sq.sqrt_exact() else { continue 'order };
            let inv = root.inv().unwrap();
            let v: Vec<TowerScalar> = v.iter().map(|x| x * &inv).collect();
            basis.push(v.clone());
            found.push(v);
        }
        if found.len() + 1 != m {
            continue;
        }
        let mut last = cross(&basis, n);
        if let Some(x) = last.iter().find(|x| !x.is_zero()) {
            if !x.is_positive() {
                last = last.iter().map(|x| -x).collect();
            }
        }
        found.push(last);
        return Some(found);
    }
    None
}

fn permutations(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == n {
        out.push(cur.clone());
        return;
    }
    for i in 0..n {
        if !cur.contains(&i) {
            cur.push(i);
            permutations(n, cur, out);
            cur.pop();
        }
    }
}

/// The connection on the orthogonal complement of the image of `embed`
/// (a map from `sub`'s vertical edges into `product`'s), together with the
/// embedding of the complement. Complement edges are named `x y` when a
/// block contributes one edge and `x y_1, x y_2, …` otherwise.
pub fn complement_connection(
    product: &Connection,
    sub: &Connection,
    embed: &EdgeSpaceMap,
) -> Result<(Connection, EdgeSpaceMap), ConnectionError> {
    let mut new_g1 = BipartiteGraph::new(product.fg.g1.even.clone(), product.fg.g1.odd.clone());
    let mut new_g3 = BipartiteGraph::new(product.fg.g3.even.clone(), product.fg.g3.odd.clone());
    let mut cembed = EdgeSpaceMap::default();
    for b in embed.blocks(sub, product) {
        let label = format!("{}-{} ({:?})", b.from, b.to, b.side);
        // columns of the block are the images of sub edges
        let image: Vec<Vec<TowerScalar>> = (0..b.cols.len()).map(|j| b.matrix.iter().map(|r| r[j].clone()).collect()).collect();
        for (i, u) in image.iter().enumerate() {
            for (j, v) in image.iter().enumerate() {
                let want = if i == j { TowerScalar::one() } else { TowerScalar::zero() };
                if dot(u, v) != want {
                    return Err(ConnectionError::NotIsometric(label));
                }
            }
        }
        let n = b.rows.len();
        let comp = complement_basis(&image, n).ok_or_else(|| ConnectionError::NoComplementBasis(label.clone()))?;
        let graph = match b.side {
            Side::Left => &mut new_g3,
            Side::Right => &mut new_g1,
        };
        for (k, v) in comp.iter().enumerate() {
            let word = if comp.len() == 1 {
                EdgeWord::simple(&b.from, &b.to)
            } else {
                EdgeWord::with_sub(&b.from, &b.to, &(k + 1).to_string())
            };
            let e = graph.add_edge(word)?;
            for (r, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    cembed.side_mut(b.side).insert((e, b.rows[r]), x.clone());
                }
            }
        }
    }
    let c = restrict(product, new_g1, new_g3, &cembed)?;
    Ok((c, cembed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: i64) -> TowerScalar {
        TowerScalar::from_int(n)
    }

    #[test]
    fn cross_product_is_orthogonal() {
        let e0 = vec![t(1), t(0), t(0)];
        let e1 = vec![t(0), t(1), t(0)];
        assert_eq!(cross(&[e0, e1], 3), vec![t(0), t(0), t(1)]);
    }

    #[test]
    fn complement_of_full_basis_is_empty() {
        let basis = vec![vec![t(1), t(0)], vec![t(0), t(1)]];
        assert_eq!(complement_basis(&basis, 2), Some(Vec::new()));
    }

    #[test]
    fn complement_in_three_dimensions() {
        let h = TowerScalar::sqrt_q(&crate::scalars::QSqrt17::from_int(3)).unwrap().inv().unwrap();
        let u = vec![h.clone(), h.clone(), h.clone()];
        let c = complement_basis(&[u.clone()], 3).unwrap();
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(dot(v, &u).is_zero());
            assert_eq!(dot(v, v), TowerScalar::one());
        }
        assert!(dot(&c[0], &c[1]).is_zero());
    }
}
