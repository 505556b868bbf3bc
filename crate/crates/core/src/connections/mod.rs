//! Connections on 4-graphs and their calculus.

mod maps;
mod phase;

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::graphs::{fp_weights, BipartiteGraph, Cell, EdgeWord, FourGraph, GraphError, WeightVector};
use crate::linalg::{unitarity_defect, Matrix};
use crate::scalars::TowerScalar;

pub use maps::{
    complement_connection, find_vertical_gauge, intertwiner_space, intertwining_residuals, verify_gauge,
    EdgeSpaceMap, GaugeBlock, GaugeOutcome, GaugeReport, IntertwinerSpace, Residual, Side,
};
pub use phase::{classify_phase_connections, phase_class_of, PhaseClassification};

#[derive(Debug, thiserror::Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph mismatch: {0}")]
    Mismatch(String),
    #[error("missing weight for vertex '{0}'")]
    MissingWeight(String),
    #[error("renormalisation factor for cell {0} has no square root in the tower")]
    Renormalisation(String),
    #[error("map is not an isometry on block {0}")]
    NotIsometric(String),
    #[error("no orthonormal complement basis with entries in the tower for block {0}")]
    NoComplementBasis(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A 4-graph with a scalar on every cell. Cells absent from `values` are 0.
#[derive(Clone, Debug)]
pub struct Connection {
    pub fg: FourGraph,
    pub values: HashMap<Cell, TowerScalar>,
    /// weights on V0 ∪ V1 (the graph G0)
    pub weights_top: WeightVector,
    /// weights on V3 ∪ V2 (the graph G2)
    pub weights_bottom: WeightVector,
}

/// One failing block of a biunitarity check.
#[derive(Clone, Debug)]
pub struct BlockFailure {
    /// `"ac"` for plain unitarity, `"bd"` for the renormalised direction.
    pub grouping: &'static str,
    pub corner0: String,
    pub corner1: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub defect: Vec<(usize, usize, TowerScalar)>,
}

#[derive(Clone, Debug, Default)]
pub struct BiunitarityReport {
    pub ac_blocks: usize,
    pub bd_blocks: usize,
    pub block_sizes: BTreeMap<usize, usize>,
    pub failures: Vec<BlockFailure>,
}

impl BiunitarityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl Connection {
    pub fn new(
        fg: FourGraph,
        values: HashMap<Cell, TowerScalar>,
        weights_top: WeightVector,
        weights_bottom: WeightVector,
    ) -> Self {
        let mut values = values;
        values.retain(|_, v| !v.is_zero());
        Connection { fg, values, weights_top, weights_bottom }
    }

    /// Builds a connection, computing both weight vectors from the norms.
    pub fn with_norms(
        fg: FourGraph,
        values: HashMap<Cell, TowerScalar>,
        norm_sq: &TowerScalar,
        base_top: &str,
        base_bottom: &str,
    ) -> Result<Self, ConnectionError> {
        let top = fp_weights(&fg.g0, norm_sq, base_top)?;
        let bottom = fp_weights(&fg.g2, norm_sq, base_bottom)?;
        Ok(Self::new(fg, values, top, bottom))
    }

    pub fn value(&self, cell: &Cell) -> TowerScalar {
        self.values.get(cell).cloned().unwrap_or_default()
    }

    fn weight(w: &WeightVector, v: &str) -> Result<TowerScalar, ConnectionError> {
        w.get(v).cloned().ok_or_else(|| ConnectionError::MissingWeight(v.to_string()))
    }

    /// Human-readable name of a cell: the four edge words.
    pub fn cell_label(&self, cell: &Cell) -> String {
        format!(
            "[{} | {} | {} | {}]",
            self.fg.g0.edges[cell.e0].word,
            self.fg.g1.edges[cell.e1].word,
            self.fg.g2.edges[cell.e2].word,
            self.fg.g3.edges[cell.e3].word
        )
    }

    /// `√(μ(a)μ(c) / (μ(b)μ(d)))` for the corners of `cell`.
    pub fn renormalisation_factor(&self, cell: &Cell) -> Result<TowerScalar, ConnectionError> {
        let k = self.fg.corners(cell);
        let ma = Self::weight(&self.weights_top, &self.fg.v0()[k.a])?;
        let mb = Self::weight(&self.weights_top, &self.fg.v1()[k.b])?;
        let mc = Self::weight(&self.weights_bottom, &self.fg.v2()[k.c])?;
        let md = Self::weight(&self.weights_bottom, &self.fg.v3()[k.d])?;
        let ratio = &(&ma * &mc) * &(&mb * &md).inv().ok_or_else(|| ConnectionError::MissingWeight("zero".into()))?;
        ratio.sqrt_exact().ok_or_else(|| ConnectionError::Renormalisation(self.cell_label(cell)))
    }

    fn check_grouping(
        &self,
        grouping: &'static str,
        report: &mut BiunitarityReport,
    ) -> Result<(), ConnectionError> {
        let fg = &self.fg;
        let groups = if grouping == "ac" { fg.groups_ac() } else { fg.groups_bd() };
        // factors are cached per corner tuple
        let mut factors: HashMap<(usize, usize, usize, usize), TowerScalar> = HashMap::new();
        for ((x, y), cells) in groups {
            let mut rows: Vec<(usize, usize)> = Vec::new();
            let mut cols: Vec<(usize, usize)> = Vec::new();
            let key_row = |c: &Cell| if grouping == "ac" { (c.e3, c.e2) } else { (c.e0, c.e3) };
            let key_col = |c: &Cell| if grouping == "ac" { (c.e0, c.e1) } else { (c.e1, c.e2) };
            for c in &cells {
                if !rows.contains(&key_row(c)) {
                    rows.push(key_row(c));
                }
                if !cols.contains(&key_col(c)) {
                    cols.push(key_col(c));
                }
            }
            rows.sort();
            cols.sort();
            let mut m: Matrix = vec![vec![TowerScalar::zero(); cols.len()]; rows.len()];
            for c in &cells {
                let mut v = self.value(c);
                if grouping == "bd" && !v.is_zero() {
                    let k = fg.corners(c);
                    let f = match factors.get(&(k.a, k.b, k.c, k.d)) {
                        Some(f) => f.clone(),
                        None => {
                            let f = self.renormalisation_factor(c)?;
                            factors.insert((k.a, k.b, k.c, k.d), f.clone());
                            f
                        }
                    };
                    v = &v * &f;
                }
                let i = rows.binary_search(&key_row(c)).unwrap();
                let j = cols.binary_search(&key_col(c)).unwrap();
                m[i][j] = v;
            }
            if grouping == "ac" {
                report.ac_blocks += 1;
                *report.block_sizes.entry(rows.len().max(cols.len())).or_insert(0) += 1;
            } else {
                report.bd_blocks += 1;
            }
            let defect = unitarity_defect(&m);
            if !defect.is_empty() {
                let (c0, c1) = if grouping == "ac" {
                    (fg.v0()[x].clone(), fg.v2()[y].clone())
                } else {
                    (fg.v1()[x].clone(), fg.v3()[y].clone())
                };
                let label = |(p, q): &(usize, usize), first: &BipartiteGraph, second: &BipartiteGraph| {
                    format!("{} / {}", first.edges[*p].word, second.edges[*q].word)
                };
                let (rg, cg) = if grouping == "ac" {
                    ((&fg.g3, &fg.g2), (&fg.g0, &fg.g1))
                } else {
                    ((&fg.g0, &fg.g3), (&fg.g1, &fg.g2))
                };
                report.failures.push(BlockFailure {
                    grouping,
                    corner0: c0,
                    corner1: c1,
                    rows: rows.iter().map(|r| label(r, rg.0, rg.1)).collect(),
                    cols: cols.iter().map(|c| label(c, cg.0, cg.1)).collect(),
                    defect,
                });
            }
        }
        Ok(())
    }

    /// Unitarity of every `(a, c)` block and of every renormalised `(b, d)`
    /// block, with exact defects for failures.
    pub fn check_biunitary(&self) -> Result<BiunitarityReport, ConnectionError> {
        let mut report = BiunitarityReport::default();
        self.check_grouping("ac", &mut report)?;
        self.check_grouping("bd", &mut report)?;
        Ok(report)
    }

    /// Cell lookup by the four edge words.
    pub fn cell_by_words(&self, e0: &str, e1: &str, e2: &str, e3: &str) -> Option<Cell> {
        let find = |g: &BipartiteGraph, w: &str| EdgeWord::parse(w).ok().and_then(|w| g.edge_index(&w));
        let cell = Cell {
            e0: find(&self.fg.g0, e0)?,
            e1: find(&self.fg.g1, e1)?,
            e2: find(&self.fg.g2, e2)?,
            e3: find(&self.fg.g3, e3)?,
        };
        let k = self.fg.corners(&cell);
        let ok = self.fg.g1.edges[cell.e1].src == k.b
            && self.fg.g2.edges[cell.e2].dst == k.c
            && self.fg.g2.edges[cell.e2].src == k.d
            && self.fg.g3.edges[cell.e3].src == k.a;
        ok.then_some(cell)
    }

    pub fn same_horizontal(&self, other: &Connection) -> bool {
        self.fg.g0 == other.fg.g0 && self.fg.g2 == other.fg.g2
    }
}

/// The trivial connection on `g`: vertical edges are single vertices and
/// every cell value is 1.
pub fn identity_connection(g: &BipartiteGraph, weights: &WeightVector) -> Connection {
    let mut g1 = BipartiteGraph::new(g.odd.clone(), g.odd.clone());
    for v in &g.odd {
        g1.add_edge(EdgeWord::trivial(v)).expect("fresh vertex");
    }
    let mut g3 = BipartiteGraph::new(g.even.clone(), g.even.clone());
    for v in &g.even {
        g3.add_edge(EdgeWord::trivial(v)).expect("fresh vertex");
    }
    let fg = FourGraph::new(g.clone(), g1, g.clone(), g3).expect("consistent by construction");
    let values = (0..g.edges.len())
        .map(|e| {
            let e0 = &g.edges[e];
            (Cell { e0: e, e1: e0.dst, e2: e, e3: e0.src }, TowerScalar::one())
        })
        .collect();
    Connection::new(fg, values, weights.clone(), weights.clone())
}

fn composite_graph(
    first: &BipartiteGraph,
    second: &BipartiteGraph,
) -> Result<(BipartiteGraph, HashMap<(usize, usize), usize>), ConnectionError> {
    let mut g = BipartiteGraph::new(first.even.clone(), second.odd.clone());
    let mut index = HashMap::new();
    for (i, e) in first.edges.iter().enumerate() {
        let mid = &first.odd[e.dst];
        let Some(m) = second.even_idx(mid) else { continue };
        for &j in second.edges_from(m) {
            let w = e.word.concat(&second.edges[j].word).expect("matching junction");
            let k = g.add_edge(w)?;
            index.insert((i, j), k);
        }
    }
    Ok((g, index))
}

/// Vertical composition: `c1` on top of `c2`, summing over the shared middle
/// horizontal edge.
pub fn compose(c1: &Connection, c2: &Connection) -> Result<Connection, ConnectionError> {
    if c1.fg.g2 != c2.fg.g0 {
        return Err(ConnectionError::Mismatch("lower graph of the first factor differs from upper graph of the second".into()));
    }
    let (g1, idx1) = composite_graph(&c1.fg.g1, &c2.fg.g1)?;
    let (g3, idx3) = composite_graph(&c1.fg.g3, &c2.fg.g3)?;
    let fg = FourGraph::new(c1.fg.g0.clone(), g1, c2.fg.g2.clone(), g3)?;
    let mut by_e0: HashMap<usize, Vec<(&Cell, &TowerScalar)>> = HashMap::new();
    for (cell, v) in &c2.values {
        by_e0.entry(cell.e0).or_default().push((cell, v));
    }
    let mut values: HashMap<Cell, TowerScalar> = HashMap::new();
    for (cell, w1) in &c1.values {
        for (lower, w2) in by_e0.get(&cell.e2).map(|v| v.as_slice()).unwrap_or(&[]) {
            let key = Cell {
                e0: cell.e0,
                e1: idx1[&(cell.e1, lower.e1)],
                e2: lower.e2,
                e3: idx3[&(cell.e3, lower.e3)],
            };
            *values.entry(key).or_default() += &(w1 * *w2);
        }
    }
    Ok(Connection::new(fg, values, c1.weights_top.clone(), c2.weights_bottom.clone()))
}

fn union_graph(
    a: &BipartiteGraph,
    b: &BipartiteGraph,
) -> Result<(BipartiteGraph, Vec<usize>), ConnectionError> {
    let mut g = a.clone();
    let mut map = Vec::with_capacity(b.edges.len());
    for e in &b.edges {
        let mut w = e.word.clone();
        let mut k = 2;
        while g.edge_index(&w).is_some() {
            if w.is_empty() {
                return Err(GraphError::DuplicateEdge(w.to_string()).into());
            }
            let last = w.0.last_mut().unwrap();
            let base = e.word.0.last().unwrap().sub.clone();
            last.sub = if base.is_empty() { k.to_string() } else { format!("{}.{}", base, k) };
            k += 1;
        }
        map.push(g.add_edge(w)?);
    }
    Ok((g, map))
}

/// Direct sum: vertical graphs are disjointly united. Colliding edge words
/// from the second summand get a fresh subscript on their last step.
pub fn direct_sum(c1: &Connection, c2: &Connection) -> Result<Connection, ConnectionError> {
    if !c1.same_horizontal(c2) {
        return Err(ConnectionError::Mismatch("horizontal graphs differ".into()));
    }
    if c1.fg.v2() != c2.fg.v2() || c1.fg.v3() != c2.fg.v3() {
        return Err(ConnectionError::Mismatch("vertex sets differ".into()));
    }
    let (g1, m1) = union_graph(&c1.fg.g1, &c2.fg.g1)?;
    let (g3, m3) = union_graph(&c1.fg.g3, &c2.fg.g3)?;
    let fg = FourGraph::new(c1.fg.g0.clone(), g1, c1.fg.g2.clone(), g3)?;
    let mut values = c1.values.clone();
    for (cell, v) in &c2.values {
        values.insert(Cell { e0: cell.e0, e1: m1[cell.e1], e2: cell.e2, e3: m3[cell.e3] }, v.clone());
    }
    Ok(Connection::new(fg, values, c1.weights_top.clone(), c1.weights_bottom.clone()))
}

/// Opposite connection: upper and lower graphs swap, vertical graphs are
/// reversed, and `W̄(e2, ē1, e0, ē3) = √(μ(a)μ(c)/(μ(b)μ(d)))·W(e0, e1, e2, e3)`.
pub fn conjugate(c: &Connection) -> Result<Connection, ConnectionError> {
    let fg = FourGraph::new(c.fg.g2.clone(), c.fg.g1.reversed(), c.fg.g0.clone(), c.fg.g3.reversed())?;
    let mut values = HashMap::with_capacity(c.values.len());
    for (cell, v) in &c.values {
        let f = c.renormalisation_factor(cell)?;
        values.insert(Cell { e0: cell.e2, e1: cell.e1, e2: cell.e0, e3: cell.e3 }, v * &f);
    }
    Ok(Connection::new(fg, values, c.weights_bottom.clone(), c.weights_top.clone()))
}

/// The connection induced on a subobject: `embed` maps the vertical edges
/// of `g1`/`g3` isometrically into those of `product`, and
/// `W(e0, e1, e2, e3) = Σ E_L[e3→p3]·E_R[e1→p1]·W_product(e0, p1, e2, p3)`.
pub fn restrict(
    product: &Connection,
    g1: BipartiteGraph,
    g3: BipartiteGraph,
    embed: &EdgeSpaceMap,
) -> Result<Connection, ConnectionError> {
    let fg = FourGraph::new(product.fg.g0.clone(), g1, product.fg.g2.clone(), g3)?;
    let mut left: HashMap<usize, Vec<(usize, &TowerScalar)>> = HashMap::new();
    for ((s, t), v) in &embed.left {
        left.entry(*s).or_default().push((*t, v));
    }
    let mut right: HashMap<usize, Vec<(usize, &TowerScalar)>> = HashMap::new();
    for ((s, t), v) in &embed.right {
        right.entry(*s).or_default().push((*t, v));
    }
    let mut values = HashMap::new();
    for cell in fg.cells() {
        let mut acc = TowerScalar::zero();
        for (p3, x) in left.get(&cell.e3).map(|v| v.as_slice()).unwrap_or(&[]) {
            for (p1, y) in right.get(&cell.e1).map(|v| v.as_slice()).unwrap_or(&[]) {
                let pc = Cell { e0: cell.e0, e1: *p1, e2: cell.e2, e3: *p3 };
                if let Some(w) = product.values.get(&pc) {
                    acc += &(&(*x * *y) * w);
                }
            }
        }
        if !acc.is_zero() {
            values.insert(cell, acc);
        }
    }
    Ok(Connection::new(fg, values, product.weights_top.clone(), product.weights_bottom.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(values: &[i64]) -> Connection {
        // two parallel vertical edges each side, one horizontal edge
        let g0 = BipartiteGraph::simple(&["a"], &["b"], &[("a", "b")]).unwrap();
        let g2 = BipartiteGraph::simple(&["a"], &["b"], &[("a", "b")]).unwrap();
        let mut g1 = BipartiteGraph::from_labels(&["b"], &["b"]);
        g1.add_simple("b", "b").unwrap();
        let mut g3 = BipartiteGraph::from_labels(&["a"], &["a"]);
        g3.add_simple("a", "a").unwrap();
        let fg = FourGraph::new(g0, g1, g2, g3).unwrap();
        let vals = fg.cells().into_iter().zip(values).map(|(c, v)| (c, TowerScalar::from_int(*v))).collect();
        Connection::with_norms(fg, vals, &TowerScalar::one(), "a", "a").unwrap()
    }

    #[test]
    fn identity_is_biunitary_and_self_conjugate() {
        let g = BipartiteGraph::simple(&["x", "z"], &["y"], &[("x", "y"), ("z", "y")]).unwrap();
        let w = fp_weights(&g, &TowerScalar::from_int(2), "y").unwrap();
        let id = identity_connection(&g, &w);
        assert!(id.check_biunitary().unwrap().passed());
        let bar = conjugate(&id).unwrap();
        assert_eq!(bar.values.len(), id.values.len());
        for (cell, v) in &bar.values {
            assert_eq!(id.values.get(cell), Some(v));
        }
    }

    #[test]
    fn sign_flip_is_detected() {
        assert!(square(&[1]).check_biunitary().unwrap().passed());
        assert!(!square(&[2]).check_biunitary().unwrap().passed());
    }

    #[test]
    fn identity_composes_trivially() {
        let c = square(&[-1]);
        let id = identity_connection(&c.fg.g0, &c.weights_top);
        let p = compose(&id, &c).unwrap();
        assert_eq!(p.fg.g1, c.fg.g1);
        assert_eq!(p.fg.g3, c.fg.g3);
        assert_eq!(p.values, c.values);
    }

    #[test]
    fn direct_sum_renames_collisions() {
        let c = square(&[1]);
        let s = direct_sum(&c, &c).unwrap();
        assert_eq!(s.fg.g1.edges.len(), 2);
        assert_eq!(s.fg.g1.edges[1].word.to_string(), "b b_2");
        assert!(s.check_biunitary().unwrap().passed());
    }
}
