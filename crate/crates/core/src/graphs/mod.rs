//! Bipartite graphs, 4-graphs, cells and Perron–Frobenius weights.

mod word;

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{nullspace, SparseRow};
use crate::scalars::{parse_scalar, TowerScalar};

pub use word::{EdgeWord, Step};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("duplicate edge id '{0}'")]
    DuplicateEdge(String),
    #[error("edge '{word}' does not run from '{from}' to '{to}'")]
    WordMismatch { word: String, from: String, to: String },
    #[error("{0}")]
    Word(String),
    #[error("norm_sq is not an eigenvalue (trivial nullspace)")]
    WrongEigenvalue,
    #[error("eigenspace has dimension {0}; the graph is probably disconnected")]
    Disconnected(usize),
    #[error("weight of '{0}' is not positive")]
    NonPositiveWeight(String),
    #[error("norm_sq has no square root in the tower")]
    NormNotInTower,
    #[error("graph mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Format(String),
}

/// A directed edge from the `even` side to the `odd` side, named by its word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub word: EdgeWord,
}

/// Bipartite graph with labelled vertices and possibly parallel edges.
///
/// Edges are oriented from `even` to `odd`. In a 4-graph the "even" side of
/// each of the four graphs is its source side (V0 for G0 and G3, V1 for G1,
/// V3 for G2), which need not match the subfactor parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub edges: Vec<Edge>,
    even_index: HashMap<String, usize>,
    odd_index: HashMap<String, usize>,
    by_src: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(even: Vec<String>, odd: Vec<String>) -> Self {
        let even_index = even.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let odd_index = odd.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let by_src = vec![Vec::new(); even.len()];
        BipartiteGraph { even, odd, edges: Vec::new(), even_index, odd_index, by_src }
    }

    pub fn from_labels(even: &[&str], odd: &[&str]) -> Self {
        Self::new(even.iter().map(|s| s.to_string()).collect(), odd.iter().map(|s| s.to_string()).collect())
    }

    /// Adds the edge named by `word`, whose endpoints are read off the word.
    pub fn add_edge(&mut self, word: EdgeWord) -> Result<usize, GraphError> {
        let src = *self
            .even_index
            .get(word.source())
            .ok_or_else(|| GraphError::UnknownVertex(word.source().to_string()))?;
        let dst = *self
            .odd_index
            .get(word.target())
            .ok_or_else(|| GraphError::UnknownVertex(word.target().to_string()))?;
        if self.edges.iter().any(|e| e.word == word) {
            return Err(GraphError::DuplicateEdge(word.to_string()));
        }
        self.edges.push(Edge { src, dst, word });
        self.by_src[src].push(self.edges.len() - 1);
        Ok(self.edges.len() - 1)
    }

    /// Adds a simple edge `u v` (with a subscript when `u v` already exists).
    pub fn add_simple(&mut self, u: &str, v: &str) -> Result<usize, GraphError> {
        let mut word = EdgeWord::simple(u, v);
        let mut k = 1;
        while self.edges.iter().any(|e| e.word == word) {
            k += 1;
            word = EdgeWord::with_sub(u, v, &k.to_string());
        }
        self.add_edge(word)
    }

    pub fn simple(even: &[&str], odd: &[&str], pairs: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut g = Self::from_labels(even, odd);
        for (u, v) in pairs {
            g.add_simple(u, v)?;
        }
        Ok(g)
    }

    pub fn even_idx(&self, v: &str) -> Option<usize> {
        self.even_index.get(v).copied()
    }

    pub fn odd_idx(&self, v: &str) -> Option<usize> {
        self.odd_index.get(v).copied()
    }

    pub fn edges_from(&self, src: usize) -> &[usize] {
        &self.by_src[src]
    }

    pub fn edge_index(&self, word: &EdgeWord) -> Option<usize> {
        self.edges.iter().position(|e| &e.word == word)
    }

    pub fn edges_between(&self, src: usize, dst: usize) -> Vec<usize> {
        self.by_src[src].iter().copied().filter(|&e| self.edges[e].dst == dst).collect()
    }

    /// Edge-count matrix `A[even][odd]`.
    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let mut a = vec![vec![0i64; self.odd.len()]; self.even.len()];
        for e in &self.edges {
            a[e.src][e.dst] += 1;
        }
        a
    }

    /// Same vertices and edge words, ignoring edge order.
    pub fn same_as(&self, other: &BipartiteGraph) -> bool {
        let mut a: Vec<_> = self.edges.iter().map(|e| e.word.clone()).collect();
        let mut b: Vec<_> = other.edges.iter().map(|e| e.word.clone()).collect();
        a.sort();
        b.sort();
        self.even == other.even && self.odd == other.odd && a == b
    }

    /// The same graph with edges reversed (odd side becomes the source side).
    pub fn reversed(&self) -> Self {
        let mut g = Self::new(self.odd.clone(), self.even.clone());
        for e in &self.edges {
            g.add_edge(e.word.reversed()).expect("reversal of a valid graph");
        }
        g
    }

    /// Number of connected components of the underlying undirected graph
    /// (isolated vertices count).
    pub fn components(&self) -> usize {
        let n = self.even.len() + self.odd.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let a = find(&mut parent, e.src);
            let b = find(&mut parent, self.even.len() + e.dst);
            parent[a] = b;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }
}

/// Perron–Frobenius weights of a bipartite graph.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    pub even: BTreeMap<String, TowerScalar>,
    pub odd: BTreeMap<String, TowerScalar>,
    pub base: String,
}

impl WeightVector {
    pub fn get(&self, v: &str) -> Option<&TowerScalar> {
        self.even.get(v).or_else(|| self.odd.get(v))
    }
}

/// Exact Perron–Frobenius weights: the even weights span the kernel of
/// `A·Aᵀ − norm_sq`, odd weights are `Aᵀ·μ_even / √norm_sq`, and everything is
/// scaled so that `base` has weight 1.
pub fn fp_weights(g: &BipartiteGraph, norm_sq: &TowerScalar, base: &str) -> Result<WeightVector, GraphError> {
    if g.even_idx(base).is_none() && g.odd_idx(base).is_none() {
        return Err(GraphError::UnknownVertex(base.to_string()));
    }
    let a = g.adjacency();
    let ne = g.even.len();
    let no = g.odd.len();
    let mut rows = Vec::with_capacity(ne);
    for i in 0..ne {
        let mut row = SparseRow::new();
        for j in 0..ne {
            let aat: i64 = (0..no).map(|k| a[i][k] * a[j][k]).sum();
            let mut v = TowerScalar::from_int(aat);
            if i == j {
                v = &v - norm_sq;
            }
            if !v.is_zero() {
                row.insert(j, v);
            }
        }
        rows.push(row);
    }
    let ns = nullspace(rows, ne);
    match ns.len() {
        0 => return Err(GraphError::WrongEigenvalue),
        1 => {}
        n => return Err(GraphError::Disconnected(n)),
    }
    let even_raw = ns.into_iter().next().unwrap();
    let norm = norm_sq.sqrt_exact().ok_or(GraphError::NormNotInTower)?;
    let inv_norm = norm.inv().ok_or(GraphError::WrongEigenvalue)?;
    let odd_raw: Vec<TowerScalar> = (0..no)
        .map(|k| {
            let s = (0..ne).fold(TowerScalar::zero(), |acc, i| {
                &acc + &(&TowerScalar::from_int(a[i][k]) * &even_raw[i])
            });
            &s * &inv_norm
        })
        .collect();
    let scale = match g.even_idx(base) {
        Some(i) => even_raw[i].clone(),
        None => odd_raw[g.odd_idx(base).unwrap()].clone(),
    };
    let inv_scale = scale.inv().ok_or_else(|| GraphError::NonPositiveWeight(base.to_string()))?;
    let mut wv = WeightVector { even: BTreeMap::new(), odd: BTreeMap::new(), base: base.to_string() };
    for (i, v) in g.even.iter().enumerate() {
        wv.even.insert(v.clone(), &even_raw[i] * &inv_scale);
    }
    for (k, v) in g.odd.iter().enumerate() {
        wv.odd.insert(v.clone(), &odd_raw[k] * &inv_scale);
    }
    for (v, w) in wv.even.iter().chain(wv.odd.iter()) {
        if !w.is_positive() {
            return Err(GraphError::NonPositiveWeight(v.clone()));
        }
    }
    Ok(wv)
}

/// Square of graphs around a connection:
///
/// ```text
///   V0 --G0--> V1
///   |          |
///   G3         G1
///   v          v
///   V3 --G2--> V2
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct FourGraph {
    pub g0: BipartiteGraph,
    pub g1: BipartiteGraph,
    pub g2: BipartiteGraph,
    pub g3: BipartiteGraph,
}

/// A loop `a -e0-> b -e1-> c` against `a -e3-> d -e2-> c` (edge indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub e0: usize,
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
}

/// Vertex indices `(a, b, c, d)` of a cell in V0, V1, V2, V3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corners {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl FourGraph {
    pub fn new(
        g0: BipartiteGraph,
        g1: BipartiteGraph,
        g2: BipartiteGraph,
        g3: BipartiteGraph,
    ) -> Result<Self, GraphError> {
        let check = |what: &str, x: &[String], y: &[String]| {
            if x == y {
                Ok(())
            } else {
                Err(GraphError::Mismatch(format!("{} vertex lists differ", what)))
            }
        };
        check("V0", &g0.even, &g3.even)?;
        check("V1", &g0.odd, &g1.even)?;
        check("V2", &g1.odd, &g2.odd)?;
        check("V3", &g3.odd, &g2.even)?;
        Ok(FourGraph { g0, g1, g2, g3 })
    }

    pub fn v0(&self) -> &[String] {
        &self.g0.even
    }
    pub fn v1(&self) -> &[String] {
        &self.g0.odd
    }
    pub fn v2(&self) -> &[String] {
        &self.g1.odd
    }
    pub fn v3(&self) -> &[String] {
        &self.g3.odd
    }

    pub fn corners(&self, cell: &Cell) -> Corners {
        Corners {
            a: self.g0.edges[cell.e0].src,
            b: self.g0.edges[cell.e0].dst,
            c: self.g1.edges[cell.e1].dst,
            d: self.g3.edges[cell.e3].dst,
        }
    }

    /// All cells, ordered by (e0, e1, e3, e2).
    pub fn cells(&self) -> Vec<Cell> {
        let mut g2_by_dc: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, e) in self.g2.edges.iter().enumerate() {
            g2_by_dc.entry((e.src, e.dst)).or_default().push(i);
        }
        let mut out = Vec::new();
        for (e0, h) in self.g0.edges.iter().enumerate() {
            for &e1 in self.g1.edges_from(h.dst) {
                let c = self.g1.edges[e1].dst;
                for &e3 in self.g3.edges_from(h.src) {
                    let d = self.g3.edges[e3].dst;
                    if let Some(e2s) = g2_by_dc.get(&(d, c)) {
                        for &e2 in e2s {
                            out.push(Cell { e0, e1, e2, e3 });
                        }
                    }
                }
            }
        }
        out
    }

    /// Cells grouped by `(a, c)`: the matrices with rows indexed by paths
    /// through V3 and columns by paths through V1.
    pub fn groups_ac(&self) -> BTreeMap<(usize, usize), Vec<Cell>> {
        let mut out: BTreeMap<(usize, usize), Vec<Cell>> = BTreeMap::new();
        for cell in self.cells() {
            let k = self.corners(&cell);
            out.entry((k.a, k.c)).or_default().push(cell);
        }
        out
    }

    /// Cells grouped by `(b, d)` for the renormalised direction.
    pub fn groups_bd(&self) -> BTreeMap<(usize, usize), Vec<Cell>> {
        let mut out: BTreeMap<(usize, usize), Vec<Cell>> = BTreeMap::new();
        for cell in self.cells() {
            let k = self.corners(&cell);
            out.entry((k.b, k.d)).or_default().push(cell);
        }
        out
    }

    /// Number of paths `a → c` through V1 and through V3.
    pub fn path_counts(&self, a: usize, c: usize) -> (usize, usize) {
        let via1 = self.g0.edges_from(a).iter().map(|&e0| {
            let b = self.g0.edges[e0].dst;
            self.g1.edges_from(b).iter().filter(|&&e1| self.g1.edges[e1].dst == c).count()
        });
        let via3 = self.g3.edges_from(a).iter().map(|&e3| {
            let d = self.g3.edges[e3].dst;
            self.g2.edges_from(d).iter().filter(|&&e2| self.g2.edges[e2].dst == c).count()
        });
        (via1.sum(), via3.sum())
    }
}

// ---------------------------------------------------------------------------
// file format

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct GraphFile {
    pub format: String,
    #[serde(default)]
    pub name: String,
    pub even: Vec<String>,
    pub odd: Vec<String>,
    /// `[even, odd, id]`; the id is the edge word.
    pub edges: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_sq: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<BipartiteGraph, GraphError> {
        let mut g = BipartiteGraph::new(self.even.clone(), self.odd.clone());
        for [u, v, id] in &self.edges {
            let word = EdgeWord::parse(id).map_err(GraphError::Word)?;
            if word.source() != u || word.target() != v {
                return Err(GraphError::WordMismatch { word: id.clone(), from: u.clone(), to: v.clone() });
            }
            g.add_edge(word)?;
        }
        Ok(g)
    }

    pub fn from_graph(name: &str, g: &BipartiteGraph) -> Self {
        GraphFile {
            format: "bipartite-graph/1".into(),
            name: name.into(),
            even: g.even.clone(),
            odd: g.odd.clone(),
            edges: g
                .edges
                .iter()
                .map(|e| [g.even[e.src].clone(), g.odd[e.dst].clone(), e.word.to_string()])
                .collect(),
            norm_sq: None,
            base: None,
            note: None,
        }
    }

    pub fn norm_sq(&self) -> Result<Option<TowerScalar>, GraphError> {
        self.norm_sq
            .as_deref()
            .map(|s| parse_scalar(s).map_err(|e| GraphError::Format(e.to_string())))
            .transpose()
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct FourGraphFile {
    pub format: String,
    #[serde(default)]
    pub name: String,
    #[serde(rename = "V0")]
    pub v0: Vec<String>,
    #[serde(rename = "V1")]
    pub v1: Vec<String>,
    #[serde(rename = "V2")]
    pub v2: Vec<String>,
    #[serde(rename = "V3")]
    pub v3: Vec<String>,
    #[serde(rename = "G0")]
    pub g0: Vec<String>,
    #[serde(rename = "G1")]
    pub g1: Vec<String>,
    #[serde(rename = "G2")]
    pub g2: Vec<String>,
    #[serde(rename = "G3")]
    pub g3: Vec<String>,
}

impl FourGraphFile {
    pub fn to_four_graph(&self) -> Result<FourGraph, GraphError> {
        let build = |even: &[String], odd: &[String], words: &[String]| -> Result<BipartiteGraph, GraphError> {
            let mut g = BipartiteGraph::new(even.to_vec(), odd.to_vec());
            for w in words {
                g.add_edge(EdgeWord::parse(w).map_err(GraphError::Word)?)?;
            }
            Ok(g)
        };
        FourGraph::new(
            build(&self.v0, &self.v1, &self.g0)?,
            build(&self.v1, &self.v2, &self.g1)?,
            build(&self.v3, &self.v2, &self.g2)?,
            build(&self.v0, &self.v3, &self.g3)?,
        )
    }

    pub fn from_four_graph(name: &str, fg: &FourGraph) -> Self {
        let words = |g: &BipartiteGraph| g.edges.iter().map(|e| e.word.to_string()).collect();
        FourGraphFile {
            format: "four-graph/1".into(),
            name: name.into(),
            v0: fg.v0().to_vec(),
            v1: fg.v1().to_vec(),
            v2: fg.v2().to_vec(),
            v3: fg.v3().to_vec(),
            g0: words(&fg.g0),
            g1: words(&fg.g1),
            g2: words(&fg.g2),
            g3: words(&fg.g3),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn single_edge_weights() {
        let g = BipartiteGraph::simple(&["x"], &["y"], &[("x", "y")]).unwrap();
        let w = fp_weights(&g, &TowerScalar::one(), "x").unwrap();
        assert_eq!(w.get("x"), Some(&TowerScalar::one()));
        assert_eq!(w.get("y"), Some(&TowerScalar::one()));
    }

    #[test]
    fn wrong_eigenvalue_and_disconnected() {
        let g = BipartiteGraph::simple(&["x"], &["y"], &[("x", "y")]).unwrap();
        assert_eq!(fp_weights(&g, &TowerScalar::from_int(2), "x"), Err(GraphError::WrongEigenvalue));
        let g2 = BipartiteGraph::simple(&["x", "z"], &["y", "w"], &[("x", "y"), ("z", "w")]).unwrap();
        assert_eq!(fp_weights(&g2, &TowerScalar::one(), "x"), Err(GraphError::Disconnected(2)));
    }

    #[test]
    fn one_cell_square() {
        let g0 = BipartiteGraph::simple(&["a"], &["b"], &[("a", "b")]).unwrap();
        let g1 = BipartiteGraph::simple(&["b"], &["c"], &[("b", "c")]).unwrap();
        let g2 = BipartiteGraph::simple(&["d"], &["c"], &[("d", "c")]).unwrap();
        let g3 = BipartiteGraph::simple(&["a"], &["d"], &[("a", "d")]).unwrap();
        let fg = FourGraph::new(g0, g1, g2, g3).unwrap();
        assert_eq!(fg.cells().len(), 1);
    }

    #[test]
    fn parallel_edges_get_subscripts() {
        let mut g = BipartiteGraph::from_labels(&["f"], &["f"]);
        g.add_simple("f", "f").unwrap();
        g.add_simple("f", "f").unwrap();
        let words: Vec<String> = g.edges.iter().map(|e| e.word.to_string()).collect();
        assert_eq!(words, vec!["f f", "f f_2"]);
    }
}
