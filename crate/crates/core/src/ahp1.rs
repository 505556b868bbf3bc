//! The AH+1 connections: κ, its conjugate, the decomposition κκ̄ = 1 + ρ,
//! the α connections, and the composites ρακ and αρακ.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::assets::{AssetError, Catalog, EdgeMapFile, GaugeFile};
use crate::connections::{
    classify_phase_connections, compose, conjugate, identity_connection, intertwiner_space, restrict, Connection, ConnectionError, EdgeSpaceMap, Side,
};
use crate::graphs::{BipartiteGraph, EdgeWord};
use crate::linalg::{Echelon, SparseRow};
use crate::scalars::{parse_ext, parse_scalar, ExtScalar, TowerScalar};

pub const KAPPA: &str = "ahp1.kappa.connection";
pub const ALPHA: &str = "ahp1.alpha.connection";
pub const TABLE1: &str = "ahp1.table1.corrected";
pub const TABLE1_PRINTED: &str = "ahp1.table1.as-printed";
pub const TABLE2: &str = "ahp1.table2.corrected";
pub const TABLE2_PRINTED: &str = "ahp1.table2.as-printed";
pub const APPENDIX: &str = "ahp1.appendixA.gauge";
pub const APPENDIX_PRINTED: &str = "ahp1.appendixA.gauge.as-printed";

fn err(name: &str, msg: impl ToString) -> AssetError {
    AssetError::Parse { name: name.to_string(), msg: msg.to_string() }
}

fn side_of(s: &str, name: &str) -> Result<Side, AssetError> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(err(name, format!("unknown side '{}'", other))),
    }
}

fn side_graph(c: &Connection, side: Side) -> &BipartiteGraph {
    match side {
        Side::Left => &c.fg.g3,
        Side::Right => &c.fg.g1,
    }
}

/// Source edge word of a table entry. For maps out of the identity the
/// printed `x x` names the trivial edge at `x`.
fn source_word(file: &EdgeMapFile, edge: &str) -> Result<EdgeWord, AssetError> {
    let w = EdgeWord::parse(edge).map_err(|e| err(&file.name, e))?;
    if file.source == "identity" {
        if w.len() != 1 || w.source() != w.target() || !w.0[1].sub.is_empty() {
            return Err(err(&file.name, format!("'{}' is not an identity edge", edge)));
        }
        return Ok(EdgeWord::trivial(w.source()));
    }
    Ok(w)
}

/// Vertical graphs of the source connection described by a table: the
/// listed edges, plus (when `simple_edges` is set) one edge `u v` for every
/// pair of distinct vertices joined by a single target path and not listed.
pub fn table_source_graphs(
    file: &EdgeMapFile,
    target: &Connection,
) -> Result<(BipartiteGraph, BipartiteGraph), AssetError> {
    let mut g1 = BipartiteGraph::new(target.fg.g1.even.clone(), target.fg.g1.odd.clone());
    let mut g3 = BipartiteGraph::new(target.fg.g3.even.clone(), target.fg.g3.odd.clone());
    for e in &file.entries {
        let side = side_of(&e.side, &file.name)?;
        let g = if side == Side::Left { &mut g3 } else { &mut g1 };
        g.add_edge(source_word(file, &e.edge)?).map_err(|x| err(&file.name, x))?;
    }
    if file.simple_edges.is_some() {
        for (side, g) in [(Side::Left, &mut g3), (Side::Right, &mut g1)] {
            let tg = side_graph(target, side);
            let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for e in &tg.edges {
                *pairs.entry((e.src, e.dst)).or_insert(0) += 1;
            }
            for ((x, y), n) in pairs {
                let (u, v) = (&tg.even[x], &tg.odd[y]);
                let listed = g.edges_between(x, y).len();
                if u != v && n == 1 && listed == 0 {
                    g.add_edge(EdgeWord::simple(u, v)).map_err(|x| err(&file.name, x))?;
                }
            }
        }
    }
    Ok((g1, g3))
}

/// The map described by a table, from `source` to `target`.
pub fn table_map(file: &EdgeMapFile, source: &Connection, target: &Connection) -> Result<EdgeSpaceMap, AssetError> {
    let mut m = EdgeSpaceMap::default();
    let mut listed: Vec<(Side, usize)> = Vec::new();
    for e in &file.entries {
        let side = side_of(&e.side, &file.name)?;
        let sw = source_word(file, &e.edge)?;
        let s = side_graph(source, side)
            .edge_index(&sw)
            .ok_or_else(|| err(&file.name, format!("no source edge '{}'", e.edge)))?;
        listed.push((side, s));
        for [coeff, path] in &e.terms {
            let pw = EdgeWord::parse(path).map_err(|x| err(&file.name, x))?;
            let t = side_graph(target, side)
                .edge_index(&pw)
                .ok_or_else(|| err(&file.name, format!("'{}' is not a vertical edge of {}", path, file.target)))?;
            let v = parse_scalar(coeff).map_err(|x| err(&file.name, format!("{}: {}", e.edge, x)))?;
            m.side_mut(side).insert((s, t), v);
        }
    }
    if let Some(c) = &file.simple_edges {
        let v = parse_scalar(c).map_err(|x| err(&file.name, x))?;
        for side in [Side::Left, Side::Right] {
            let (gs, gt) = (side_graph(source, side), side_graph(target, side));
            for (i, e) in gs.edges.iter().enumerate() {
                if listed.contains(&(side, i)) {
                    continue;
                }
                let y = gt.odd_idx(&gs.odd[e.dst]).unwrap();
                let targets = gt.edges_between(e.src, y);
                if targets.len() == 1 {
                    m.side_mut(side).insert((i, targets[0]), v.clone());
                }
            }
        }
    }
    Ok(m)
}

/// A problem found in a table without interpreting it.
#[derive(Clone, Debug)]
pub struct TableDefect {
    pub entry: String,
    pub kind: &'static str,
    pub detail: String,
}

/// Checks a table as printed: labels, paths, whether coefficients lie in
/// the tower, and orthonormality of its columns against each other and
/// against `reference` (the image of 1 when checking the ρ table). Values
/// outside the tower are handled with fourth roots of `d − n`.
pub fn table_defects(file: &EdgeMapFile, target: &Connection, reference: Option<&EdgeMapFile>) -> Vec<TableDefect> {
    let mut out = Vec::new();
    let mut seen: Vec<(String, String)> = Vec::new();
    // block (side, from, to) -> columns as maps target edge -> value
    type Column = (String, BTreeMap<usize, ExtScalar>);
    let mut blocks: BTreeMap<(String, String, String), Vec<Column>> = BTreeMap::new();
    let mut refs: BTreeMap<(String, String, String), Vec<Column>> = BTreeMap::new();
    let files: Vec<(&EdgeMapFile, bool)> =
        std::iter::once((file, false)).chain(reference.map(|r| (r, true))).collect();
    for (f, is_ref) in files {
        for e in &f.entries {
            let Ok(side) = side_of(&e.side, &f.name) else { continue };
            if !is_ref {
                if seen.contains(&(e.side.clone(), e.edge.clone())) {
                    out.push(TableDefect { entry: e.edge.clone(), kind: "duplicate-label", detail: "edge label listed twice".into() });
                }
                seen.push((e.side.clone(), e.edge.clone()));
            }
            let Ok(sw) = EdgeWord::parse(&e.edge) else {
                out.push(TableDefect { entry: e.edge.clone(), kind: "label", detail: "malformed edge label".into() });
                continue;
            };
            let mut col = BTreeMap::new();
            for [coeff, path] in &e.terms {
                let tg = side_graph(target, side);
                let idx = EdgeWord::parse(path).ok().and_then(|w| tg.edge_index(&w));
                let Some(idx) = idx else {
                    if !is_ref {
                        out.push(TableDefect {
                            entry: e.edge.clone(),
                            kind: "path",
                            detail: format!("'{}' is not a vertical edge of {}", path, f.target),
                        });
                    }
                    continue;
                };
                if tg.edges[idx].word.source() != sw.source() || tg.edges[idx].word.target() != sw.target() {
                    if !is_ref {
                        out.push(TableDefect {
                            entry: e.edge.clone(),
                            kind: "path",
                            detail: format!("'{}' does not join {} to {}", path, sw.source(), sw.target()),
                        });
                    }
                    continue;
                }
                match (parse_scalar(coeff), parse_ext(coeff)) {
                    (Ok(x), _) => {
                        col.insert(idx, ExtScalar::from(x));
                    }
                    (Err(_), Ok(x)) => {
                        if !is_ref {
                            out.push(TableDefect {
                                entry: e.edge.clone(),
                                kind: "not-in-field",
                                detail: format!("coefficient {} of {} needs a fourth root", coeff, path),
                            });
                        }
                        col.insert(idx, x);
                    }
                    (Err(x), Err(_)) => out.push(TableDefect { entry: e.edge.clone(), kind: "parse", detail: x.to_string() }),
                }
            }
            let key = (e.side.clone(), sw.source().to_string(), sw.target().to_string());
            if is_ref {
                refs.entry(key).or_default().push((e.edge.clone(), col));
            } else {
                blocks.entry(key).or_default().push((e.edge.clone(), col));
            }
        }
    }
    let dot = |x: &BTreeMap<usize, ExtScalar>, y: &BTreeMap<usize, ExtScalar>| {
        x.iter().filter_map(|(k, a)| y.get(k).map(|b| a * b)).fold(ExtScalar::zero(), |acc, t| &acc + &t)
    };
    for (key, cols) in &blocks {
        for (i, (ei, ci)) in cols.iter().enumerate() {
            let n = dot(ci, ci);
            if n != ExtScalar::one() {
                out.push(TableDefect { entry: ei.clone(), kind: "norm", detail: format!("squared norm {} (approx {:.6})", n, n.to_f64()) });
            }
            for (ej, cj) in cols.iter().skip(i + 1) {
                let p = dot(ci, cj);
                if !p.is_zero() {
                    out.push(TableDefect {
                        entry: format!("{} / {}", ei, ej),
                        kind: "orthogonality",
                        detail: format!("inner product {} (approx {:.6})", p, p.to_f64()),
                    });
                }
            }
            for (er, cr) in refs.get(key).map(|v| v.as_slice()).unwrap_or(&[]) {
                let p = dot(ci, cr);
                if !p.is_zero() {
                    out.push(TableDefect {
                        entry: format!("{} / image of {}", ei, er),
                        kind: "orthogonality",
                        detail: format!("inner product {} (approx {:.6})", p, p.to_f64()),
                    });
                }
            }
        }
    }
    // every target block must be exhausted by the two tables together
    if reference.is_some() {
        for side in [Side::Left, Side::Right] {
            let tg = side_graph(target, side);
            let mut dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for e in &tg.edges {
                *dims.entry((e.src, e.dst)).or_insert(0) += 1;
            }
            let sname = if side == Side::Left { "left" } else { "right" };
            for ((x, y), n) in dims {
                let (u, v) = (tg.even[x].clone(), tg.odd[y].clone());
                let key = (sname.to_string(), u.clone(), v.clone());
                let listed = blocks.get(&key).map(|c| c.len()).unwrap_or(0);
                let ref_n = refs.get(&key).map(|c| c.len()).unwrap_or(0);
                let implicit = usize::from(file.simple_edges.is_some() && u != v && n == 1 && listed == 0);
                if listed + ref_n + implicit != n {
                    out.push(TableDefect {
                        entry: format!("{} {}", u, v),
                        kind: "dimension",
                        detail: format!("{} paths but {} listed edges plus {} from the reference", n, listed + implicit, ref_n),
                    });
                }
            }
        }
    }
    out
}

/// All AH+1 connections built from the shipped assets.
#[derive(Clone, Debug)]
pub struct Model {
    pub kappa: Connection,
    pub kappa_bar: Connection,
    /// κκ̄
    pub kk: Connection,
    /// identity connection on the principal graph
    pub identity: Connection,
    /// the embedding of 1 in κκ̄
    pub r_kappa: EdgeSpaceMap,
    pub rho: Connection,
    /// the embedding of ρ in κκ̄
    pub v: EdgeSpaceMap,
    pub alpha: Connection,
}

impl Model {
    pub fn load(cat: &Catalog) -> Result<Self, AssetError> {
        Self::load_with(cat, TABLE1, TABLE2)
    }

    pub fn load_with(cat: &Catalog, table1: &str, table2: &str) -> Result<Self, AssetError> {
        let kappa = cat.connection(KAPPA)?;
        let kappa_bar = conjugate(&kappa)?;
        let kk = compose(&kappa, &kappa_bar)?;
        let identity = identity_connection(&kappa.fg.g0, &kappa.weights_top);
        let t1 = cat.edge_map(table1)?;
        let r_kappa = table_map(&t1, &identity, &kk)?;
        let t2 = cat.edge_map(table2)?;
        let (g1, g3) = table_source_graphs(&t2, &kk)?;
        // restrict needs the map first; build it against a graph-only shell
        let shell = Connection::new(
            crate::graphs::FourGraph::new(kk.fg.g0.clone(), g1.clone(), kk.fg.g2.clone(), g3.clone())?,
            HashMap::new(),
            kk.weights_top.clone(),
            kk.weights_bottom.clone(),
        );
        let v = table_map(&t2, &shell, &kk)?;
        let rho = restrict(&kk, g1, g3, &v)?;
        let alpha = cat.connection(ALPHA)?;
        Ok(Model { kappa, kappa_bar, kk, identity, r_kappa, rho, v, alpha })
    }

    /// The α connection with every cell equal to 1.
    pub fn alpha_trivial(&self) -> Connection {
        let mut a = self.alpha.clone();
        for v in a.values.values_mut() {
            *v = TowerScalar::one();
        }
        a
    }

    /// The two gauge-class representatives on α's 4-graph.
    pub fn alpha_classes(&self) -> Result<Vec<Connection>, crate::connections::ConnectionError> {
        let cls = classify_phase_connections(&self.alpha.fg)?;
        Ok(cls
            .representatives
            .into_iter()
            .map(|vals| Connection::new(self.alpha.fg.clone(), vals, self.alpha.weights_top.clone(), self.alpha.weights_bottom.clone()))
            .collect())
    }

    /// ρ·a·κ for a given α-type connection `a`.
    pub fn rak(&self, a: &Connection) -> Result<Connection, crate::connections::ConnectionError> {
        compose(&compose(&self.rho, a)?, &self.kappa)
    }

    /// a·ρ·a·κ.
    pub fn arak(&self, a: &Connection) -> Result<Connection, crate::connections::ConnectionError> {
        compose(&compose(&compose(a, &self.rho)?, a)?, &self.kappa)
    }
}

/// Reads an Appendix-style gauge between `source` (columns) and `target`
/// (rows). Singletons `u-v` name the unique edge from `u` to `v` on
/// whichever side contains both vertices.
pub fn gauge_map(file: &GaugeFile, source: &Connection, target: &Connection) -> Result<EdgeSpaceMap, AssetError> {
    let name = &file.name;
    let mut entries: Vec<(String, String, TowerScalar)> = Vec::new();
    for (bi, b) in file.blocks.iter().enumerate() {
        if b.entries.len() != b.rows.len() || b.entries.iter().any(|r| r.len() != b.columns.len()) {
            return Err(err(name, format!("block {}: shape does not match labels", bi)));
        }
        for (i, rw) in b.rows.iter().enumerate() {
            for (j, cw) in b.columns.iter().enumerate() {
                let v = parse_scalar(&b.entries[i][j]).map_err(|e| err(name, format!("block {}: {}", bi, e)))?;
                entries.push((cw.clone(), rw.clone(), v));
            }
        }
    }
    for (val, pairs) in &file.singletons {
        let v = parse_scalar(val).map_err(|e| err(name, e))?;
        for p in pairs {
            let (u, w) = p.rsplit_once('-').ok_or_else(|| err(name, format!("bad singleton '{}'", p)))?;
            let mut found = None;
            for side in [Side::Left, Side::Right] {
                let (gs, gt) = (side_graph(source, side), side_graph(target, side));
                if let (Some(x), Some(y)) = (gs.even_idx(u), gs.odd_idx(w)) {
                    let s = gs.edges_between(x, y);
                    let t = gt.edges_between(x, y);
                    if s.len() != 1 || t.len() != 1 {
                        return Err(err(name, format!("singleton {} joins {} and {} edges", p, s.len(), t.len())));
                    }
                    found = Some((gs.edges[s[0]].word.to_string(), gt.edges[t[0]].word.to_string()));
                }
            }
            let (s, t) = found.ok_or_else(|| err(name, format!("singleton {} matches no vertex pair", p)))?;
            entries.push((s, t, v.clone()));
        }
    }
    let mut seen = std::collections::HashSet::new();
    for (s, t, _) in &entries {
        if !seen.insert((s.clone(), t.clone())) {
            return Err(err(name, format!("entry {} -> {} given twice", s, t)));
        }
    }
    EdgeSpaceMap::from_words(source, target, entries.iter().map(|(s, t, v)| (s.as_str(), t.as_str(), v.clone())))
        .map_err(|e| err(name, e))
}

/// Whether `a == s·b` for a single global sign `s`; returns the sign.
pub fn equal_up_to_sign(a: &EdgeSpaceMap, b: &EdgeSpaceMap) -> Option<i8> {
    if a == b {
        return Some(1);
    }
    if *a == b.scaled(&-TowerScalar::one()) {
        return Some(-1);
    }
    None
}

/// Dimensions of intertwiner spaces between products of ρ and α, and the
/// ρ/αρα vertical edges leaving the base vertex.
#[derive(Clone, Debug)]
pub struct HomDimensions {
    /// (label, dimension)
    pub dims: Vec<(String, usize)>,
    /// edges `* → e` or `* → e~` on ρ or αρα
    pub star_to_e: Vec<String>,
    /// rank of (ραρ, αραρα) restricted to the rows of the edges `* b b~ e`
    /// and `* b b~ e~`; 2 means these two edges determine an intertwiner
    pub two_edge_rank: usize,
}

impl Model {
    pub fn hom_dimensions(&self) -> Result<HomDimensions, ConnectionError> {
        let (r, a) = (&self.rho, &self.alpha);
        let ra = compose(r, a)?;
        let ar = compose(a, r)?;
        let ara = compose(&ar, a)?;
        let rar = compose(&ra, r)?;
        let arara = compose(&compose(&ara, r)?, a)?;
        let sigma = compose(&compose(&self.kappa_bar, a)?, &self.kappa)?;
        let sigma2 = compose(&sigma, &sigma)?;
        let dim = |x: &Connection, y: &Connection| intertwiner_space(x, y).map(|s| s.dim);
        let dims = vec![
            ("rho -> alpha rho alpha rho alpha".to_string(), dim(r, &arara)?),
            ("rho alpha rho -> alpha rho alpha rho alpha".to_string(), dim(&rar, &arara)?),
            ("sigma -> sigma sigma".to_string(), dim(&sigma, &sigma2)?),
            ("rho alpha rho -> alpha rho alpha".to_string(), dim(&rar, &ara)?),
        ];
        let mut star_to_e = Vec::new();
        for (name, c) in [("rho", r), ("alpha rho alpha", &ara)] {
            for e in &c.fg.g3.edges {
                let (s, t) = (&c.fg.g3.even[e.src], &c.fg.g3.odd[e.dst]);
                if s == "*" && (t == "e" || t == "e~") {
                    star_to_e.push(format!("{}: {}", name, e.word));
                }
            }
        }
        let space = intertwiner_space(&rar, &arara)?;
        let mut al = crate::intertwiners::Alphabet::new();
        al.add_letter('r', &r.fg.g3);
        al.add_letter('a', &a.fg.g3);
        let paths = al.decompose("rar", &rar.fg.g3).map_err(|e| ConnectionError::Mismatch(e.to_string()))?;
        let mut rows = Vec::new();
        for name in ["* b b~ e", "* b b~ e~"] {
            let p = al.parse_path("rar", name).map_err(|e| ConnectionError::Mismatch(e.to_string()))?;
            let i = paths.iter().find(|(_, q)| **q == p).map(|(i, _)| *i);
            rows.push(i.ok_or_else(|| ConnectionError::Mismatch(format!("no edge {} in rho alpha rho", name)))?);
        }
        let width = arara.fg.g3.edges.len();
        let mut ech = Echelon::new();
        for b in &space.basis {
            let mut row = SparseRow::new();
            for ((s, t), v) in &b.left {
                if let Some(k) = rows.iter().position(|x| x == s) {
                    row.insert(k * width + t, v.clone());
                }
            }
            ech.push(row);
        }
        Ok(HomDimensions { dims, star_to_e, two_edge_rank: ech.rank() })
    }
}
