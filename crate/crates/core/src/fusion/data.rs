//! Text format for rings, modules, bimodules and compatibility tables.
//!
//! ```text
//! # comment
//! ring Z2
//!   labels 1 g
//!   unit 1
//!   dual 1 g
//!   product g g = 1
//! end
//!
//! module 2_Z2 over Z2
//!   labels k0 k1
//!   action g
//!     0 1
//!     1 0
//! end
//!
//! bimodule Z2_identity over Z2 Z2
//!   labels 1 g
//!   left g
//!     0 1
//!     1 0
//!   right g
//!     0 1
//!     1 0
//! end
//!
//! positional 2_Z2 over Z2
//!   {{{1,0},{0,1}},{{0,1},{1,0}}}
//! end
//!
//! compat 8_14 . 8_41 = {12_11, 14_11}
//! ```
//!
//! Products with the unit are implied. `positional` blocks hold a module in
//! the supplement convention (the `ij`-th entry of the `k`-th matrix is
//! `(κ_k ξ_i, κ_j)`); they are converted on import and written back as
//! ordinary module blocks.

use std::fmt::Write;

use super::bimodule::FusionBimodule;
use super::module::{import_positional, ActionOrder, FusionModule};
use super::ring::FusionRing;
use super::{identity, FusionError, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatRecord {
    pub left: String,
    pub right: String,
    pub results: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FusionData {
    pub rings: Vec<FusionRing>,
    pub modules: Vec<FusionModule>,
    pub bimodules: Vec<FusionBimodule>,
    pub compat: Vec<CompatRecord>,
    /// the product order chosen for each positional import
    pub import_orders: Vec<(String, ActionOrder)>,
}

impl FusionData {
    pub fn ring(&self, name: &str) -> Option<&FusionRing> {
        self.rings.iter().find(|r| r.name == name)
    }

    pub fn module(&self, name: &str) -> Option<&FusionModule> {
        self.modules.iter().find(|m| m.name == name)
    }

    pub fn bimodule(&self, name: &str) -> Option<&FusionBimodule> {
        self.bimodules.iter().find(|m| m.name == name)
    }
}

struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = l.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Lines { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let l = self.lines.get(self.pos).cloned();
        self.pos += 1;
        l
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }
}

fn perr(line: usize, msg: impl Into<String>) -> FusionError {
    FusionError::Parse { line, msg: msg.into() }
}

fn index_of(labels: &[String], tok: &str, line: usize) -> Result<usize, FusionError> {
    labels.iter().position(|l| l == tok).ok_or_else(|| perr(line, format!("unknown label '{}'", tok)))
}

fn read_rows(ls: &mut Lines, n: usize, cols: usize) -> Result<IntMatrix, FusionError> {
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, toks) = ls.next().ok_or_else(|| perr(ls.last_line(), "matrix ends early"))?;
        if toks.len() != cols {
            return Err(perr(line, format!("expected {} entries, found {}", cols, toks.len())));
        }
        let row = toks.iter().map(|t| t.parse::<u32>().map_err(|_| perr(line, format!("'{}' is not a nonnegative integer", t)))).collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn parse_ring(ls: &mut Lines, line: usize, name: &str) -> Result<FusionRing, FusionError> {
    let mut labels: Vec<String> = Vec::new();
    let mut unit = None;
    let mut dual_toks: Option<(usize, Vec<String>)> = None;
    let mut products: Vec<(usize, usize, usize, Vec<(usize, u32)>)> = Vec::new();
    loop {
        let (ln, toks) = ls.next().ok_or_else(|| perr(line, format!("ring {} has no 'end'", name)))?;
        match toks[0] {
            "end" => break,
            "labels" => labels = toks[1..].iter().map(|s| s.to_string()).collect(),
            "unit" if toks.len() == 2 => unit = Some(index_of(&labels, toks[1], ln)?),
            "dual" => dual_toks = Some((ln, toks[1..].iter().map(|s| s.to_string()).collect())),
            "product" => {
                let eq = toks.iter().position(|t| *t == "=").ok_or_else(|| perr(ln, "product needs '='"))?;
                if eq != 3 {
                    return Err(perr(ln, "expected 'product a b = ...'"));
                }
                let i = index_of(&labels, toks[1], ln)?;
                let j = index_of(&labels, toks[2], ln)?;
                let mut terms = Vec::new();
                for term in toks[4..].split(|t| *t == "+") {
                    let (coef, lab) = match term {
                        [lab] => (1, *lab),
                        [c, lab] => (c.parse::<u32>().map_err(|_| perr(ln, format!("'{}' is not a coefficient", c)))?, *lab),
                        _ => return Err(perr(ln, "terms are 'label' or 'coefficient label', separated by '+'")),
                    };
                    terms.push((index_of(&labels, lab, ln)?, coef));
                }
                products.push((ln, i, j, terms));
            }
            other => return Err(perr(ln, format!("unexpected '{}' in ring block", other))),
        }
    }
    let unit = unit.ok_or_else(|| perr(line, format!("ring {} has no unit", name)))?;
    let r = labels.len();
    let mut n = vec![vec![vec![0u32; r]; r]; r];
    for i in 0..r {
        n[unit][i][i] = 1;
        n[i][unit][i] = 1;
    }
    let mut given = vec![vec![false; r]; r];
    for (ln, i, j, terms) in products {
        if i == unit || j == unit {
            return Err(perr(ln, "products with the unit are implied"));
        }
        if given[i][j] {
            return Err(perr(ln, format!("product {} {} given twice", labels[i], labels[j])));
        }
        given[i][j] = true;
        for (k, c) in terms {
            n[i][j][k] += c;
        }
    }
    let dual = match dual_toks {
        Some((ln, toks)) => {
            if toks.len() != r {
                return Err(perr(ln, format!("dual lists {} labels, ring has {}", toks.len(), r)));
            }
            toks.iter().map(|t| index_of(&labels, t, ln)).collect::<Result<Vec<_>, _>>()?
        }
        None => (0..r)
            .map(|i| (0..r).find(|&j| n[i][j][unit] > 0).ok_or_else(|| perr(line, format!("{} has no dual", labels[i]))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let ring = FusionRing { name: name.to_string(), labels, n, unit, dual };
    if let Some(v) = ring.check().violations.into_iter().next() {
        return Err(FusionError::Invalid { line, name: name.to_string(), axiom: v.axiom, detail: v.detail });
    }
    Ok(ring)
}

fn actions(
    ls: &mut Lines,
    ring: &FusionRing,
    n: usize,
    keyword: &str,
    block: (usize, &str),
) -> Result<Vec<IntMatrix>, FusionError> {
    let mut mats: Vec<Option<IntMatrix>> = vec![None; ring.rank()];
    while let Some((ln, toks)) = ls.peek().cloned() {
        if toks[0] != keyword {
            break;
        }
        ls.next();
        if toks.len() != 2 {
            return Err(perr(ln, format!("expected '{} <label>'", keyword)));
        }
        let i = index_of(&ring.labels, toks[1], ln)?;
        if mats[i].is_some() {
            return Err(perr(ln, format!("action of {} given twice", toks[1])));
        }
        mats[i] = Some(read_rows(ls, n, n)?);
    }
    mats[ring.unit].get_or_insert_with(|| identity(n));
    mats.into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| perr(block.0, format!("{} lacks the {} action of {}", block.1, keyword, ring.labels[i]))))
        .collect()
}

fn expect_end(ls: &mut Lines, line: usize, name: &str) -> Result<(), FusionError> {
    match ls.next() {
        Some((_, t)) if t[0] == "end" => Ok(()),
        Some((ln, t)) => Err(perr(ln, format!("expected 'end' of {}, found '{}'", name, t[0]))),
        None => Err(perr(line, format!("{} has no 'end'", name))),
    }
}

/// Parses nested brace lists of integers, returning the depth-3 lists
/// (lists of matrices).
fn parse_braces(text: &str, line: usize) -> Result<Vec<Vec<IntMatrix>>, FusionError> {
    #[derive(Debug)]
    enum Node {
        Int(u32),
        List(Vec<Node>),
    }
    fn parse(chars: &[char], pos: &mut usize, line: usize) -> Result<Node, FusionError> {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
        if *pos >= chars.len() {
            return Err(perr(line, "unexpected end of brace list"));
        }
        if chars[*pos] == '{' {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                while *pos < chars.len() && chars[*pos].is_whitespace() {
                    *pos += 1;
                }
                match chars.get(*pos) {
                    Some('}') => {
                        *pos += 1;
                        return Ok(Node::List(items));
                    }
                    Some(',') if !items.is_empty() => *pos += 1,
                    Some(_) if items.is_empty() => {}
                    Some(c) => return Err(perr(line, format!("expected ',' or '}}', found '{}'", c))),
                    None => return Err(perr(line, "unclosed '{'")),
                }
                items.push(parse(chars, pos, line)?);
            }
        }
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(perr(line, format!("unexpected '{}'", chars[*pos])));
        }
        let s: String = chars[start..*pos].iter().collect();
        s.parse().map(Node::Int).map_err(|_| perr(line, format!("bad integer {}", s)))
    }
    fn depth(n: &Node) -> usize {
        match n {
            Node::Int(_) => 0,
            Node::List(v) => 1 + v.first().map_or(0, depth),
        }
    }
    fn matrix(n: &Node, line: usize) -> Result<IntMatrix, FusionError> {
        let Node::List(rows) = n else { return Err(perr(line, "expected a matrix")) };
        rows.iter()
            .map(|r| match r {
                Node::List(xs) => xs
                    .iter()
                    .map(|x| match x {
                        Node::Int(v) => Ok(*v),
                        _ => Err(perr(line, "expected an integer")),
                    })
                    .collect(),
                _ => Err(perr(line, "expected a row")),
            })
            .collect()
    }
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let root = parse(&chars, &mut pos, line)?;
    if chars[pos..].iter().any(|c| !c.is_whitespace()) {
        return Err(perr(line, "trailing text after brace list"));
    }
    let lists = match depth(&root) {
        3 => vec![root],
        4 => match root {
            Node::List(v) => v,
            _ => unreachable!(),
        },
        d => return Err(perr(line, format!("brace list has depth {}, expected 3 or 4", d))),
    };
    lists
        .iter()
        .map(|l| match l {
            Node::List(ms) => ms.iter().map(|m| matrix(m, line)).collect(),
            _ => Err(perr(line, "expected a list of matrices")),
        })
        .collect()
}

pub fn parse_fusion_data(text: &str) -> Result<FusionData, FusionError> {
    let mut ls = Lines::new(text);
    let mut data = FusionData::default();
    while let Some((line, toks)) = ls.next() {
        match toks[0] {
            "ring" if toks.len() == 2 => {
                let r = parse_ring(&mut ls, line, toks[1])?;
                data.rings.push(r);
            }
            "module" if toks.len() == 4 && toks[2] == "over" => {
                let ring = data.ring(toks[3]).ok_or_else(|| perr(line, format!("unknown ring {}", toks[3])))?.clone();
                let (ln, lt) = ls.next().ok_or_else(|| perr(line, "module has no labels"))?;
                if lt[0] != "labels" {
                    return Err(perr(ln, "expected 'labels'"));
                }
                let labels: Vec<String> = lt[1..].iter().map(|s| s.to_string()).collect();
                let mats = actions(&mut ls, &ring, labels.len(), "action", (line, toks[1]))?;
                expect_end(&mut ls, line, toks[1])?;
                let m = FusionModule { name: toks[1].to_string(), ring: ring.name.clone(), labels, mats };
                if let Some(v) = m.check(&ring, ActionOrder::Right).into_iter().next() {
                    return Err(FusionError::Invalid { line, name: m.name, axiom: v.axiom, detail: v.detail });
                }
                data.modules.push(m);
            }
            "bimodule" if toks.len() == 5 && toks[2] == "over" => {
                let a = data.ring(toks[3]).ok_or_else(|| perr(line, format!("unknown ring {}", toks[3])))?.clone();
                let b = data.ring(toks[4]).ok_or_else(|| perr(line, format!("unknown ring {}", toks[4])))?.clone();
                let (ln, lt) = ls.next().ok_or_else(|| perr(line, "bimodule has no labels"))?;
                if lt[0] != "labels" {
                    return Err(perr(ln, "expected 'labels'"));
                }
                let labels: Vec<String> = lt[1..].iter().map(|s| s.to_string()).collect();
                let left = actions(&mut ls, &a, labels.len(), "left", (line, toks[1]))?;
                let right = actions(&mut ls, &b, labels.len(), "right", (line, toks[1]))?;
                expect_end(&mut ls, line, toks[1])?;
                let m = FusionBimodule {
                    name: toks[1].to_string(),
                    left_ring: a.name.clone(),
                    right_ring: b.name.clone(),
                    labels,
                    left,
                    right,
                };
                if let Some(v) = m.check(&a, &b).into_iter().next() {
                    return Err(FusionError::Invalid { line, name: m.name, axiom: v.axiom, detail: v.detail });
                }
                data.bimodules.push(m);
            }
            "positional" if toks.len() == 4 && toks[2] == "over" => {
                let ring = data.ring(toks[3]).ok_or_else(|| perr(line, format!("unknown ring {}", toks[3])))?.clone();
                let mut body = String::new();
                loop {
                    let (ln, t) = ls.next().ok_or_else(|| perr(line, "positional block has no 'end'"))?;
                    if t[0] == "end" {
                        break;
                    }
                    let _ = ln;
                    body.push_str(&t.join(" "));
                }
                let lists = parse_braces(&body, line)?;
                for (idx, positional) in lists.iter().enumerate() {
                    let name = if lists.len() == 1 { toks[1].to_string() } else { format!("{}_{}", idx + 1, toks[1]) };
                    let (m, order) = import_positional(&ring, &name, positional).map_err(|e| match e {
                        FusionError::Axiom(v) => FusionError::Invalid { line, name: name.clone(), axiom: v.axiom, detail: v.detail },
                        other => other,
                    })?;
                    data.import_orders.push((name, order));
                    data.modules.push(m);
                }
            }
            "compat" => {
                let rest = toks[1..].join(" ");
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| perr(line, "compat needs '='"))?;
                let (l, m) = lhs.split_once('.').ok_or_else(|| perr(line, "compat needs 'l . m'"))?;
                let rhs = rhs.trim();
                let inner = rhs.strip_prefix('{').and_then(|r| r.strip_suffix('}')).unwrap_or(rhs);
                let results = inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                data.compat.push(CompatRecord { left: l.trim().to_string(), right: m.trim().to_string(), results });
            }
            other => return Err(perr(line, format!("unexpected '{}'", other))),
        }
    }
    Ok(data)
}

fn write_rows(out: &mut String, m: &IntMatrix) {
    for row in m {
        let _ = writeln!(out, "    {}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    }
}

pub fn serialize_ring(r: &FusionRing) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ring {}", r.name);
    let _ = writeln!(out, "  labels {}", r.labels.join(" "));
    let _ = writeln!(out, "  unit {}", r.labels[r.unit]);
    let _ = writeln!(out, "  dual {}", r.dual.iter().map(|&d| r.labels[d].as_str()).collect::<Vec<_>>().join(" "));
    for i in 0..r.rank() {
        for j in 0..r.rank() {
            if i == r.unit || j == r.unit {
                continue;
            }
            let terms: Vec<String> = (0..r.rank())
                .filter(|&k| r.n[i][j][k] > 0)
                .map(|k| match r.n[i][j][k] {
                    1 => r.labels[k].clone(),
                    c => format!("{} {}", c, r.labels[k]),
                })
                .collect();
            if !terms.is_empty() {
                let _ = writeln!(out, "  product {} {} = {}", r.labels[i], r.labels[j], terms.join(" + "));
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn serialize_fusion_data(d: &FusionData) -> String {
    let mut out = String::new();
    for r in &d.rings {
        out.push_str(&serialize_ring(r));
        out.push('\n');
    }
    for m in &d.modules {
        let ring = d.ring(&m.ring);
        let _ = writeln!(out, "module {} over {}", m.name, m.ring);
        let _ = writeln!(out, "  labels {}", m.labels.join(" "));
        for (i, mat) in m.mats.iter().enumerate() {
            if ring.map_or(false, |r| r.unit == i) {
                continue;
            }
            let _ = writeln!(out, "  action {}", ring.map_or(i.to_string(), |r| r.labels[i].clone()));
            write_rows(&mut out, mat);
        }
        out.push_str("end\n\n");
    }
    for b in &d.bimodules {
        let (ra, rb) = (d.ring(&b.left_ring), d.ring(&b.right_ring));
        let _ = writeln!(out, "bimodule {} over {} {}", b.name, b.left_ring, b.right_ring);
        let _ = writeln!(out, "  labels {}", b.labels.join(" "));
        for (kw, ring, mats) in [("left", ra, &b.left), ("right", rb, &b.right)] {
            for (i, mat) in mats.iter().enumerate() {
                if ring.map_or(false, |r| r.unit == i) {
                    continue;
                }
                let _ = writeln!(out, "  {} {}", kw, ring.map_or(i.to_string(), |r| r.labels[i].clone()));
                write_rows(&mut out, mat);
            }
        }
        out.push_str("end\n\n");
    }
    for c in &d.compat {
        let _ = writeln!(out, "compat {} . {} = {{{}}}", c.left, c.right, c.results.join(", "));
    }
    out
}
