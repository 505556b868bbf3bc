//! Left vertical edge paths over the letters `r` (ρ), `a` (α), `k` (κ) and
//! `K` (κ̄), and sparse linear maps between their spans.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::IntertwinerError;
use crate::graphs::{BipartiteGraph, EdgeWord};
use crate::scalars::ExtScalar;

/// A path along a word: a start vertex and one edge index per letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn empty(v: usize) -> Self {
        Path { start: v, edges: Vec::new() }
    }

    pub fn concat(&self, other: &Path) -> Path {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Path { start: self.start, edges }
    }
}

#[derive(Clone, Debug)]
struct LetterEdge {
    src: usize,
    dst: usize,
    word: EdgeWord,
}

/// The vertical graphs a diagram may use, with vertices pooled across
/// letters so that paths can be concatenated.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub vertices: Vec<String>,
    vidx: HashMap<String, usize>,
    letters: BTreeMap<char, Vec<LetterEdge>>,
    out: BTreeMap<char, Vec<Vec<usize>>>,
}

impl Alphabet {
    pub fn new() -> Self {
        Alphabet { vertices: Vec::new(), vidx: HashMap::new(), letters: BTreeMap::new(), out: BTreeMap::new() }
    }

    fn vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.vidx.get(name) {
            return i;
        }
        self.vertices.push(name.to_string());
        self.vidx.insert(name.to_string(), self.vertices.len() - 1);
        for lists in self.out.values_mut() {
            lists.push(Vec::new());
        }
        self.vertices.len() - 1
    }

    /// Registers `g`'s edges as the letter `c`; edge `i` of the letter is
    /// edge `i` of `g`.
    pub fn add_letter(&mut self, c: char, g: &BipartiteGraph) {
        let mut edges = Vec::with_capacity(g.edges.len());
        for e in &g.edges {
            let src = self.vertex(&g.even[e.src]);
            let dst = self.vertex(&g.odd[e.dst]);
            edges.push(LetterEdge { src, dst, word: e.word.clone() });
        }
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.src].push(i);
        }
        for lists in self.out.values_mut() {
            lists.resize(self.vertices.len(), Vec::new());
        }
        self.letters.insert(c, edges);
        self.out.insert(c, out);
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vidx.get(name).copied()
    }

    fn letter(&self, c: char) -> Result<&[LetterEdge], IntertwinerError> {
        self.letters.get(&c).map(|v| v.as_slice()).ok_or(IntertwinerError::UnknownLetter(c))
    }

    pub fn check_word(&self, word: &str) -> Result<(), IntertwinerError> {
        for c in word.chars() {
            self.letter(c)?;
        }
        Ok(())
    }

    /// Every path along `word`; the empty word has one path per vertex.
    pub fn paths(&self, word: &str) -> Result<Vec<Path>, IntertwinerError> {
        let mut chars = word.chars();
        let Some(first) = chars.next() else {
            return Ok((0..self.vertices.len()).map(Path::empty).collect());
        };
        let mut cur: Vec<Path> = self.letter(first)?.iter().enumerate().map(|(i, e)| Path { start: e.src, edges: vec![i] }).collect();
        let mut prev = first;
        for c in chars {
            self.letter(c)?;
            let out = &self.out[&c];
            let mut next = Vec::new();
            for p in &cur {
                let end = self.letters[&prev][*p.edges.last().unwrap()].dst;
                for &j in &out[end] {
                    let mut q = p.clone();
                    q.edges.push(j);
                    next.push(q);
                }
            }
            cur = next;
            prev = c;
        }
        Ok(cur)
    }

    pub fn end(&self, word: &str, p: &Path) -> usize {
        match (word.chars().last(), p.edges.last()) {
            (Some(c), Some(&e)) => self.letters[&c][e].dst,
            _ => p.start,
        }
    }

    /// Splits `p` (along `word`) at letter position `at`.
    pub fn split(&self, word: &str, p: &Path, at: usize) -> (Path, Path) {
        let left = Path { start: p.start, edges: p.edges[..at].to_vec() };
        let mid = self.end(&word[..at], &left);
        (left, Path { start: mid, edges: p.edges[at..].to_vec() })
    }

    /// The edge word of `p` obtained by concatenating letter edge words.
    pub fn edge_word(&self, word: &str, p: &Path) -> Option<EdgeWord> {
        let mut acc: Option<EdgeWord> = None;
        for (c, &e) in word.chars().zip(&p.edges) {
            let w = &self.letters[&c][e].word;
            acc = Some(match acc {
                None => w.clone(),
                Some(a) => a.concat(w)?,
            });
        }
        acc
    }

    /// For a composite vertical graph built by composing the letters of
    /// `word`, the path of each composite edge.
    pub fn decompose(&self, word: &str, composite: &BipartiteGraph) -> Result<HashMap<usize, Path>, IntertwinerError> {
        let mut out = HashMap::new();
        for p in self.paths(word)? {
            let w = self.edge_word(word, &p).ok_or_else(|| IntertwinerError::Structure(format!("path along {} does not concatenate", word)))?;
            if let Some(i) = composite.edge_index(&w) {
                out.insert(i, p);
            }
        }
        if out.len() != composite.edges.len() {
            return Err(IntertwinerError::Structure(format!(
                "{} of {} composite edges matched paths along {}",
                out.len(),
                composite.edges.len(),
                word
            )));
        }
        Ok(out)
    }

    /// Vertex notation for a path: `* b b~ e`, with `_k` on a vertex reached
    /// by a subscripted edge.
    pub fn show(&self, word: &str, p: &Path) -> String {
        let mut s = vec![self.vertices[p.start].clone()];
        for (c, &e) in word.chars().zip(&p.edges) {
            let le = &self.letters[&c][e];
            let sub = &le.word.0.last().map(|st| st.sub.clone()).unwrap_or_default();
            let v = &self.vertices[le.dst];
            s.push(if sub.is_empty() { v.clone() } else { format!("{}_{}", v, sub) });
        }
        s.join(" ")
    }

    /// Parses vertex notation (space separated, as produced by `show`).
    /// Parallel edges must be disambiguated by a `_k` subscript.
    pub fn parse_path(&self, word: &str, text: &str) -> Result<Path, IntertwinerError> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let n = word.chars().count();
        if toks.len() != n + 1 {
            return Err(IntertwinerError::Path(format!("'{}' has {} vertices, word {} needs {}", text, toks.len(), word, n + 1)));
        }
        let start = self.vertex_index(toks[0]).ok_or_else(|| IntertwinerError::Path(format!("unknown vertex {}", toks[0])))?;
        let mut cur = start;
        let mut edges = Vec::new();
        for (c, tok) in word.chars().zip(&toks[1..]) {
            let (name, sub) = match tok.rsplit_once('_') {
                Some((v, s)) if self.vertex_index(v).is_some() => (v, Some(s)),
                _ => (*tok, None),
            };
            let v = self.vertex_index(name).ok_or_else(|| IntertwinerError::Path(format!("unknown vertex {}", name)))?;
            let cands: Vec<usize> = self.out[&c][cur]
                .iter()
                .copied()
                .filter(|&j| {
                    let le = &self.letters[&c][j];
                    let s = le.word.0.last().map(|st| st.sub.as_str()).unwrap_or("");
                    le.dst == v && sub.map_or(true, |x| x == s)
                })
                .collect();
            match cands.as_slice() {
                [j] => edges.push(*j),
                [] => return Err(IntertwinerError::Path(format!("no {} edge {} -> {}", c, self.vertices[cur], tok))),
                _ => return Err(IntertwinerError::Path(format!("{} edge {} -> {} is ambiguous", c, self.vertices[cur], tok))),
            }
            cur = v;
        }
        Ok(Path { start, edges })
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::new()
    }
}

/// A linear map from the span of paths along `src` to those along `tgt`,
/// stored by rows: source path ↦ (target path ↦ coefficient). Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct StrandMap {
    pub src: String,
    pub tgt: String,
    pub rows: BTreeMap<Path, BTreeMap<Path, ExtScalar>>,
}

impl StrandMap {
    pub fn new(src: &str, tgt: &str) -> Self {
        StrandMap { src: src.to_string(), tgt: tgt.to_string(), rows: BTreeMap::new() }
    }

    pub fn insert(&mut self, s: Path, t: Path, v: ExtScalar) {
        if v.is_zero() {
            return;
        }
        let row = self.rows.entry(s.clone()).or_default();
        let x = row.entry(t.clone()).or_default();
        *x = &*x + &v;
        if x.is_zero() {
            row.remove(&t);
            if row.is_empty() {
                self.rows.remove(&s);
            }
        }
    }

    pub fn get(&self, s: &Path, t: &Path) -> ExtScalar {
        self.rows.get(s).and_then(|r| r.get(t)).cloned().unwrap_or_default()
    }

    pub fn row(&self, s: &Path) -> Option<&BTreeMap<Path, ExtScalar>> {
        self.rows.get(s)
    }

    pub fn identity(alpha: &Alphabet, word: &str) -> Result<Self, IntertwinerError> {
        let mut m = StrandMap::new(word, word);
        for p in alpha.paths(word)? {
            m.insert(p.clone(), p, ExtScalar::one());
        }
        Ok(m)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = StrandMap::new(&self.tgt, &self.src);
        for (s, t, v) in self.entries() {
            m.insert(t.clone(), s.clone(), v.clone());
        }
        m
    }

    pub fn scaled(&self, f: &ExtScalar) -> Self {
        let mut m = StrandMap::new(&self.src, &self.tgt);
        for (s, t, v) in self.entries() {
            m.insert(s.clone(), t.clone(), v * f);
        }
        m
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Path, &Path, &ExtScalar)> {
        self.rows.iter().flat_map(|(s, row)| row.iter().map(move |(t, v)| (s, t, v)))
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(|r| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &StrandMap) -> Result<Self, IntertwinerError> {
        if self.tgt != next.src {
            return Err(IntertwinerError::Mismatch(format!("{} then {}", self.tgt, next.src)));
        }
        let mut m = StrandMap::new(&self.src, &next.tgt);
        for (s, row) in &self.rows {
            for (mid, v) in row {
                for (t, w) in next.rows.get(mid).into_iter().flatten() {
                    m.insert(s.clone(), t.clone(), v * w);
                }
            }
        }
        Ok(m)
    }

    /// Whether `self` is `c` times the identity of its source word.
    pub fn is_scalar(&self, alpha: &Alphabet, c: &ExtScalar) -> Result<bool, IntertwinerError> {
        if self.src != self.tgt {
            return Ok(false);
        }
        Ok(*self == StrandMap::identity(alpha, &self.src)?.scaled(c))
    }
}
