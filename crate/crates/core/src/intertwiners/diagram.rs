//! Slice diagrams and their state-sum evaluation.
//!
//! A diagram is read top to bottom, one slice per line. A slice is a
//! comma-separated tensor product of factors: `id(word)` or a generator
//! name, with a trailing `~` for the adjoint. Lines starting with `#` are
//! comments.
//!
//! ```text
//! rrho, id(ar)
//! id(r), six
//! six, id(a)
//! id(ar), cupa~
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Calculus, IntertwinerError, Path, StrandMap};
use crate::scalars::ExtScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Id(String),
    Gen(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub slices: Vec<Vec<Factor>>,
}

/// A coefficient with the number of contributing states.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    pub value: ExtScalar,
    pub states: u64,
}

impl Diagram {
    pub fn parse(text: &str) -> Result<Self, IntertwinerError> {
        let mut slices = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut slice = Vec::new();
            for tok in line.split(',') {
                let tok = tok.trim();
                let err = |msg: &str| IntertwinerError::Syntax { line: ln + 1, msg: format!("{}: '{}'", msg, tok) };
                if tok.is_empty() {
                    return Err(err("empty factor"));
                }
                if let Some(rest) = tok.strip_prefix("id(") {
                    let w = rest.strip_suffix(')').ok_or_else(|| err("unclosed id("))?;
                    if !w.chars().all(|c| c.is_ascii_alphabetic()) {
                        return Err(err("identity word must be letters"));
                    }
                    slice.push(Factor::Id(w.to_string()));
                } else if tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '~' || c == '_') {
                    slice.push(Factor::Gen(tok.to_string()));
                } else {
                    return Err(err("bad factor"));
                }
            }
            slices.push(slice);
        }
        if slices.is_empty() {
            return Err(IntertwinerError::Syntax { line: 0, msg: "no slices".into() });
        }
        Ok(Diagram { slices })
    }

    pub fn to_text(&self) -> String {
        self.slices
            .iter()
            .map(|s| {
                s.iter()
                    .map(|f| match f {
                        Factor::Id(w) => format!("id({})", w),
                        Factor::Gen(g) => g.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn compile(&self, calc: &Calculus) -> Result<Vec<Slice>, IntertwinerError> {
        let mut out: Vec<Slice> = Vec::new();
        for (i, s) in self.slices.iter().enumerate() {
            let mut factors = Vec::new();
            let (mut src, mut tgt) = (String::new(), String::new());
            for f in s {
                let c = match f {
                    Factor::Id(w) => {
                        calc.alphabet.check_word(w)?;
                        Compiled { src: w.clone(), tgt: w.clone(), map: None }
                    }
                    Factor::Gen(g) => {
                        let m = calc.generator(g)?.value();
                        Compiled { src: m.src.clone(), tgt: m.tgt.clone(), map: Some(m) }
                    }
                };
                src.push_str(&c.src);
                tgt.push_str(&c.tgt);
                factors.push(c);
            }
            if let Some(prev) = out.last() {
                if prev.tgt != src {
                    return Err(IntertwinerError::Mismatch(format!(
                        "slice {} ends in '{}' but slice {} starts from '{}'",
                        i,
                        prev.tgt,
                        i + 1,
                        src
                    )));
                }
            }
            out.push(Slice { src, tgt, factors });
        }
        Ok(out)
    }

    pub fn source(&self, calc: &Calculus) -> Result<String, IntertwinerError> {
        Ok(self.compile(calc)?.first().map(|s| s.src.clone()).unwrap_or_default())
    }

    pub fn target(&self, calc: &Calculus) -> Result<String, IntertwinerError> {
        Ok(self.compile(calc)?.last().map(|s| s.tgt.clone()).unwrap_or_default())
    }

    /// The whole linear map of the diagram.
    pub fn full_map(&self, calc: &Calculus) -> Result<StrandMap, IntertwinerError> {
        let slices = self.compile(calc)?;
        let (src, tgt) = (slices[0].src.clone(), slices.last().unwrap().tgt.clone());
        let mut out = StrandMap::new(&src, &tgt);
        for p in calc.alphabet.paths(&src)? {
            for (q, c) in propagate(calc, &slices, &p)? {
                out.insert(p.clone(), q, c.value);
            }
        }
        Ok(out)
    }
}

struct Compiled {
    src: String,
    tgt: String,
    /// `None` for identities
    map: Option<StrandMap>,
}

struct Slice {
    src: String,
    tgt: String,
    factors: Vec<Compiled>,
}

fn apply_slice(calc: &Calculus, s: &Slice, p: &Path) -> Vec<(Path, ExtScalar)> {
    let al = &calc.alphabet;
    let mut partial: Vec<(Path, ExtScalar)> = vec![(Path::empty(p.start), ExtScalar::one())];
    let mut rest = p.clone();
    let mut word = s.src.as_str();
    for f in &s.factors {
        let n = f.src.chars().count();
        let (seg, tail) = al.split(word, &rest, n);
        word = &word[n..];
        rest = tail;
        let images: Vec<(Path, ExtScalar)> = match &f.map {
            None => vec![(seg, ExtScalar::one())],
            Some(m) => match m.row(&seg) {
                Some(row) => row.iter().map(|(q, v)| (q.clone(), v.clone())).collect(),
                None => return Vec::new(),
            },
        };
        let mut next = Vec::with_capacity(partial.len() * images.len());
        for (pp, pv) in &partial {
            for (q, v) in &images {
                next.push((pp.concat(q), pv * v));
            }
        }
        partial = next;
    }
    partial
}

fn propagate(calc: &Calculus, slices: &[Slice], top: &Path) -> Result<BTreeMap<Path, Coefficient>, IntertwinerError> {
    let mut cur: BTreeMap<Path, Coefficient> = BTreeMap::new();
    cur.insert(top.clone(), Coefficient { value: ExtScalar::one(), states: 1 });
    for s in slices {
        let mut next: BTreeMap<Path, Coefficient> = BTreeMap::new();
        for (p, c) in &cur {
            for (q, v) in apply_slice(calc, s, p) {
                let e = next.entry(q).or_insert(Coefficient { value: ExtScalar::zero(), states: 0 });
                e.value = &e.value + &(&c.value * &v);
                e.states += c.states;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// The coefficient of `diagram` from the edge `top` (a path along the
/// diagram's source word) to `bottom`, as an exact state sum.
pub fn evaluate(calc: &Calculus, diagram: &Diagram, top: &Path, bottom: &Path) -> Result<Coefficient, IntertwinerError> {
    let slices = diagram.compile(calc)?;
    let out = propagate(calc, &slices, top)?;
    Ok(out.get(bottom).cloned().unwrap_or(Coefficient { value: ExtScalar::zero(), states: 0 }))
}

/// [`evaluate`] with edges given in vertex notation.
pub fn evaluate_text(calc: &Calculus, diagram: &Diagram, top: &str, bottom: &str) -> Result<Coefficient, IntertwinerError> {
    let src = diagram.source(calc)?;
    let tgt = diagram.target(calc)?;
    let t = calc.alphabet.parse_path(&src, top)?;
    let b = calc.alphabet.parse_path(&tgt, bottom)?;
    if calc.alphabet.end(&src, &t) != calc.alphabet.end(&tgt, &b) || t.start != b.start {
        return Err(IntertwinerError::Path(format!("'{}' and '{}' do not share endpoints", top, bottom)));
    }
    evaluate(calc, diagram, &t, &b)
}
