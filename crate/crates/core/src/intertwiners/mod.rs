//! Intertwiner diagrams for AH+1: the generators r_κ, r̄_κ, v, w and the cup
//! for α, the derived vertices built from them, state-sum evaluation and the
//! algebra relation checks.

pub mod diagram;
pub mod relations;
pub mod strands;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

pub use diagram::{evaluate, Coefficient, Diagram, Factor};
pub use relations::{
    check_ah_relations, check_ah_relations_all_signs, check_duality, lemma_coefficients, DualityReport, LemmaItem, RelationCheck,
    RelationReport, RelationStatus,
};
pub use strands::{Alphabet, Path, StrandMap};

use crate::ahp1::{self, Model};
use crate::assets::{AssetError, Catalog};
use crate::connections::{compose, identity_connection, intertwiner_space, Connection, ConnectionError, EdgeSpaceMap};
use crate::scalars::{ExtScalar, QSqrt17, TowerScalar};

#[derive(Debug, thiserror::Error)]
pub enum IntertwinerError {
    #[error("unknown letter '{0}'")]
    UnknownLetter(char),
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("word mismatch: {0}")]
    Mismatch(String),
    #[error("bad path: {0}")]
    Path(String),
    #[error("diagram syntax, line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Asset(#[from] AssetError),
}

/// A named intertwiner: `prefactor · map`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub map: StrandMap,
    pub prefactor: ExtScalar,
}

impl Generator {
    pub fn src(&self) -> &str {
        &self.map.src
    }

    pub fn tgt(&self) -> &str {
        &self.map.tgt
    }

    pub fn value(&self) -> StrandMap {
        self.map.scaled(&self.prefactor)
    }

    /// Reflection in the horizontal axis: the transposed map, same
    /// prefactor.
    pub fn adjoint(&self) -> Generator {
        let name = match self.name.strip_suffix('~') {
            Some(n) => n.to_string(),
            None => format!("{}~", self.name),
        };
        Generator { name, map: self.map.adjoint(), prefactor: self.prefactor.clone() }
    }
}

fn beta(n: i64) -> TowerScalar {
    TowerScalar::beta(n).expect("d - n > 0 for the indices used here")
}

fn sqrt_q(q: QSqrt17) -> TowerScalar {
    TowerScalar::sqrt_q(&q).expect("positive radicand")
}

/// Scales an intertwiner out of an identity connection so that each of its
/// (single-column) blocks is a unit vector, first nonzero entry positive.
/// Fails unless all blocks have the same norm.
fn normalise_isometry(t: &EdgeSpaceMap, src: &Connection, tgt: &Connection) -> Result<EdgeSpaceMap, IntertwinerError> {
    let mut lambda: Option<TowerScalar> = None;
    let mut root: Option<TowerScalar> = None;
    for b in t.blocks(src, tgt) {
        if b.cols.is_empty() {
            continue;
        }
        for j in 0..b.cols.len() {
            let nz: Vec<&TowerScalar> = b.matrix.iter().map(|r| &r[j]).filter(|x| !x.is_zero()).collect();
            let n = nz.iter().fold(TowerScalar::zero(), |acc, x| &acc + &(*x * *x));
            if nz.len() == 1 && root.is_none() {
                let x = nz[0].clone();
                root = Some(if x.is_positive() { x } else { -x });
            }
            match &lambda {
                None => lambda = Some(n),
                Some(l) if *l != n => {
                    return Err(IntertwinerError::Structure(format!("column norms differ: {} vs {}", l, n)))
                }
                _ => {}
            }
        }
    }
    let lambda = lambda.ok_or_else(|| IntertwinerError::Structure("empty intertwiner".into()))?;
    let root = match root {
        Some(r) => r,
        None => {
            let q = lambda.as_q().ok_or_else(|| IntertwinerError::Structure(format!("normaliser of {} not found", lambda)))?;
            sqrt_q(q)
        }
    };
    let mut g = t.scaled(&root.inv().expect("nonzero"));
    if let Some(f) = g.first_nonzero(src, tgt) {
        if !f.is_positive() {
            g = g.scaled(&-TowerScalar::one());
        }
    }
    Ok(g)
}

/// The unique-up-to-scale intertwiner from the identity on `c`'s upper graph
/// into `c`, normalised as in [`normalise_isometry`].
fn unit_embedding(c: &Connection) -> Result<(Connection, EdgeSpaceMap), IntertwinerError> {
    let id = identity_connection(&c.fg.g0, &c.weights_top);
    let sp = intertwiner_space(&id, c)?;
    if sp.dim != 1 {
        return Err(IntertwinerError::Structure(format!("identity occurs {} times", sp.dim)));
    }
    let t = normalise_isometry(&sp.basis[0], &id, c)?;
    Ok((id, t))
}

/// Left-side strand map of an [`EdgeSpaceMap`] between two connections
/// whose vertical edges decompose along `src_word`/`tgt_word`. An empty
/// word means the source is an identity connection.
fn strand_map(
    al: &Alphabet,
    m: &EdgeSpaceMap,
    src: (&Connection, &str),
    tgt: (&Connection, &str),
) -> Result<StrandMap, IntertwinerError> {
    let sdec = if src.1.is_empty() { None } else { Some(al.decompose(src.1, &src.0.fg.g3)?) };
    let tdec = al.decompose(tgt.1, &tgt.0.fg.g3)?;
    let mut out = StrandMap::new(src.1, tgt.1);
    for ((s, t), v) in &m.left {
        let sp = match &sdec {
            Some(d) => d[s].clone(),
            None => {
                let name = src.0.fg.g3.edges[*s].word.source().to_string();
                Path::empty(al.vertex_index(&name).ok_or_else(|| IntertwinerError::Path(name.clone()))?)
            }
        };
        out.insert(sp, tdec[t].clone(), ExtScalar::from(v.clone()));
    }
    Ok(out)
}

/// r_ρ ∈ (1, ρρ), before its prefactor β₁/β.
pub const RRHO: &[&str] = &["rk", "id(k), rkb, id(K)", "v~, v~"];
/// The trivalent vertex ρ → ρρ, before its prefactor β₁/β₂.
pub const TRI: &[&str] = &["v", "id(k), rkb, id(K)", "v~, v~"];
/// The six-valent vertex ραρ → αρα, before its prefactor β₁/β.
pub const SIX: &[&str] = &["id(ra), v", "w, id(K)", "id(ara), rk~"];

/// Everything needed to evaluate diagrams: the alphabet, the generators and
/// the β constants.
#[derive(Clone, Debug)]
pub struct Calculus {
    pub alphabet: Alphabet,
    pub generators: BTreeMap<String, Generator>,
    pub beta: TowerScalar,
    pub beta1: TowerScalar,
    pub beta2: TowerScalar,
    pub cup_negated: bool,
    pub w_negated: bool,
}

impl Calculus {
    /// Builds the basic generators from the model and the gauge `w`
    /// (between ρακ and αρακ for the model's α), then the derived ones.
    pub fn new(m: &Model, w: &EdgeSpaceMap) -> Result<Self, IntertwinerError> {
        let mut al = Alphabet::new();
        al.add_letter('r', &m.rho.fg.g3);
        al.add_letter('a', &m.alpha.fg.g3);
        al.add_letter('k', &m.kappa.fg.g3);
        al.add_letter('K', &m.kappa_bar.fg.g3);
        let b = beta(0);
        let b1 = beta(1);
        let b2 = beta(2);
        let sb = ExtScalar::sqrt_beta(0).expect("fourth root of d");
        let sb1 = ExtScalar::sqrt_beta(1).expect("fourth root of d-1");
        let mut gens = BTreeMap::new();
        let mut add = |name: &str, map: StrandMap, pre: ExtScalar| {
            gens.insert(name.to_string(), Generator { name: name.to_string(), map, prefactor: pre });
        };

        add("rk", strand_map(&al, &m.r_kappa, (&m.identity, ""), (&m.kk, "kK"))?, sb.clone());
        let kbk = compose(&m.kappa_bar, &m.kappa)?;
        let (id2, rbar) = unit_embedding(&kbk)?;
        add("rkb", strand_map(&al, &rbar, (&id2, ""), (&kbk, "Kk"))?, sb.clone());
        let vpre = &sb * &sb1.inv().unwrap();
        add("v", strand_map(&al, &m.v, (&m.rho, "r"), (&m.kk, "kK"))?, vpre);
        let rak = m.rak(&m.alpha)?;
        let arak = m.arak(&m.alpha)?;
        add("w", strand_map(&al, w, (&rak, "rak"), (&arak, "arak"))?, ExtScalar::one());
        let aa = compose(&m.alpha, &m.alpha)?;
        let (ida, cup) = unit_embedding(&aa)?;
        let mut cupm = strand_map(&al, &cup, (&ida, ""), (&aa, "aa"))?;
        // normalise so that the coefficient at the base vertex * is +1
        if let Some(star) = al.vertex_index("*") {
            let row = cupm.row(&Path::empty(star)).and_then(|r| r.values().next().cloned());
            if let Some(x) = row {
                if x.signum() == std::cmp::Ordering::Less {
                    cupm = cupm.scaled(&-ExtScalar::one());
                }
            }
        }
        add("cupa", cupm, ExtScalar::one());

        let mut calc = Calculus {
            alphabet: al,
            generators: gens,
            beta: b.clone(),
            beta1: b1.clone(),
            beta2: b2.clone(),
            cup_negated: false,
            w_negated: false,
        };
        let b1_over_b = ExtScalar::from(&b1 * &b.inv().unwrap());
        calc.derive("rrho", RRHO, b1_over_b.clone())?;
        calc.derive("tri", TRI, ExtScalar::from(&b1 * &b2.inv().unwrap()))?;
        calc.derive("six", SIX, b1_over_b)?;
        Ok(calc)
    }

    /// The calculus of the catalog's model with the Appendix gauge as `w`.
    pub fn ahp1(cat: &Catalog) -> Result<Self, IntertwinerError> {
        let m = Model::load(cat)?;
        Self::ahp1_with(cat, &m)
    }

    pub fn ahp1_with(cat: &Catalog, m: &Model) -> Result<Self, IntertwinerError> {
        let w = ahp1::gauge_map(&cat.gauge(ahp1::APPENDIX)?, &m.rak(&m.alpha)?, &m.arak(&m.alpha)?)?;
        Self::new(m, &w)
    }

    fn derive(&mut self, name: &str, slices: &[&str], prefactor: ExtScalar) -> Result<(), IntertwinerError> {
        let d = Diagram::parse(&slices.join("\n"))?;
        let map = d.full_map(self)?;
        self.generators.insert(name.to_string(), Generator { name: name.to_string(), map, prefactor });
        Ok(())
    }

    pub fn generator(&self, name: &str) -> Result<Generator, IntertwinerError> {
        if let Some(base) = name.strip_suffix('~') {
            return Ok(self.generator(base)?.adjoint());
        }
        self.generators.get(name).cloned().ok_or_else(|| IntertwinerError::UnknownGenerator(name.to_string()))
    }

    /// The same calculus with the α cup and/or `w` negated relative to the
    /// normalised choices (six-valent vertex rebuilt).
    pub fn with_signs(&self, cup_negated: bool, w_negated: bool) -> Result<Self, IntertwinerError> {
        let mut c = self.clone();
        if cup_negated != c.cup_negated {
            let g = c.generators.get_mut("cupa").unwrap();
            g.prefactor = -g.prefactor.clone();
            c.cup_negated = cup_negated;
        }
        if w_negated != c.w_negated {
            let g = c.generators.get_mut("w").unwrap();
            g.prefactor = -g.prefactor.clone();
            c.w_negated = w_negated;
            let b1_over_b = ExtScalar::from(&c.beta1 * &c.beta.inv().unwrap());
            c.derive("six", SIX, b1_over_b)?;
        }
        Ok(c)
    }
}
