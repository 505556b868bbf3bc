//! Duality, the coefficient lemma and the algebra relations.

use std::collections::BTreeMap;

use num_traits::One;

use super::diagram::evaluate_text;
use super::{Calculus, Coefficient, Diagram, IntertwinerError, Path, StrandMap};
use crate::scalars::{ExtScalar, QSqrt17, TowerScalar};

/// One adjacent pair (x upper, Y lower) of the duality check.
#[derive(Clone, Debug)]
pub struct DualityPair {
    pub x: String,
    pub y: String,
    pub r: ExtScalar,
    pub rbar: ExtScalar,
    pub product: ExtScalar,
}

#[derive(Clone, Debug)]
pub struct DualityReport {
    pub expected: ExtScalar,
    pub pairs: Vec<DualityPair>,
    pub failures: Vec<String>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && !self.pairs.is_empty()
    }
}

/// Checks `r(xx, xYx)·r̄(YY, YxY) = 1/β` on every entry of `r` and that
/// `r̄` has no entries without a partner.
pub fn check_duality_maps(calc: &Calculus, r: &StrandMap, rbar: &StrandMap) -> DualityReport {
    let al = &calc.alphabet;
    let expected = ExtScalar::from(calc.beta.inv().unwrap());
    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    let mut used = 0;
    for (s, t, v) in r.entries() {
        let x = s.start;
        let y = al.end("k", &Path { start: x, edges: vec![t.edges[0]] });
        let partner = rbar.row(&Path::empty(y)).and_then(|row| {
            row.iter().find(|(q, _)| al.end("K", &Path { start: y, edges: vec![q.edges[0]] }) == x).map(|(_, w)| w.clone())
        });
        let (xn, yn) = (al.vertices[x].clone(), al.vertices[y].clone());
        match partner {
            None => failures.push(format!("{} {}: no r̄ coefficient at ({} {}, {} {} {})", xn, yn, yn, yn, yn, xn, yn)),
            Some(w) => {
                used += 1;
                let product = v * &w;
                if product != expected {
                    failures.push(format!("{} {}: product {} (approx {:.6})", xn, yn, product, product.to_f64()));
                }
                pairs.push(DualityPair { x: xn, y: yn, r: v.clone(), rbar: w, product });
            }
        }
    }
    if used != rbar.len() {
        failures.push(format!("r̄ has {} entries, {} matched", rbar.len(), used));
    }
    DualityReport { expected, pairs, failures }
}

pub fn check_duality(calc: &Calculus) -> Result<DualityReport, IntertwinerError> {
    let r = calc.generator("rk")?.map;
    let rbar = calc.generator("rkb")?.map;
    Ok(check_duality_maps(calc, &r, &rbar))
}

/// A printed coefficient, its location (when the text pins it) and the
/// computed value.
#[derive(Clone, Debug)]
pub struct LemmaItem {
    pub label: String,
    pub generator: String,
    pub printed: ExtScalar,
    /// top and bottom edges, when the printed computation names them
    pub at: Option<(String, String)>,
    pub computed: Option<Coefficient>,
    /// whether some coefficient of the generator equals ±printed
    pub attained: Option<i8>,
}

impl LemmaItem {
    /// `Some(s)` when the pinned coefficient equals `s·printed`.
    pub fn sign(&self) -> Option<i8> {
        let c = self.computed.as_ref()?;
        if c.value == self.printed {
            Some(1)
        } else if c.value == -self.printed.clone() {
            Some(-1)
        } else {
            None
        }
    }

    /// Pass: the pinned coefficient (if any) matches up to sign and the
    /// printed magnitude occurs among the generator's coefficients.
    pub fn passed(&self) -> bool {
        self.attained.is_some() && (self.at.is_none() || self.sign().is_some())
    }
}

fn gen_diagram(name: &str) -> Diagram {
    Diagram { slices: vec![vec![super::Factor::Gen(name.to_string())]] }
}

/// Distinct coefficient values of a generator, with multiplicities.
pub fn value_census(calc: &Calculus, name: &str) -> Result<BTreeMap<String, (ExtScalar, usize)>, IntertwinerError> {
    let m = calc.generator(name)?.value();
    let mut out: BTreeMap<String, (ExtScalar, usize)> = BTreeMap::new();
    for (_, _, v) in m.entries() {
        let e = out.entry(v.to_string()).or_insert((v.clone(), 0));
        e.1 += 1;
    }
    Ok(out)
}

fn attains(calc: &Calculus, name: &str, x: &ExtScalar) -> Result<Option<i8>, IntertwinerError> {
    let m = calc.generator(name)?.value();
    let neg = -x.clone();
    let mut found = None;
    for (_, _, v) in m.entries() {
        if v == x {
            return Ok(Some(1));
        }
        if *v == neg {
            found = Some(-1);
        }
    }
    Ok(found)
}

/// The coefficients listed in the lemma on r_ρ, the trivalent vertex and
/// the six-valent vertex. Three are pinned to edges by the worked
/// computations; for the others only the value is printed, so the check is
/// that ± the value occurs among the vertex's coefficients.
pub fn lemma_coefficients(calc: &Calculus) -> Result<Vec<LemmaItem>, IntertwinerError> {
    let b1 = ExtScalar::from(calc.beta1.clone());
    let b2 = ExtScalar::from(calc.beta2.clone());
    let sqrt_b1 = ExtScalar::sqrt_beta(1).expect("fourth root of d-1");
    let inv_sqrt2 = ExtScalar::from(TowerScalar::sqrt_q(&QSqrt17::from_int(2)).unwrap().inv().unwrap());
    let sqrt_b1_half = &sqrt_b1 * &inv_sqrt2;
    let b2_inv = b2.inv().unwrap();
    let items: Vec<(&str, &str, ExtScalar, Option<(&str, &str)>)> = vec![
        ("rrho1", "rrho", b1.clone(), Some(("*", "* b *"))),
        ("2rrho2", "rrho", b1.clone(), None),
        ("2rrho3", "rrho", ExtScalar::one(), None),
        ("2rrho4", "rrho", ExtScalar::one(), None),
        ("rhorhorho1", "tri", &b2 * &sqrt_b1_half, Some(("* b", "* b b"))),
        ("2rhorhorho4", "tri", -(&b2 * &sqrt_b1_half), None),
        ("rhorhorho5", "tri", sqrt_b1_half.clone(), None),
        ("ararar8", "six", -sqrt_b1.inv().unwrap(), Some(("b * *~ g~", "b b~ g g~"))),
        ("ararar11", "six", -sqrt_b1.inv().unwrap(), None),
        ("ararar9", "six", &sqrt_b1 * &b2_inv, None),
        ("ararar7", "six", -(&sqrt_b1 * &b2_inv), None),
        ("ararar13", "six", sqrt_b1.clone(), None),
        ("ararar14", "six", -sqrt_b1.clone(), None),
    ];
    let mut out = Vec::new();
    for (label, g, printed, at) in items {
        let computed = match at {
            Some((t, bo)) => Some(evaluate_text(calc, &gen_diagram(g), t, bo)?),
            None => None,
        };
        let attained = attains(calc, g, &printed)?;
        out.push(LemmaItem {
            label: label.to_string(),
            generator: g.to_string(),
            printed,
            at: at.map(|(t, b)| (t.to_string(), b.to_string())),
            computed,
            attained,
        });
    }
    Ok(out)
}

/// Outcome of one relation. `holds` is the relation itself (a scalar
/// multiple of the identity, or equality of both sides as maps);
/// `status` additionally compares the witnesses with the printed values.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub relation: u8,
    pub status: RelationStatus,
    pub holds: Option<bool>,
    pub witnesses: Vec<(String, Coefficient)>,
    pub expected: Option<ExtScalar>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationStatus {
    Pass,
    Fail,
    Flagged(String),
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub cup_negated: bool,
    pub w_negated: bool,
    pub checks: Vec<RelationCheck>,
}

pub const REL1_AR: &str = "rrho, id(ar)\nid(r), six\nsix, id(a)\nid(ar), cupa~";
pub const REL1_RA: &str = "id(ra), rrho\nsix, id(r)\nid(a), six\ncupa~, id(ra)";
pub const REL2_L: &str = "id(r), cupa\nid(ra), rrho, id(a)\nsix, id(ra)";
pub const REL2_R: &str = "cupa, id(r)\nid(a), rrho, id(ar)\nid(ar), six";

fn eval(calc: &Calculus, d: &str, top: &str, bottom: &str) -> Result<Coefficient, IntertwinerError> {
    evaluate_text(calc, &Diagram::parse(d)?, top, bottom)
}

fn state_notes(notes: &mut Vec<String>, name: &str, c: &Coefficient) {
    if c.states != 1 {
        notes.push(format!("{}: {} states", name, c.states));
    }
}

/// Relations 1 and 2 are evaluated; 3 and 4 are reported as flagged.
pub fn check_ah_relations(calc: &Calculus) -> Result<RelationReport, IntertwinerError> {
    let al = &calc.alphabet;
    let b1 = ExtScalar::from(calc.beta1.clone());
    let mut checks = Vec::new();

    // relation 1: both composites are c·Id, printed c = β₁
    {
        let mut witnesses = Vec::new();
        let mut notes = Vec::new();
        let mut holds = true;
        let mut scalars = Vec::new();
        for (name, text, word, edge) in [("alpha rho", REL1_AR, "ar", "* *~ g~"), ("rho alpha", REL1_RA, "ra", "* b b~")] {
            let m = Diagram::parse(text)?.full_map(calc)?;
            let p = al.parse_path(word, edge)?;
            let c = m.get(&p, &p);
            if !m.is_scalar(al, &c)? {
                holds = false;
                notes.push(format!("{}: not a multiple of the identity", name));
            }
            scalars.push(c);
            let w = eval(calc, text, edge, edge)?;
            state_notes(&mut notes, name, &w);
            witnesses.push((format!("{} at ({}, {})", name, edge, edge), w));
        }
        if scalars[0] != scalars[1] {
            holds = false;
            notes.push("the two equations give different scalars".into());
        }
        let matches = witnesses.iter().all(|(_, w)| w.value == b1);
        checks.push(RelationCheck {
            relation: 1,
            status: if holds && matches { RelationStatus::Pass } else { RelationStatus::Fail },
            holds: Some(holds),
            witnesses,
            expected: Some(b1.clone()),
            notes,
        });
    }

    // relation 2: one coefficient determines both sides since
    // dim(ρ, αραρα) = 1; the full maps are compared as well
    {
        let expected = -ExtScalar::sqrt_beta(1).expect("fourth root of d-1");
        let (top, bottom) = ("* b", "* *~ g~ g b~ b");
        let l = eval(calc, REL2_L, top, bottom)?;
        let r = eval(calc, REL2_R, top, bottom)?;
        let lm = Diagram::parse(REL2_L)?.full_map(calc)?;
        let rm = Diagram::parse(REL2_R)?.full_map(calc)?;
        let mut notes = Vec::new();
        let holds = lm == rm && !lm.is_empty();
        if !holds {
            notes.push("the two sides differ as maps".into());
        }
        state_notes(&mut notes, "left side", &l);
        state_notes(&mut notes, "right side", &r);
        let matches = l.value == expected && r.value == expected;
        checks.push(RelationCheck {
            relation: 2,
            status: if holds && matches { RelationStatus::Pass } else { RelationStatus::Fail },
            holds: Some(holds),
            witnesses: vec![(format!("left at ({}, {})", top, bottom), l), (format!("right at ({}, {})", top, bottom), r)],
            expected: Some(expected),
            notes,
        });
    }

    checks.push(RelationCheck {
        relation: 3,
        status: RelationStatus::Flagged("not reconstructed: the two diagrams are only given as pictures".into()),
        holds: None,
        witnesses: Vec::new(),
        expected: Some(&(&b1 * &b1) * &ExtScalar::from(TowerScalar::from_ratio(1, 2))),
        notes: Vec::new(),
    });
    checks.push(RelationCheck {
        relation: 4,
        status: RelationStatus::Flagged("out-of-scope: the diagrams are defined in earlier work".into()),
        holds: None,
        witnesses: Vec::new(),
        expected: None,
        notes: Vec::new(),
    });
    Ok(RelationReport { cup_negated: calc.cup_negated, w_negated: calc.w_negated, checks })
}

/// [`check_ah_relations`] under all four sign choices for the α cup and w.
pub fn check_ah_relations_all_signs(calc: &Calculus) -> Result<Vec<RelationReport>, IntertwinerError> {
    let mut out = Vec::new();
    for cup in [false, true] {
        for w in [false, true] {
            out.push(check_ah_relations(&calc.with_signs(cup, w)?)?);
        }
    }
    Ok(out)
}

impl RelationReport {
    pub fn get(&self, n: u8) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.relation == n)
    }

    /// Relations 1 and 2 hold and match the printed values.
    pub fn evaluated_pass(&self) -> bool {
        [1, 2].iter().all(|n| self.get(*n).map_or(false, |c| c.status == RelationStatus::Pass))
    }

    pub fn evaluated_hold(&self) -> bool {
        [1, 2].iter().all(|n| self.get(*n).and_then(|c| c.holds) == Some(true))
    }
}
