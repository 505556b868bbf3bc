use std::sync::OnceLock;

use ahkit::ahp1::Model;
use ahkit::assets::Catalog;
use ahkit::intertwiners::relations::{check_duality_maps, value_census, REL1_AR, REL2_L};
use ahkit::intertwiners::*;
use ahkit::scalars::{ExtScalar, TowerScalar};
use num_traits::One;

fn calc() -> &'static Calculus {
    static C: OnceLock<Calculus> = OnceLock::new();
    C.get_or_init(|| Calculus::ahp1(&Catalog::embedded()).expect("calculus"))
}

fn map(text: &str) -> StrandMap {
    Diagram::parse(text).unwrap().full_map(calc()).unwrap()
}

fn ext(x: &TowerScalar) -> ExtScalar {
    ExtScalar::from(x.clone())
}

#[test]
fn duality_products_are_inverse_beta() {
    let c = calc();
    let rep = check_duality(c).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    assert_eq!(rep.pairs.len(), 14);
    let expected = ext(&c.beta.inv().unwrap());
    assert!(rep.pairs.iter().all(|p| p.product == expected));
}

#[test]
fn duality_detects_a_perturbed_coefficient() {
    let c = calc();
    let mut r = c.generator("rk").unwrap().map;
    let (s, t, v) = r.entries().next().map(|(s, t, v)| (s.clone(), t.clone(), v.clone())).unwrap();
    r.insert(s, t, v);
    let rbar = c.generator("rkb").unwrap().map;
    let rep = check_duality_maps(c, &r, &rbar);
    assert!(!rep.passed());
    assert_eq!(rep.failures.len(), 1);
}

#[test]
fn adjoint_is_an_involution() {
    let c = calc();
    for name in ["rk", "rkb", "v", "w", "cupa", "rrho", "tri", "six"] {
        let g = c.generator(name).unwrap();
        let back = g.adjoint().adjoint();
        assert_eq!(back.name, g.name);
        assert_eq!(back.map, g.map);
        assert_eq!(c.generator(&format!("{}~", name)).unwrap().map, g.map.adjoint());
    }
}

#[test]
fn cap_after_cup_is_beta() {
    // with the isometry normalisation, every closed κ loop is β
    let c = calc();
    let loop_map = map("rk\nrk~");
    let b = ext(&c.beta);
    assert!(!loop_map.is_empty());
    for (s, t, v) in loop_map.entries() {
        assert_eq!(s, t);
        assert_eq!(*v, b);
    }
    let loop_bar = map("rkb\nrkb~");
    assert!(loop_bar.entries().all(|(s, t, v)| s == t && *v == b));
}

#[test]
fn zigzags_are_identities() {
    let c = calc();
    assert!(map("rk, id(k)\nid(k), rkb~").is_scalar(&c.alphabet, &ExtScalar::one()).unwrap());
    assert!(map("id(K), rk\nrkb~, id(K)").is_scalar(&c.alphabet, &ExtScalar::one()).unwrap());
}

#[test]
fn appendix_gauge_is_unitary() {
    let c = calc();
    assert!(map("w\nw~").is_scalar(&c.alphabet, &ExtScalar::one()).unwrap());
    assert!(map("w~\nw").is_scalar(&c.alphabet, &ExtScalar::one()).unwrap());
}

#[test]
fn rho_embedding_is_an_isometry_up_to_its_prefactor() {
    // v = (√β/√β₁)·isometry, so v~v = (β/β₁)·Id
    let c = calc();
    let f = ext(&(&c.beta * &c.beta1.inv().unwrap()));
    assert!(map("v\nv~").is_scalar(&c.alphabet, &f).unwrap());
}

#[test]
fn stacking_composes_maps() {
    let a = map("id(r), cupa\nid(ra), rrho, id(a)");
    let b = map("six, id(ra)");
    assert_eq!(a.then(&b).unwrap(), map(REL2_L));
}

#[test]
fn state_sum_agrees_with_full_map() {
    let c = calc();
    let d = Diagram::parse(REL1_AR).unwrap();
    let m = d.full_map(c).unwrap();
    let mut n = 0;
    for (s, t, v) in m.entries().take(20) {
        assert_eq!(evaluate(c, &d, s, t).unwrap().value, *v);
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn diagram_parse_errors() {
    let c = calc();
    assert!(matches!(Diagram::parse("rk, id(k"), Err(IntertwinerError::Syntax { line: 1, .. })));
    assert!(matches!(Diagram::parse("# only a comment\n"), Err(IntertwinerError::Syntax { .. })));
    assert!(matches!(Diagram::parse("rk,\nrk~"), Err(IntertwinerError::Syntax { line: 1, .. })));
    assert!(matches!(Diagram::parse("rk\nrk, $"), Err(IntertwinerError::Syntax { line: 2, .. })));
    assert!(matches!(Diagram::parse("rk\nrk").unwrap().full_map(c), Err(IntertwinerError::Mismatch(_))));
    assert!(matches!(Diagram::parse("nope").unwrap().full_map(c), Err(IntertwinerError::UnknownGenerator(_))));
    assert!(matches!(Diagram::parse("id(x)").unwrap().full_map(c), Err(IntertwinerError::UnknownLetter('x'))));
}

#[test]
fn diagram_text_round_trip() {
    let d = Diagram::parse(REL1_AR).unwrap();
    assert_eq!(Diagram::parse(&d.to_text()).unwrap(), d);
}

#[test]
fn path_notation_round_trip() {
    let al = &calc().alphabet;
    for word in ["r", "ar", "rak", "kK"] {
        for p in al.paths(word).unwrap() {
            assert_eq!(al.parse_path(word, &al.show(word, &p)).unwrap(), p);
        }
    }
}

#[test]
fn pinned_lemma_coefficients() {
    let c = calc();
    let items = lemma_coefficients(c).unwrap();
    let get = |l: &str| items.iter().find(|i| i.label == l).unwrap();
    let rr = get("rrho1");
    assert_eq!(rr.sign(), Some(1));
    assert_eq!(rr.computed.as_ref().unwrap().states, 1);
    assert!(get("ararar8").passed());
    for l in ["2rrho2", "2rrho3", "2rrho4", "ararar11", "ararar9", "ararar7", "ararar13", "ararar14"] {
        assert!(get(l).passed(), "{}", l);
    }
}

#[test]
fn trivalent_coefficient_is_beta_over_sqrt_beta1() {
    // computed with the printed prefactor β₁/β₂
    let c = calc();
    let items = lemma_coefficients(c).unwrap();
    let t = items.iter().find(|i| i.label == "rhorhorho1").unwrap();
    let sb1 = ExtScalar::sqrt_beta(1).unwrap();
    let expected = &ext(&c.beta) * &sb1.inv().unwrap();
    assert_eq!(t.computed.as_ref().unwrap().value, expected);
    // the printed value differs by the constant factor β₁β₂/(√2·β)
    let ratio = t.printed.to_f64() / expected.to_f64();
    let b = c.beta.to_f64();
    let b1 = c.beta1.to_f64();
    let b2 = c.beta2.to_f64();
    assert!((ratio - b1 * b2 / (2f64.sqrt() * b)).abs() < 1e-12);
    assert!(!t.passed());
}

#[test]
fn six_valent_census_contains_printed_magnitudes() {
    let census = value_census(calc(), "six").unwrap();
    let sb1 = ExtScalar::sqrt_beta(1).unwrap().to_f64();
    for x in [1.0 / sb1, sb1] {
        assert!(census.values().any(|(v, _)| (v.to_f64().abs() - x).abs() < 1e-12));
    }
}

#[test]
fn relations_hold_and_one_sign_convention_matches() {
    let reports = check_ah_relations_all_signs(calc()).unwrap();
    assert_eq!(reports.len(), 4);
    // the relations themselves are gauge independent
    assert!(reports.iter().all(|r| r.evaluated_hold()));
    let matching: Vec<(bool, bool)> = reports.iter().filter(|r| r.evaluated_pass()).map(|r| (r.cup_negated, r.w_negated)).collect();
    assert_eq!(matching, vec![(true, true)]);
    let r = &reports[3];
    let b1 = ext(&calc().beta1);
    for (_, w) in &r.get(1).unwrap().witnesses {
        assert_eq!(w.value, b1);
        assert_eq!(w.states, 1);
    }
    assert!(matches!(r.get(3).unwrap().status, RelationStatus::Flagged(_)));
    assert!(matches!(r.get(4).unwrap().status, RelationStatus::Flagged(_)));
}

#[test]
fn relation_one_is_a_multiple_of_the_identity() {
    let c = calc().with_signs(true, true).unwrap();
    let b1 = ext(&c.beta1);
    for text in [REL1_AR, relations::REL1_RA] {
        let m = Diagram::parse(text).unwrap().full_map(&c).unwrap();
        assert!(m.is_scalar(&c.alphabet, &b1).unwrap());
    }
}

#[test]
fn hom_dimensions() {
    let m = Model::load(&Catalog::embedded()).unwrap();
    let h = m.hom_dimensions().unwrap();
    let dims: Vec<usize> = h.dims.iter().map(|(_, d)| *d).collect();
    assert_eq!(dims, vec![1, 2, 1, 1]);
    assert!(h.star_to_e.is_empty());
    assert_eq!(h.two_edge_rank, 2);
}
