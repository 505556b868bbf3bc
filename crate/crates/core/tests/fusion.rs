use std::sync::OnceLock;

use ahkit::assets::Catalog;
use ahkit::fusion::data::serialize_ring;
use ahkit::fusion::ring::enumerate_small_rings;
use ahkit::fusion::*;
use ahkit::graphs::fp_weights;
use ahkit::scalars::{parse_scalar, TowerScalar};
use proptest::prelude::*;

fn small_rings() -> &'static [FusionRing] {
    static R: OnceLock<Vec<FusionRing>> = OnceLock::new();
    R.get_or_init(|| enumerate_small_rings(3, 3))
}

fn ring(name: &str) -> &'static FusionRing {
    small_rings().iter().find(|r| r.name == name).unwrap()
}

fn z2() -> &'static FusionRing {
    ring("R2_2")
}

fn fib() -> &'static FusionRing {
    ring("R2_3")
}

fn t(s: &str) -> TowerScalar {
    parse_scalar(s).unwrap()
}

fn element(r: &FusionRing, terms: &[(&str, u32)]) -> Vec<u32> {
    let mut v = vec![0; r.rank()];
    for (l, m) in terms {
        v[r.index(l).unwrap()] += m;
    }
    v
}

fn product(r: &FusionRing, a: &str, b: &str) -> Vec<u32> {
    r.n[r.index(a).unwrap()][r.index(b).unwrap()].clone()
}

#[test]
fn ah4_ring_passes_every_axiom() {
    let r = build_ah4_ring();
    assert_eq!(r.rank(), 8);
    let rep = r.check();
    assert!(rep.passed(), "{:?}", rep.violations);
}

#[test]
fn ah4_dimensions() {
    let r = build_ah4_ring();
    let dims: Vec<TowerScalar> = r.fp_dims().iter().map(|d| d.exact().expect("dimension in the tower").clone()).collect();
    let d = t("4+sqrt17");
    for (l, x) in r.labels.iter().zip(&dims) {
        let want = if l.ends_with('x') { d.clone() } else { TowerScalar::from_int(1) };
        assert_eq!(*x, want, "{}", l);
    }
    // ξ² = 1 + 2·4ξ, so d² = 1 + 8d
    assert_eq!(&d * &d, &TowerScalar::from_int(1) + &(&TowerScalar::from_int(8) * &d));
    assert!(r.dims_multiplicative(&dims));
}

#[test]
fn ah4_products() {
    let r = build_ah4_ring();
    let sigma = [("a0x", 2), ("a1x", 2), ("a2x", 2), ("a3x", 2)];
    let mut want = vec![("a0", 1)];
    want.extend(sigma);
    assert_eq!(product(&r, "a0x", "a0x"), element(&r, &want));
    assert_eq!(product(&r, "a1", "a2x"), element(&r, &[("a3x", 1)]));
    // (α₁ξ)(α₂ξ) = α₁ α₋₂ ξ² = α₃ ξ²
    let mut want = vec![("a3", 1)];
    want.extend(sigma);
    assert_eq!(product(&r, "a1x", "a2x"), element(&r, &want));
    // α_i ξ = ξ α_{−i}
    assert_eq!(product(&r, "a1", "a0x"), product(&r, "a0x", "a3"));
}

#[test]
fn dimension_identity_one_plus_five_d() {
    let d = t("4+sqrt17");
    let one = TowerScalar::from_int(1);
    let half = TowerScalar::from_ratio(1, 2);
    let lhs = &(&half * &(&one + &d)) * &(&one + &d);
    let rhs = &one + &(&TowerScalar::from_int(5) * &d);
    assert_eq!(lhs, rhs);
}

#[test]
fn small_ring_dimensions() {
    for d in z2().fp_dims() {
        assert_eq!(d.exact(), Some(&TowerScalar::from_int(1)));
    }
    let x = fib().fp_dims()[1].exact().unwrap().clone();
    assert_eq!(x, t("1/2+1/2*sqrt(5)"));
    assert_eq!(&x * &x, &x + &TowerScalar::from_int(1));
    // cubic dimensions are carried numerically with their characteristic polynomial
    let approx = small_rings().iter().flat_map(|r| r.fp_dims()).filter(|d| d.exact().is_none()).count();
    assert!(approx > 0);
}

#[test]
fn small_rings_are_valid_and_distinct() {
    let rings = small_rings();
    assert_eq!(rings.len(), 16);
    for r in rings {
        assert!(r.check().passed(), "{}", r.name);
    }
    assert_eq!(rings.iter().filter(|r| r.rank() == 1).count(), 1);
    assert_eq!(rings.iter().filter(|r| r.rank() == 2).count(), 4);
}

#[test]
fn broken_rings_are_rejected() {
    // x1² = x1 in ℤ/3: (x1 x1) x2 = 1 but x1 (x1 x2) = x1
    let mut r = ring("R3_16").clone();
    r.n[1][1] = vec![0, 1, 0];
    let v = r.check().violations;
    assert!(v.iter().any(|x| x.axiom == "associativity"), "{:?}", v);
    let mut r = build_ah4_ring();
    r.dual.swap(1, 2);
    assert!(!r.check().passed());
}

#[test]
fn z2_has_two_transitive_modules() {
    let ms = enumerate_modules(z2(), 4, 10_000_000).unwrap();
    let ranks: Vec<usize> = ms.iter().map(|m| m.rank()).collect();
    assert_eq!(ranks, vec![1, 2]);
    let ms = enumerate_modules(ring("R1_1"), 4, 10_000_000).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].rank(), 1);
}

#[test]
fn pruned_matches_brute_force_on_small_rings() {
    for r in small_rings() {
        let pruned = enumerate_modules(r, 3, 100_000_000).unwrap();
        let brute = brute_force_modules(r, 3, 50_000_000).unwrap();
        let a: Vec<_> = pruned.iter().map(|m| m.canonical()).collect();
        let b: Vec<_> = brute.iter().map(|m| m.canonical()).collect();
        assert_eq!(a, b, "{}", r.name);
        for m in &pruned {
            assert!(m.check(r, ActionOrder::Right).is_empty(), "{}", m.name);
            assert!(m.is_transitive());
        }
    }
}

#[test]
fn regular_module_is_enumerated() {
    for r in small_rings().iter().filter(|r| r.rank() <= 3) {
        let reg = FusionModule::regular(r);
        assert!(reg.check(r, ActionOrder::Right).is_empty(), "{}", r.name);
        let ms = enumerate_modules(r, r.rank(), 100_000_000).unwrap();
        assert!(ms.iter().any(|m| m.canonical() == reg.canonical()), "{}", r.name);
    }
}

#[test]
fn budget_is_reported() {
    let e = enumerate_modules(&build_ah4_ring(), 8, 100).unwrap_err();
    assert!(matches!(e, FusionError::Budget { .. }), "{}", e);
}

#[test]
fn algebra_objects_of_the_regular_module() {
    for r in [z2(), fib(), &build_ah4_ring()] {
        let objs = algebra_objects(&FusionModule::regular(r));
        let unit = element(r, &[(&r.labels[r.unit], 1)]);
        assert!(objs.contains(&unit), "{}", r.name);
        // the j-th object is j*·j
        let fx = r.index(&r.labels[1]).unwrap();
        assert!(objs.contains(&r.n[r.dual[fx]][fx]));
    }
}

#[test]
fn z2_identity_bimodule_compatibility() {
    let r = z2();
    let id = FusionBimodule::identity(r);
    assert!(id.check(r, r).is_empty());
    let one = FusionBimodule {
        name: "Z2_one".into(),
        left_ring: r.name.clone(),
        right_ring: r.name.clone(),
        labels: vec!["m".into()],
        left: vec![vec![vec![1]], vec![vec![1]]],
        right: vec![vec![vec![1]], vec![vec![1]]],
    };
    assert!(one.check(r, r).is_empty());
    let found = compatibility((r, r, r), &id, &id, &[one.clone(), id.clone()], 1_000_000).unwrap();
    let names: Vec<&str> = found.iter().map(|w| w.candidate.as_str()).collect();
    assert_eq!(names, vec![id.name.as_str()]);
    // brute force over all small tensors: the witnesses are the identity
    // pairing and its twist by g
    let all = brute_force_witnesses(r, &id, &id, &id, 2);
    assert_eq!(all.len(), 2);
    assert!(all.contains(&found[0].t));
    assert!(brute_force_witnesses(r, &id, &id, &one, 3).is_empty());
}

/// Every tensor with entries `≤ bound` satisfying the three conditions,
/// checked entry by entry.
fn brute_force_witnesses(r: &FusionRing, l: &FusionBimodule, m: &FusionBimodule, n: &FusionBimodule, bound: u32) -> Vec<Vec<Vec<Vec<u32>>>> {
    let (nl, nm, nn) = (l.rank(), m.rank(), n.rank());
    let (wl, wm, wn) = (l.fp_weights(r), m.fp_weights(r), n.fp_weights(r));
    let size = nl * nm * nn;
    let mut out = Vec::new();
    let mut digits = vec![0u32; size];
    loop {
        let t = |a: usize, b: usize, c: usize| digits[(a * nm + b) * nn + c] as i64;
        let mut ok = true;
        for a in 0..nl {
            for b in 0..nm {
                let s: f64 = (0..nn).map(|c| t(a, b, c) as f64 * wn[c]).sum();
                ok &= (s - wl[a] * wm[b]).abs() < 1e-9;
            }
        }
        for x in 0..r.rank() {
            for a in 0..nl {
                for b in 0..nm {
                    for c in 0..nn {
                        let bal_l: i64 = (0..nl).map(|a2| l.right[x][a][a2] as i64 * t(a2, b, c)).sum();
                        let bal_r: i64 = (0..nm).map(|b2| m.left[x][b][b2] as i64 * t(a, b2, c)).sum();
                        let eq_l: i64 = (0..nl).map(|a2| l.left[x][a][a2] as i64 * t(a2, b, c)).sum();
                        let eq_n: i64 = (0..nn).map(|c2| t(a, b, c2) * n.left[x][c2][c] as i64).sum();
                        let eq_m: i64 = (0..nm).map(|b2| m.right[x][b][b2] as i64 * t(a, b2, c)).sum();
                        let eq_nr: i64 = (0..nn).map(|c2| t(a, b, c2) * n.right[x][c2][c] as i64).sum();
                        ok &= bal_l == bal_r && eq_l == eq_n && eq_m == eq_nr;
                    }
                }
            }
        }
        if ok {
            out.push((0..nl).map(|a| (0..nm).map(|b| (0..nn).map(|c| t(a, b, c) as u32).collect()).collect()).collect());
        }
        let mut p = 0;
        while p < size && digits[p] == bound {
            digits[p] = 0;
            p += 1;
        }
        if p == size {
            return out;
        }
        digits[p] += 1;
    }
}

#[test]
fn compatibility_is_unit_coherent() {
    for r in [z2(), fib(), ring("R3_7"), ring("R3_16"), &build_ah4_ring()] {
        let id = FusionBimodule::identity(r);
        assert!(id.check(r, r).is_empty(), "{}", r.name);
        let found = compatibility((r, r, r), &id, &id, std::slice::from_ref(&id), 10_000_000).unwrap();
        assert_eq!(found.len(), 1, "{}", r.name);
    }
}

#[test]
fn compatibility_rejects_mismatched_rings() {
    let a = FusionBimodule::identity(z2());
    let b = FusionBimodule::identity(fib());
    let e = compatibility((z2(), z2(), fib()), &a, &b, &[], 1000).unwrap_err();
    assert!(matches!(e, FusionError::Mismatch(_)));
}

#[test]
fn ah4_ring_round_trips() {
    let r = build_ah4_ring();
    let text = serialize_ring(&r);
    let d = parse_fusion_data(&text).unwrap();
    assert_eq!(d.rings, vec![r.clone()]);
    assert_eq!(serialize_ring(&d.rings[0]), text);
}

#[test]
fn data_file_round_trips() {
    let mut d = FusionData { rings: small_rings().to_vec(), ..Default::default() };
    d.modules = enumerate_modules(ring("R3_7"), 3, 1_000_000).unwrap();
    d.bimodules.push(FusionBimodule::identity(z2()));
    let id = d.bimodules[0].name.clone();
    d.compat.push(ahkit::fusion::data::CompatRecord { left: id.clone(), right: id.clone(), results: vec![id] });
    let text = serialize_fusion_data(&d);
    let back = parse_fusion_data(&text).unwrap();
    assert_eq!(back, d);
    assert_eq!(serialize_fusion_data(&back), text);
}

const Z2: &str = "ring Z2\n  labels 1 g\n  unit 1\n  dual 1 g\n  product g g = 1\nend\n";

#[test]
fn reciprocity_violation_is_named() {
    let text = format!("{}\nmodule bad over Z2\n  labels k0 k1\n  action g\n    0 1\n    0 1\nend\n", Z2);
    match parse_fusion_data(&text) {
        Err(FusionError::Invalid { line, name, axiom, .. }) => {
            assert_eq!(name, "bad");
            assert_eq!(axiom, "reciprocity");
            assert_eq!(line, 8);
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn malformed_files_report_positions() {
    for (text, line) in [
        ("ring R\n  labels 1 x\n  unit 1\n  dual 1 x\n  product x x = 1 + y\nend\n", 5),
        ("ring R\n  labels 1\n  unit 1\n  dual 1\n", 1),
        ("frobnicate\n", 1),
        ("ring R\n  labels 1 x\n  unit 1\n  dual 1 x\n  product 1 x = x\nend\n", 5),
    ] {
        match parse_fusion_data(text) {
            Err(FusionError::Parse { line: l, .. }) | Err(FusionError::Invalid { line: l, .. }) => assert_eq!(l, line, "{}", text),
            other => panic!("{:?} for {}", other, text),
        }
    }
}

#[test]
fn positional_import_selects_the_product_order() {
    let r = build_ah4_ring();
    let reg = FusionModule::regular(&r);
    let n = reg.rank();
    // positional[k][i][j] = M_i[k][j]
    let to_positional = |mats: &[Vec<Vec<u32>>]| -> Vec<Vec<Vec<u32>>> {
        (0..n).map(|k| (0..r.rank()).map(|i| mats[i][k].clone()).collect()).collect()
    };
    let (m, order) = import_positional(&r, "reg", &to_positional(&reg.mats)).unwrap();
    assert_eq!(order, ActionOrder::Right);
    assert_eq!(m.mats, reg.mats);
    let transposed: Vec<Vec<Vec<u32>>> = reg.mats.iter().map(transpose).collect();
    let (m, order) = import_positional(&r, "reg", &to_positional(&transposed)).unwrap();
    assert_eq!(order, ActionOrder::Left);
    assert_eq!(m.mats, reg.mats);

    let text = format!("{}\npositional p over Z2\n  {}\nend\n", Z2, "{{{1,0},{0,1}},{{0,1},{1,0}}}");
    let d = parse_fusion_data(&text).unwrap();
    assert_eq!(d.import_orders, vec![("p".to_string(), ActionOrder::Right)]);
    assert!(d.module("p").unwrap().check(d.ring("Z2").unwrap(), ActionOrder::Right).is_empty());
}

#[test]
fn assets_match_the_code() {
    let cat = Catalog::embedded();
    assert_eq!(cat.fusion_ring("ah4.ring").unwrap(), build_ah4_ring());
    let d = cat.fusion_data("fusion.small-rings").unwrap();
    assert_eq!(d.rings, small_rings());
    let g = cat.graph_file("2ah.principal.graph").unwrap();
    assert!(g.to_graph().unwrap().same_as(&two_ah_principal_graph()));
    assert_eq!(g.norm_sq().unwrap(), Some(t("5+sqrt17")));
}

#[test]
fn two_ah_graph_is_multiplication_by_one_plus_xi() {
    let r = build_ah4_ring();
    let g = two_ah_principal_graph();
    assert_eq!((g.even.len(), g.odd.len(), g.edges.len()), (8, 6, 16));
    assert_eq!(g.components(), 1);
    let a = g.adjacency();
    let x = r.index("a0x").unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let aat: i64 = (0..6).map(|k| a[i][k] * a[j][k]).sum();
            let want = i64::from(i == j) + r.n[i][x][j] as i64;
            assert_eq!(aat, want, "{} {}", g.even[i], g.even[j]);
        }
    }
    let w = fp_weights(&g, &t("5+sqrt17"), "a0").unwrap();
    let dims = r.fp_dims();
    for (l, d) in r.labels.iter().zip(&dims) {
        assert_eq!(w.even[l], *d.exact().unwrap(), "{}", l);
    }
    // 1 + d = 5 + √17 is the index
    assert_eq!(&TowerScalar::from_int(1) + dims[x].exact().unwrap(), t("5+sqrt17"));
}

fn module_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0usize..1000).prop_flat_map(|i| {
        let n = all_small_modules()[i % all_small_modules().len()].1.rank();
        (Just(i % all_small_modules().len()), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn all_small_modules() -> &'static [(usize, FusionModule)] {
    static M: OnceLock<Vec<(usize, FusionModule)>> = OnceLock::new();
    M.get_or_init(|| {
        let mut v = Vec::new();
        for (ri, r) in small_rings().iter().enumerate() {
            for m in enumerate_modules(r, 3, 100_000_000).unwrap() {
                v.push((ri, m));
            }
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelled_modules_keep_their_class((idx, perm) in module_strategy()) {
        let (ri, m) = &all_small_modules()[idx];
        let r = &small_rings()[*ri];
        let p = m.permuted(&perm);
        prop_assert!(p.check(r, ActionOrder::Right).is_empty());
        prop_assert_eq!(p.canonical(), m.canonical());
        let w = m.fp_weights();
        let pw = p.fp_weights();
        for (k, &src) in perm.iter().enumerate() {
            prop_assert!((pw[k] - w[src]).abs() < 1e-9);
        }
    }

    #[test]
    fn relabelled_rings_stay_valid(ri in 0usize..16, seed in any::<u64>()) {
        let r = &small_rings()[ri];
        let mut perm: Vec<usize> = (0..r.rank()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = r.permuted(&perm);
        prop_assert!(p.check().passed());
        let mut a: Vec<f64> = r.fp_dims_f64();
        let mut b: Vec<f64> = p.fp_dims_f64();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        let text = serialize_ring(&p);
        prop_assert_eq!(&parse_fusion_data(&text).unwrap().rings[0], &p);
    }
}
