//! The rank 8 ring generated by ℤ/4 = {α_i} and ξ with `α_i ξ = ξ α_{−i}`
//! and `ξ² = 1 + 2 Σ_i α_i ξ`, and the principal graph of the subfactor
//! for `1 + ξ`.

use super::{FusionError, FusionRing};
use crate::graphs::BipartiteGraph;

/// Labels `a0..a3` for α_i and `a0x..a3x` for α_i ξ.
pub fn build_ah4_ring() -> FusionRing {
    let labels: Vec<String> = (0..4).map(|i| format!("a{}", i)).chain((0..4).map(|i| format!("a{}x", i))).collect();
    let a = |i: i64| i.rem_euclid(4) as usize;
    let x = |i: i64| 4 + i.rem_euclid(4) as usize;
    let result: Result<FusionRing, FusionError> = FusionRing::from_products("AH4", labels, 0, |p, q| {
        let (i, j) = ((p % 4) as i64, (q % 4) as i64);
        match (p < 4, q < 4) {
            (true, true) => vec![(a(i + j), 1)],
            (true, false) => vec![(x(i + j), 1)],
            // (α_i ξ) α_j = α_i α_{−j} ξ
            (false, true) => vec![(x(i - j), 1)],
            // (α_i ξ)(α_j ξ) = α_{i−j} ξ² = α_{i−j} + 2 Σ_k α_k ξ
            (false, false) => {
                let mut v = vec![(a(i - j), 1)];
                v.extend((0..4).map(|k| (x(k), 2)));
                v
            }
        }
    });
    result.expect("every element has a dual")
}

/// Even vertices are the ring's simples, odd vertices `m0..m3`, `p`, `q`;
/// `α_i – m_i`, `α_i ξ – m_i`, and every `α_i ξ` joined to both `p` and `q`.
pub fn two_ah_principal_graph() -> BipartiteGraph {
    let ring = build_ah4_ring();
    let odd: Vec<String> = (0..4).map(|i| format!("m{}", i)).chain(["p".to_string(), "q".to_string()]).collect();
    let mut g = BipartiteGraph::new(ring.labels.clone(), odd);
    for i in 0..4 {
        let m = format!("m{}", i);
        g.add_simple(&format!("a{}", i), &m).expect("fresh edge");
        g.add_simple(&format!("a{}x", i), &m).expect("fresh edge");
        g.add_simple(&format!("a{}x", i), "p").expect("fresh edge");
        g.add_simple(&format!("a{}x", i), "q").expect("fresh edge");
    }
    g
}
