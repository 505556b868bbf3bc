//! Fusion bimodules and multiplicative compatibility.
//!
//! For an A–B bimodule, `left[a][k][j] = (ξ_a κ_k, κ_j)` and
//! `right[b][k][j] = (κ_k ξ_b, κ_j)`.

use super::module::{ActionOrder, FusionModule};
use super::ring::{FusionRing, Violation};
use super::search::IntProgram;
use super::{matmul, perron_vector, FusionError, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionBimodule {
    pub name: String,
    pub left_ring: String,
    pub right_ring: String,
    pub labels: Vec<String>,
    pub left: Vec<IntMatrix>,
    pub right: Vec<IntMatrix>,
}

impl FusionBimodule {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// The ring as a bimodule over itself.
    pub fn identity(r: &FusionRing) -> Self {
        let n = r.rank();
        FusionBimodule {
            name: format!("{}_identity", r.name),
            left_ring: r.name.clone(),
            right_ring: r.name.clone(),
            labels: r.labels.clone(),
            left: (0..n).map(|a| (0..n).map(|k| (0..n).map(|j| r.n[a][k][j]).collect()).collect()).collect(),
            right: (0..n).map(|b| (0..n).map(|k| (0..n).map(|j| r.n[k][b][j]).collect()).collect()).collect(),
        }
    }

    fn as_module(&self, ring: &str, mats: &[IntMatrix]) -> FusionModule {
        FusionModule { name: self.name.clone(), ring: ring.to_string(), labels: self.labels.clone(), mats: mats.to_vec() }
    }

    /// Both module structures and commutation of the two actions.
    pub fn check(&self, a: &FusionRing, b: &FusionRing) -> Vec<Violation> {
        let mut v: Vec<Violation> = self.as_module(&a.name, &self.left).check(a, ActionOrder::Left);
        v.iter_mut().for_each(|x| x.detail = format!("left action: {}", x.detail));
        let mut w = self.as_module(&b.name, &self.right).check(b, ActionOrder::Right);
        w.iter_mut().for_each(|x| x.detail = format!("right action: {}", x.detail));
        v.extend(w);
        if !v.is_empty() {
            return v;
        }
        for (i, l) in self.left.iter().enumerate() {
            for (j, r) in self.right.iter().enumerate() {
                if matmul(l, r) != matmul(r, l) {
                    v.push(Violation { axiom: "commutation", detail: format!("{} and {}", a.labels[i], b.labels[j]) });
                }
            }
        }
        v
    }

    /// Common positive eigenvector of both actions, scaled so that
    /// `Σ w² = Σ_a dim(a)²` for the left ring.
    pub fn fp_weights(&self, a: &FusionRing) -> Vec<f64> {
        let mut mats = self.left.clone();
        mats.extend(self.right.iter().cloned());
        let w = perron_vector(&mats, self.rank());
        let g: f64 = a.fp_dims_f64().iter().map(|d| d * d).sum();
        w.iter().map(|x| x * g.sqrt()).collect()
    }
}

/// A pairing tensor `t[l][m][n]` witnessing that `n` can occur in `l ⊠ m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub candidate: String,
    pub t: Vec<Vec<Vec<u32>>>,
}

/// The candidates `N` (A–C bimodules) that pass for the product of `l`
/// (A–B) and `m` (B–C): some nonnegative integer `t[l][m][n]` is balanced
/// over B, equivariant for A and C, and dimension-consistent.
pub fn compatibility(
    rings: (&FusionRing, &FusionRing, &FusionRing),
    l: &FusionBimodule,
    m: &FusionBimodule,
    candidates: &[FusionBimodule],
    budget: u64,
) -> Result<Vec<CompatibilityWitness>, FusionError> {
    let (ra, rb, rc) = rings;
    if l.right_ring != m.left_ring || l.left_ring != ra.name || m.right_ring != rc.name || rb.name != l.right_ring {
        return Err(FusionError::Mismatch(format!("{} ({}–{}) and {} ({}–{})", l.name, l.left_ring, l.right_ring, m.name, m.left_ring, m.right_ring)));
    }
    let wl = l.fp_weights(ra);
    let wm = m.fp_weights(rb);
    let mut out = Vec::new();
    for n in candidates {
        if n.left_ring != ra.name || n.right_ring != rc.name {
            continue;
        }
        let wn = n.fp_weights(ra);
        let (nl, nm, nn) = (l.rank(), m.rank(), n.rank());
        let idx = |a: usize, b: usize, c: usize| (a * nm + b) * nn + c;
        let mut p = IntProgram::new(nl * nm * nn);
        for a in 0..nl {
            for b in 0..nm {
                let target = wl[a] * wm[b];
                for c in 0..nn {
                    p.upper[idx(a, b, c)] = (target / wn[c] + 1e-9).floor() as u32;
                }
                p.real_eqs.push(((0..nn).map(|c| (idx(a, b, c), wn[c])).collect(), target));
            }
        }
        let mut add = |terms: Vec<(usize, i64)>| {
            let mut merged: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
            for (v, c) in terms {
                *merged.entry(v).or_default() += c;
            }
            let terms: Vec<(usize, i64)> = merged.into_iter().filter(|(_, c)| *c != 0).collect();
            if !terms.is_empty() {
                p.eqs.push((terms, 0));
            }
        };
        // balanced over B: (l·b) ⊠ m = l ⊠ (b·m)
        for bi in 0..rb.rank() {
            for a in 0..nl {
                for b in 0..nm {
                    for c in 0..nn {
                        let mut terms = Vec::new();
                        for a2 in 0..nl {
                            let x = l.right[bi][a][a2];
                            if x > 0 {
                                terms.push((idx(a2, b, c), x as i64));
                            }
                        }
                        for b2 in 0..nm {
                            let x = m.left[bi][b][b2];
                            if x > 0 {
                                terms.push((idx(a, b2, c), -(x as i64)));
                            }
                        }
                        add(terms);
                    }
                }
            }
        }
        // equivariance: ξ·(l ⊠ m) = (ξ·l) ⊠ m and (l ⊠ m)·ζ = l ⊠ (m·ζ)
        for ai in 0..ra.rank() {
            for a in 0..nl {
                for b in 0..nm {
                    for c2 in 0..nn {
                        let mut terms = Vec::new();
                        for a2 in 0..nl {
                            let x = l.left[ai][a][a2];
                            if x > 0 {
                                terms.push((idx(a2, b, c2), x as i64));
                            }
                        }
                        for c in 0..nn {
                            let x = n.left[ai][c][c2];
                            if x > 0 {
                                terms.push((idx(a, b, c), -(x as i64)));
                            }
                        }
                        add(terms);
                    }
                }
            }
        }
        for ci in 0..rc.rank() {
            for a in 0..nl {
                for b in 0..nm {
                    for c2 in 0..nn {
                        let mut terms = Vec::new();
                        for b2 in 0..nm {
                            let x = m.right[ci][b][b2];
                            if x > 0 {
                                terms.push((idx(a, b2, c2), x as i64));
                            }
                        }
                        for c in 0..nn {
                            let x = n.right[ci][c][c2];
                            if x > 0 {
                                terms.push((idx(a, b, c), -(x as i64)));
                            }
                        }
                        add(terms);
                    }
                }
            }
        }
        if let Some(x) = p.solve(budget)? {
            let t = (0..nl).map(|a| (0..nm).map(|b| (0..nn).map(|c| x[idx(a, b, c)]).collect()).collect()).collect();
            out.push(CompatibilityWitness { candidate: n.name.clone(), t });
        }
    }
    Ok(out)
}
