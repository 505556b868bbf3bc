//! Fusion rings, based modules and bimodules as nonnegative integer matrix
//! data: axiom checks, Frobenius–Perron dimensions, module enumeration,
//! algebra objects and multiplicative compatibility of bimodules.

pub mod ah4;
pub mod bimodule;
pub mod data;
pub mod module;
pub mod ring;
pub mod search;

pub use ah4::{build_ah4_ring, two_ah_principal_graph};
pub use bimodule::{compatibility, CompatibilityWitness, FusionBimodule};
pub use data::{parse_fusion_data, serialize_fusion_data, FusionData};
pub use module::{algebra_objects, brute_force_modules, enumerate_modules, import_positional, ActionOrder, FusionModule};
pub use ring::{FpDim, FusionRing, RingReport, Violation};

/// Rows of nonnegative integers.
pub type IntMatrix = Vec<Vec<u32>>;

#[derive(Debug, thiserror::Error)]
pub enum FusionError {
    #[error("{}: {}", .0.axiom, .0.detail)]
    Axiom(Violation),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {name}: {axiom}: {detail}")]
    Invalid { line: usize, name: String, axiom: &'static str, detail: String },
    #[error("search budget of {budget} nodes exceeded at {frontier}")]
    Budget { budget: u64, frontier: String },
    #[error("{0}")]
    Mismatch(String),
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0u32; m]; n];
    for i in 0..n {
        for (p, &x) in a[i].iter().enumerate() {
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[p][j];
            }
        }
    }
    out
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect()
}

/// Positive eigenvector of `I + Σ mats` by power iteration, normalised to
/// unit length. Meaningful when the matrices generate an irreducible
/// action.
pub fn perron_vector(mats: &[IntMatrix], n: usize) -> Vec<f64> {
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..10_000 {
        let mut w = v.clone();
        for m in mats {
            for i in 0..n {
                for j in 0..n {
                    w[i] += m[i][j] as f64 * v[j];
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        let diff: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = w;
        if diff < 1e-15 {
            break;
        }
    }
    v
}
