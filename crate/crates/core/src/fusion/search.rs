//! Bounded nonnegative integer feasibility: find `x` with `0 ≤ x_v ≤ u_v`
//! satisfying integer linear equations and approximate real ones, by
//! depth-first search with interval propagation.

use super::FusionError;

#[derive(Clone, Debug, Default)]
pub struct IntProgram {
    pub upper: Vec<u32>,
    /// `Σ c·x = rhs`
    pub eqs: Vec<(Vec<(usize, i64)>, i64)>,
    /// `Σ c·x = rhs` up to a relative tolerance
    pub real_eqs: Vec<(Vec<(usize, f64)>, f64)>,
}

const TOL: f64 = 1e-9;

impl IntProgram {
    pub fn new(nvars: usize) -> Self {
        IntProgram { upper: vec![0; nvars], ..Default::default() }
    }

    /// First solution in lexicographic order of the variables, or `None`.
    pub fn solve(&self, budget: u64) -> Result<Option<Vec<u32>>, FusionError> {
        let mut x: Vec<Option<u32>> = vec![None; self.upper.len()];
        let mut nodes = 0;
        self.rec(&mut x, &mut nodes, budget)
    }

    fn propagate(&self, x: &mut [Option<u32>]) -> bool {
        loop {
            let mut changed = false;
            for (terms, rhs) in &self.eqs {
                let (mut lo, mut hi, mut fixed) = (0i64, 0i64, 0i64);
                let mut free = None;
                let mut nfree = 0;
                for &(v, c) in terms {
                    match x[v] {
                        Some(val) => fixed += c * val as i64,
                        None => {
                            let u = self.upper[v] as i64;
                            if c > 0 {
                                hi += c * u;
                            } else {
                                lo += c * u;
                            }
                            nfree += 1;
                            free = Some((v, c));
                        }
                    }
                }
                let need = rhs - fixed;
                if need < lo || need > hi {
                    return false;
                }
                if nfree == 1 {
                    let (v, c) = free.unwrap();
                    if need % c != 0 || need / c < 0 || need / c > self.upper[v] as i64 {
                        return false;
                    }
                    x[v] = Some((need / c) as u32);
                    changed = true;
                }
            }
            for (terms, rhs) in &self.real_eqs {
                let (mut lo, mut hi) = (0f64, 0f64);
                for &(v, c) in terms {
                    match x[v] {
                        Some(val) => {
                            lo += c * val as f64;
                            hi += c * val as f64;
                        }
                        None if c > 0.0 => hi += c * self.upper[v] as f64,
                        None => lo += c * self.upper[v] as f64,
                    }
                }
                let tol = TOL * (1.0 + rhs.abs());
                if *rhs < lo - tol || *rhs > hi + tol {
                    return false;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn rec(&self, x: &mut Vec<Option<u32>>, nodes: &mut u64, budget: u64) -> Result<Option<Vec<u32>>, FusionError> {
        *nodes += 1;
        if *nodes > budget {
            let assigned = x.iter().filter(|v| v.is_some()).count();
            return Err(FusionError::Budget { budget, frontier: format!("{} of {} variables assigned", assigned, x.len()) });
        }
        let saved = x.clone();
        if !self.propagate(x) {
            *x = saved;
            return Ok(None);
        }
        let Some(v) = x.iter().position(|e| e.is_none()) else {
            return Ok(Some(x.iter().map(|e| e.unwrap()).collect()));
        };
        for val in 0..=self.upper[v] {
            let before = x.clone();
            x[v] = Some(val);
            if let Some(s) = self.rec(x, nodes, budget)? {
                return Ok(Some(s));
            }
            *x = before;
        }
        *x = saved;
        Ok(None)
    }
}
