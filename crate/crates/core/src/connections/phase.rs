//! Sign connections on 4-graphs whose cell blocks are all 1×1, up to
//! vertical gauge.

use std::collections::HashMap;

use num_traits::One;

use super::ConnectionError;
use crate::graphs::{Cell, FourGraph};
use crate::scalars::TowerScalar;

/// Spanning-forest data of the cell incidence graph: nodes are vertical
/// edges (left edges first, then right ones), each cell joins its `e3` and
/// `e1`. A vertical gauge multiplies a cell by the signs on both ends, so
/// classes are indexed by the holonomy on the non-tree ("closing") cells.
#[derive(Clone, Debug)]
pub struct PhaseClassification {
    pub cells: Vec<Cell>,
    pub closing: Vec<Cell>,
    pub components: usize,
    pub representatives: Vec<HashMap<Cell, TowerScalar>>,
}

impl PhaseClassification {
    pub fn cycle_rank(&self) -> usize {
        self.closing.len()
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

fn forest(fg: &FourGraph) -> Result<(Vec<Cell>, Vec<Cell>, Vec<Cell>, usize), ConnectionError> {
    let groups = fg.groups_ac();
    if let Some(((a, c), g)) = groups.iter().find(|(_, g)| g.len() != 1) {
        return Err(ConnectionError::Precondition(format!(
            "block {}-{} has {} cells; phase classification needs 1×1 blocks",
            fg.v0()[*a],
            fg.v2()[*c],
            g.len()
        )));
    }
    let nl = fg.g3.edges.len();
    let n = nl + fg.g1.edges.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let cells = fg.cells();
    let mut tree = Vec::new();
    let mut closing = Vec::new();
    for c in &cells {
        let x = find(&mut parent, c.e3);
        let y = find(&mut parent, nl + c.e1);
        if x == y {
            closing.push(*c);
        } else {
            parent[x] = y;
            tree.push(*c);
        }
    }
    let components = (0..n).filter(|&x| find(&mut parent, x) == x).count();
    Ok((cells, tree, closing, components))
}

/// Gauge classes of ±1 cell assignments: one representative per subset of
/// closing cells (set to −1, everything else +1), so `2^cycle_rank` classes.
pub fn classify_phase_connections(fg: &FourGraph) -> Result<PhaseClassification, ConnectionError> {
    let (cells, _tree, closing, components) = forest(fg)?;
    if closing.len() > 20 {
        return Err(ConnectionError::Precondition(format!("cycle rank {} is too large to list", closing.len())));
    }
    let mut representatives = Vec::new();
    for mask in 0u32..(1 << closing.len()) {
        let mut vals: HashMap<Cell, TowerScalar> = cells.iter().map(|c| (*c, TowerScalar::one())).collect();
        for (i, c) in closing.iter().enumerate() {
            if mask >> i & 1 == 1 {
                vals.insert(*c, -TowerScalar::one());
            }
        }
        representatives.push(vals);
    }
    Ok(PhaseClassification { cells, closing, components, representatives })
}

/// Holonomy of a ±1 assignment on each closing cell (`true` = −1): the
/// class invariant. Two assignments are vertically gauge equivalent iff
/// their invariants agree.
pub fn phase_class_of(fg: &FourGraph, values: &HashMap<Cell, TowerScalar>) -> Result<Vec<bool>, ConnectionError> {
    let (cells, tree, closing, _) = forest(fg)?;
    let sign = |c: &Cell| -> Result<bool, ConnectionError> {
        let v = values.get(c).cloned().unwrap_or_default();
        if v == TowerScalar::one() {
            Ok(false)
        } else if v == -TowerScalar::one() {
            Ok(true)
        } else {
            Err(ConnectionError::Precondition(format!("cell value {} is not ±1", v)))
        }
    };
    for c in &cells {
        sign(c)?;
    }
    // potentials s(node) with s(e3)·s(e1)·W = +1 on tree cells
    let nl = fg.g3.edges.len();
    let n = nl + fg.g1.edges.len();
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for c in &tree {
        let s = sign(c)?;
        adj[c.e3].push((nl + c.e1, s));
        adj[nl + c.e1].push((c.e3, s));
    }
    let mut pot: Vec<Option<bool>> = vec![None; n];
    for start in 0..n {
        if pot[start].is_some() {
            continue;
        }
        pot[start] = Some(false);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            let px = pot[x].unwrap();
            for &(y, s) in &adj[x] {
                if pot[y].is_none() {
                    pot[y] = Some(px ^ s);
                    stack.push(y);
                }
            }
        }
    }
    closing
        .iter()
        .map(|c| Ok(sign(c)? ^ pot[c.e3].unwrap() ^ pot[nl + c.e1].unwrap()))
        .collect()
}
