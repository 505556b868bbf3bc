//! Machine-readable transcriptions shipped with the crate, with a digest
//! manifest.
//!
//! Files are compiled into the binary so the CLI works from any directory;
//! [`Catalog::from_dir`] reads an on-disk copy instead.

mod files;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::connections::{Connection, ConnectionError};
use crate::fusion::{parse_fusion_data, FusionData, FusionRing};
use crate::graphs::{BipartiteGraph, Cell, EdgeWord, FourGraphFile, GraphError, GraphFile};
use crate::scalars::{parse_scalar, TowerScalar};

#[derive(Debug, thiserror::Error)]
pub enum AssetError {
    #[error("unknown asset '{0}'")]
    Unknown(String),
    #[error("asset '{name}' has kind {kind}, expected {expected}")]
    WrongKind { name: String, kind: String, expected: String },
    #[error("digest mismatch for '{name}': manifest {expected}, file {actual}")]
    Digest { name: String, expected: String, actual: String },
    #[error("cannot read '{0}': {1}")]
    Io(String, String),
    #[error("parse error in '{name}': {msg}")]
    Parse { name: String, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

fn parse_err(name: &str, msg: impl ToString) -> AssetError {
    AssetError::Parse { name: name.to_string(), msg: msg.to_string() }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ManifestEntry {
    pub name: String,
    pub kind: String,
    pub path: String,
    pub status: String,
    pub sha256: String,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct Manifest {
    pub format: String,
    pub assets: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{:02x}", b)).collect()
}

/// Named assets and their contents.
pub struct Catalog {
    pub manifest: Manifest,
    contents: HashMap<String, String>,
}

impl Catalog {
    /// The copy compiled into the crate.
    pub fn embedded() -> Self {
        let manifest: Manifest = serde_json::from_str(files::MANIFEST).expect("embedded manifest parses");
        let contents = files::FILES.iter().map(|(p, c)| (p.to_string(), c.to_string())).collect();
        Catalog { manifest, contents }
    }

    /// Reads `manifest.json` and every listed file below `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, AssetError> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| AssetError::Io(p.display().to_string(), e.to_string()));
        let manifest: Manifest =
            serde_json::from_str(&read(&dir.join("manifest.json"))?).map_err(|e| parse_err("manifest.json", e))?;
        let mut contents = HashMap::new();
        for e in &manifest.assets {
            contents.insert(e.path.clone(), read(&dir.join(&e.path))?);
        }
        Ok(Catalog { manifest, contents })
    }

    pub fn entry(&self, name: &str) -> Result<&ManifestEntry, AssetError> {
        self.manifest.assets.iter().find(|e| e.name == name).ok_or_else(|| AssetError::Unknown(name.to_string()))
    }

    /// Digest-checked raw text of an asset.
    pub fn text(&self, name: &str) -> Result<&str, AssetError> {
        let e = self.entry(name)?;
        let text = self.contents.get(&e.path).ok_or_else(|| AssetError::Io(e.path.clone(), "not embedded".into()))?;
        let actual = sha256_hex(text.as_bytes());
        if actual != e.sha256 {
            return Err(AssetError::Digest { name: name.to_string(), expected: e.sha256.clone(), actual });
        }
        Ok(text)
    }

    fn typed<T: for<'de> Deserialize<'de>>(&self, name: &str, kind: &str) -> Result<T, AssetError> {
        let e = self.entry(name)?;
        if e.kind != kind {
            return Err(AssetError::WrongKind { name: name.into(), kind: e.kind.clone(), expected: kind.into() });
        }
        serde_json::from_str(self.text(name)?).map_err(|err| parse_err(name, err))
    }

    pub fn graph_file(&self, name: &str) -> Result<GraphFile, AssetError> {
        self.typed(name, "graph")
    }

    pub fn graph(&self, name: &str) -> Result<BipartiteGraph, AssetError> {
        Ok(self.graph_file(name)?.to_graph()?)
    }

    pub fn connection_file(&self, name: &str) -> Result<ConnectionFile, AssetError> {
        self.typed(name, "connection")
    }

    pub fn connection(&self, name: &str) -> Result<Connection, AssetError> {
        self.connection_file(name)?.to_connection()
    }

    pub fn edge_map(&self, name: &str) -> Result<EdgeMapFile, AssetError> {
        self.typed(name, "edge-map")
    }

    pub fn gauge(&self, name: &str) -> Result<GaugeFile, AssetError> {
        self.typed(name, "gauge")
    }

    /// A fusion text file: kind `fusion-ring` (exactly one ring) or
    /// `fusion-data`. Every block is checked on parse.
    pub fn fusion_data(&self, name: &str) -> Result<FusionData, AssetError> {
        let e = self.entry(name)?;
        if e.kind != "fusion-ring" && e.kind != "fusion-data" {
            return Err(AssetError::WrongKind { name: name.into(), kind: e.kind.clone(), expected: "fusion-data".into() });
        }
        parse_fusion_data(self.text(name)?).map_err(|err| parse_err(name, err))
    }

    pub fn fusion_ring(&self, name: &str) -> Result<FusionRing, AssetError> {
        let mut d = self.fusion_data(name)?;
        if d.rings.len() != 1 {
            return Err(parse_err(name, format!("{} rings, expected one", d.rings.len())));
        }
        Ok(d.rings.remove(0))
    }

    pub fn json(&self, name: &str, kind: &str) -> Result<serde_json::Value, AssetError> {
        self.typed(name, kind)
    }

    /// Every scalar expression in every asset re-serialises to a string that
    /// parses back to the same value. Returns the offending strings.
    pub fn scalar_round_trip_failures(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for e in &self.manifest.assets {
            let Ok(text) = self.text(&e.name) else {
                out.push((e.name.clone(), "<unreadable>".into()));
                continue;
            };
            let v: serde_json::Value = match serde_json::from_str(text) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let mut exprs = Vec::new();
            collect_exprs(&v, &mut exprs);
            for s in exprs {
                if let Ok(x) = parse_scalar(&s) {
                    if parse_scalar(&x.to_string()).ok() != Some(x) {
                        out.push((e.name.clone(), s));
                    }
                }
            }
        }
        out
    }
}

/// String leaves under keys that hold scalar expressions.
fn collect_exprs(v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                match (k.as_str(), x) {
                    ("matrix" | "entries" | "terms", _) => collect_strings(x, out, k == "terms"),
                    ("norm_sq", serde_json::Value::String(s)) => out.push(s.clone()),
                    _ => collect_exprs(x, out),
                }
            }
        }
        serde_json::Value::Array(a) => a.iter().for_each(|x| collect_exprs(x, out)),
        _ => {}
    }
}

fn collect_strings(v: &serde_json::Value, out: &mut Vec<String>, pairs: bool) {
    match v {
        serde_json::Value::String(s) => out.push(s.clone()),
        serde_json::Value::Array(a) if pairs && a.len() == 2 && a[0].is_string() => {
            out.push(a[0].as_str().unwrap().to_string());
        }
        serde_json::Value::Array(a) => a.iter().for_each(|x| collect_strings(x, out, pairs)),
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// connection files

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ConnectionBlock {
    pub a: String,
    pub c: String,
    /// paths `a d c` through V3
    pub rows: Vec<String>,
    /// paths `a b c` through V1
    pub cols: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ConnectionFile {
    pub format: String,
    pub name: String,
    pub four_graph: FourGraphFile,
    pub norm_sq: String,
    pub base_top: String,
    pub base_bottom: String,
    #[serde(default)]
    pub note: String,
    pub blocks: Vec<ConnectionBlock>,
}

impl ConnectionFile {
    pub fn to_connection(&self) -> Result<Connection, AssetError> {
        let name = &self.name;
        let fg = self.four_graph.to_four_graph()?;
        let norm_sq = parse_scalar(&self.norm_sq).map_err(|e| parse_err(name, e))?;
        let mut values: HashMap<Cell, TowerScalar> = HashMap::new();
        let mut covered = 0usize;
        let groups = fg.groups_ac();
        for (bi, b) in self.blocks.iter().enumerate() {
            let a = fg.g0.even_idx(&b.a).ok_or_else(|| parse_err(name, format!("block {}: unknown vertex {}", bi, b.a)))?;
            let c = fg.g1.odd_idx(&b.c).ok_or_else(|| parse_err(name, format!("block {}: unknown vertex {}", bi, b.c)))?;
            let cells = groups.get(&(a, c)).ok_or_else(|| parse_err(name, format!("block {}-{} has no cells", b.a, b.c)))?;
            if b.matrix.len() != b.rows.len() || b.matrix.iter().any(|r| r.len() != b.cols.len()) {
                return Err(parse_err(name, format!("block {}-{}: matrix shape does not match labels", b.a, b.c)));
            }
            let word = |w: &str| EdgeWord::parse(w).map_err(|e| parse_err(name, e));
            let rows: Vec<EdgeWord> = b.rows.iter().map(|w| word(w)).collect::<Result<_, _>>()?;
            let cols: Vec<EdgeWord> = b.cols.iter().map(|w| word(w)).collect::<Result<_, _>>()?;
            for cell in cells {
                let rw = fg.g3.edges[cell.e3].word.concat(&fg.g2.edges[cell.e2].word).unwrap();
                let cw = fg.g0.edges[cell.e0].word.concat(&fg.g1.edges[cell.e1].word).unwrap();
                let i = rows.iter().position(|x| *x == rw);
                let j = cols.iter().position(|x| *x == cw);
                let (Some(i), Some(j)) = (i, j) else {
                    return Err(parse_err(name, format!("block {}-{} does not label path {} / {}", b.a, b.c, rw, cw)));
                };
                let v = parse_scalar(&b.matrix[i][j]).map_err(|e| parse_err(name, format!("block {}-{}: {}", b.a, b.c, e)))?;
                values.insert(*cell, v);
                covered += 1;
            }
        }
        let total: usize = groups.values().map(|g| g.len()).sum();
        if covered != total {
            return Err(parse_err(name, format!("{} of {} cells have values", covered, total)));
        }
        Ok(Connection::with_norms(fg, values, &norm_sq, &self.base_top, &self.base_bottom)?)
    }

    /// Writes a connection in block form.
    pub fn from_connection(name: &str, c: &Connection, norm_sq: &TowerScalar) -> Self {
        let fg = &c.fg;
        let mut blocks = Vec::new();
        for ((a, cc), cells) in fg.groups_ac() {
            let mut rows: Vec<String> = Vec::new();
            let mut cols: Vec<String> = Vec::new();
            for cell in &cells {
                let rw = fg.g3.edges[cell.e3].word.concat(&fg.g2.edges[cell.e2].word).unwrap().to_string();
                let cw = fg.g0.edges[cell.e0].word.concat(&fg.g1.edges[cell.e1].word).unwrap().to_string();
                if !rows.contains(&rw) {
                    rows.push(rw);
                }
                if !cols.contains(&cw) {
                    cols.push(cw);
                }
            }
            let mut matrix = vec![vec!["0".to_string(); cols.len()]; rows.len()];
            for cell in &cells {
                let rw = fg.g3.edges[cell.e3].word.concat(&fg.g2.edges[cell.e2].word).unwrap().to_string();
                let cw = fg.g0.edges[cell.e0].word.concat(&fg.g1.edges[cell.e1].word).unwrap().to_string();
                let i = rows.iter().position(|x| *x == rw).unwrap();
                let j = cols.iter().position(|x| *x == cw).unwrap();
                matrix[i][j] = c.value(cell).to_string();
            }
            blocks.push(ConnectionBlock { a: fg.v0()[a].clone(), c: fg.v2()[cc].clone(), rows, cols, matrix });
        }
        ConnectionFile {
            format: "connection/1".into(),
            name: name.into(),
            four_graph: FourGraphFile::from_four_graph(name, fg),
            norm_sq: norm_sq.to_string(),
            base_top: c.weights_top.base.clone(),
            base_bottom: c.weights_bottom.base.clone(),
            note: String::new(),
            blocks,
        }
    }
}

// ---------------------------------------------------------------------------
// edge maps and gauges (raw form; interpretation lives with the model)

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct EdgeMapEntry {
    pub side: String,
    /// source edge word
    pub edge: String,
    /// `[coefficient, target path]`
    pub terms: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct EdgeMapFile {
    pub format: String,
    pub name: String,
    pub status: String,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub note: String,
    pub entries: Vec<EdgeMapEntry>,
    /// coefficient given to unlisted edges between distinct vertices with a
    /// unique target path
    #[serde(default)]
    pub simple_edges: Option<String>,
    #[serde(default)]
    pub changes: Vec<BTreeMap<String, serde_json::Value>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct GaugeBlockFile {
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct GaugeFile {
    pub format: String,
    pub name: String,
    pub status: String,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub note: String,
    /// value -> list of `u-v` vertex pairs carrying a 1×1 block
    pub singletons: BTreeMap<String, Vec<String>>,
    pub blocks: Vec<GaugeBlockFile>,
    #[serde(default)]
    pub changes: Vec<BTreeMap<String, serde_json::Value>>,
}

impl GaugeFile {
    /// Matrix census: size -> number of blocks (singletons count as 1×1).
    pub fn census(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        let singles: usize = self.singletons.values().map(|v| v.len()).sum();
        if singles > 0 {
            out.insert(1, singles);
        }
        for b in &self.blocks {
            *out.entry(b.rows.len()).or_insert(0) += 1;
        }
        out
    }

    pub fn block_count(&self) -> usize {
        self.census().values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_asset_matches_its_digest() {
        let cat = Catalog::embedded();
        for e in &cat.manifest.assets {
            cat.text(&e.name).unwrap();
        }
    }

    #[test]
    fn tampering_is_detected() {
        let mut cat = Catalog::embedded();
        let path = cat.entry("ahp1.kappa.connection").unwrap().path.clone();
        cat.contents.get_mut(&path).unwrap().push(' ');
        assert!(matches!(cat.text("ahp1.kappa.connection"), Err(AssetError::Digest { .. })));
    }

    #[test]
    fn appendix_census() {
        let g = Catalog::embedded().gauge("ahp1.appendixA.gauge").unwrap();
        assert_eq!(g.singletons["1"].len(), 10);
        assert_eq!(g.singletons["-1"].len(), 15);
        let census: Vec<(usize, usize)> = g.census().into_iter().collect();
        assert_eq!(census, vec![(1, 25), (2, 14), (3, 10), (4, 3), (5, 1)]);
    }
}
