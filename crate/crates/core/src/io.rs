//! JSON graph files.
//!
//! ```json
//! { "version": 1, "n": 4,
//!   "edges": [[0, 1, 0.2], [1, 2, 0.05]],
//!   "clusters": [[0, 1], [2, 3]], "r": 1 }
//! ```
//!
//! Edges are unordered pairs listed once. Clusters `0..r` are the source
//! classes, `r..2r` the target classes, and any remaining clusters belong to
//! neither domain. An empty cluster list means the file carries no domain.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{DomainSpec, Normalization, PositivePairGraph, VertexSet};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraphFile {
    version: u64,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    clusters: Vec<Vec<usize>>,
    #[serde(default)]
    r: usize,
}

/// Contents of a graph file.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: PositivePairGraph,
    pub domain: Option<DomainSpec>,
}

impl GraphFile {
    pub fn domain(&self) -> Result<&DomainSpec> {
        self.domain
            .as_ref()
            .ok_or_else(|| Error::SchemaValidation("graph file has no clusters".into()))
    }
}

pub fn from_json_str(text: &str, normalization: Normalization) -> Result<GraphFile> {
    let raw: RawGraphFile = match serde_json::from_str(text) {
        Ok(raw) => raw,
        Err(e) => {
            if let Ok(value) = serde_json::from_str::<serde_json::Value>(text) {
                if let Some(found) = value.get("version").and_then(|v| v.as_u64()) {
                    if found != FORMAT_VERSION {
                        return Err(Error::SchemaVersionMismatch {
                            found,
                            expected: FORMAT_VERSION,
                        });
                    }
                }
            }
            return Err(Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            });
        }
    };
    if raw.version != FORMAT_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found: raw.version,
            expected: FORMAT_VERSION,
        });
    }
    let graph = PositivePairGraph::from_edges(raw.n, &raw.edges, normalization)?;
    let domain = if raw.clusters.is_empty() {
        if raw.r != 0 {
            return Err(Error::SchemaValidation(format!("r = {} but no clusters given", raw.r)));
        }
        None
    } else {
        let clusters = raw.clusters.into_iter().map(VertexSet::new).collect();
        Some(DomainSpec::new(raw.n, clusters, raw.r).map_err(|e| Error::SchemaValidation(e.to_string()))?)
    };
    Ok(GraphFile { graph, domain })
}

/// Serializes with one edge per line; floats use the shortest round-trip form.
pub fn to_json_string(graph: &PositivePairGraph, domain: Option<&DomainSpec>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{{");
    let _ = writeln!(s, "  \"version\": {FORMAT_VERSION},");
    let _ = writeln!(s, "  \"n\": {},", graph.n());
    let edges = graph.edges();
    if edges.is_empty() {
        let _ = writeln!(s, "  \"edges\": [],");
    } else {
        let _ = writeln!(s, "  \"edges\": [");
        for (idx, (x, y, w)) in edges.iter().enumerate() {
            let sep = if idx + 1 == edges.len() { "" } else { "," };
            let w = serde_json::to_string(w).expect("finite weight");
            let _ = writeln!(s, "    [{x}, {y}, {w}]{sep}");
        }
        let _ = writeln!(s, "  ],");
    }
    let (clusters, r) = match domain {
        Some(d) => (d.clusters().to_vec(), d.r()),
        None => (Vec::new(), 0),
    };
    let cluster_text: Vec<String> = clusters
        .iter()
        .map(|c| {
            let items: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            format!("[{}]", items.join(", "))
        })
        .collect();
    if cluster_text.is_empty() {
        let _ = writeln!(s, "  \"clusters\": [],");
    } else {
        let _ = writeln!(s, "  \"clusters\": [\n    {}\n  ],", cluster_text.join(",\n    "));
    }
    let _ = writeln!(s, "  \"r\": {r}");
    s.push_str("}\n");
    s
}

pub fn load_graph(path: impl AsRef<Path>, normalization: Normalization) -> Result<GraphFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json_str(&text, normalization)
}

pub fn save_graph(graph: &PositivePairGraph, domain: Option<&DomainSpec>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json_string(graph, domain)).map_err(|e| Error::io(path, e))
}
