use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{build_laplacian, spectrum, Edge, GraphPreset, NetworkSpec};
use crate::error::{Error, Result};

/// On-disk network description: explicit edges or a preset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Edge>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<GraphPreset>,
    pub inertia: f64,
    pub damping: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

impl NetworkDocument {
    /// Resolves presets and validates. Does not check connectivity.
    pub fn into_spec(self) -> Result<NetworkSpec> {
        let (n, edges) = match (self.preset, self.n, self.edges) {
            (Some(preset), None, None) => preset.generate()?,
            (None, Some(n), Some(edges)) => (n, edges),
            (Some(_), _, _) => {
                return Err(parse_err("preset", "`preset` cannot be combined with `n`/`edges`"));
            }
            (None, None, _) => return Err(parse_err("n", "missing field `n` (or `preset`)")),
            (None, _, None) => return Err(parse_err("edges", "missing field `edges` (or `preset`)")),
        };
        NetworkSpec::with_kappa(n, edges, self.inertia, self.damping, self.kappa.unwrap_or(1.0))
    }
}

fn parse_err(location: &str, message: &str) -> Error {
    Error::Parse { location: location.to_string(), message: message.to_string() }
}

/// Parses a network document from a JSON string and checks connectivity.
pub fn parse_network_str(text: &str) -> Result<NetworkSpec> {
    let doc: NetworkDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let spec = doc.into_spec()?;
    // eager connectivity check; the error carries the lambda_2 estimate
    spectrum(&build_laplacian(&spec))?;
    Ok(spec)
}

/// Reads and parses a network file.
pub fn parse_network(path: &Path) -> Result<NetworkSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_network_str(&text)
}

/// Serializes a spec with explicit edges.
pub fn emit_network(spec: &NetworkSpec) -> String {
    let doc = NetworkDocument {
        n: Some(spec.n()),
        edges: Some(spec.edges().to_vec()),
        preset: None,
        inertia: spec.inertia(),
        damping: spec.damping(),
        kappa: Some(spec.kappa()),
    };
    serde_json::to_string(&doc).expect("network document serializes")
}

/// SHA-256 over a canonical form: edges as sorted (low, high) pairs and all
/// floats by bit pattern.
pub fn spec_hash(spec: &NetworkSpec) -> String {
    let mut edges: Vec<(usize, usize, u64)> = spec
        .edges()
        .iter()
        .map(|e| {
            let (lo, hi) = e.ordered();
            (lo, hi, e.b.to_bits())
        })
        .collect();
    edges.sort_unstable();
    let mut h = Sha256::new();
    h.update(format!(
        "n={};M={:016x};D={:016x};k={:016x};",
        spec.n(),
        spec.inertia().to_bits(),
        spec.damping().to_bits(),
        spec.kappa().to_bits()
    ));
    for (lo, hi, b) in edges {
        h.update(format!("{lo},{hi},{b:016x};"));
    }
    hex::encode(h.finalize())
}
