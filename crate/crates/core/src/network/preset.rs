use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Edge;
use crate::error::{Error, Result};

const MAX_RANDOM_ATTEMPTS: u64 = 256;

/// Topology family of a generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphKind {
    Complete,
    Path,
    Cycle,
    Star,
    ErdosRenyi { p: f64, seed: u64 },
    /// Edges (and node count) taken from another network document.
    FromFile { path: String },
}

/// Edge weights: one value for every edge, or uniform draws from a range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Uniform(f64),
    Range { min: f64, max: f64, seed: u64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Uniform(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPreset {
    #[serde(flatten)]
    pub kind: GraphKind,
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub weight: WeightSpec,
}

impl GraphPreset {
    pub fn new(kind: GraphKind, n: usize, weight: WeightSpec) -> Self {
        Self { kind, n, weight }
    }

    pub fn complete(n: usize, weight: f64) -> Self {
        Self::new(GraphKind::Complete, n, WeightSpec::Uniform(weight))
    }

    pub fn path(n: usize, weight: f64) -> Self {
        Self::new(GraphKind::Path, n, WeightSpec::Uniform(weight))
    }

    pub fn cycle(n: usize, weight: f64) -> Self {
        Self::new(GraphKind::Cycle, n, WeightSpec::Uniform(weight))
    }

    pub fn star(n: usize, weight: f64) -> Self {
        Self::new(GraphKind::Star, n, WeightSpec::Uniform(weight))
    }

    /// Connected Erdős–Rényi graph with weights drawn from `[w_min, w_max]`.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64, w_min: f64, w_max: f64) -> Self {
        Self::new(
            GraphKind::ErdosRenyi { p, seed },
            n,
            WeightSpec::Range { min: w_min, max: w_max, seed: seed ^ 0x9E37_79B9_7F4A_7C15 },
        )
    }

    /// Node count and edge list. Random graphs are redrawn (deterministically
    /// from the seed) until connected.
    pub fn generate(&self) -> Result<(usize, Vec<Edge>)> {
        let n = self.n;
        let pairs: Vec<(usize, usize)> = match &self.kind {
            GraphKind::FromFile { path } => {
                let spec = super::parse_network(std::path::Path::new(path))?;
                return Ok((spec.n(), spec.edges().to_vec()));
            }
            GraphKind::Complete => {
                require_nodes(n, 2, "complete")?;
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
            }
            GraphKind::Path => {
                require_nodes(n, 2, "path")?;
                (0..n - 1).map(|i| (i, i + 1)).collect()
            }
            GraphKind::Cycle => {
                require_nodes(n, 3, "cycle")?;
                (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect()
            }
            GraphKind::Star => {
                require_nodes(n, 2, "star")?;
                (1..n).map(|j| (0, j)).collect()
            }
            GraphKind::ErdosRenyi { p, seed } => {
                require_nodes(n, 2, "erdos-renyi")?;
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(Error::Validation(format!("erdos-renyi p must be in (0, 1], got {p}")));
                }
                erdos_renyi_pairs(n, *p, *seed)?
            }
        };
        let weights = self.weights(pairs.len())?;
        Ok((n, pairs.into_iter().zip(weights).map(|((i, j), b)| Edge::new(i, j, b)).collect()))
    }

    fn weights(&self, count: usize) -> Result<Vec<f64>> {
        match self.weight {
            WeightSpec::Uniform(b) => Ok(vec![b; count]),
            WeightSpec::Range { min, max, seed } => {
                if !(min > 0.0 && max >= min && max.is_finite()) {
                    return Err(Error::Validation(format!("weight range [{min}, {max}] is invalid")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..count)
                    .map(|_| if max > min { rng.gen_range(min..max) } else { min })
                    .collect())
            }
        }
    }
}

fn require_nodes(n: usize, min: usize, kind: &str) -> Result<()> {
    if n < min {
        Err(Error::Validation(format!("{kind} preset needs n >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

fn erdos_renyi_pairs(n: usize, p: f64, seed: u64) -> Result<Vec<(usize, usize)>> {
    for attempt in 0..MAX_RANDOM_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        if is_connected(n, &pairs) {
            return Ok(pairs);
        }
    }
    Err(Error::Validation(format!(
        "no connected erdos-renyi graph (n = {n}, p = {p}) within {MAX_RANDOM_ATTEMPTS} draws"
    )))
}

fn is_connected(n: usize, pairs: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}
