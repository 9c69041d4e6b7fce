//! Graph-theoretic inputs: network specs, Laplacian, incidence matrix and
//! the sorted Laplacian spectrum everything downstream is built on.

mod json;
mod preset;

pub use json::{emit_network, parse_network, parse_network_str, spec_hash, NetworkDocument};
pub use preset::{GraphKind, GraphPreset, WeightSpec};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Relative factor applied to the largest eigenvalue to obtain the default
/// connectivity tolerance.
pub const DEFAULT_CONNECTIVITY_REL_TOL: f64 = 1e-9;

/// Undirected edge with susceptance `b` (per-unit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub b: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, b: f64) -> Self {
        Self { i, j, b }
    }

    /// Endpoints ordered as (low, high).
    pub fn ordered(&self) -> (usize, usize) {
        (self.i.min(self.j), self.i.max(self.j))
    }
}

/// A validated network with homogeneous inertia and damping.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    n: usize,
    edges: Vec<Edge>,
    inertia: f64,
    damping: f64,
    kappa: f64,
}

impl NetworkSpec {
    /// Builds and validates a spec with `kappa = 1`.
    pub fn new(n: usize, edges: Vec<Edge>, inertia: f64, damping: f64) -> Result<Self> {
        Self::with_kappa(n, edges, inertia, damping, 1.0)
    }

    pub fn with_kappa(
        n: usize,
        edges: Vec<Edge>,
        inertia: f64,
        damping: f64,
        kappa: f64,
    ) -> Result<Self> {
        let spec = Self { n, edges, inertia, damping, kappa };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation(format!(
                "network needs at least 2 nodes, got {} (use the SMIB model for a single machine)",
                self.n
            )));
        }
        ensure_positive("inertia", self.inertia)?;
        ensure_positive("damping", self.damping)?;
        ensure_positive("kappa", self.kappa)?;
        if self.edges.is_empty() {
            return Err(Error::DisconnectedGraph { lambda2: 0.0, tol: 0.0 });
        }
        let mut seen = std::collections::BTreeSet::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.i >= self.n || e.j >= self.n {
                return Err(Error::Validation(format!(
                    "edge {k} ({}, {}) has a node index outside 0..{}",
                    e.i, e.j, self.n
                )));
            }
            if e.i == e.j {
                return Err(Error::Validation(format!("edge {k} ({}, {}) is a self-loop", e.i, e.j)));
            }
            if !(e.b.is_finite() && e.b > 0.0) {
                return Err(Error::Validation(format!(
                    "edge {k} ({}, {}) has non-positive susceptance b = {}",
                    e.i, e.j, e.b
                )));
            }
            if !seen.insert(e.ordered()) {
                return Err(Error::Validation(format!(
                    "edge {k} ({}, {}) duplicates an earlier edge",
                    e.i, e.j
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Same topology with different machine parameters.
    pub fn with_params(&self, inertia: f64, damping: f64) -> Result<Self> {
        Self::with_kappa(self.n, self.edges.clone(), inertia, damping, self.kappa)
    }

    pub fn total_susceptance(&self) -> f64 {
        self.edges.iter().map(|e| e.b).sum()
    }
}

/// Weighted Laplacian `L = D - A`.
pub fn build_laplacian(spec: &NetworkSpec) -> DMatrix<f64> {
    let n = spec.n();
    let mut l = DMatrix::zeros(n, n);
    for e in spec.edges() {
        l[(e.i, e.j)] -= e.b;
        l[(e.j, e.i)] -= e.b;
        l[(e.i, e.i)] += e.b;
        l[(e.j, e.j)] += e.b;
    }
    l
}

/// Incidence matrix (one column per edge, lower node index `+1`) and the
/// edge weights, so that `B diag(w) B^T = L`.
pub fn build_incidence(spec: &NetworkSpec) -> (DMatrix<f64>, DVector<f64>) {
    let n = spec.n();
    let m = spec.edges().len();
    let mut inc = DMatrix::zeros(n, m);
    let mut w = DVector::zeros(m);
    for (k, e) in spec.edges().iter().enumerate() {
        let (lo, hi) = e.ordered();
        inc[(lo, k)] = 1.0;
        inc[(hi, k)] = -1.0;
        w[k] = e.b;
    }
    (inc, w)
}

/// Sorted Laplacian eigenvalues with an orthonormal eigenvector basis.
///
/// `eigenvalues[0]` is exactly zero and the first basis column is the
/// positive normalized all-ones direction.
#[derive(Debug, Clone)]
pub struct LaplacianSpectrum {
    eigenvalues: Vec<f64>,
    basis: DMatrix<f64>,
    connectivity_tol: f64,
}

impl LaplacianSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn connectivity_tol(&self) -> f64 {
        self.connectivity_tol
    }

    /// Algebraic connectivity.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `V diag(sqrt(lambda)) V^T`.
    pub fn sqrt_matrix(&self) -> DMatrix<f64> {
        let roots = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()),
        );
        &self.basis * DMatrix::from_diagonal(&roots) * self.basis.transpose()
    }
}

/// Eigendecomposition of a Laplacian with the default relative connectivity
/// tolerance (`1e-9 * lambda_max`).
pub fn spectrum(l: &DMatrix<f64>) -> Result<LaplacianSpectrum> {
    spectrum_with_tol(l, None)
}

/// Eigendecomposition of a Laplacian. `connectivity_tol` is absolute; `None`
/// selects `1e-9 * lambda_max`.
pub fn spectrum_with_tol(l: &DMatrix<f64>, connectivity_tol: Option<f64>) -> Result<LaplacianSpectrum> {
    let n = l.nrows();
    if n != l.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: l.ncols() });
    }
    if n < 2 {
        return Err(Error::Validation("Laplacian must be at least 2x2".into()));
    }
    let scale = l.amax().max(f64::MIN_POSITIVE);
    let asym = (l - l.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Validation(format!("Laplacian is not symmetric (max asymmetry {asym:.3e})")));
    }

    let eig = SymmetricEigen::new(l.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }

    let lambda_max = eigenvalues[n - 1];
    let tol = connectivity_tol.unwrap_or(DEFAULT_CONNECTIVITY_REL_TOL * lambda_max.abs());
    if eigenvalues[0].abs() >= tol.max(f64::MIN_POSITIVE) {
        return Err(Error::Validation(format!(
            "smallest eigenvalue {:.3e} is not zero; matrix is not a Laplacian",
            eigenvalues[0]
        )));
    }
    if eigenvalues[1] <= tol {
        return Err(Error::DisconnectedGraph { lambda2: eigenvalues[1], tol });
    }
    eigenvalues[0] = 0.0;

    // The null vector is unique for a connected graph; fix its sign.
    if basis.column(0).sum() < 0.0 {
        basis.column_mut(0).neg_mut();
    }

    Ok(LaplacianSpectrum { eigenvalues, basis, connectivity_tol: tol })
}
