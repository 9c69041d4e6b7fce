//! Linearized swing dynamics in state-space form, the decoupled modal
//! subsystems, and frequency-response evaluation.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::network::{build_incidence, build_laplacian, spectrum, NetworkSpec};

/// Performance output of the swing dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OutputKind {
    /// `y = L^{1/2} theta`
    PhaseCohesiveness,
    /// `y = diag(b)^{1/2} B^T theta`, one row per edge
    EdgePhase,
    /// `y = theta_dot`
    Frequency,
    /// `y = [L^{1/2} theta; kappa theta_dot]`
    Combined { kappa: f64 },
}

impl OutputKind {
    pub fn name(&self) -> &'static str {
        match self {
            OutputKind::PhaseCohesiveness => "phase",
            OutputKind::EdgePhase => "edge-phase",
            OutputKind::Frequency => "frequency",
            OutputKind::Combined { .. } => "combined",
        }
    }

    pub fn is_phase(&self) -> bool {
        matches!(self, OutputKind::PhaseCohesiveness | OutputKind::EdgePhase)
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputKind::Combined { kappa } => write!(f, "combined(kappa={kappa})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for OutputKind {
    type Err = Error;

    /// Accepts `phase`, `edge-phase`, `frequency`, `combined` (kappa = 1) and
    /// `combined:<kappa>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase" | "phase-cohesiveness" => Ok(OutputKind::PhaseCohesiveness),
            "edge-phase" | "edge" => Ok(OutputKind::EdgePhase),
            "frequency" | "freq" => Ok(OutputKind::Frequency),
            "combined" => Ok(OutputKind::Combined { kappa: 1.0 }),
            other => {
                if let Some(k) = other.strip_prefix("combined:") {
                    let kappa: f64 = k
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad kappa in `{other}`")))?;
                    ensure_positive("kappa", kappa)?;
                    Ok(OutputKind::Combined { kappa })
                } else {
                    Err(Error::InvalidArgument(format!("unknown output kind `{other}`")))
                }
            }
        }
    }
}

/// Where the stiffness matrix came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelOrigin {
    Network(NetworkSpec),
    /// Single machine against an infinite bus with susceptance `b`.
    Smib { b: f64 },
}

/// Swing dynamics `M theta'' + D theta' + K theta = w` with its spectral data.
///
/// For a network `K` is the Laplacian (one zero eigenvalue); for the SMIB
/// case `K = [B]`.
#[derive(Debug, Clone)]
pub struct SwingModel {
    inertia: f64,
    damping: f64,
    eigenvalues: Vec<f64>,
    basis: DMatrix<f64>,
    stiffness: DMatrix<f64>,
    sqrt_stiffness: DMatrix<f64>,
    edge_output: DMatrix<f64>,
    origin: ModelOrigin,
}

impl SwingModel {
    pub fn from_network(spec: &NetworkSpec) -> Result<Self> {
        let l = build_laplacian(spec);
        let s = spectrum(&l)?;
        let (inc, w) = build_incidence(spec);
        let edge_output = DMatrix::from_diagonal(&w.map(f64::sqrt)) * inc.transpose();
        Ok(Self {
            inertia: spec.inertia(),
            damping: spec.damping(),
            sqrt_stiffness: s.sqrt_matrix(),
            eigenvalues: s.eigenvalues().to_vec(),
            basis: s.basis().clone(),
            stiffness: l,
            edge_output,
            origin: ModelOrigin::Network(spec.clone()),
        })
    }

    pub fn smib(inertia: f64, damping: f64, b: f64) -> Result<Self> {
        ensure_positive("inertia", inertia)?;
        ensure_positive("damping", damping)?;
        ensure_positive("B", b)?;
        Ok(Self {
            inertia,
            damping,
            eigenvalues: vec![b],
            basis: DMatrix::identity(1, 1),
            stiffness: DMatrix::from_element(1, 1, b),
            sqrt_stiffness: DMatrix::from_element(1, 1, b.sqrt()),
            edge_output: DMatrix::from_element(1, 1, b.sqrt()),
            origin: ModelOrigin::Smib { b },
        })
    }

    /// Same network with new inertia and damping; spectral data is reused.
    pub fn with_params(&self, inertia: f64, damping: f64) -> Result<Self> {
        ensure_positive("inertia", inertia)?;
        ensure_positive("damping", damping)?;
        let origin = match &self.origin {
            ModelOrigin::Network(spec) => ModelOrigin::Network(spec.with_params(inertia, damping)?),
            smib => smib.clone(),
        };
        Ok(Self { inertia, damping, origin, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    pub fn origin(&self) -> &ModelOrigin {
        &self.origin
    }

    /// `kappa` stored on the network spec (1 for SMIB).
    pub fn kappa(&self) -> f64 {
        match &self.origin {
            ModelOrigin::Network(spec) => spec.kappa(),
            ModelOrigin::Smib { .. } => 1.0,
        }
    }

    pub fn is_smib(&self) -> bool {
        matches!(self.origin, ModelOrigin::Smib { .. })
    }

    /// Smallest nonzero stiffness eigenvalue: `lambda_2` for a network, `B`
    /// for SMIB.
    pub fn governing_lambda(&self) -> f64 {
        self.eigenvalues.iter().copied().find(|&l| l > 0.0).expect("at least one nonzero mode")
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Dense `(A, F, C)` realization. Keeps the spectral projector onto the
/// kernel of `A` so the frequency response stays evaluable at `omega = 0`
/// when the marginal mode cancels.
#[derive(Debug, Clone)]
pub struct SwingStateSpace {
    a: DMatrix<f64>,
    f: DMatrix<f64>,
    c: DMatrix<f64>,
    output: OutputKind,
    kernel_projector: Option<DMatrix<f64>>,
    marginal_cancels: bool,
}

impl SwingStateSpace {
    pub fn new(a: DMatrix<f64>, f: DMatrix<f64>, c: DMatrix<f64>, output: OutputKind) -> Result<Self> {
        let nx = a.nrows();
        if a.ncols() != nx {
            return Err(Error::DimensionMismatch { expected: nx, got: a.ncols() });
        }
        if f.nrows() != nx {
            return Err(Error::DimensionMismatch { expected: nx, got: f.nrows() });
        }
        if c.ncols() != nx {
            return Err(Error::DimensionMismatch { expected: nx, got: c.ncols() });
        }
        let kernel_projector = kernel_projector(&a);
        let marginal_cancels = match &kernel_projector {
            None => true,
            Some(p) => {
                let scale = c.amax().max(1.0) * f.amax().max(1.0);
                (&c * p * &f).amax() <= 1e-10 * scale
            }
        };
        Ok(Self { a, f, c, output, kernel_projector, marginal_cancels })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn output(&self) -> OutputKind {
        self.output
    }

    pub fn inputs(&self) -> usize {
        self.f.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    /// A state matrix with the same transfer function and no eigenvalue at
    /// the origin: `A - P` when the marginal mode cancels, `A` when there is
    /// none. `None` if the marginal mode reaches the output.
    pub fn deflated_a(&self) -> Option<DMatrix<f64>> {
        match (&self.kernel_projector, self.marginal_cancels) {
            (None, _) => Some(self.a.clone()),
            (Some(p), true) => Some(&self.a - p),
            (Some(_), false) => None,
        }
    }

    /// Frequency response `C (jw I - A)^{-1} F`.
    pub fn frequency_response(&self, omega: f64) -> Result<DMatrix<Complex64>> {
        let nx = self.a.nrows();
        let jw = Complex64::new(0.0, omega);
        let mut m: DMatrix<Complex64> = self.a.map(|v| Complex64::new(-v, 0.0));
        match (&self.kernel_projector, self.marginal_cancels) {
            // C P F = 0: G(s) = C (sI - A + P)^{-1} F for every s.
            (Some(p), true) => m += p.map(|v| Complex64::new(v, 0.0)),
            (Some(_), false) if omega == 0.0 => return Err(Error::SingularResolvent { omega }),
            _ => {}
        }
        for k in 0..nx {
            m[(k, k)] += jw;
        }
        let rhs = self.f.map(|v| Complex64::new(v, 0.0));
        let x = m.lu().solve(&rhs).ok_or(Error::SingularResolvent { omega })?;
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularResolvent { omega });
        }
        Ok(self.c.map(|v| Complex64::new(v, 0.0)) * x)
    }
}

/// `P = V (W^T V)^{-1} W^T` from numerically null right/left singular vectors.
fn kernel_projector(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref()?;
    let v_t = svd.v_t.as_ref()?;
    let smax = svd.singular_values.max();
    let tol = 1e-9 * smax.max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] <= tol).collect();
    if null.is_empty() {
        return None;
    }
    let right = DMatrix::from_columns(&null.iter().map(|&k| v_t.row(k).transpose()).collect::<Vec<_>>());
    let left = DMatrix::from_columns(&null.iter().map(|&k| u.column(k).into_owned()).collect::<Vec<_>>());
    let inner = (left.transpose() * &right).try_inverse()?;
    Some(&right * inner * left.transpose())
}

/// Assembles `(A, F, C)` of the swing dynamics for the chosen output.
pub fn assemble(model: &SwingModel, output: OutputKind) -> Result<SwingStateSpace> {
    let n = model.n();
    let m = model.inertia();
    let d = model.damping();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).copy_from(&(model.stiffness() * (-1.0 / m)));
    a.view_mut((n, n), (n, n)).fill_diagonal(-d / m);

    let mut f = DMatrix::zeros(2 * n, n);
    f.view_mut((n, 0), (n, n)).fill_diagonal(1.0 / m);

    let c = match output {
        OutputKind::PhaseCohesiveness => {
            let mut c = DMatrix::zeros(n, 2 * n);
            c.view_mut((0, 0), (n, n)).copy_from(&model.sqrt_stiffness);
            c
        }
        OutputKind::EdgePhase => {
            let rows = model.edge_output.nrows();
            let mut c = DMatrix::zeros(rows, 2 * n);
            c.view_mut((0, 0), (rows, n)).copy_from(&model.edge_output);
            c
        }
        OutputKind::Frequency => {
            let mut c = DMatrix::zeros(n, 2 * n);
            c.view_mut((0, n), (n, n)).fill_with_identity();
            c
        }
        OutputKind::Combined { kappa } => {
            ensure_positive("kappa", kappa)?;
            let mut c = DMatrix::zeros(2 * n, 2 * n);
            c.view_mut((0, 0), (n, n)).copy_from(&model.sqrt_stiffness);
            c.view_mut((n, n), (n, n)).fill_diagonal(kappa);
            c
        }
    };
    SwingStateSpace::new(a, f, c, output)
}

/// One decoupled mode `G_i(s) = [g_phase; g_freq s] / (M s^2 + D s + lambda_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModalSubsystem {
    pub index: usize,
    pub lambda: f64,
    pub inertia: f64,
    pub damping: f64,
    /// `sqrt(lambda_i)` for phase outputs, else 0.
    pub phase_gain: f64,
    /// 1 (frequency), `kappa` (combined) or 0.
    pub frequency_gain: f64,
}

impl ModalSubsystem {
    pub fn denominator(&self, s: Complex64) -> Complex64 {
        s * s * self.inertia + s * self.damping + self.lambda
    }

    /// The zero-eigenvalue mode reduces to the first-order `1/(M s + D)` for
    /// its frequency channel.
    pub fn is_marginal(&self) -> bool {
        self.lambda == 0.0
    }

    /// `(phase channel, frequency channel)` at `s`.
    pub fn transfer(&self, s: Complex64) -> (Complex64, Complex64) {
        if self.is_marginal() {
            let freq = self.frequency_gain / (s * self.inertia + self.damping);
            let phase = if self.phase_gain == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                self.phase_gain / self.denominator(s)
            };
            (phase, freq)
        } else {
            let den = self.denominator(s);
            (self.phase_gain / den, s * self.frequency_gain / den)
        }
    }

    /// Largest singular value of the (single-input) mode at `omega`.
    pub fn magnitude(&self, omega: f64) -> f64 {
        let (p, f) = self.transfer(Complex64::new(0.0, omega));
        p.norm().hypot(f.norm())
    }

    /// Undamped natural frequency, or `D/M` for the marginal mode.
    pub fn characteristic_frequency(&self) -> f64 {
        if self.lambda > 0.0 {
            (self.lambda / self.inertia).sqrt()
        } else {
            self.damping / self.inertia
        }
    }
}

/// Splits the dynamics into `n` scalar second-order subsystems in
/// ascending-eigenvalue order.
pub fn modal_decompose(model: &SwingModel, output: OutputKind) -> Vec<ModalSubsystem> {
    model
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(index, &lambda)| {
            let (phase_gain, frequency_gain) = match output {
                OutputKind::PhaseCohesiveness | OutputKind::EdgePhase => (lambda.sqrt(), 0.0),
                OutputKind::Frequency => (0.0, 1.0),
                OutputKind::Combined { kappa } => (lambda.sqrt(), kappa),
            };
            ModalSubsystem {
                index,
                lambda,
                inertia: model.inertia(),
                damping: model.damping(),
                phase_gain,
                frequency_gain,
            }
        })
        .collect()
}

/// Largest singular value of the dense frequency response at `omega`.
pub fn sigma_max(system: &SwingStateSpace, omega: f64) -> Result<f64> {
    let g = system.frequency_response(omega.abs())?;
    Ok(g.singular_values().max())
}

/// Largest singular value via the modal route: `max_i |G_i(j omega)|`.
pub fn sigma_max_modal(modes: &[ModalSubsystem], omega: f64) -> f64 {
    modes.iter().map(|m| m.magnitude(omega.abs())).fold(0.0, f64::max)
}

/// Input/output transform `C <- V C`, `F <- F V^T` for orthogonal `V`.
pub fn transform_io(system: &SwingStateSpace, v: &DMatrix<f64>) -> Result<SwingStateSpace> {
    let p = v.nrows();
    if v.ncols() != p {
        return Err(Error::DimensionMismatch { expected: p, got: v.ncols() });
    }
    if system.outputs() != p {
        return Err(Error::DimensionMismatch { expected: system.outputs(), got: p });
    }
    if system.inputs() != p {
        return Err(Error::DimensionMismatch { expected: system.inputs(), got: p });
    }
    let deviation = (v.transpose() * v - DMatrix::identity(p, p)).amax();
    if deviation > 1e-10 {
        return Err(Error::NotOrthogonal { deviation });
    }
    SwingStateSpace::new(system.a.clone(), &system.f * v.transpose(), v * &system.c, system.output)
}

/// Seeded random orthogonal matrix: QR of a Gaussian matrix with the signs of
/// `R`'s diagonal folded into `Q`.
pub fn random_orthogonal(p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(p, p, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    let signs = DVector::from_fn(p, |k, _| if r[(k, k)] < 0.0 { -1.0 } else { 1.0 });
    for k in 0..p {
        let s = signs[k];
        q.column_mut(k).scale_mut(s);
    }
    q
}
