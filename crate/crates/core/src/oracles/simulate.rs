use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::propagate::transition_matrix;
use crate::closed_form::mode_poles;
use crate::error::{Error, Result};
use crate::system::{assemble, OutputKind, SwingModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputDirection {
    /// Unit vector on one input channel.
    Channel(usize),
    Vector(Vec<f64>),
}

impl InputDirection {
    fn resolve(&self, n: usize) -> Result<DVector<f64>> {
        match self {
            InputDirection::Channel(k) if *k < n => Ok(DVector::from_fn(n, |i, _| if i == *k { 1.0 } else { 0.0 })),
            InputDirection::Channel(k) => Err(Error::InvalidArgument(format!("input channel {k} out of range 0..{n}"))),
            InputDirection::Vector(v) if v.len() == n => Ok(DVector::from_column_slice(v)),
            InputDirection::Vector(v) => Err(Error::DimensionMismatch { expected: n, got: v.len() }),
        }
    }
}

/// Disturbance signal `w(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Disturbance {
    Zero,
    Impulse { direction: InputDirection },
    Step { direction: InputDirection, amplitude: f64 },
    /// `amplitude * cos(omega t)` along `direction`.
    Sinusoid { direction: InputDirection, omega: f64, amplitude: f64 },
    /// Zero-order-hold Gaussian noise with per-step variance `sigma^2 / dt` on
    /// every channel. Approximate; intended for qualitative checks only.
    WhiteNoise { seed: u64, sigma: f64 },
}

/// Sampled output trajectory; `outputs[k]` is `y(time[k])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub time: Vec<f64>,
    pub outputs: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn output_dim(&self) -> usize {
        self.outputs.first().map_or(0, Vec::len)
    }

    /// Euclidean norm of each output sample.
    pub fn norms(&self) -> Vec<f64> {
        self.outputs.iter().map(|y| y.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    }
}

/// Exact zero-order-hold input matrix `int_0^dt exp(A s) ds F` for one mode.
fn zoh_input(a: f64, b: f64, inertia: f64, dt: f64) -> Vector2<f64> {
    let aug = Matrix3::new(0.0, 1.0, 0.0, -a, -b, 1.0 / inertia, 0.0, 0.0, 0.0) * dt;
    let e = aug.exp();
    Vector2::new(e[(0, 2)], e[(1, 2)])
}

/// Upper bound on stored samples per trajectory.
pub const MAX_STEPS: usize = 20_000_000;

/// Simulates the swing dynamics from rest on the modal subsystems, each with
/// its exact transition matrix, and maps back to the chosen output.
pub fn simulate(
    model: &SwingModel,
    output: OutputKind,
    disturbance: &Disturbance,
    dt: f64,
    horizon: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && horizon >= dt && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < dt <= horizon, got dt={dt}, horizon={horizon}")));
    }
    let n = model.n();
    let (m, d) = (model.inertia(), model.damping());
    let fastest = model
        .eigenvalues()
        .iter()
        .map(|&l| {
            let (s1, s2) = mode_poles(m, d, l);
            s1.norm().max(s2.norm())
        })
        .fold(0.0, f64::max);
    if dt * fastest >= 0.1 {
        return Err(Error::StepTooCoarse { product: dt * fastest });
    }

    let steps = (horizon / dt).round();
    if steps > MAX_STEPS as f64 {
        return Err(Error::InvalidArgument(format!(
            "horizon / dt = {steps:.3e} exceeds the {MAX_STEPS} step limit"
        )));
    }
    let steps = steps as usize;
    let basis = model.basis();
    let c = assemble(model, output)?.c().clone();
    // y = C blockdiag(V, V) x_modal
    let mut lift = DMatrix::zeros(2 * n, 2 * n);
    lift.view_mut((0, 0), (n, n)).copy_from(basis);
    lift.view_mut((n, n), (n, n)).copy_from(basis);
    let readout = &c * lift;

    let coeffs: Vec<(f64, f64)> = model.eigenvalues().iter().map(|&l| (l / m, d / m)).collect();
    let phis: Vec<Matrix2<f64>> = coeffs.iter().map(|&(a, b)| transition_matrix(a, b, dt)).collect();

    let mut states = vec![Vector2::zeros(); n];
    let mut time = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut record = |k: usize, states: &[Vector2<f64>]| {
        let x = DVector::from_fn(2 * n, |r, _| if r < n { states[r][0] } else { states[r - n][1] });
        time.push(k as f64 * dt);
        outputs.push((&readout * x).iter().copied().collect::<Vec<f64>>());
    };

    match disturbance {
        Disturbance::Zero => {
            for k in 0..=steps {
                record(k, &states);
            }
        }
        Disturbance::Impulse { direction } => {
            let beta = basis.transpose() * direction.resolve(n)?;
            for (i, x) in states.iter_mut().enumerate() {
                *x = Vector2::new(0.0, beta[i] / m);
            }
            for k in 0..=steps {
                record(k, &states);
                for (x, phi) in states.iter_mut().zip(&phis) {
                    *x = phi * *x;
                }
            }
        }
        Disturbance::Step { direction, amplitude } => {
            let beta = basis.transpose() * direction.resolve(n)? * *amplitude;
            let gammas: Vec<Vector2<f64>> = coeffs.iter().map(|&(a, b)| zoh_input(a, b, m, dt)).collect();
            for k in 0..=steps {
                record(k, &states);
                for i in 0..n {
                    states[i] = phis[i] * states[i] + gammas[i] * beta[i];
                }
            }
        }
        Disturbance::Sinusoid { direction, omega, amplitude } => {
            if *omega == 0.0 {
                let step = Disturbance::Step { direction: direction.clone(), amplitude: *amplitude };
                return simulate(model, output, &step, dt, horizon);
            }
            let beta = basis.transpose() * direction.resolve(n)? * *amplitude;
            // particular solution Re(X e^{j w t}), X = (jw I - A_i)^{-1} F_i beta_i
            let jw = Complex64::new(0.0, *omega);
            let particular: Vec<[Complex64; 2]> = coeffs
                .iter()
                .zip(beta.iter())
                .map(|(&(a, b), &bi)| {
                    let den = jw * jw + jw * b + a;
                    let x1 = bi / m / den;
                    [x1, jw * x1]
                })
                .collect();
            let mut homogeneous: Vec<Vector2<f64>> =
                particular.iter().map(|x| Vector2::new(-x[0].re, -x[1].re)).collect();
            for k in 0..=steps {
                let phase = Complex64::from_polar(1.0, omega * k as f64 * dt);
                for i in 0..n {
                    let p = &particular[i];
                    states[i] = homogeneous[i] + Vector2::new((p[0] * phase).re, (p[1] * phase).re);
                }
                record(k, &states);
                for (h, phi) in homogeneous.iter_mut().zip(&phis) {
                    *h = phi * *h;
                }
            }
        }
        Disturbance::WhiteNoise { seed, sigma } => {
            if !(sigma.is_finite() && *sigma >= 0.0) {
                return Err(Error::InvalidArgument(format!("noise sigma must be non-negative, got {sigma}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let normal = Normal::new(0.0, sigma / dt.sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let gammas: Vec<Vector2<f64>> = coeffs.iter().map(|&(a, b)| zoh_input(a, b, m, dt)).collect();
            for k in 0..=steps {
                record(k, &states);
                let w = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
                let beta = basis.transpose() * w;
                for i in 0..n {
                    states[i] = phis[i] * states[i] + gammas[i] * beta[i];
                }
            }
        }
    }
    Ok(Trajectory { time, outputs })
}

/// Eigenvector of the given mode: the worst-case input direction for the
/// outputs built from `L^{1/2}` and `theta_dot`.
pub fn worst_direction(model: &SwingModel, mode: usize) -> Vec<f64> {
    model.basis().column(mode).iter().copied().collect()
}

/// Steady-state amplitude ratio `max ||y|| / ||w||` for a sinusoid, measured
/// over the final quarter of the horizon.
pub fn sinusoid_gain(
    model: &SwingModel,
    output: OutputKind,
    direction: &[f64],
    omega: f64,
    dt: f64,
    horizon: f64,
) -> Result<f64> {
    if omega > 0.0 && horizon / 8.0 < 2.0 * std::f64::consts::PI / omega {
        return Err(Error::HorizonTooShort(format!(
            "horizon {horizon} does not hold two periods of omega = {omega} in each half of its last quarter"
        )));
    }
    let input_norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let disturbance = Disturbance::Sinusoid {
        direction: InputDirection::Vector(direction.to_vec()),
        omega,
        amplitude: 1.0,
    };
    let traj = simulate(model, output, &disturbance, dt, horizon)?;
    let norms = traj.norms();
    let len = norms.len();
    let q = 3 * len / 4;
    let mid = (q + len) / 2;
    let a1 = norms[q..mid].iter().copied().fold(0.0, f64::max);
    let a2 = norms[mid..].iter().copied().fold(0.0, f64::max);
    let amp = a1.max(a2);
    if amp > 0.0 && (a1 - a2).abs() > 0.01 * amp {
        return Err(Error::HorizonTooShort(format!(
            "steady-state amplitude drifts from {a1:.6e} to {a2:.6e} over the last quarter"
        )));
    }
    Ok(amp / input_norm)
}
