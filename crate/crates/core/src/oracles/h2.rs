use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::Serialize;

use super::propagate::transition_matrix;
use crate::closed_form::mode_poles;
use crate::error::{Error, Result};
use crate::system::{modal_decompose, ModalSubsystem, OutputKind, SwingModel};

/// Relative accuracy attributed to the Gramian route.
const GRAMIAN_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramianResult {
    pub h2: f64,
    pub h2_squared: f64,
    /// Per-mode contributions to `h2^2`.
    pub contributions: Vec<f64>,
    /// Modes whose marginal (zero-eigenvalue) state was excluded as
    /// unobservable.
    pub deflated_modes: Vec<usize>,
    /// Absolute tolerance on `h2`.
    pub tolerance: f64,
}

/// H2 norm via `trace(F^T P F)`, with `P` solving `P A + A^T P = -C^T C` mode
/// by mode.
pub fn h2_gramian(model: &SwingModel, output: OutputKind) -> Result<GramianResult> {
    let modes = modal_decompose(model, output);
    let mut contributions = Vec::with_capacity(modes.len());
    let mut deflated_modes = Vec::new();
    for mode in &modes {
        let c = if mode.is_marginal() {
            if mode.phase_gain != 0.0 {
                return Err(Error::ObservableMarginalMode { mode: mode.index });
            }
            deflated_modes.push(mode.index);
            marginal_contribution(mode)
        } else {
            lyapunov_contribution(mode)?
        };
        contributions.push(c);
    }
    let h2_squared: f64 = contributions.iter().sum();
    let h2 = h2_squared.sqrt();
    Ok(GramianResult { h2, h2_squared, contributions, deflated_modes, tolerance: GRAMIAN_REL_TOL * h2 })
}

/// First-order remainder `g / (M s + D)` of the zero mode: scalar Lyapunov
/// `2 (-D/M) p = -g^2`, contribution `p / M^2`.
fn marginal_contribution(mode: &ModalSubsystem) -> f64 {
    let g2 = mode.frequency_gain * mode.frequency_gain;
    if g2 == 0.0 {
        return 0.0;
    }
    let a = -mode.damping / mode.inertia;
    let p = -g2 / (2.0 * a);
    p / (mode.inertia * mode.inertia)
}

/// Solves the 2x2 Lyapunov equation through its Kronecker form and returns
/// `F_i^T P F_i` with `F_i = [0, 1/M]^T`.
fn lyapunov_contribution(mode: &ModalSubsystem) -> Result<f64> {
    let (m, d, l) = (mode.inertia, mode.damping, mode.lambda);
    let a = Matrix2::new(0.0, 1.0, -l / m, -d / m);
    let q = Matrix2::new(mode.phase_gain.powi(2), 0.0, 0.0, mode.frequency_gain.powi(2));
    let at = a.transpose();
    let i2 = Matrix2::<f64>::identity();
    // vec(P A + A^T P) = (A^T (x) I + I (x) A^T) vec(P), column-major vec
    let k: Matrix4<f64> = at.kronecker(&i2) + i2.kronecker(&at);
    let rhs = Vector4::from_column_slice((-q).as_slice());
    let sol = k.lu().solve(&rhs).ok_or(Error::SingularResolvent { omega: 0.0 })?;
    let p = Matrix2::from_column_slice(sol.as_slice());
    let f = Vector2::new(0.0, 1.0 / m);
    Ok((f.transpose() * p * f)[(0, 0)])
}

/// Sampling parameters for the impulse-energy oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpulseSettings {
    /// Initial sampling step; must satisfy `dt * |s_max| < 0.1`.
    pub dt: f64,
    /// Must cover `10 / |Re s|` of the slowest nonzero pole.
    pub horizon: f64,
}

impl ImpulseSettings {
    /// `dt = 0.05 / |s_max|`, `horizon = 15 / |Re s_slowest|`.
    pub fn auto(model: &SwingModel) -> Self {
        let (fastest, slowest) = pole_extent(model);
        Self { dt: 0.05 / fastest, horizon: 15.0 / slowest }
    }
}

/// `(max |s|, min |Re s| over nonzero poles)`.
fn pole_extent(model: &SwingModel) -> (f64, f64) {
    let mut fastest: f64 = 0.0;
    let mut slowest = f64::INFINITY;
    for &l in model.eigenvalues() {
        let (s1, s2) = mode_poles(model.inertia(), model.damping(), l);
        for s in [s1, s2] {
            if s.norm() > 0.0 {
                fastest = fastest.max(s.norm());
                slowest = slowest.min(s.re.abs());
            }
        }
    }
    (fastest, slowest)
}

/// Sum over input channels of the output energy of unit impulse responses,
/// which equals the squared H2 norm.
///
/// Each modal subsystem is propagated with its exact transition matrix; the
/// energy integral uses Simpson panels whose width grows geometrically from
/// `dt` up to a per-mode cap, so fast transients are resolved without
/// spending steps on the slow tail.
pub fn h2_impulse_energy(model: &SwingModel, output: OutputKind, settings: ImpulseSettings) -> Result<f64> {
    let ImpulseSettings { dt, horizon } = settings;
    if !(dt > 0.0 && horizon > dt) {
        return Err(Error::InvalidArgument(format!("need 0 < dt < horizon, got dt={dt}, horizon={horizon}")));
    }
    let (fastest, slowest) = pole_extent(model);
    if dt * fastest >= 0.1 {
        return Err(Error::StepTooCoarse { product: dt * fastest });
    }
    if horizon < 10.0 / slowest {
        return Err(Error::HorizonTooShort(format!(
            "horizon {horizon} is below 10 / |Re s_slowest| = {}",
            10.0 / slowest
        )));
    }

    let mut energy = 0.0;
    let mut tail = 0.0;
    for mode in modal_decompose(model, output) {
        let (e, t) = mode_impulse_energy(&mode, dt, horizon);
        energy += e;
        tail += t;
    }
    if tail > 1e-3 * energy {
        return Err(Error::HorizonTooShort(format!(
            "estimated tail energy {tail:.3e} exceeds 0.1% of accumulated {energy:.3e}"
        )));
    }
    Ok(energy)
}

/// Returns `(energy, tail estimate)` for one mode driven by a unit impulse.
fn mode_impulse_energy(mode: &ModalSubsystem, dt: f64, horizon: f64) -> (f64, f64) {
    let (m, d, l) = (mode.inertia, mode.damping, mode.lambda);
    let (gp2, gf2) = (mode.phase_gain.powi(2), mode.frequency_gain.powi(2));
    if gp2 == 0.0 && gf2 == 0.0 {
        return (0.0, 0.0);
    }
    let (s1, s2) = mode_poles(m, d, l);
    // slowest decay that actually reaches the output
    let decay = if mode.is_marginal() { d / m } else { s1.re.abs().min(s2.re.abs()) };
    let rate = if mode.is_marginal() { d / m } else { s1.norm().min(s2.norm()) };
    let h_cap = (0.5 / rate).max(dt);
    let end = horizon.min(30.0 / decay);

    let a = l / m;
    let b = d / m;
    let power = |x: &Vector2<f64>| gp2 * x[0] * x[0] + gf2 * x[1] * x[1];

    let mut x = Vector2::new(0.0, 1.0 / m);
    let mut t = 0.0;
    let mut h = dt;
    let mut total = 0.0;
    let (mut third_q, mut last_q) = (0.0, 0.0);
    while t < end {
        let step = h.min(end - t);
        let half = transition_matrix(a, b, 0.5 * step);
        let mid = half * x;
        let next = half * mid;
        let e = step / 6.0 * (power(&x) + 4.0 * power(&mid) + power(&next));
        total += e;
        if t >= 0.75 * end {
            last_q += e;
        } else if t >= 0.5 * end {
            third_q += e;
        }
        x = next;
        t += step;
        h = (h * 1.05).min(h_cap);
    }
    let tail = if third_q > 0.0 && last_q > 0.0 {
        let r = last_q / third_q;
        if r >= 1.0 {
            f64::INFINITY
        } else {
            last_q * r / (1.0 - r)
        }
    } else {
        0.0
    };
    (total, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{GraphPreset, NetworkSpec};
    use approx::assert_relative_eq;

    fn k3(m: f64, d: f64) -> SwingModel {
        let (n, e) = GraphPreset::complete(3, 1.0).generate().unwrap();
        SwingModel::from_network(&NetworkSpec::new(n, e, m, d).unwrap()).unwrap()
    }

    #[test]
    fn gramian_frequency_output() {
        let r = h2_gramian(&k3(1.0, 1.0), OutputKind::Frequency).unwrap();
        assert_relative_eq!(r.h2_squared, 1.5, max_relative = 1e-12);
        assert_eq!(r.deflated_modes, vec![0]);
    }

    #[test]
    fn gramian_phase_output_excludes_zero_mode() {
        let r = h2_gramian(&k3(1.0, 1.0), OutputKind::PhaseCohesiveness).unwrap();
        assert_relative_eq!(r.h2_squared, 1.0, max_relative = 1e-12);
        assert_eq!(r.contributions[0], 0.0);
    }

    #[test]
    fn gramian_smib_independent_of_b_and_m() {
        for &m in &[0.01, 0.3, 1.0, 10.0] {
            for &b in &[0.05, 1.0, 40.0] {
                let model = SwingModel::smib(m, 2.0, b).unwrap();
                let r = h2_gramian(&model, OutputKind::PhaseCohesiveness).unwrap();
                assert_relative_eq!(r.h2_squared, 0.25, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn impulse_energy_matches_references() {
        let smib = SwingModel::smib(1.0, 1.0, 1.0).unwrap();
        let e = h2_impulse_energy(&smib, OutputKind::PhaseCohesiveness, ImpulseSettings::auto(&smib)).unwrap();
        assert_relative_eq!(e, 0.5, max_relative = 1e-2);

        let model = k3(1.0, 1.0);
        let settings = ImpulseSettings::auto(&model);
        let ef = h2_impulse_energy(&model, OutputKind::Frequency, settings).unwrap();
        assert_relative_eq!(ef, 1.5, max_relative = 1e-2);
        let ep = h2_impulse_energy(&model, OutputKind::PhaseCohesiveness, settings).unwrap();
        assert_relative_eq!(ep, 1.0, max_relative = 1e-2);
    }

    #[test]
    fn impulse_energy_preconditions() {
        let model = k3(1.0, 1.0);
        let coarse = ImpulseSettings { dt: 0.5, horizon: 100.0 };
        assert!(matches!(
            h2_impulse_energy(&model, OutputKind::Frequency, coarse),
            Err(Error::StepTooCoarse { .. })
        ));
        let short = ImpulseSettings { dt: 1e-3, horizon: 2.0 };
        assert!(matches!(
            h2_impulse_energy(&model, OutputKind::Frequency, short),
            Err(Error::HorizonTooShort(_))
        ));
    }
}
