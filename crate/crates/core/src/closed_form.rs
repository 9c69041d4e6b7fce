//! Closed-form poles, damping ratios and system norms.
//!
//! Everything here is a scalar function of `(n, M, D, lambda)`. Branches on
//! `D^2 <= 2 M lambda` take the underdamped (resonant) branch on equality.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_positive, Result};

/// Which branch of a two-case H-infinity expression was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    UnderdampedBranch,
    OverdampedBranch,
    NotApplicable,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::UnderdampedBranch => "underdamped-branch",
            Regime::OverdampedBranch => "overdamped-branch",
            Regime::NotApplicable => "not-applicable",
        }
    }

    /// Branch selector for the governing eigenvalue.
    pub fn for_lambda(inertia: f64, damping: f64, lambda: f64) -> Self {
        if damping * damping <= 2.0 * inertia * lambda {
            Regime::UnderdampedBranch
        } else {
            Regime::OverdampedBranch
        }
    }
}

/// Identifies the expression that produced a [`NormResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormSource {
    SmibH2,
    SmibHinf,
    PhaseH2,
    PhaseHinf,
    FrequencyH2,
    FrequencyHinf,
    PerModeHinf,
}

/// A closed-form value whose printed expression disagrees with the modal
/// derivation. Carried alongside the printed value so reports show both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnownDiscrepancy {
    /// Value implied by summing per-mode contributions with the zero mode
    /// excluded.
    pub derived_value: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub regime: Regime,
    pub source: ClosedFormSource,
    /// Frequency where the peak is attained (H-infinity results only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<KnownDiscrepancy>,
}

impl NormResult {
    fn plain(value: f64, source: ClosedFormSource) -> Self {
        Self { value, regime: Regime::NotApplicable, source, peak_omega: None, discrepancy: None }
    }
}

/// Per-mode H-infinity norm of `sqrt(lambda) / (M s^2 + D s + lambda)`.
///
/// Returns 0 for `lambda = 0` (the mode has no output). On the underdamped
/// branch the peak sits at `sqrt(lambda/M - D^2/(2 M^2))`, else at 0.
pub fn per_mode_hinf(inertia: f64, damping: f64, lambda: f64) -> NormResult {
    let (m, d) = (inertia, damping);
    if lambda <= 0.0 {
        return NormResult {
            value: 0.0,
            regime: Regime::NotApplicable,
            source: ClosedFormSource::PerModeHinf,
            peak_omega: Some(0.0),
            discrepancy: None,
        };
    }
    let regime = Regime::for_lambda(m, d, lambda);
    let (value, peak) = match regime {
        Regime::UnderdampedBranch => {
            let value = 2.0 * m * lambda.sqrt() / (d * (4.0 * m * lambda - d * d).sqrt());
            let peak = (lambda / m - d * d / (2.0 * m * m)).max(0.0).sqrt();
            (value, peak)
        }
        _ => (1.0 / lambda.sqrt(), 0.0),
    };
    NormResult { value, regime, source: ClosedFormSource::PerModeHinf, peak_omega: Some(peak), discrepancy: None }
}

/// Single machine against an infinite bus, phase output `y = sqrt(B) theta`.
pub fn smib_norms(inertia: f64, damping: f64, b: f64) -> Result<(NormResult, NormResult)> {
    ensure_positive("M", inertia)?;
    ensure_positive("D", damping)?;
    ensure_positive("B", b)?;
    let h2 = NormResult::plain((1.0 / (2.0 * damping)).sqrt(), ClosedFormSource::SmibH2);
    let hinf = NormResult { source: ClosedFormSource::SmibHinf, ..per_mode_hinf(inertia, damping, b) };
    Ok((h2, hinf))
}

/// Poles, damping ratio and natural frequency of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEigenpair {
    pub index: usize,
    pub lambda: f64,
    /// `-D/(2M) + sqrt(D^2 - 4 M lambda)/(2M)`
    pub s1: Complex64,
    /// `-D/(2M) - sqrt(D^2 - 4 M lambda)/(2M)`
    pub s2: Complex64,
    /// Absent for the zero-eigenvalue mode.
    pub damping_ratio: Option<f64>,
    pub natural_frequency: f64,
}

/// Roots of `M s^2 + D s + lambda`, computed without cancellation.
pub fn mode_poles(inertia: f64, damping: f64, lambda: f64) -> (Complex64, Complex64) {
    let (m, d) = (inertia, damping);
    let disc = d * d - 4.0 * m * lambda;
    if disc >= 0.0 {
        let fast = (-d - disc.sqrt()) / (2.0 * m);
        // product of roots is lambda / M
        let slow = if lambda == 0.0 { 0.0 } else { lambda / (m * fast) };
        (Complex64::new(slow, 0.0), Complex64::new(fast, 0.0))
    } else {
        let re = -d / (2.0 * m);
        let im = (-disc).sqrt() / (2.0 * m);
        (Complex64::new(re, im), Complex64::new(re, -im))
    }
}

/// All `2n` poles of the swing dynamics, one pair per stiffness eigenvalue.
pub fn system_eigenvalues(inertia: f64, damping: f64, eigenvalues: &[f64]) -> Vec<ModeEigenpair> {
    eigenvalues
        .iter()
        .enumerate()
        .map(|(index, &lambda)| {
            let (s1, s2) = mode_poles(inertia, damping, lambda);
            ModeEigenpair {
                index,
                lambda,
                s1,
                s2,
                damping_ratio: (lambda > 0.0).then(|| damping / (2.0 * (inertia * lambda).sqrt())),
                natural_frequency: (lambda.max(0.0) / inertia).sqrt(),
            }
        })
        .collect()
}

/// Smallest modal damping ratio, attained by the largest eigenvalue.
pub fn min_damping_ratio(inertia: f64, damping: f64, lambda_max: f64) -> f64 {
    damping / (2.0 * (inertia * lambda_max).sqrt())
}

/// Phase-cohesiveness output norms of an `n`-node network.
///
/// The H2 value is `sqrt(n / (2D))` as printed; the attached discrepancy
/// carries `sqrt((n-1) / (2D))`, which is what the zero-mode-deflated modal
/// sum gives.
pub fn phase_output_norms(n: usize, inertia: f64, damping: f64, lambda2: f64) -> (NormResult, NormResult) {
    let nf = n as f64;
    let mut h2 = NormResult::plain((nf / (2.0 * damping)).sqrt(), ClosedFormSource::PhaseH2);
    if n >= 2 {
        h2.discrepancy = Some(KnownDiscrepancy {
            derived_value: ((nf - 1.0) / (2.0 * damping)).sqrt(),
            reason: "zero-eigenvalue mode has no phase output; modal sum runs over n-1 modes",
        });
    }
    let hinf = NormResult { source: ClosedFormSource::PhaseHinf, ..per_mode_hinf(inertia, damping, lambda2) };
    (h2, hinf)
}

/// Frequency output norms; independent of topology.
pub fn frequency_output_norms(n: usize, inertia: f64, damping: f64) -> (NormResult, NormResult) {
    let h2 = NormResult::plain((n as f64 / (2.0 * damping * inertia)).sqrt(), ClosedFormSource::FrequencyH2);
    let mut hinf = NormResult::plain(1.0 / damping, ClosedFormSource::FrequencyHinf);
    hinf.peak_omega = Some(0.0);
    (h2, hinf)
}

/// `omega_n sqrt(1 - 2 zeta^2)`, or 0 when there is no interior peak.
pub fn resonant_peak_frequency(inertia: f64, damping: f64, b: f64) -> f64 {
    let wn2 = b / inertia;
    let zeta2 = damping * damping / (4.0 * b * inertia);
    let factor = 1.0 - 2.0 * zeta2;
    if factor > 0.0 {
        (wn2 * factor).sqrt()
    } else {
        0.0
    }
}

/// `(D^2/(2 lambda_2), D^2/lambda_2)`: end of the flat H-infinity region and
/// the inflection point of the phase H-infinity norm as a function of `M`.
pub fn regime_boundaries(damping: f64, lambda2: f64) -> (f64, f64) {
    let d2 = damping * damping;
    (d2 / (2.0 * lambda2), d2 / lambda2)
}
