use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::logspace;
use crate::system::{modal_decompose, sigma_max, ModalSubsystem, OutputKind, SwingModel, SwingStateSpace};

/// Default relative tolerance for H-infinity searches.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Golden-section stopping width relative to the mode's frequency scale.
const OMEGA_XTOL: f64 = 1e-10;
const MODE_GRID_POINTS: usize = 241;
const DENSE_GRID_POINTS: usize = 400;
const POLE_CLUSTER: i32 = 16;
const DENSE_REFINED_PEAKS: usize = 8;
/// Relative real-part threshold for an eigenvalue to count as imaginary.
const IMAG_AXIS_TOL: f64 = 1e-8;
const LEVEL_SET_ITERS: usize = 60;
const DENSE_REFINE_BAND: f64 = 0.98;
/// Relative margin a later mode must exceed to take over as governing mode.
const TIE_MARGIN: f64 = 1e-12;
/// Floor on the reported relative tolerance (rounding in the magnitude
/// evaluation itself).
const VALUE_TOL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HinfSearchResult {
    pub hinf: f64,
    pub argmax_omega: f64,
    /// Mode attaining the peak (modal search only).
    pub governing_mode: Option<usize>,
    /// Estimated relative error of `hinf`.
    pub tolerance: f64,
}

/// Maximizes a unimodal `f` on `[lo, hi]`. Returns `(argmax, max, final
/// bracket width)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while hi - lo > xtol && iters < 200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        iters += 1;
    }
    let (x, fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    (x, fx, hi - lo)
}

/// Relative value error from local curvature and the final bracket width.
fn curvature_tolerance<F: Fn(f64) -> f64>(f: &F, x: f64, fx: f64, width: f64, scale: f64) -> f64 {
    let h = 1e-4 * scale;
    let lo = (x - h).max(0.0);
    let hi = lo + 2.0 * h;
    let mid = lo + h;
    let second = (f(hi) - 2.0 * f(mid) + f(lo)) / (h * h);
    let err = 0.5 * second.abs() * width * width;
    (err / fx.abs().max(f64::MIN_POSITIVE)).max(VALUE_TOL_FLOOR)
}

/// Grid scan followed by golden-section refinement of the best bracket.
/// `seeds` are extra candidate frequencies (e.g. a known stationary point).
fn maximize_on_grid<F: Fn(f64) -> f64>(f: &F, grid: &[f64], seeds: &[f64], scale: f64) -> (f64, f64, f64) {
    let values: Vec<f64> = grid.iter().map(|&w| f(w)).collect();
    let mut best_k = 0;
    for k in 1..grid.len() {
        if values[k] > values[best_k] {
            best_k = k;
        }
    }
    let lo = if best_k == 0 { grid[0] } else { grid[best_k - 1] };
    let hi = if best_k + 1 == grid.len() { grid[best_k] } else { grid[best_k + 1] };

    let (mut x, mut fx, mut width) = (grid[best_k], values[best_k], 0.0);
    if hi > lo {
        let (gx, gfx, gw) = golden_section_max(f, lo, hi, OMEGA_XTOL * scale);
        if gfx > fx {
            (x, fx, width) = (gx, gfx, gw);
        }
    }
    for &s in seeds {
        let fs = f(s);
        if fs > fx {
            (x, fx, width) = (s, fs, 0.0);
        }
    }
    let tol = curvature_tolerance(f, x, fx, width, scale);
    (x, fx, tol)
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 1e-12 && rel_tol < 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rel_tol must lie in (1e-12, 1e-2), got {rel_tol}")))
    }
}

fn search_mode(mode: &ModalSubsystem) -> (f64, f64, f64) {
    let scale = mode.characteristic_frequency();
    let mut grid = vec![0.0];
    grid.extend(logspace(scale / 100.0, scale * 100.0, MODE_GRID_POINTS));
    let mut seeds = vec![0.0];
    // stationary point of |sqrt(l) / (M s^2 + D s + l)|
    if mode.frequency_gain == 0.0 && mode.lambda > 0.0 {
        let w2 = mode.lambda / mode.inertia - mode.damping.powi(2) / (2.0 * mode.inertia.powi(2));
        if w2 > 0.0 {
            seeds.push(w2.sqrt());
        }
    }
    maximize_on_grid(&|w| mode.magnitude(w), &grid, &seeds, scale)
}

/// H-infinity norm as the maximum over modal subsystems of each mode's peak
/// gain. Ties go to the lowest mode index.
pub fn hinf_search(model: &SwingModel, output: OutputKind, rel_tol: f64) -> Result<HinfSearchResult> {
    check_rel_tol(rel_tol)?;
    let modes = modal_decompose(model, output);
    let mut best = HinfSearchResult { hinf: 0.0, argmax_omega: 0.0, governing_mode: None, tolerance: 0.0 };
    for mode in &modes {
        if mode.phase_gain == 0.0 && mode.frequency_gain == 0.0 {
            continue;
        }
        let (w, value, tol) = search_mode(mode);
        if best.governing_mode.is_none() || value > best.hinf * (1.0 + TIE_MARGIN) {
            best = HinfSearchResult { hinf: value, argmax_omega: w, governing_mode: Some(mode.index), tolerance: tol };
        }
    }
    Ok(best)
}

/// Narrows `[lo, hi]` by repeated uniform sampling around the best sample,
/// then finishes with golden-section search. Unlike plain golden-section this
/// tolerates several nearby peaks inside the initial bracket.
fn zoom_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64, f64) {
    const SAMPLES: usize = 17;
    let mut best = (lo, f64::NEG_INFINITY);
    while hi - lo > 1e3 * xtol {
        let step = (hi - lo) / (SAMPLES - 1) as f64;
        let (k, fk) = (0..SAMPLES)
            .map(|k| (k, f(lo + step * k as f64)))
            .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let center = lo + step * k as f64;
        if fk > best.1 {
            best = (center, fk);
        }
        (lo, hi) = ((center - step).max(lo), (center + step).min(hi));
    }
    let (x, fx, w) = golden_section_max(f, lo, hi, xtol);
    if fx >= best.1 {
        (x, fx, w)
    } else {
        (best.0, best.1, hi - lo)
    }
}

/// H-infinity norm of a dense realization.
///
/// `sigma_max` is scanned on a log grid spanning the pole magnitudes, merged
/// with a local cluster of `|Im s| + k |Re s| / 4` points around every
/// oscillatory pole so that narrow resonances are bracketed; the best local
/// maxima are then refined by golden-section search.
pub fn hinf_dense(system: &SwingStateSpace, rel_tol: f64) -> Result<HinfSearchResult> {
    check_rel_tol(rel_tol)?;
    let poles = system.a().complex_eigenvalues();
    let mags: Vec<f64> = poles.iter().map(|s| s.norm()).filter(|&r| r > 1e-12).collect();
    let (lo, hi) = mags.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if mags.is_empty() {
        return Err(Error::InvalidArgument("system has no nonzero poles".into()));
    }
    let mut grid = vec![0.0];
    grid.extend(logspace(lo / 100.0, hi * 100.0, DENSE_GRID_POINTS));
    for s in poles.iter().filter(|s| s.im > 0.0) {
        for k in -POLE_CLUSTER..=POLE_CLUSTER {
            let w = s.im + k as f64 * s.re.abs() / 4.0;
            if w > 0.0 {
                grid.push(w);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let values = grid.iter().map(|&w| sigma_max(system, w)).collect::<Result<Vec<f64>>>()?;
    let mut peaks: Vec<usize> = (0..grid.len())
        .filter(|&k| {
            let left = if k == 0 { f64::NEG_INFINITY } else { values[k - 1] };
            let right = if k + 1 == grid.len() { f64::NEG_INFINITY } else { values[k + 1] };
            values[k] >= left && values[k] >= right
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    // grid sampling error can reorder near-equal resonances, so every
    // maximum close to the best one is refined
    let top = peaks.first().map_or(0.0, |&k| values[k]);
    let keep = peaks.iter().take_while(|&&k| values[k] >= DENSE_REFINE_BAND * top).count();
    peaks.truncate(keep.max(DENSE_REFINED_PEAKS));

    let f = |w: f64| sigma_max(system, w).unwrap_or(0.0);
    let mut best = HinfSearchResult { hinf: 0.0, argmax_omega: 0.0, governing_mode: None, tolerance: 0.0 };
    for k in peaks {
        let a = if k == 0 { grid[0] } else { grid[k - 1] };
        let b = if k + 1 == grid.len() { grid[k] } else { grid[k + 1] };
        let scale = grid[k].max(lo);
        let (mut x, mut fx, mut width) = (grid[k], values[k], 0.0);
        if b > a {
            let (gx, gfx, gw) = zoom_max(&f, a, b, OMEGA_XTOL * scale);
            if gfx > fx {
                (x, fx, width) = (gx, gfx, gw);
            }
        }
        if fx > best.hinf {
            let tol = curvature_tolerance(&f, x, fx, width, scale);
            best = HinfSearchResult { hinf: fx, argmax_omega: x, governing_mode: None, tolerance: tol };
        }
    }
    level_set_refine(system, &f, best, rel_tol)
}

/// Frequencies `w >= 0` where `sigma_max(G(jw)) = gamma`: the imaginary-axis
/// eigenvalues of `[[A, F F^T / gamma], [-C^T C / gamma, -A^T]]`.
fn level_crossings(a: &DMatrix<f64>, f: &DMatrix<f64>, c: &DMatrix<f64>, gamma: f64) -> Vec<f64> {
    let nx = a.nrows();
    let mut h = DMatrix::zeros(2 * nx, 2 * nx);
    h.view_mut((0, 0), (nx, nx)).copy_from(a);
    h.view_mut((0, nx), (nx, nx)).copy_from(&(f * f.transpose() / gamma));
    h.view_mut((nx, 0), (nx, nx)).copy_from(&(c.transpose() * c / (-gamma)));
    h.view_mut((nx, nx), (nx, nx)).copy_from(&(-a.transpose()));
    let floor = IMAG_AXIS_TOL * h.amax().max(f64::MIN_POSITIVE);
    let mut ws: Vec<f64> = h
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im >= 0.0 && z.re.abs() <= IMAG_AXIS_TOL * z.norm() + floor)
        .map(|z| z.im)
        .collect();
    ws.sort_by(f64::total_cmp);
    ws
}

/// Level-set iteration on the Hamiltonian matrix: raise the lower bound to
/// the largest `sigma_max` between consecutive crossings until no crossing
/// remains just above it.
fn level_set_refine<F: Fn(f64) -> f64>(
    system: &SwingStateSpace,
    f: &F,
    mut best: HinfSearchResult,
    rel_tol: f64,
) -> Result<HinfSearchResult> {
    let Some(a) = system.deflated_a() else {
        return Err(Error::SingularResolvent { omega: 0.0 });
    };
    for _ in 0..LEVEL_SET_ITERS {
        let gamma = best.hinf * (1.0 + 2.0 * rel_tol);
        let ws = level_crossings(&a, system.f(), system.c(), gamma);
        if ws.is_empty() {
            best.tolerance = best.tolerance.max(2.0 * rel_tol);
            return Ok(best);
        }
        let mut probes = ws.clone();
        probes.extend(ws.windows(2).map(|p| 0.5 * (p[0] + p[1])));
        let (w, v) = probes.iter().map(|&w| (w, f(w))).fold((0.0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
        if v <= best.hinf {
            break;
        }
        best.hinf = v;
        best.argmax_omega = w;
    }
    // crossings persist without progress: report the bracket width reached
    best.tolerance = best.tolerance.max(2.0 * rel_tol);
    Ok(best)
}
