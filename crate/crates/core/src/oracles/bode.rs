use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::logspace;
use crate::system::{assemble, modal_decompose, sigma_max, sigma_max_modal, OutputKind, SwingModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BodeRow {
    pub omega: f64,
    pub sigma_max: f64,
}

fn frequencies(omega_min: f64, omega_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
        return Err(Error::InvalidGrid(format!("need 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]")));
    }
    if points < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
    }
    Ok(logspace(omega_min, omega_max, points))
}

/// Log-spaced magnitude table from the dense realization.
pub fn bode_table(
    model: &SwingModel,
    output: OutputKind,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> Result<Vec<BodeRow>> {
    let omegas = frequencies(omega_min, omega_max, points)?;
    let system = assemble(model, output)?;
    omegas
        .par_iter()
        .map(|&omega| Ok(BodeRow { omega, sigma_max: sigma_max(&system, omega)? }))
        .collect()
}

/// Same table through the modal route; O(n) per frequency.
pub fn bode_table_modal(
    model: &SwingModel,
    output: OutputKind,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> Result<Vec<BodeRow>> {
    let omegas = frequencies(omega_min, omega_max, points)?;
    let modes = modal_decompose(model, output);
    Ok(omegas.into_iter().map(|omega| BodeRow { omega, sigma_max: sigma_max_modal(&modes, omega) }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::resonant_peak_frequency;
    use approx::assert_relative_eq;

    fn peak(rows: &[BodeRow]) -> BodeRow {
        *rows.iter().max_by(|a, b| a.sigma_max.total_cmp(&b.sigma_max)).unwrap()
    }

    #[test]
    fn smib_peak_location() {
        let model = SwingModel::smib(1.0, 1.0, 1.0).unwrap();
        let rows = bode_table(&model, OutputKind::PhaseCohesiveness, 0.01, 100.0, 1000).unwrap();
        let p = peak(&rows);
        let ratio = (100.0f64 / 0.01).powf(1.0 / 999.0);
        let target = resonant_peak_frequency(1.0, 1.0, 1.0);
        assert!(p.omega / target < ratio && target / p.omega < ratio);
        assert!(rows.windows(2).all(|w| w[0].omega < w[1].omega));
        assert_relative_eq!(rows[0].sigma_max, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn larger_inertia_raises_peak() {
        let small = SwingModel::smib(1.0, 1.0, 1.0).unwrap();
        let large = SwingModel::smib(100.0, 1.0, 1.0).unwrap();
        let a = peak(&bode_table(&small, OutputKind::PhaseCohesiveness, 0.01, 100.0, 1000).unwrap());
        let b = peak(&bode_table(&large, OutputKind::PhaseCohesiveness, 0.01, 100.0, 1000).unwrap());
        assert!(b.sigma_max > a.sigma_max);
    }

    #[test]
    fn modal_table_matches_dense() {
        let model = SwingModel::smib(0.3, 0.7, 2.0).unwrap();
        let dense = bode_table(&model, OutputKind::Frequency, 0.01, 100.0, 50).unwrap();
        let modal = bode_table_modal(&model, OutputKind::Frequency, 0.01, 100.0, 50).unwrap();
        for (a, b) in dense.iter().zip(&modal) {
            assert_relative_eq!(a.sigma_max, b.sigma_max, max_relative = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_range() {
        let model = SwingModel::smib(1.0, 1.0, 1.0).unwrap();
        assert!(bode_table(&model, OutputKind::Frequency, 1.0, 0.5, 10).is_err());
        assert!(bode_table(&model, OutputKind::Frequency, 0.1, 1.0, 1).is_err());
    }
}
