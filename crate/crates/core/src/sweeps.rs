//! Parameter sweeps over inertia or damping, and finite-difference shape
//! checks on the resulting columns.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    min_damping_ratio, mode_poles, regime_boundaries, system_eigenvalues, ModeEigenpair, Regime,
};
use crate::error::{Error, Result};
use crate::grid::{insert_sorted, Grid};
use crate::metrics::closed_form_norms;
use crate::oracles::{h2_gramian, hinf_search, DEFAULT_REL_TOL};
use crate::system::{OutputKind, SwingModel};
use crate::table::{fmt_num, fmt_opt, Table};

pub const THREADS_ENV: &str = "SWINGBENCH_THREADS";

/// Sizes the global rayon pool from `SWINGBENCH_THREADS` (0 or unset means
/// automatic). Has no effect once the pool exists.
pub fn configure_threads() -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Inertia,
    Damping,
}

impl SweepParameter {
    pub fn symbol(&self) -> &'static str {
        match self {
            SweepParameter::Inertia => "M",
            SweepParameter::Damping => "D",
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" | "inertia" => Ok(SweepParameter::Inertia),
            "D" | "d" | "damping" => Ok(SweepParameter::Damping),
            _ => Err(Error::InvalidArgument(format!("unknown sweep parameter {s:?} (expected M or D)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    H2Closed,
    H2Oracle,
    HinfClosed,
    HinfOracle,
    Eigenvalues,
    ZetaMin,
}

impl Metric {
    pub const NORMS: [Metric; 4] = [Metric::H2Closed, Metric::H2Oracle, Metric::HinfClosed, Metric::HinfOracle];
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub model: SwingModel,
    pub parameter: SweepParameter,
    pub grid: Grid,
    pub output: OutputKind,
    pub metrics: Vec<Metric>,
    /// Oracle metrics are evaluated on every `oracle_stride`-th grid point
    /// (always including the last); 1 means every point.
    pub oracle_stride: usize,
    /// Insert the phase H-infinity regime boundary into inertia sweeps.
    pub insert_kink: bool,
}

impl SweepPlan {
    pub fn new(model: SwingModel, parameter: SweepParameter, grid: Grid, output: OutputKind) -> Self {
        Self { model, parameter, grid, output, metrics: Metric::NORMS.to_vec(), oracle_stride: 1, insert_kink: true }
    }

    fn wants(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    /// Grid values, with `D^2/(2 lambda_2)` (or `sqrt(2 M lambda_2)` for a
    /// damping sweep) inserted for phase outputs.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.grid.validate()?;
        if self.oracle_stride == 0 {
            return Err(Error::InvalidArgument("oracle stride must be at least 1".into()));
        }
        let mut values = self.grid.values();
        if self.insert_kink && self.output.is_phase() {
            let l2 = self.model.governing_lambda();
            let kink = match self.parameter {
                SweepParameter::Inertia => regime_boundaries(self.model.damping(), l2).0,
                SweepParameter::Damping => (2.0 * self.model.inertia() * l2).sqrt(),
            };
            insert_sorted(&mut values, kink);
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub h2_closed: Option<f64>,
    /// Alternative closed-form H2 carried by a known discrepancy.
    pub h2_derived: Option<f64>,
    pub h2_oracle: Option<f64>,
    pub h2_oracle_tolerance: Option<f64>,
    pub hinf_closed: Option<f64>,
    pub hinf_oracle: Option<f64>,
    /// Absolute.
    pub hinf_oracle_tolerance: Option<f64>,
    pub regime: Option<Regime>,
    pub zeta_min: Option<f64>,
    pub poles: Option<Vec<ModeEigenpair>>,
    pub oracle_evaluated: bool,
}

fn sweep_row(plan: &SweepPlan, value: f64, with_oracle: bool) -> Result<SweepRow> {
    let base = &plan.model;
    let model = match plan.parameter {
        SweepParameter::Inertia => base.with_params(value, base.damping())?,
        SweepParameter::Damping => base.with_params(base.inertia(), value)?,
    };
    let closed = closed_form_norms(&model, plan.output)?;
    let mut row = SweepRow {
        parameter: plan.parameter,
        value,
        h2_closed: None,
        h2_derived: None,
        h2_oracle: None,
        h2_oracle_tolerance: None,
        hinf_closed: None,
        hinf_oracle: None,
        hinf_oracle_tolerance: None,
        regime: closed.map(|c| c.1.regime),
        zeta_min: None,
        poles: None,
        oracle_evaluated: with_oracle,
    };
    if let Some((h2, hinf)) = closed {
        if plan.wants(Metric::H2Closed) {
            row.h2_closed = Some(h2.value);
            row.h2_derived = h2.discrepancy.map(|k| k.derived_value);
        }
        if plan.wants(Metric::HinfClosed) {
            row.hinf_closed = Some(hinf.value);
        }
    }
    if with_oracle && plan.wants(Metric::H2Oracle) {
        let g = h2_gramian(&model, plan.output)?;
        row.h2_oracle = Some(g.h2);
        row.h2_oracle_tolerance = Some(g.tolerance);
    }
    if with_oracle && plan.wants(Metric::HinfOracle) {
        let h = hinf_search(&model, plan.output, DEFAULT_REL_TOL)?;
        row.hinf_oracle = Some(h.hinf);
        row.hinf_oracle_tolerance = Some(h.tolerance * h.hinf);
    }
    if plan.wants(Metric::ZetaMin) {
        row.zeta_min = Some(min_damping_ratio(model.inertia(), model.damping(), model.lambda_max()));
    }
    if plan.wants(Metric::Eigenvalues) {
        row.poles = Some(system_eigenvalues(model.inertia(), model.damping(), model.eigenvalues()));
    }
    Ok(row)
}

/// One row per grid point, evaluated in parallel and returned in grid order.
pub fn norm_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    let values = plan.values()?;
    let last = values.len() - 1;
    values
        .par_iter()
        .enumerate()
        .map(|(k, &v)| sweep_row(plan, v, k % plan.oracle_stride == 0 || k == last))
        .collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(vec!["param", "value", "h2_closed", "h2_oracle", "hinf_closed", "hinf_oracle", "regime"]);
    for r in rows {
        t.push(vec![
            r.parameter.symbol().to_string(),
            fmt_num(r.value),
            fmt_opt(r.h2_closed),
            fmt_opt(r.h2_oracle),
            fmt_opt(r.hinf_closed),
            fmt_opt(r.hinf_oracle),
            r.regime.map(|g| g.as_str().to_string()).unwrap_or_default(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootLocusRow {
    pub inertia: f64,
    pub mode: usize,
    pub lambda: f64,
    pub s1: num_complex::Complex64,
    pub s2: num_complex::Complex64,
}

/// Closed-form poles of every mode for each inertia on the grid, ordered by
/// inertia, then mode.
pub fn root_locus(model: &SwingModel, grid: &Grid) -> Result<Vec<RootLocusRow>> {
    grid.validate()?;
    let d = model.damping();
    Ok(grid
        .values()
        .into_iter()
        .flat_map(|m| {
            model.eigenvalues().iter().enumerate().map(move |(mode, &lambda)| {
                let (s1, s2) = mode_poles(m, d, lambda);
                RootLocusRow { inertia: m, mode, lambda, s1, s2 }
            })
        })
        .collect())
}

pub fn root_locus_table(rows: &[RootLocusRow]) -> Table {
    let mut t = Table::new(vec!["M", "mode", "re1", "im1", "re2", "im2"]);
    for r in rows {
        t.push(vec![
            fmt_num(r.inertia),
            r.mode.to_string(),
            fmt_num(r.s1.re),
            fmt_num(r.s1.im),
            fmt_num(r.s2.re),
            fmt_num(r.s2.im),
        ]);
    }
    t
}

/// Inertia where the poles of an eigenvalue-`lambda` mode collide.
pub fn critical_inertia(damping: f64, lambda: f64) -> f64 {
    damping * damping / (4.0 * lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedRow {
    pub inertia: f64,
    pub h2_oracle: f64,
    pub hinf_oracle: f64,
}

/// Oracle-only norms of the combined output over an inertia grid.
pub fn combined_sweep(model: &SwingModel, kappa: f64, grid: &Grid) -> Result<Vec<CombinedRow>> {
    crate::error::ensure_positive("kappa", kappa)?;
    grid.validate()?;
    let output = OutputKind::Combined { kappa };
    grid.values()
        .par_iter()
        .map(|&m| {
            let model = model.with_params(m, model.damping())?;
            Ok(CombinedRow {
                inertia: m,
                h2_oracle: h2_gramian(&model, output)?.h2,
                hinf_oracle: hinf_search(&model, output, DEFAULT_REL_TOL)?.hinf,
            })
        })
        .collect()
}

pub fn combined_table(rows: &[CombinedRow]) -> Table {
    let mut t = Table::new(vec!["M", "h2_oracle", "hinf_oracle"]);
    for r in rows {
        t.push(vec![fmt_num(r.inertia), fmt_num(r.h2_oracle), fmt_num(r.hinf_oracle)]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeProperty {
    Nondecreasing,
    Nonincreasing,
    StrictlyDecreasing,
    Constant,
    Convex,
    Concave,
}

impl ShapeProperty {
    /// Relative tolerance multiplied by the column scale.
    pub fn relative_tolerance(&self) -> f64 {
        match self {
            ShapeProperty::Nondecreasing | ShapeProperty::Nonincreasing => 1e-12,
            ShapeProperty::StrictlyDecreasing => 0.0,
            ShapeProperty::Constant => 1e-10,
            ShapeProperty::Convex | ShapeProperty::Concave => 1e-8,
        }
    }

    fn min_points(&self) -> usize {
        match self {
            ShapeProperty::Convex | ShapeProperty::Concave => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ShapeProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShapeProperty::Nondecreasing => "nondecreasing",
            ShapeProperty::Nonincreasing => "nonincreasing",
            ShapeProperty::StrictlyDecreasing => "strictly-decreasing",
            ShapeProperty::Constant => "constant",
            ShapeProperty::Convex => "convex",
            ShapeProperty::Concave => "concave",
        };
        f.write_str(s)
    }
}

/// Per-step decrease that "strictly decreasing" demands, relative to scale.
const STRICT_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeVerdict {
    pub property: ShapeProperty,
    /// Closed interval of parameter values that was checked.
    pub interval: (f64, f64),
    pub points: usize,
    pub max_violation: f64,
    /// Absolute tolerance the violation is compared against.
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `property` on the `(x, y)` samples whose `x` lies in `interval`.
/// Samples must be sorted by `x`. Only finite differences between grid
/// points are used.
pub fn shape_check(points: &[(f64, f64)], property: ShapeProperty, interval: (f64, f64)) -> Result<ShapeVerdict> {
    let inside: Vec<(f64, f64)> =
        points.iter().copied().filter(|&(x, _)| x >= interval.0 && x <= interval.1).collect();
    if inside.len() < property.min_points() {
        return Err(Error::IntervalTooSparse { points: inside.len(), required: property.min_points() });
    }
    if inside.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidArgument("shape check needs samples sorted by strictly increasing x".into()));
    }
    let scale = inside.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tolerance = property.relative_tolerance() * scale;
    let steps = inside.windows(2).map(|w| w[1].1 - w[0].1);
    let max_violation = match property {
        ShapeProperty::Nondecreasing => steps.map(|dy| -dy).fold(0.0, f64::max),
        ShapeProperty::Nonincreasing => steps.fold(0.0, f64::max),
        ShapeProperty::StrictlyDecreasing => steps.map(|dy| dy + STRICT_STEP * scale).fold(0.0, f64::max),
        ShapeProperty::Constant => inside.iter().map(|p| (p.1 - inside[0].1).abs()).fold(0.0, f64::max),
        ShapeProperty::Convex | ShapeProperty::Concave => {
            let sign = if property == ShapeProperty::Convex { -1.0 } else { 1.0 };
            inside
                .windows(3)
                .map(|w| {
                    let s0 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    let s1 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
                    // second difference scaled back to function units
                    sign * (s1 - s0) * (w[2].0 - w[0].0) / 2.0
                })
                .fold(0.0, f64::max)
        }
    };
    let passed = if property == ShapeProperty::StrictlyDecreasing {
        max_violation == 0.0
    } else {
        max_violation <= tolerance
    };
    Ok(ShapeVerdict { property, interval, points: inside.len(), max_violation, tolerance, passed })
}

/// Column selector for [`column`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    H2Closed,
    H2Oracle,
    HinfClosed,
    HinfOracle,
    ZetaMin,
}

/// `(value, column)` pairs for rows where the column is present.
pub fn column(rows: &[SweepRow], col: Column) -> Vec<(f64, f64)> {
    rows.iter()
        .filter_map(|r| {
            let y = match col {
                Column::H2Closed => r.h2_closed,
                Column::H2Oracle => r.h2_oracle,
                Column::HinfClosed => r.hinf_closed,
                Column::HinfOracle => r.hinf_oracle,
                Column::ZetaMin => r.zeta_min,
            };
            y.map(|y| (r.value, y))
        })
        .collect()
}
