use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// A 1-D parameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn log(min: f64, max: f64, points: usize) -> Result<Self> {
        let g = Self { min, max, points, spacing: Spacing::Log };
        g.validate()?;
        Ok(g)
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Result<Self> {
        let g = Self { min, max, points, spacing: Spacing::Linear };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0) {
            return Err(Error::InvalidGrid(format!("grid minimum must be positive, got {}", self.min)));
        }
        if self.max <= self.min {
            return Err(Error::InvalidGrid(format!("grid max {} must exceed min {}", self.max, self.min)));
        }
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!("grid needs at least 2 points, got {}", self.points)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => logspace(self.min, self.max, self.points),
            Spacing::Linear => {
                let step = (self.max - self.min) / (self.points - 1) as f64;
                let mut v: Vec<f64> = (0..self.points).map(|k| self.min + step * k as f64).collect();
                v[self.points - 1] = self.max;
                v
            }
        }
    }
}

/// `points` log-spaced values from `min` to `max` inclusive.
pub fn logspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let (a, b) = (min.ln(), max.ln());
    let step = (b - a) / (points - 1) as f64;
    let mut v: Vec<f64> = (0..points).map(|k| (a + step * k as f64).exp()).collect();
    v[0] = min;
    v[points - 1] = max;
    v
}

/// Inserts `x` into a sorted grid if it lies strictly inside and is not
/// already present.
pub fn insert_sorted(values: &mut Vec<f64>, x: f64) {
    if values.is_empty() || x <= values[0] || x >= values[values.len() - 1] {
        return;
    }
    match values.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(_) => {}
        Err(pos) => values.insert(pos, x),
    }
}
