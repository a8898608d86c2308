use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tabulated memory-rate pairs for one scheme or measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl RateCurve {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            points: Vec::new(),
        }
    }

    /// Appends a point; M must increase strictly and the rate be nonnegative.
    pub fn push(&mut self, memory: f64, rate: f64) -> Result<()> {
        if let Some(&(last, _)) = self.points.last() {
            if memory <= last {
                return Err(Error::InvalidParams(format!(
                    "curve {}: M={memory} does not exceed previous M={last}",
                    self.label
                )));
            }
        }
        if rate.is_nan() || rate < 0.0 {
            return Err(Error::InvalidParams(format!(
                "curve {}: negative or undefined rate {rate} at M={memory}",
                self.label
            )));
        }
        self.points.push((memory, rate));
        Ok(())
    }

    /// Evaluates `rate` at every grid point.
    pub fn tabulate(
        label: impl Into<String>,
        grid: &[f64],
        mut rate: impl FnMut(f64) -> Result<f64>,
    ) -> Result<Self> {
        let mut curve = Self::new(label);
        for &m in grid {
            curve.push(m, rate(m)?)?;
        }
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Inclusive grid `start, start+step, .., stop`.
///
/// The last point snaps to `stop` when rounding leaves it within 1e-9·step.
pub fn memory_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(Error::InvalidParams(format!(
            "bad memory range {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| {
            let m = start + i as f64 * step;
            if (m - stop).abs() < 1e-9 * step {
                stop
            } else {
                m
            }
        })
        .collect())
}

/// `points` values uniformly spaced over `[0, n]`, endpoints included.
pub fn uniform_grid(n: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| n * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
