use std::ops::Deref;

use crate::error::{Error, Result};

/// Strictly increasing, non-empty set of evaluation times.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

/// Grid size used when callers do not choose one.
pub const DEFAULT_GRID_POINTS: usize = 101;

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("grid must contain at least one point"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("grid points must be finite"));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
        Ok(Grid(points))
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive. The last point
    /// is exactly `hi`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 1 {
            return Grid::new(vec![lo]);
        }
        if n < 2 || !(hi > lo) {
            return Err(Error::invalid(format!(
                "uniform grid needs n >= 2 and lo < hi (got n = {n}, [{lo}, {hi}])"
            )));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n - 1).map(|i| lo + step * i as f64).collect();
        pts.push(hi);
        Grid::new(pts)
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Grid {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}
