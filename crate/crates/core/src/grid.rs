//! Time grids shared by samplers, lifts and solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing finite grid on which every discrete object lives.
///
/// Partitions, greedy times and seminorm optimizers are always taken over
/// subsets of these points; nothing in the crate interpolates between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Builds a grid from explicit points. Rejects grids with fewer than two
    /// points, non-finite entries or non-increasing spacing.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("grid points must be finite"));
        }
        for w in points.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain(format!(
                    "grid points must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(TimeGrid { points })
    }

    /// Uniform grid with `n` steps over `[t0, t1]` (so `n + 1` points).
    pub fn uniform(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("uniform grid needs at least one step"));
        }
        if !(t1 > t0) {
            return Err(Error::domain("uniform grid needs t1 > t0"));
        }
        let dt = (t1 - t0) / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).collect();
        // Pin the endpoint so horizons are exact regardless of rounding.
        points[n] = t1;
        TimeGrid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn span(&self) -> f64 {
        self.last() - self.first()
    }

    /// Largest step size.
    pub fn mesh(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Smallest step size.
    pub fn min_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Grid restricted to indices `i0..=i1`.
    pub fn window(&self, i0: usize, i1: usize) -> Result<TimeGrid> {
        if i1 <= i0 || i1 >= self.points.len() {
            return Err(Error::domain("invalid grid window"));
        }
        TimeGrid::new(self.points[i0..=i1].to_vec())
    }

    /// Every coarser grid obtained by keeping one point in `stride`.
    /// Endpoints are always kept; the stride must tile the step count.
    pub fn coarsen(&self, stride: usize) -> Result<TimeGrid> {
        let steps = self.points.len() - 1;
        if stride == 0 || steps % stride != 0 {
            return Err(Error::domain(format!(
                "stride {stride} does not tile {steps} steps"
            )));
        }
        TimeGrid::new(self.points.iter().copied().step_by(stride).collect())
    }
}
