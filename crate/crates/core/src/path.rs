//! Discrete vector-valued paths observed on a time grid.

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// A path `x: grid -> R^m`, stored densely (one row per grid point).
#[derive(Debug, Clone)]
pub struct SamplePath {
    grid: TimeGrid,
    /// `grid.len() x dims` values.
    values: Array2<f64>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Array2<f64>) -> Result<Self> {
        if values.nrows() != grid.len() {
            return Err(Error::domain(format!(
                "value rows ({}) must match grid length ({})",
                values.nrows(),
                grid.len()
            )));
        }
        if values.ncols() == 0 {
            return Err(Error::domain("path needs at least one component"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("path values must be finite"));
        }
        Ok(SamplePath { grid, values })
    }

    /// Scalar path from a plain series.
    pub fn scalar(grid: TimeGrid, series: Vec<f64>) -> Result<Self> {
        let n = series.len();
        let values = Array2::from_shape_vec((n, 1), series)
            .map_err(|e| Error::domain(e.to_string()))?;
        SamplePath::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.values.ncols()
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn at(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    /// Increment `x_{t_i, t_j} = x_{t_j} - x_{t_i}` as an owned vector.
    pub fn increment(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.dims())
            .map(|k| self.values[(j, k)] - self.values[(i, k)])
            .collect()
    }

    /// Euclidean norm of the increment over `[t_i, t_j]`.
    pub fn increment_norm(&self, i: usize, j: usize) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dims() {
            let d = self.values[(j, k)] - self.values[(i, k)];
            s += d * d;
        }
        s.sqrt()
    }

    /// Largest pointwise Euclidean norm over the grid.
    pub fn sup_norm(&self) -> f64 {
        (0..self.len())
            .map(|i| self.at(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Pointwise sum with another path on the same grid.
    pub fn add(&self, other: &SamplePath) -> Result<SamplePath> {
        if self.grid != *other.grid() || self.dims() != other.dims() {
            return Err(Error::domain("paths must share grid and dimension"));
        }
        SamplePath::new(self.grid.clone(), &self.values + other.values())
    }

    /// Path restricted to grid indices `i0..=i1`.
    pub fn window(&self, i0: usize, i1: usize) -> Result<SamplePath> {
        let grid = self.grid.window(i0, i1)?;
        let values = self
            .values
            .slice(ndarray::s![i0..=i1, ..])
            .to_owned();
        SamplePath::new(grid, values)
    }
}
