//! Exact-law sampling of fractional Brownian motion.
//!
//! The driving noise is an m-dimensional fBm with independent components,
//! pinned at the grid start. One component has covariance
//!
//! ```text
//! R(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2,
//! ```
//!
//! so the second moment of an increment is `E x_{s,t}^2 = |t - s|^{2H}` per
//! component. Sampling factorizes the dense increment covariance once per
//! (kernel, grid) pair; individual draws are then a matrix-vector product,
//! which keeps ensembles cheap.

use nalgebra::DMatrix;
use ndarray::Array2;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::path::SamplePath;
use crate::rng::stream_rng;

/// Hard cap on grid size for the dense factorization.
pub const MAX_SAMPLER_STEPS: usize = 8192;

/// Parameters of the fractional Brownian driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbmSpec {
    hurst: f64,
    dims: usize,
}

impl FbmSpec {
    pub fn new(hurst: f64, dims: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::domain(format!(
                "hurst must lie strictly in (0, 1), got {hurst}"
            )));
        }
        if dims == 0 {
            return Err(Error::domain("driver needs at least one component"));
        }
        Ok(FbmSpec { hurst, dims })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// The regime in which level-2 lifts of fBm carry the pathwise theory:
    /// rougher than Brownian but still liftable.
    pub fn is_rough_regime(&self) -> bool {
        self.hurst > 1.0 / 3.0 && self.hurst < 0.5
    }
}

/// Two-point covariance evaluator `(s, t) -> E(X_s ⊗ X_t)`, dims x dims.
pub struct CovKernel {
    dims: usize,
    eval: Box<dyn Fn(f64, f64) -> DMatrix<f64> + Send + Sync>,
}

impl CovKernel {
    pub fn from_fn<F>(dims: usize, eval: F) -> Self
    where
        F: Fn(f64, f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        CovKernel {
            dims,
            eval: Box::new(eval),
        }
    }

    /// Kernel of `spec.dims` independent fBm components.
    pub fn fbm(spec: FbmSpec) -> Self {
        let h2 = 2.0 * spec.hurst();
        let dims = spec.dims();
        CovKernel::from_fn(dims, move |s, t| {
            let r = 0.5 * (s.abs().powf(h2) + t.abs().powf(h2) - (t - s).abs().powf(h2));
            DMatrix::identity(dims, dims) * r
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn eval(&self, s: f64, t: f64) -> DMatrix<f64> {
        (self.eval)(s, t)
    }

    /// Rectangular increment covariance
    /// `E(X_{s,t} ⊗ X_{u,v}) = R(t,v) - R(t,u) - R(s,v) + R(s,u)`.
    pub fn rect_cov(&self, s: f64, t: f64, u: f64, v: f64) -> DMatrix<f64> {
        self.eval(t, v) - self.eval(t, u) - self.eval(s, v) + self.eval(s, u)
    }

    /// Gram matrix of all grid increments, `(n-1)*dims` square, blocked by
    /// increment index.
    pub fn increment_gram(&self, grid: &TimeGrid) -> DMatrix<f64> {
        let steps = grid.len() - 1;
        let m = self.dims;
        let mut gram = DMatrix::zeros(steps * m, steps * m);
        for i in 0..steps {
            for j in i..steps {
                let block =
                    self.rect_cov(grid.t(i), grid.t(i + 1), grid.t(j), grid.t(j + 1));
                for a in 0..m {
                    for b in 0..m {
                        gram[(i * m + a, j * m + b)] = block[(a, b)];
                        gram[(j * m + b, i * m + a)] = block[(a, b)];
                    }
                }
            }
        }
        gram
    }

    /// Smallest eigenvalue of the increment Gram matrix; a valid kernel stays
    /// above a small negative roundoff floor.
    pub fn min_gram_eigenvalue(&self, grid: &TimeGrid) -> f64 {
        let gram = self.increment_gram(grid);
        nalgebra::SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Reusable sampler: holds the Cholesky factor of the scalar increment
/// covariance for one (spec, grid) pair.
pub struct FbmSampler {
    spec: FbmSpec,
    grid: TimeGrid,
    /// Lower-triangular factor, `(n-1) x (n-1)`; shared by all components.
    factor: DMatrix<f64>,
    /// Whether the diagonal had to be jittered to factorize.
    jittered: bool,
}

impl FbmSampler {
    pub fn new(spec: FbmSpec, grid: TimeGrid) -> Result<Self> {
        if grid.len() - 1 > MAX_SAMPLER_STEPS {
            return Err(Error::domain(format!(
                "grid has {} steps; the dense sampler caps at {}",
                grid.len() - 1,
                MAX_SAMPLER_STEPS
            )));
        }
        if grid.first() < 0.0 {
            return Err(Error::domain("fbm kernel requires nonnegative times"));
        }
        let steps = grid.len() - 1;
        let h2 = 2.0 * spec.hurst();
        let r = |s: f64, t: f64| 0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2));
        let mut cov = DMatrix::zeros(steps, steps);
        for i in 0..steps {
            for j in i..steps {
                let c = r(grid.t(i + 1), grid.t(j + 1)) - r(grid.t(i + 1), grid.t(j))
                    - r(grid.t(i), grid.t(j + 1))
                    + r(grid.t(i), grid.t(j));
                cov[(i, j)] = c;
                cov[(j, i)] = c;
            }
        }
        let mut jittered = false;
        let factor = match cov.clone().cholesky() {
            Some(ch) => ch.l(),
            None => {
                // Roundoff can push the smallest eigenvalue fractionally
                // below zero for fine grids; one trace-scaled jitter retry.
                jittered = true;
                let jitter = 1e-12 * cov.trace();
                for i in 0..steps {
                    cov[(i, i)] += jitter;
                }
                cov.cholesky()
                    .ok_or_else(|| {
                        Error::numerical(
                            "increment covariance is not positive definite even after jitter",
                        )
                    })?
                    .l()
            }
        };
        Ok(FbmSampler {
            spec,
            grid,
            factor,
            jittered,
        })
    }

    pub fn spec(&self) -> FbmSpec {
        self.spec
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn was_jittered(&self) -> bool {
        self.jittered
    }

    /// One path for the given ChaCha stream. Components are drawn in order,
    /// so the output is bitwise stable for a fixed (seed, stream, grid, spec).
    pub fn sample_with(&self, rng: &mut ChaCha8Rng) -> SamplePath {
        let steps = self.grid.len() - 1;
        let m = self.spec.dims();
        let mut values = Array2::zeros((steps + 1, m));
        for dim in 0..m {
            let z: Vec<f64> = (0..steps)
                .map(|_| StandardNormal.sample(rng))
                .collect();
            // increments = L z, accumulated into the path
            let mut acc = 0.0;
            for i in 0..steps {
                let mut inc = 0.0;
                for j in 0..=i {
                    inc += self.factor[(i, j)] * z[j];
                }
                acc += inc;
                values[(i + 1, dim)] = acc;
            }
        }
        SamplePath::new(self.grid.clone(), values).expect("sampler output is well formed")
    }

    /// Path for work item `stream` under `master_seed`.
    pub fn sample(&self, master_seed: u64, stream: u64) -> SamplePath {
        let mut rng = stream_rng(master_seed, stream);
        self.sample_with(&mut rng)
    }
}

/// One-shot convenience draw (stream 0 of `seed`). Ensembles should build an
/// [`FbmSampler`] once and draw per-index streams from it.
pub fn sample_fbm(spec: FbmSpec, grid: &TimeGrid, seed: u64) -> Result<SamplePath> {
    Ok(FbmSampler::new(spec, grid.clone())?.sample(seed, 0))
}
