//! Built-in drift and diffusion presets with known closed forms or known
//! qualitative behavior, shared by tests, benchmarks, and the command line.

use ndarray::{Array1, Array2, Array3, Array4};

use crate::error::Result;
use crate::solver::{DiffusionSpec, DriftSpec};

/// `dy = -lambda y dt + ...` in one dimension.
pub fn scalar_linear_drift(lambda: f64) -> Result<DriftSpec> {
    let a = Array2::from_elem((1, 1), -lambda);
    DriftSpec::new(a, |_| Array1::zeros(1), lambda, 0.0, None)
}

/// `A = -lambda I` in `d` dimensions, no nonlinearity.
pub fn diagonal_linear_drift(lambda: f64, d: usize) -> Result<DriftSpec> {
    let a = Array2::from_diag_elem(d, -lambda);
    DriftSpec::new(a, move |_| Array1::zeros(d), lambda, 0.0, None)
}

/// Rotation-plus-contraction linear part with a cubic saturating
/// nonlinearity in the first coordinate:
/// `A = [[-mu, nu], [-nu, -mu]]`, `f(y) = (-y_0^3 / 3, 0)`.
///
/// The skew part drops out of the symmetric eigenvalue check, so the
/// dissipation rate is `mu`; the cubic term satisfies `<y, f(y)> <= 0`.
pub fn cubic_rotation_drift(mu: f64, nu: f64) -> Result<DriftSpec> {
    let a = ndarray::arr2(&[[-mu, nu], [-nu, -mu]]);
    DriftSpec::new(
        a,
        |y| ndarray::arr1(&[-y[0] * y[0] * y[0] / 3.0, 0.0]),
        mu,
        0.0,
        None,
    )
}

/// `g(y) = sigma y`, one noise channel. Unbounded but with all derivatives
/// bounded by `sigma`, which is the declared coefficient.
pub fn scalar_linear_diffusion(sigma: f64) -> Result<DiffusionSpec> {
    DiffusionSpec::new(
        (1, 1),
        move |y| Array2::from_elem((1, 1), sigma * y[0]),
        move |_| Array3::from_elem((1, 1, 1), sigma),
        Some(Box::new(|_| Array4::zeros((1, 1, 1, 1)))),
        sigma,
        true,
    )
}

/// `g(y) = sigma diag(y)` with `d` independent channels.
pub fn diagonal_linear_diffusion(sigma: f64, d: usize) -> Result<DiffusionSpec> {
    DiffusionSpec::new(
        (d, d),
        move |y| {
            let mut g = Array2::zeros((d, d));
            for a in 0..d {
                g[(a, a)] = sigma * y[a];
            }
            g
        },
        move |_| {
            let mut t = Array3::zeros((d, d, d));
            for a in 0..d {
                t[(a, a, a)] = sigma;
            }
            t
        },
        Some(Box::new(move |_| Array4::zeros((d, d, d, d)))),
        sigma,
        true,
    )
}

/// `g(y) = sigma sin(y)`, one channel: bounded with bounded derivatives, so
/// the declared coefficient is exactly `sigma`.
pub fn sin_diffusion(sigma: f64) -> Result<DiffusionSpec> {
    DiffusionSpec::new(
        (1, 1),
        move |y| Array2::from_elem((1, 1), sigma * y[0].sin()),
        move |y| Array3::from_elem((1, 1, 1), sigma * y[0].cos()),
        Some(Box::new(move |y| Array4::from_elem((1, 1, 1, 1), -sigma * y[0].sin()))),
        sigma,
        true,
    )
}

/// Coordinatewise `g(y)^{aa} = sigma sin(y^a)` on `d` channels.
pub fn coordinate_sin_diffusion(sigma: f64, d: usize) -> Result<DiffusionSpec> {
    DiffusionSpec::new(
        (d, d),
        move |y| {
            let mut g = Array2::zeros((d, d));
            for a in 0..d {
                g[(a, a)] = sigma * y[a].sin();
            }
            g
        },
        move |y| {
            let mut t = Array3::zeros((d, d, d));
            for a in 0..d {
                t[(a, a, a)] = sigma * y[a].cos();
            }
            t
        },
        Some(Box::new(move |y| {
            let mut t = Array4::zeros((d, d, d, d));
            for a in 0..d {
                t[(a, a, a, a)] = -sigma * y[a].sin();
            }
            t
        })),
        sigma,
        true,
    )
}

/// Constant identity coefficient: additive noise, `d = m`.
pub fn additive_diffusion(d: usize) -> Result<DiffusionSpec> {
    DiffusionSpec::new(
        (d, d),
        move |_| Array2::eye(d),
        move |_| Array3::zeros((d, d, d)),
        Some(Box::new(move |_| Array4::zeros((d, d, d, d)))),
        1.0,
        false,
    )
}

/// `g == 0`: the equation degenerates to the drift ODE.
pub fn zero_diffusion(d: usize, m: usize) -> Result<DiffusionSpec> {
    DiffusionSpec::new(
        (d, m),
        move |_| Array2::zeros((d, m)),
        move |_| Array3::zeros((d, m, d)),
        Some(Box::new(move |_| Array4::zeros((d, m, d, d)))),
        0.0,
        true,
    )
}
