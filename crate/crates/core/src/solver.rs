//! Second-order one-step solver for differential equations driven by a
//! level-2 rough path, with a dissipative linear-plus-nonlinear drift. Also
//! houses the pure-diffusion and linearized flows and a posteriori bounds on
//! the solution's controlled seminorm and sup norm in terms of greedy
//! crossing counts.

use ndarray::{Array1, Array2, Array3, Array4, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::greedy::{greedy_times, GreedyVariant};
use crate::grid::TimeGrid;
use crate::integrate::{sewing_constant, ControlledPath};
use crate::norms::{var_report, SeminormKind};
use crate::path::SamplePath;
use crate::rng::stream_rng;
use crate::rough::RoughPath;
use rand::Rng;

/// Hard ceiling on the state norm; beyond it the solve aborts as divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

type VecField = Box<dyn Fn(ArrayView1<f64>) -> Array1<f64> + Send + Sync>;
type MatField = Box<dyn Fn(ArrayView1<f64>) -> Array2<f64> + Send + Sync>;
type TensorField = Box<dyn Fn(ArrayView1<f64>) -> Array3<f64> + Send + Sync>;
type Tensor4Field = Box<dyn Fn(ArrayView1<f64>) -> Array4<f64> + Send + Sync>;
type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Drift `F(y) = Ay + f(y)` with a negative-definite linear part.
///
/// `lambda_a` is the declared dissipation rate of `A` and `c_f` the declared
/// one-sided bound `<y, f(y)> <= c_f |y|^2`; both are inputs to the bound
/// checks, not quantities inferred here.
pub struct DriftSpec {
    a: Array2<f64>,
    f: VecField,
    lambda_a: f64,
    c_f: f64,
    h_fn: Option<ScalarFn>,
}

impl DriftSpec {
    pub fn new(
        a: Array2<f64>,
        f: impl Fn(ArrayView1<f64>) -> Array1<f64> + Send + Sync + 'static,
        lambda_a: f64,
        c_f: f64,
        h_fn: Option<ScalarFn>,
    ) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d {
            return Err(Error::domain("drift matrix must be square and nonempty"));
        }
        if !(lambda_a > 0.0) || c_f < 0.0 {
            return Err(Error::domain("drift rates must satisfy lambda_a > 0, c_f >= 0"));
        }
        let top = symmetric_part_max_eigenvalue(&a);
        if top > -lambda_a + 1e-10 {
            return Err(Error::domain(format!(
                "linear part is not dissipative at rate {lambda_a}: max symmetric eigenvalue {top:.6e}"
            )));
        }
        let zero = Array1::zeros(d);
        let f0 = f(zero.view());
        if f0.len() != d {
            return Err(Error::domain("drift nonlinearity must preserve dimension"));
        }
        let f0n = f0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if f0n > 1e-12 {
            return Err(Error::domain(format!("nonlinearity must vanish at zero, |f(0)| = {f0n:.3e}")));
        }
        let spec = DriftSpec { a, f: Box::new(f), lambda_a, c_f, h_fn };
        if spec.h_fn.is_some() {
            let mut rng = stream_rng(0x4a11, 1);
            for _ in 0..64 {
                let y: Array1<f64> =
                    Array1::from_iter((0..d).map(|_| rng.random_range(-2.0..2.0)));
                let r = norm(&y.view());
                if r < 1e-8 {
                    continue;
                }
                let fy = norm(&spec.eval_f(y.view()).view());
                let cap = r * spec.h_at(r).unwrap();
                if fy > cap * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::domain(format!(
                        "nonlinearity exceeds its growth envelope at |y| = {r:.3}: {fy:.3e} > {cap:.3e}"
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn dims(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> ArrayView2<'_, f64> {
        self.a.view()
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn c_f(&self) -> f64 {
        self.c_f
    }

    pub fn h_at(&self, r: f64) -> Option<f64> {
        self.h_fn.as_ref().map(|h| h(r))
    }

    pub fn eval_f(&self, y: ArrayView1<f64>) -> Array1<f64> {
        (self.f)(y)
    }

    /// `Ay + f(y)`.
    pub fn full_drift(&self, y: ArrayView1<f64>) -> Array1<f64> {
        self.a.dot(&y) + self.eval_f(y)
    }

    /// Spectral norm of the linear part.
    pub fn matrix_norm(&self) -> f64 {
        let d = self.a.nrows();
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| self.a[(i, j)]);
        m.singular_values().max()
    }

    /// Lipschitz estimate for the full drift: the spectral norm of `A` plus
    /// the largest difference quotient of `f` over random probe pairs drawn
    /// from the ball of the given radius.
    pub fn lipschitz_probe(&self, radius: f64, pairs: usize, seed: u64) -> f64 {
        let d = self.dims();
        let mut rng = stream_rng(seed, 2);
        let r = radius.max(1e-6);
        let mut worst = 0.0_f64;
        for _ in 0..pairs {
            let y: Array1<f64> = Array1::from_iter((0..d).map(|_| rng.random_range(-r..r)));
            let z: Array1<f64> = Array1::from_iter((0..d).map(|_| rng.random_range(-r..r)));
            let gap = norm(&(&y - &z).view());
            if gap < 1e-12 {
                continue;
            }
            let dfy = self.eval_f(y.view()) - self.eval_f(z.view());
            worst = worst.max(norm(&dfy.view()) / gap);
        }
        self.matrix_norm() + worst
    }
}

impl std::fmt::Debug for DriftSpec {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("DriftSpec")
            .field("dims", &self.dims())
            .field("lambda_a", &self.lambda_a)
            .field("c_f", &self.c_f)
            .finish()
    }
}

fn symmetric_part_max_eigenvalue(a: &Array2<f64>) -> f64 {
    let d = a.nrows();
    let sym = nalgebra::DMatrix::from_fn(d, d, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    sym.symmetric_eigen().eigenvalues.max()
}

fn norm(v: &ArrayView1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Diffusion coefficient `g: R^d -> R^{d x m}` with its derivative tensors.
///
/// `dg` has layout `(a, b, e) = d g^{ab} / d y^e`; `d2g`, when present,
/// appends a second state index `(a, b, e, f)`.
pub struct DiffusionSpec {
    g: MatField,
    dg: TensorField,
    d2g: Option<Tensor4Field>,
    c_g: f64,
    vanishing_at_zero: bool,
    dims: (usize, usize),
}

impl DiffusionSpec {
    pub fn new(
        dims: (usize, usize),
        g: impl Fn(ArrayView1<f64>) -> Array2<f64> + Send + Sync + 'static,
        dg: impl Fn(ArrayView1<f64>) -> Array3<f64> + Send + Sync + 'static,
        d2g: Option<Tensor4Field>,
        c_g: f64,
        vanishing_at_zero: bool,
    ) -> Result<Self> {
        let (d, m) = dims;
        if d == 0 || m == 0 {
            return Err(Error::domain("diffusion needs positive state and noise dimensions"));
        }
        if c_g < 0.0 {
            return Err(Error::domain("diffusion coefficient bound must be nonnegative"));
        }
        let spec = DiffusionSpec { g: Box::new(g), dg: Box::new(dg), d2g, c_g, vanishing_at_zero, dims };
        let zero = Array1::zeros(d);
        let g0 = spec.eval_g(zero.view());
        if g0.dim() != (d, m) {
            return Err(Error::domain(format!(
                "diffusion returned shape {:?}, expected {:?}",
                g0.dim(),
                (d, m)
            )));
        }
        if spec.vanishing_at_zero {
            let g0n = g0.iter().map(|v| v * v).sum::<f64>().sqrt();
            if g0n > 1e-12 {
                return Err(Error::domain(format!(
                    "diffusion declared vanishing at zero but |g(0)| = {g0n:.3e}"
                )));
            }
        }
        spec.check_derivative_consistency()?;
        Ok(spec)
    }

    fn check_derivative_consistency(&self) -> Result<()> {
        let (d, m) = self.dims;
        let eps = 1e-5;
        let mut rng = stream_rng(0xd1ff, 3);
        for _ in 0..16 {
            let y: Array1<f64> = Array1::from_iter((0..d).map(|_| rng.random_range(-1.0..1.0)));
            let mut e: Array1<f64> = Array1::from_iter((0..d).map(|_| rng.random_range(-1.0..1.0)));
            let en = norm(&e.view());
            if en < 1e-8 {
                continue;
            }
            e.mapv_inplace(|v| v / en);
            let yp = &y + &(eps * &e);
            let ym = &y - &(eps * &e);
            let gp = self.eval_g(yp.view());
            let g0 = self.eval_g(y.view());
            let gm = self.eval_g(ym.view());
            let jac = self.eval_dg(y.view());
            let mut err = 0.0_f64;
            let mut curve = 0.0_f64;
            for a in 0..d {
                for b in 0..m {
                    let fd = (gp[(a, b)] - g0[(a, b)]) / eps;
                    let lin: f64 = (0..d).map(|q| jac[(a, b, q)] * e[q]).sum();
                    err += (fd - lin) * (fd - lin);
                    let second = (gp[(a, b)] - 2.0 * g0[(a, b)] + gm[(a, b)]) / (eps * eps);
                    curve += second * second;
                }
            }
            let err = err.sqrt();
            let scale = curve.sqrt().max(1.0);
            if err > 10.0 * eps * scale {
                return Err(Error::domain(format!(
                    "diffusion derivative inconsistent with finite differences: {err:.3e} > {:.3e}",
                    10.0 * eps * scale
                )));
            }
        }
        Ok(())
    }

    pub fn state_dims(&self) -> usize {
        self.dims.0
    }

    pub fn noise_dims(&self) -> usize {
        self.dims.1
    }

    pub fn c_g(&self) -> f64 {
        self.c_g
    }

    pub fn vanishing_at_zero(&self) -> bool {
        self.vanishing_at_zero
    }

    pub fn eval_g(&self, y: ArrayView1<f64>) -> Array2<f64> {
        (self.g)(y)
    }

    pub fn eval_dg(&self, y: ArrayView1<f64>) -> Array3<f64> {
        (self.dg)(y)
    }

    pub fn eval_d2g(&self, y: ArrayView1<f64>) -> Option<Array4<f64>> {
        self.d2g.as_ref().map(|t| t(y))
    }

    pub fn has_d2g(&self) -> bool {
        self.d2g.is_some()
    }

    /// Second-order step coefficient `(a, b, c) -> sum_e dg^{ab}/dy^e g^{ec}`,
    /// the derivative of `g(y)` along the driver direction `c`.
    pub fn davie_coeff(&self, y: ArrayView1<f64>) -> Array3<f64> {
        let (d, m) = self.dims;
        let g = self.eval_g(y);
        let dg = self.eval_dg(y);
        let mut out = Array3::zeros((d, m, m));
        for a in 0..d {
            for b in 0..m {
                for c in 0..m {
                    let mut v = 0.0;
                    for e in 0..d {
                        v += dg[(a, b, e)] * g[(e, c)];
                    }
                    out[(a, b, c)] = v;
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for DiffusionSpec {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("DiffusionSpec")
            .field("dims", &self.dims)
            .field("c_g", &self.c_g)
            .field("vanishing_at_zero", &self.vanishing_at_zero)
            .finish()
    }
}

/// Discrete solution: states plus the matching controlled derivative rows.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: TimeGrid,
    y: Array2<f64>,
    y_prime: Array3<f64>,
    scheme: String,
    max_step: f64,
}

impl Trajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn y_prime(&self) -> &Array3<f64> {
        &self.y_prime
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.y.ncols()
    }

    pub fn noise_dims(&self) -> usize {
        self.y_prime.dim().2
    }

    pub fn state(&self, k: usize) -> ArrayView1<'_, f64> {
        self.y.row(k)
    }

    pub fn norm_at(&self, k: usize) -> f64 {
        norm(&self.y.row(k))
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).map(|k| self.norm_at(k)).fold(0.0, f64::max)
    }

    pub fn sample_path(&self) -> SamplePath {
        SamplePath::new(self.grid.clone(), self.y.clone()).expect("trajectory shapes agree")
    }

    /// The solution viewed as a controlled path over its driver.
    pub fn controlled(&self) -> ControlledPath {
        ControlledPath::new(self.sample_path(), self.y_prime.clone())
            .expect("trajectory shapes agree")
    }
}

fn validate_solve_inputs(
    d: usize,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    y0: &Array1<f64>,
    lo: usize,
    hi: usize,
) -> Result<()> {
    if diff.state_dims() != d {
        return Err(Error::domain(format!(
            "diffusion state dimension {} does not match {}",
            diff.state_dims(),
            d
        )));
    }
    if diff.noise_dims() != rp.dims() {
        return Err(Error::domain(format!(
            "driver has {} channels, diffusion expects {}",
            rp.dims(),
            diff.noise_dims()
        )));
    }
    if y0.len() != d {
        return Err(Error::domain("initial state dimension mismatch"));
    }
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(Error::domain("initial state must be finite"));
    }
    if lo >= hi || hi >= rp.len() {
        return Err(Error::domain(format!(
            "window [{lo}, {hi}] invalid for {} grid points",
            rp.len()
        )));
    }
    Ok(())
}

fn guard_state(y: &Array1<f64>, t: f64) -> Result<()> {
    let n = norm(&y.view());
    if !n.is_finite() || n > DIVERGENCE_GUARD {
        return Err(Error::Diverged { t, norm: n });
    }
    Ok(())
}

/// One-step second-order scheme for `dy = [Ay + f(y)]dt + g(y)dx`:
///
/// `y_{k+1} = y_k + [Ay_k + f(y_k)] dt + g(y_k) dx + (Dg g)(y_k) : X_k`,
///
/// with the second level contracted as `sum_{b,c} (Dg_b g_c)^a X^{bc}`.
/// Drift enters at the left point only; its higher-order correction sits
/// below the rough-term error.
pub fn solve(
    drift: &DriftSpec,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    y0: &Array1<f64>,
    lo: usize,
    hi: usize,
) -> Result<Trajectory> {
    solve_inner(Some(drift), diff, rp, y0, lo, hi, "davie")
}

/// Same scheme with the drift removed: `dz = g(z)dx`.
pub fn solve_pure_diffusion(
    diff: &DiffusionSpec,
    rp: &RoughPath,
    z0: &Array1<f64>,
    lo: usize,
    hi: usize,
) -> Result<Trajectory> {
    solve_inner(None, diff, rp, z0, lo, hi, "davie-diffusion")
}

fn solve_inner(
    drift: Option<&DriftSpec>,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    y0: &Array1<f64>,
    lo: usize,
    hi: usize,
    scheme: &str,
) -> Result<Trajectory> {
    let d = diff.state_dims();
    let m = diff.noise_dims();
    if let Some(dr) = drift {
        if dr.dims() != d {
            return Err(Error::domain("drift and diffusion dimensions disagree"));
        }
    }
    validate_solve_inputs(d, diff, rp, y0, lo, hi)?;
    let grid = rp.grid();
    let path = rp.path();
    let areas = rp.step_areas();
    let npts = hi - lo + 1;
    let mut y = Array2::<f64>::zeros((npts, d));
    let mut y_prime = Array3::<f64>::zeros((npts, d, m));
    let mut cur = y0.clone();
    guard_state(&cur, grid.t(lo))?;
    y.row_mut(0).assign(&cur);
    y_prime.index_axis_mut(ndarray::Axis(0), 0).assign(&diff.eval_g(cur.view()));
    for k in lo..hi {
        let gk = diff.eval_g(cur.view());
        let davie = diff.davie_coeff(cur.view());
        let dt = grid.t(k + 1) - grid.t(k);
        let mut next = cur.clone();
        if let Some(dr) = drift {
            next = next + dr.full_drift(cur.view()).mapv(|v| v * dt);
        }
        for a in 0..d {
            let mut v = next[a];
            for b in 0..m {
                v += gk[(a, b)] * (path.values()[(k + 1, b)] - path.values()[(k, b)]);
                for c in 0..m {
                    v += davie[(a, b, c)] * areas[(k, b, c)];
                }
            }
            next[a] = v;
        }
        guard_state(&next, grid.t(k + 1))?;
        let r = k + 1 - lo;
        y.row_mut(r).assign(&next);
        y_prime.index_axis_mut(ndarray::Axis(0), r).assign(&diff.eval_g(next.view()));
        cur = next;
    }
    let sub = grid.window(lo, hi)?;
    let max_step = (lo..hi).map(|k| grid.t(k + 1) - grid.t(k)).fold(0.0, f64::max);
    Ok(Trajectory { grid: sub, y, y_prime, scheme: scheme.to_string(), max_step })
}

/// Linearization of the pure-diffusion flow along a base trajectory:
/// `d xi = Dg(z_t) xi dx`, stepped with the same second-order scheme. The
/// second-level coefficient differentiates `Dg(z)xi` along the driver,
/// using `d2g` when the diffusion provides it.
pub fn linearized_flow(
    diff: &DiffusionSpec,
    rp: &RoughPath,
    base: &Trajectory,
    xi0: &Array1<f64>,
    lo: usize,
    hi: usize,
) -> Result<Trajectory> {
    let d = diff.state_dims();
    let m = diff.noise_dims();
    validate_solve_inputs(d, diff, rp, xi0, lo, hi)?;
    if base.len() != hi - lo + 1 || base.dims() != d {
        return Err(Error::domain("base trajectory does not cover the window"));
    }
    let grid = rp.grid();
    let path = rp.path();
    let areas = rp.step_areas();
    let npts = hi - lo + 1;
    let mut xi = Array2::<f64>::zeros((npts, d));
    let mut xi_prime = Array3::<f64>::zeros((npts, d, m));
    let mut cur = xi0.clone();
    guard_state(&cur, grid.t(lo))?;
    let coeff_rows = |z: ArrayView1<f64>, v: ArrayView1<f64>| -> Array2<f64> {
        let dg = diff.eval_dg(z);
        let mut out = Array2::<f64>::zeros((d, m));
        for a in 0..d {
            for b in 0..m {
                let mut s = 0.0;
                for e in 0..d {
                    s += dg[(a, b, e)] * v[e];
                }
                out[(a, b)] = s;
            }
        }
        out
    };
    xi.row_mut(0).assign(&cur);
    xi_prime
        .index_axis_mut(ndarray::Axis(0), 0)
        .assign(&coeff_rows(base.state(0), cur.view()));
    for k in lo..hi {
        let r = k - lo;
        let z = base.state(r);
        let dg = diff.eval_dg(z);
        let gz = diff.eval_g(z);
        let d2g = diff.eval_d2g(z);
        let mut next = cur.clone();
        for a in 0..d {
            let mut v = next[a];
            for b in 0..m {
                let mut lin = 0.0;
                for e in 0..d {
                    lin += dg[(a, b, e)] * cur[e];
                }
                v += lin * (path.values()[(k + 1, b)] - path.values()[(k, b)]);
                for c in 0..m {
                    // (Dg_b Dg_c + D2g_b[g_c]) xi contracts the second level.
                    let mut second = 0.0;
                    for e in 0..d {
                        let mut inner = 0.0;
                        for q in 0..d {
                            inner += dg[(e, c, q)] * cur[q];
                        }
                        second += dg[(a, b, e)] * inner;
                    }
                    if let Some(h) = &d2g {
                        for e in 0..d {
                            for q in 0..d {
                                second += h[(a, b, e, q)] * gz[(q, c)] * cur[e];
                            }
                        }
                    }
                    v += second * areas[(k, b, c)];
                }
            }
            next[a] = v;
        }
        guard_state(&next, grid.t(k + 1))?;
        xi.row_mut(r + 1).assign(&next);
        xi_prime
            .index_axis_mut(ndarray::Axis(0), r + 1)
            .assign(&coeff_rows(base.state(r + 1), next.view()));
        cur = next;
    }
    let sub = grid.window(lo, hi)?;
    let max_step = (lo..hi).map(|k| grid.t(k + 1) - grid.t(k)).fold(0.0, f64::max);
    Ok(Trajectory { grid: sub, y: xi, y_prime: xi_prime, scheme: "davie-linearized".into(), max_step })
}

/// A posteriori comparison of the solution's controlled seminorm and sup
/// norm against the crossing-count bounds.
#[derive(Debug, Clone)]
pub struct SolutionBoundReport {
    /// Pieces (crossings + 1) of the time-term greedy partition at
    /// `mu / (3M)`.
    pub nbar: usize,
    /// Same count at the companion threshold `mu / (2M)`.
    pub nbar_half: usize,
    pub m_const: f64,
    pub l_f: f64,
    pub c_alpha: f64,
    pub gamma: f64,
    /// `|y'|_{p-var} + |R^y|_{(p/2, sigma)}` on the window.
    pub lhs_seminorm: f64,
    pub lhs_sup: f64,
    /// Logarithms of the two right-hand sides; log space keeps large counts
    /// finite.
    pub log_rhs_seminorm: f64,
    pub log_rhs_sup: f64,
    pub seminorm_holds: bool,
    pub sup_holds: bool,
    pub coarse_warning: Option<String>,
}

/// Right-hand sides of the two bounds in log space:
/// `log(|y_a| n/2) + n log((1+mu)/(1-mu))` and
/// `log |y_a| + n log((1+mu)/(1-mu))`. Degenerate `|y_a| = 0` gives `-inf`.
pub fn bound_rhs_log(y_a_norm: f64, nbar: usize, mu: f64) -> (f64, f64) {
    let rate = ((1.0 + mu) / (1.0 - mu)).ln();
    let grow = nbar as f64 * rate;
    let sup = y_a_norm.ln() + grow;
    let semi = (0.5 * y_a_norm * nbar as f64).ln() + grow;
    (semi, sup)
}

#[allow(clippy::too_many_arguments)]
pub fn solution_bound_check(
    traj: &Trajectory,
    drift: &DriftSpec,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    mu: f64,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<SolutionBoundReport> {
    if !(0.0 < mu && mu < 1.0) {
        return Err(Error::domain("contraction factor must lie in (0, 1)"));
    }
    if traj.len() != hi - lo + 1 {
        return Err(Error::domain("trajectory does not cover the rough-path window"));
    }
    let span = rp.grid().t(hi) - rp.grid().t(lo);
    if span > 1.0 + 1e-12 {
        return Err(Error::domain(format!("window span {span:.6} exceeds 1")));
    }
    let c_alpha = sewing_constant(1.0 / p + sigma)?;
    let l_f = drift.lipschitz_probe(traj.sup_norm() + 1e-3, 1000, 0x10f);
    let c_g = diff.c_g();
    let m_const = (c_alpha * c_g * (1.0 + c_g * c_g)).max(l_f * (c_g + 1.0)).max(1.0 / 3.0);
    let gamma = mu / (3.0 * m_const);
    let bar = greedy_times(rp, gamma, p, sigma, lo, hi, GreedyVariant::WithTimeTerm)?;
    let bar_half =
        greedy_times(rp, mu / (2.0 * m_const), p, sigma, lo, hi, GreedyVariant::WithTimeTerm)?;
    let nbar = bar.crossings + 1;
    let nbar_half = bar_half.crossings + 1;
    let cp = traj.controlled();
    let driver = rp.path().window(lo, hi)?;
    let dpart = var_report(
        traj.grid(),
        |i, j| cp.derivative_increment_norm(i, j),
        SeminormKind::PVar,
        p,
        0.0,
        0,
        traj.len() - 1,
    )?
    .value;
    let rkind = if sigma == 0.0 { SeminormKind::PVar } else { SeminormKind::PSigmaVar };
    let rpart = var_report(
        traj.grid(),
        |i, j| cp.remainder_norm(&driver, i, j),
        rkind,
        p / 2.0,
        sigma,
        0,
        traj.len() - 1,
    )?
    .value;
    let lhs_seminorm = dpart + rpart;
    let lhs_sup = traj.sup_norm();
    let y_a = traj.norm_at(0);
    let (log_rhs_seminorm, log_rhs_sup) = bound_rhs_log(y_a, nbar, mu);
    let seminorm_holds = if lhs_seminorm == 0.0 {
        true
    } else {
        lhs_seminorm.ln() <= log_rhs_seminorm + 1e-12
    };
    let sup_holds =
        if lhs_sup == 0.0 { true } else { lhs_sup.ln() <= log_rhs_sup + 1e-12 };
    Ok(SolutionBoundReport {
        nbar,
        nbar_half,
        m_const,
        l_f,
        c_alpha,
        gamma,
        lhs_seminorm,
        lhs_sup,
        log_rhs_seminorm,
        log_rhs_sup,
        seminorm_holds,
        sup_holds,
        coarse_warning: bar.coarse_warning,
    })
}
