//! Stability diagnostics for the dissipative rough system: polar
//! decomposition of trajectories, residual checks for the norm and angle
//! equations, an a priori bound on the angular controlled seminorm,
//! Lyapunov-exponent estimation with parameter sweeps, and the discrete
//! window-chain inequality that certifies an exponential decay rate.

use ndarray::{Array1, Array2, Array3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbm::{FbmSampler, FbmSpec};
use crate::grid::TimeGrid;
use crate::integrate::{sewing_constant, young_loeve_constant, ControlledPath};
use crate::norms::holder_of;
use crate::path::SamplePath;
use crate::rough::RoughPath;
use crate::solver::{solve, DiffusionSpec, DriftSpec, Trajectory};

/// Below this norm a state is treated as numerically at equilibrium.
pub const POLAR_FLOOR: f64 = 1e-30;

/// Relative slack for the window-chain comparison: it absorbs the
/// compensated-sum discretization residual on windows where the rough
/// integral nearly vanishes, and sits orders of magnitude below the
/// inequality's designed margin.
pub const CHAIN_SLACK: f64 = 1e-4;

/// Additive slack for the rate-bound comparison, absorbing the per-window
/// slack compounded across windows.
pub const RATE_SLACK: f64 = 1e-3;

/// Log-norm and unit direction of a trajectory, masked below the floor.
#[derive(Debug, Clone)]
pub struct PolarSeries {
    grid: TimeGrid,
    lognorm: Vec<f64>,
    theta: Array2<f64>,
    valid: Vec<bool>,
    floor: f64,
}

impl PolarSeries {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn lognorm(&self) -> &[f64] {
        &self.lognorm
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.lognorm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lognorm.is_empty()
    }

    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    /// Index of the first masked entry, if any.
    pub fn first_invalid(&self) -> Option<usize> {
        self.valid.iter().position(|&v| !v)
    }
}

pub fn polar_decompose(traj: &Trajectory, floor: f64) -> Result<PolarSeries> {
    if !(floor > 0.0) {
        return Err(Error::domain("polar floor must be positive"));
    }
    let n = traj.len();
    let d = traj.dims();
    let mut lognorm = vec![f64::NAN; n];
    let mut theta = Array2::zeros((n, d));
    let mut valid = vec![false; n];
    let mut any = false;
    for k in 0..n {
        let r = traj.norm_at(k);
        if r >= floor {
            lognorm[k] = r.ln();
            for a in 0..d {
                theta[(k, a)] = traj.state(k)[a] / r;
            }
            valid[k] = true;
            any = true;
        }
    }
    if !any {
        return Err(Error::numerical("entire trajectory sits below the polar floor"));
    }
    Ok(PolarSeries { grid: traj.grid().clone(), lognorm, theta, valid, floor })
}

/// Endpoint-quotient exponent estimates for one trajectory.
#[derive(Debug, Clone)]
pub struct LyapunovEstimate {
    /// `(log|y_end| - log|y_0|) / (t_end - t_0)` over the whole horizon.
    pub exponent_full: f64,
    /// Same quotient after discarding the first fifth of the horizon.
    pub exponent_last80: f64,
    /// Quotients over consecutive unit-time windows.
    pub per_window: Vec<f64>,
    /// True when the trajectory crossed the floor; the exponents are then
    /// computed up to the crossing time, a lower estimate of the decay.
    pub floored: bool,
    pub t_cross: Option<f64>,
}

pub fn lyapunov_estimate(polar: &PolarSeries) -> Result<LyapunovEstimate> {
    if !polar.valid[0] {
        return Err(Error::domain("exponent estimation needs a valid initial state"));
    }
    let end = polar.first_invalid().map(|i| i - 1).unwrap_or(polar.len() - 1);
    if end == 0 {
        return Err(Error::domain("trajectory collapses immediately; no window to estimate on"));
    }
    let floored = polar.first_invalid().is_some();
    let grid = &polar.grid;
    let t0 = grid.t(0);
    let t_end = grid.t(end);
    let full = (polar.lognorm[end] - polar.lognorm[0]) / (t_end - t0);
    let t_burn = t0 + 0.2 * (t_end - t0);
    let k_burn = (0..=end).find(|&k| grid.t(k) >= t_burn).unwrap_or(0);
    let last80 = if end > k_burn {
        (polar.lognorm[end] - polar.lognorm[k_burn]) / (t_end - grid.t(k_burn))
    } else {
        full
    };
    let mut per_window = Vec::new();
    let mut start = 0usize;
    for k in 1..=end {
        if grid.t(k) - grid.t(start) >= 1.0 - 1e-12 {
            per_window
                .push((polar.lognorm[k] - polar.lognorm[start]) / (grid.t(k) - grid.t(start)));
            start = k;
        }
    }
    Ok(LyapunovEstimate {
        exponent_full: full,
        exponent_last80: last80,
        per_window,
        floored,
        t_cross: if floored { Some(t_end) } else { None },
    })
}

/// Max prefix defects of the four observable equations along a trajectory.
#[derive(Debug, Clone)]
pub struct Step1Residuals {
    pub norm_sq: f64,
    pub norm: f64,
    pub lognorm: f64,
    pub theta: f64,
    /// Number of leading grid points the norm-based residuals used (the
    /// prefix on which the state stays above the floor).
    pub valid_prefix: usize,
}

/// Verifies that `|y|^2`, `|y|`, `log |y|` and the unit direction, computed
/// directly from the trajectory, match their own integral equations
/// assembled from trapezoid time integrals and compensated rough sums with
/// the appropriate controlled derivatives. Bracket contributions vanish for
/// geometric drivers, which is required here.
pub fn step1_rde_residuals(
    traj: &Trajectory,
    drift: &DriftSpec,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    lo: usize,
    hi: usize,
    floor: f64,
) -> Result<Step1Residuals> {
    if traj.len() != hi - lo + 1 {
        return Err(Error::domain("trajectory does not cover the rough-path window"));
    }
    if !rp.is_geometric(1e-10) {
        return Err(Error::domain("observable residuals require a geometric driver"));
    }
    let d = traj.dims();
    let m = traj.noise_dims();
    let grid = traj.grid();
    let x = rp.path().values();
    let areas = rp.step_areas();
    let polar = polar_decompose(traj, floor)?;
    let valid_prefix = polar.first_invalid().unwrap_or(traj.len());

    let y0 = traj.state(0).to_owned();
    let n0 = traj.norm_at(0);
    let mut acc_sq = 0.0_f64;
    let mut acc_n = 0.0_f64;
    let mut acc_log = 0.0_f64;
    let mut acc_th = Array1::<f64>::zeros(d);
    let mut res = Step1Residuals { norm_sq: 0.0, norm: 0.0, lognorm: 0.0, theta: 0.0, valid_prefix };

    // Drift integrands at a grid point.
    let drift_terms = |k: usize| -> (f64, f64, f64, Array1<f64>) {
        let y = traj.state(k);
        let r = traj.norm_at(k);
        let ay = drift.full_drift(y);
        let inner = y.dot(&ay);
        let th = polar.theta().row(k).to_owned();
        let th_ay = th.dot(&ay);
        let a_th = drift.a().dot(&th);
        let f_over = drift.eval_f(y).mapv(|v| v / r);
        let p_drift =
            &a_th + &f_over - &th.mapv(|v| v * (th.dot(&a_th) + th.dot(&f_over)));
        (2.0 * inner, th_ay, th.dot(&a_th) + th.dot(&f_over), p_drift)
    };

    for k in 0..(hi - lo) {
        let y = traj.state(k);
        let r = traj.norm_at(k);
        let gk = diff.eval_g(y);
        let dgk = diff.eval_dg(y);
        let th = polar.theta().row(k).to_owned();
        let within = k + 1 < valid_prefix;

        // Trapezoid drift increments.
        let dt = grid.t(k + 1) - grid.t(k);
        let (a_sq0, a_n0, a_l0, a_t0) = drift_terms(k);
        let (a_sq1, a_n1, a_l1, a_t1) = drift_terms(k + 1);
        acc_sq += 0.5 * (a_sq0 + a_sq1) * dt;
        if within {
            acc_n += 0.5 * (a_n0 + a_n1) * dt;
            acc_log += 0.5 * (a_l0 + a_l1) * dt;
            acc_th = acc_th + (a_t0 + a_t1).mapv(|v| 0.5 * v * dt);
        }

        // Shared contractions: <g_c, g_b> and <y, Dg_b g_c>.
        let mut gg = Array2::<f64>::zeros((m, m));
        let mut ydgg = Array2::<f64>::zeros((m, m));
        for b in 0..m {
            for c in 0..m {
                let mut s = 0.0;
                let mut t = 0.0;
                for e in 0..d {
                    s += gk[(e, c)] * gk[(e, b)];
                    let mut dg_bg = 0.0;
                    for q in 0..d {
                        dg_bg += dgk[(e, b, q)] * gk[(q, c)];
                    }
                    t += y[e] * dg_bg;
                }
                gg[(b, c)] = s;
                ydgg[(b, c)] = t;
            }
        }
        let thg: Array1<f64> = (0..m).map(|b| (0..d).map(|e| th[e] * gk[(e, b)]).sum()).collect();

        for b in 0..m {
            let dx = x[(lo + k + 1, b)] - x[(lo + k, b)];
            acc_sq += 2.0 * y.dot(&gk.column(b)) * dx;
            if within {
                acc_n += thg[b] * dx;
                acc_log += thg[b] / r * dx;
                for a in 0..d {
                    acc_th[a] += (gk[(a, b)] / r - thg[b] / r * th[a]) * dx;
                }
            }
            for c in 0..m {
                let xx = areas[(lo + k, b, c)];
                acc_sq += 2.0 * (gg[(b, c)] + ydgg[(b, c)]) * xx;
                if within {
                    acc_n += (gg[(b, c)] + ydgg[(b, c)] - thg[b] * thg[c]) / r * xx;
                    acc_log +=
                        (gg[(b, c)] + ydgg[(b, c)] - 2.0 * thg[b] * thg[c]) / (r * r) * xx;
                    // Derivative of the projected direction field along c.
                    let mut th_dgbg = 0.0;
                    for e in 0..d {
                        let mut s = 0.0;
                        for q in 0..d {
                            s += dgk[(e, b, q)] * gk[(q, c)];
                        }
                        th_dgbg += th[e] * s;
                    }
                    for a in 0..d {
                        let mut dgbg_a = 0.0;
                        for q in 0..d {
                            dgbg_a += dgk[(a, b, q)] * gk[(q, c)];
                        }
                        let gb = gk[(a, b)] / r;
                        let gc = gk[(a, c)] / r;
                        let v = dgbg_a / r - gb * thg[c] / r - thg[b] / r * gc
                            - (gg[(b, c)] / (r * r)) * th[a]
                            - th_dgbg / r * th[a]
                            + 3.0 * (thg[b] / r) * (thg[c] / r) * th[a];
                        acc_th[a] += v * xx;
                    }
                }
            }
        }

        // Prefix defects at k + 1.
        let y1 = traj.state(k + 1);
        let r1 = traj.norm_at(k + 1);
        let lhs_sq = y1.dot(&y1) - y0.dot(&y0);
        res.norm_sq = res.norm_sq.max((lhs_sq - acc_sq).abs());
        if k + 1 < valid_prefix {
            res.norm = res.norm.max(((r1 - n0) - acc_n).abs());
            res.lognorm = res.lognorm.max(((r1.ln() - n0.ln()) - acc_log).abs());
            let mut dtheta = 0.0_f64;
            for a in 0..d {
                let lhs = polar.theta()[(k + 1, a)] - polar.theta()[(0, a)];
                dtheta += (lhs - acc_th[a]) * (lhs - acc_th[a]);
            }
            res.theta = res.theta.max(dtheta.sqrt());
        }
    }
    Ok(res)
}

/// Comparison of the angular controlled seminorm against its a priori
/// polynomial bound in the solution seminorm and the driver norms.
#[derive(Debug, Clone)]
pub struct AngularBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub m_const: f64,
    pub k_alpha: f64,
    pub c_alpha: f64,
    /// Controlled seminorm of the solution on the window.
    pub solution_norm: f64,
    /// Hoelder norm of the driver plus two-parameter Hoelder norms of its
    /// area and bracket.
    pub driver_norm: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn angular_bound_check(
    traj: &Trajectory,
    drift: &DriftSpec,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    mu: f64,
    p: f64,
    nu: f64,
    lo: usize,
    hi: usize,
) -> Result<AngularBoundReport> {
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
    let polar = polar_decompose(traj, POLAR_FLOOR)?;
    if !polar.all_valid() {
        return Err(Error::domain("direction undefined inside the window"));
    }
    let d = traj.dims();
    let m = traj.noise_dims();
    let n = traj.len();
    // theta' = Q(y, theta): the direction field of the angle equation.
    let mut theta_prime = Array3::<f64>::zeros((n, d, m));
    for k in 0..n {
        let r = traj.norm_at(k);
        let gk = diff.eval_g(traj.state(k));
        let th = polar.theta().row(k);
        for c in 0..m {
            let mut proj = 0.0;
            for e in 0..d {
                proj += th[e] * gk[(e, c)] / r;
            }
            for a in 0..d {
                theta_prime[(k, a, c)] = gk[(a, c)] / r - proj * th[a];
            }
        }
    }
    let theta_path = SamplePath::new(traj.grid().clone(), polar.theta().clone())?;
    let theta_cp = ControlledPath::new(theta_path, theta_prime)?;
    let driver = rp.path().window(lo, hi)?;
    let lhs = theta_cp.controlled_norm(&driver, p, 0.0, 0, n - 1)?;
    let solution_norm = traj.controlled().controlled_norm(&driver, p, 0.0, 0, n - 1)?;

    let x_holder = holder_of(rp.grid(), |i, j| rp.path().increment_norm(i, j), nu, lo, hi)?.value;
    let area_holder = holder_of(rp.grid(), |i, j| rp.area_norm(i, j), 2.0 * nu, lo, hi)?.value;
    let bracket_holder =
        holder_of(rp.grid(), |i, j| rp.bracket_norm(i, j), 2.0 * nu, lo, hi)?.value;
    let driver_norm = x_holder + area_holder + bracket_holder;

    let k_alpha = young_loeve_constant(p, p / 2.0)?;
    let c_alpha = sewing_constant(1.0 / p)?;
    let c_f = drift.c_f();
    let c_g = diff.c_g();
    let a_norm = drift.matrix_norm();
    let m_const = (2.0 * (c_f + a_norm))
        .max(96.0 * k_alpha * (1.0 + c_alpha) * c_g * c_g * (1.0 + c_g))
        .max(0.5);
    let e = 2.0 / nu;
    let prefactor = span * span * (8.0 * m_const).powf(e) / (4.0 * (1.0 - mu) * mu.powf(e - 1.0));
    let rhs = prefactor
        * (1.0
            + solution_norm.powf(e)
            + driver_norm.powf(e)
            + 0.5 * solution_norm.powf(2.0 * e)
            + 0.5 * driver_norm.powf(2.0 * e));
    Ok(AngularBoundReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
        m_const,
        k_alpha,
        c_alpha,
        solution_norm,
        driver_norm,
    })
}

/// One parameter point of a stability sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub c_g: f64,
    pub exponents: Vec<f64>,
    pub mean_exponent: f64,
    /// Fraction of seeds with a negative burned-in exponent.
    pub fraction_stable: f64,
    pub diverged: usize,
    pub floored: usize,
}

/// Aggregated sweep over diffusion strengths.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Largest strength such that every scanned strength up to it kept all
    /// seeds stable.
    pub largest_all_stable: Option<f64>,
    pub fraction_monotone_nonincreasing: bool,
    pub seeds: usize,
    pub horizon: f64,
}

/// Solves the system per (strength, seed), estimates exponents, and
/// aggregates stability fractions. Divergent samples count as unstable;
/// floor crossings count as stable with the exponent taken at the crossing.
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_sweep(
    drift: &DriftSpec,
    family: impl Fn(f64) -> Result<DiffusionSpec>,
    strengths: &[f64],
    fbm: FbmSpec,
    steps: usize,
    horizon: f64,
    y0: &Array1<f64>,
    seeds: usize,
    master_seed: u64,
) -> Result<SweepReport> {
    if strengths.is_empty() || seeds == 0 {
        return Err(Error::domain("sweep needs strengths and seeds"));
    }
    let grid = TimeGrid::uniform(0.0, horizon, steps)?;
    let sampler = FbmSampler::new(fbm, grid)?;
    let diffs: Vec<DiffusionSpec> =
        strengths.iter().map(|&s| family(s)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(strengths.len());
    for (i, diff) in diffs.iter().enumerate() {
        let samples: Vec<(f64, bool, bool)> = (0..seeds)
            .into_par_iter()
            .map(|s| {
                let path = sampler.sample(master_seed, s as u64);
                let rp = RoughPath::lift_piecewise_linear(path).expect("lift");
                let n = rp.len() - 1;
                match solve(drift, diff, &rp, y0, 0, n) {
                    Ok(traj) => {
                        let polar = polar_decompose(&traj, POLAR_FLOOR).expect("nonzero start");
                        let est = lyapunov_estimate(&polar).expect("valid start");
                        (est.exponent_last80, false, est.floored)
                    }
                    Err(_) => (f64::INFINITY, true, false),
                }
            })
            .collect();
        let diverged = samples.iter().filter(|s| s.1).count();
        let floored = samples.iter().filter(|s| s.2).count();
        let exponents: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let finite: Vec<f64> = exponents.iter().copied().filter(|v| v.is_finite()).collect();
        let mean = if finite.is_empty() {
            f64::INFINITY
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        let stable = exponents.iter().filter(|&&v| v < 0.0).count();
        rows.push(SweepRow {
            c_g: strengths[i],
            exponents,
            mean_exponent: mean,
            fraction_stable: stable as f64 / seeds as f64,
            diverged,
            floored,
        });
    }
    let mut largest = None;
    for row in &rows {
        if row.fraction_stable == 1.0 {
            largest = Some(row.c_g);
        } else {
            break;
        }
    }
    let monotone = rows.windows(2).all(|w| w[1].fraction_stable <= w[0].fraction_stable + 1e-12);
    Ok(SweepReport {
        rows,
        largest_all_stable: largest,
        fraction_monotone_nonincreasing: monotone,
        seeds,
        horizon,
    })
}

/// Window-chain certificate for the decay rate.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub windows: usize,
    pub dissipativity_ok: bool,
    /// Window containing the first pointwise dissipativity violation.
    pub first_violation: Option<usize>,
    /// Weighted squared norm at the end of the last window.
    pub lhs: f64,
    /// Initial squared norm plus twice the absolute window integrals.
    pub rhs: f64,
    pub holds: bool,
    pub per_window_holds: Vec<bool>,
    /// Measured ratio of the window integral magnitudes to `C_g` times the
    /// weighted squared norm at the window start.
    pub kappa_hat: Vec<f64>,
    pub rough_magnitudes: Vec<f64>,
    /// `-lambda + mean of log(1 + 2 C_g kappa_hat) / 2` per unit time.
    pub rate_bound: f64,
    pub measured_exponent: f64,
    pub rate_bound_holds: bool,
    pub lambda: f64,
}

/// Checks the weighted-norm chain over unit windows `[k, k+1]`:
///
/// `e^{2 lambda n} |y_n|^2 <= |y_0|^2 + sum_k 2 |picked-up window integral|`,
///
/// with the rough integral per window assembled as a compensated sum of the
/// weighted pairing `e^{2 lambda s} <y, g(y)>` (the smooth weight's own
/// variation belongs to the remainder, not the derivative). The bracket
/// integral vanishes for geometric drivers. Requires the pointwise
/// dissipativity `<y, (A + lambda) y + f(y)> <= 0` along the trajectory,
/// which makes the time integral nonpositive; the per-window inequalities
/// then imply the reported rate bound.
pub fn gronwall_chain_check(
    traj: &Trajectory,
    drift: &DriftSpec,
    diff: &DiffusionSpec,
    rp: &RoughPath,
    lambda: f64,
    lo: usize,
    hi: usize,
    steps_per_window: usize,
) -> Result<ChainReport> {
    if traj.len() != hi - lo + 1 {
        return Err(Error::domain("trajectory does not cover the rough-path window"));
    }
    if steps_per_window == 0 || (hi - lo) % steps_per_window != 0 {
        return Err(Error::domain("window size must divide the index range"));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain("chain rate must be positive"));
    }
    if !rp.is_geometric(1e-10) {
        return Err(Error::domain("window chain requires a geometric driver"));
    }
    let windows = (hi - lo) / steps_per_window;
    let d = traj.dims();
    let m = traj.noise_dims();
    let grid = traj.grid();
    let t0 = grid.t(0);
    let x = rp.path().values();
    let areas = rp.step_areas();
    let c_g = diff.c_g();

    // Pointwise dissipativity of the shifted drift.
    let mut dissip_ok = true;
    let mut first_violation = None;
    for k in 0..traj.len() {
        let y = traj.state(k);
        let shifted = drift.full_drift(y) + &y.mapv(|v| lambda * v);
        let inner = y.dot(&shifted);
        let scale = y.dot(&y).max(1e-300);
        if inner > 1e-10 * scale {
            dissip_ok = false;
            first_violation = Some(k.saturating_sub(1) / steps_per_window);
            break;
        }
    }

    let weight = |k: usize| (2.0 * lambda * (grid.t(k) - t0)).exp();
    let u_at = |k: usize| {
        let y = traj.state(k);
        weight(k) * y.dot(&y)
    };

    let mut rough_magnitudes = Vec::with_capacity(windows);
    let mut kappa_hat = Vec::with_capacity(windows);
    let mut per_window_holds = Vec::with_capacity(windows);
    let mut rhs = u_at(0);
    for w in 0..windows {
        let a = w * steps_per_window;
        let b = a + steps_per_window;
        let mut s = 0.0_f64;
        for k in a..b {
            let y = traj.state(k);
            let gk = diff.eval_g(y);
            let dgk = diff.eval_dg(y);
            let ew = weight(k);
            for bch in 0..m {
                let mut ygb = 0.0;
                for e in 0..d {
                    ygb += y[e] * gk[(e, bch)];
                }
                let dx = x[(lo + k + 1, bch)] - x[(lo + k, bch)];
                s += ew * ygb * dx;
                for c in 0..m {
                    let mut gg = 0.0;
                    let mut ydgg = 0.0;
                    for e in 0..d {
                        gg += gk[(e, c)] * gk[(e, bch)];
                        let mut dgbg = 0.0;
                        for q in 0..d {
                            dgbg += dgk[(e, bch, q)] * gk[(q, c)];
                        }
                        ydgg += y[e] * dgbg;
                    }
                    s += ew * (gg + ydgg) * areas[(lo + k, bch, c)];
                }
            }
        }
        let mag = s.abs();
        rough_magnitudes.push(mag);
        let u_start = u_at(a);
        let u_end = u_at(b);
        let denom = c_g * u_start;
        let kh = if mag <= f64::MIN_POSITIVE {
            0.0
        } else if denom <= f64::MIN_POSITIVE {
            f64::INFINITY
        } else {
            mag / denom
        };
        kappa_hat.push(kh);
        let slack = CHAIN_SLACK * u_start.max(u_end).max(f64::MIN_POSITIVE);
        per_window_holds.push(u_end <= u_start + 2.0 * mag + slack);
        rhs += 2.0 * mag;
    }
    let lhs = u_at(traj.len() - 1);
    let holds = dissip_ok
        && per_window_holds.iter().all(|&h| h)
        && lhs <= rhs * (1.0 + CHAIN_SLACK) + f64::MIN_POSITIVE;
    let total_time = grid.t(traj.len() - 1) - t0;
    let correction: f64 = kappa_hat.iter().map(|&kh| (1.0 + 2.0 * c_g * kh).ln()).sum::<f64>()
        / (2.0 * total_time);
    let rate_bound = -lambda + correction;
    let measured_exponent =
        (traj.norm_at(traj.len() - 1).max(f64::MIN_POSITIVE).ln() - traj.norm_at(0).ln())
            / total_time;
    Ok(ChainReport {
        windows,
        dissipativity_ok: dissip_ok,
        first_violation,
        lhs,
        rhs,
        holds,
        per_window_holds,
        kappa_hat,
        rough_magnitudes,
        rate_bound,
        measured_exponent,
        rate_bound_holds: rate_bound + RATE_SLACK >= measured_exponent,
        lambda,
    })
}
