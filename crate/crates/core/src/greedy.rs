//! Greedy interval partitions under the weighted rough-path norm, the
//! counting functions they induce, a subdivision inequality relating the two
//! partition variants, and Monte-Carlo studies of the count's tail,
//! exponential moment, and shift stationarity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbm::{FbmSampler, FbmSpec};
use crate::grid::TimeGrid;
use crate::integrate::translation_constant;
use crate::norms::RunningVar;
use crate::rough::RoughPath;

/// Which crossing functional drives the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyVariant {
    /// The combined weighted norm alone.
    Plain,
    /// The combined weighted norm plus the elapsed-time term `(t - tau)^sigma`.
    WithTimeTerm,
}

/// A maximal partition into pieces on which the crossing functional first
/// reaches `gamma`.
#[derive(Debug, Clone)]
pub struct GreedyPartition {
    /// Grid indices `tau_0 = lo <= ... <= hi`; consecutive entries tile the
    /// window.
    pub times: Vec<usize>,
    /// Functional value attained on each piece (the final piece may sit
    /// below `gamma`).
    pub attained: Vec<f64>,
    /// Number of pieces whose crossing happened strictly inside the window;
    /// a never-crossing path has zero.
    pub crossings: usize,
    pub gamma: f64,
    pub p: f64,
    pub sigma: f64,
    pub variant: GreedyVariant,
    /// Set when a single grid step already crossed `gamma`: the partition is
    /// still valid but the grid cannot resolve the true crossing time.
    pub coarse_warning: Option<String>,
}

impl GreedyPartition {
    pub fn pieces(&self) -> usize {
        self.times.len() - 1
    }

    pub fn time_values(&self, grid: &TimeGrid) -> Vec<f64> {
        self.times.iter().map(|&i| grid.t(i)).collect()
    }
}

/// Scans right from each start point for the first grid index where the
/// crossing functional reaches `gamma`, restarting there. The window DP is
/// extended one grid point at a time, so each piece costs O(length^2).
pub fn greedy_times(
    rp: &RoughPath,
    gamma: f64,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
    variant: GreedyVariant,
) -> Result<GreedyPartition> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("greedy threshold must be positive, got {gamma}")));
    }
    if lo >= hi || hi >= rp.len() {
        return Err(Error::domain(format!(
            "window [{lo}, {hi}] invalid for {} grid points",
            rp.len()
        )));
    }
    let grid = rp.grid();
    let path = rp.path();
    let mut times = vec![lo];
    let mut attained = Vec::new();
    let mut crossings = 0usize;
    let mut warning: Option<String> = None;
    let mut start = lo;
    loop {
        let mut vp = RunningVar::new(grid, |i, j| path.increment_norm(i, j), p, sigma, start);
        let mut va = RunningVar::new(grid, |i, j| rp.area_norm(i, j), p / 2.0, sigma, start);
        let mut cross: Option<(usize, f64)> = None;
        let mut last = 0.0;
        let mut j = start;
        while j < hi {
            j += 1;
            let first = vp.extend();
            let second = va.extend();
            let mut s = first + second.sqrt();
            if variant == GreedyVariant::WithTimeTerm {
                s += (grid.t(j) - grid.t(start)).powf(sigma);
            }
            last = s;
            if s >= gamma {
                cross = Some((j, s));
                break;
            }
        }
        match cross {
            Some((j, s)) => {
                if j == start + 1 && warning.is_none() {
                    warning = Some(format!(
                        "grid too coarse for gamma {gamma}: step {start}->{j} already reaches {s:.6}"
                    ));
                }
                times.push(j);
                attained.push(s);
                if j < hi {
                    crossings += 1;
                    start = j;
                } else {
                    break;
                }
            }
            None => {
                times.push(hi);
                attained.push(last);
                break;
            }
        }
    }
    Ok(GreedyPartition {
        times,
        attained,
        crossings,
        gamma,
        p,
        sigma,
        variant,
        coarse_warning: warning,
    })
}

/// Outcome of comparing the time-term count on a window against the sum of
/// plain counts at half the threshold over subwindows of length
/// `(gamma/2)^{1/sigma}`.
#[derive(Debug, Clone)]
pub struct SubdivisionReport {
    /// Time-term crossing count on the full window.
    pub lhs: usize,
    /// Sum of plain crossing counts at `gamma/2` over the subwindows.
    pub rhs: usize,
    pub piece_counts: Vec<usize>,
    pub piece_windows: Vec<(usize, usize)>,
    /// Prescribed subwindow length `(gamma/2)^{1/sigma}`.
    pub sub_length: f64,
    /// False when the prescribed length falls below the grid resolution, in
    /// which case `holds` is None.
    pub conclusive: bool,
    pub holds: Option<bool>,
    pub note: Option<String>,
}

pub fn subdivision_inequality(
    rp: &RoughPath,
    gamma: f64,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<SubdivisionReport> {
    if !(sigma > 0.0) {
        return Err(Error::domain("subdivision needs sigma > 0"));
    }
    let bar = greedy_times(rp, gamma, p, sigma, lo, hi, GreedyVariant::WithTimeTerm)?;
    let lhs = bar.crossings;
    let sub_length = (gamma / 2.0).powf(1.0 / sigma);
    let grid = rp.grid();
    let mut piece_windows = Vec::new();
    let mut cursor = lo;
    let mut conclusive = true;
    let mut note = None;
    while cursor < hi {
        let boundary = grid.t(cursor) + sub_length;
        let mut end = cursor;
        while end < hi && grid.t(end + 1) <= boundary + 1e-12 {
            end += 1;
        }
        if end == cursor {
            conclusive = false;
            note = Some(format!(
                "subwindow length {sub_length:.3e} is below the grid step at index {cursor}"
            ));
            break;
        }
        piece_windows.push((cursor, end));
        cursor = end;
    }
    if !conclusive {
        return Ok(SubdivisionReport {
            lhs,
            rhs: 0,
            piece_counts: Vec::new(),
            piece_windows: Vec::new(),
            sub_length,
            conclusive,
            holds: None,
            note,
        });
    }
    let mut piece_counts = Vec::with_capacity(piece_windows.len());
    let mut rhs = 0usize;
    for &(a, b) in &piece_windows {
        let part = greedy_times(rp, gamma / 2.0, p, sigma, a, b, GreedyVariant::Plain)?;
        piece_counts.push(part.crossings);
        rhs += part.crossings;
    }
    Ok(SubdivisionReport {
        lhs,
        rhs,
        piece_counts,
        piece_windows,
        sub_length,
        conclusive,
        holds: Some(lhs <= rhs),
        note,
    })
}

/// One row of the empirical tail table: `prob` estimates P(count > n).
#[derive(Debug, Clone)]
pub struct TailRow {
    pub n: usize,
    pub exceed: usize,
    pub prob: f64,
}

/// Monte-Carlo tail study of the plain crossing count at the inflated
/// threshold `2 * translation_constant(p) * gamma`, with the exponential
/// moment of the time-term count at the same threshold.
#[derive(Debug, Clone)]
pub struct TailReport {
    pub threshold: f64,
    pub gamma: f64,
    pub samples: usize,
    pub rows: Vec<TailRow>,
    /// Least-squares fit of `ln prob` against `n^{2/q}` with `q = p/2`,
    /// restricted to rows with positive counts.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub regression_points: usize,
    /// True when no sample produced a positive count.
    pub degenerate: bool,
    /// Mean of `exp(count)` for the time-term variant, over all samples and
    /// over the first half, for a drift diagnostic.
    pub exp_moment_full: f64,
    pub exp_moment_half: f64,
    pub counts: Vec<usize>,
    pub bar_counts: Vec<usize>,
}

pub fn tail_estimate(
    spec: FbmSpec,
    steps: usize,
    gamma: f64,
    p: f64,
    sigma: f64,
    samples: usize,
    master_seed: u64,
) -> Result<TailReport> {
    if samples == 0 {
        return Err(Error::domain("tail study needs at least one sample"));
    }
    let grid = TimeGrid::uniform(0.0, 1.0, steps)?;
    let sampler = FbmSampler::new(spec, grid)?;
    let threshold = 2.0 * translation_constant(p)? * gamma;
    let pairs: Vec<(usize, usize)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let path = sampler.sample(master_seed, k as u64);
            let n = path.len() - 1;
            let rp = RoughPath::lift_piecewise_linear(path).expect("lift of sampled path");
            let plain =
                greedy_times(&rp, threshold, p, sigma, 0, n, GreedyVariant::Plain).expect("scan");
            let bar = greedy_times(&rp, threshold, p, sigma, 0, n, GreedyVariant::WithTimeTerm)
                .expect("scan");
            (plain.crossings, bar.crossings)
        })
        .collect();
    let counts: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
    let bar_counts: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
    let max_n = counts.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    for n in 0..=max_n {
        let exceed = counts.iter().filter(|&&c| c > n).count();
        rows.push(TailRow { n, exceed, prob: exceed as f64 / samples as f64 });
    }
    let degenerate = rows.iter().all(|r| r.exceed == 0);
    // ln P(count > n) against n^{2/q} over informative rows.
    let q = p / 2.0;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.exceed > 0)
        .map(|r| ((r.n as f64).powf(2.0 / q), r.prob.ln()))
        .collect();
    let (slope, intercept, r_squared) = fit_line(&pts);
    let half = samples / 2;
    let mean_exp = |slice: &[usize]| -> f64 {
        slice.iter().map(|&c| (c as f64).exp()).sum::<f64>() / slice.len().max(1) as f64
    };
    Ok(TailReport {
        threshold,
        gamma,
        samples,
        rows,
        slope,
        intercept,
        r_squared,
        regression_points: pts.len(),
        degenerate,
        exp_moment_full: mean_exp(&bar_counts),
        exp_moment_half: mean_exp(&bar_counts[..half.max(1)]),
        counts,
        bar_counts,
    })
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (0.0, 0.0, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (slope, my - slope * mx, r2)
}

/// Two-sample Kolmogorov-Smirnov comparison of integer count distributions.
#[derive(Debug, Clone)]
pub struct KsRow {
    /// Window pair being compared, as unit-interval start times.
    pub window: (usize, usize),
    pub statistic: f64,
    pub critical_1pct: f64,
    pub below_critical: bool,
}

pub fn ks_statistic(a: &[usize], b: &[usize]) -> f64 {
    let hi = a.iter().chain(b.iter()).copied().max().unwrap_or(0);
    let mut worst = 0.0_f64;
    for k in 0..=hi {
        let fa = a.iter().filter(|&&c| c <= k).count() as f64 / a.len().max(1) as f64;
        let fb = b.iter().filter(|&&c| c <= k).count() as f64 / b.len().max(1) as f64;
        worst = worst.max((fa - fb).abs());
    }
    worst
}

/// 1% critical value of the two-sample KS statistic.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Compares the distribution of the time-term crossing count over `[0,1]`
/// against later unit windows `[k, k+1]`; under shift stationarity of the
/// driver all statistics stay small.
#[derive(Debug, Clone)]
pub struct StationarityReport {
    pub rows: Vec<KsRow>,
    pub samples: usize,
    pub gamma: f64,
    /// Count distributions per window, first entry is `[0,1]`.
    pub window_counts: Vec<Vec<usize>>,
}

pub fn shift_covariance_check(
    spec: FbmSpec,
    steps_per_unit: usize,
    gamma: f64,
    p: f64,
    sigma: f64,
    windows: usize,
    samples: usize,
    master_seed: u64,
) -> Result<StationarityReport> {
    if windows == 0 || samples == 0 {
        return Err(Error::domain("stationarity study needs windows and samples"));
    }
    let horizon = (windows + 1) as f64;
    let grid = TimeGrid::uniform(0.0, horizon, steps_per_unit * (windows + 1))?;
    let sampler = FbmSampler::new(spec, grid)?;
    let per_sample: Vec<Vec<usize>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let path = sampler.sample(master_seed, s as u64);
            let rp = RoughPath::lift_piecewise_linear(path).expect("lift of sampled path");
            (0..=windows)
                .map(|k| {
                    let a = k * steps_per_unit;
                    let b = (k + 1) * steps_per_unit;
                    greedy_times(&rp, gamma, p, sigma, a, b, GreedyVariant::WithTimeTerm)
                        .expect("scan")
                        .crossings
                })
                .collect()
        })
        .collect();
    let window_counts: Vec<Vec<usize>> = (0..=windows)
        .map(|k| per_sample.iter().map(|row| row[k]).collect())
        .collect();
    let critical = ks_critical_1pct(samples, samples);
    let rows = (1..=windows)
        .map(|k| {
            let statistic = ks_statistic(&window_counts[0], &window_counts[k]);
            KsRow {
                window: (0, k),
                statistic,
                critical_1pct: critical,
                below_critical: statistic < critical,
            }
        })
        .collect();
    Ok(StationarityReport { rows, samples, gamma, window_counts })
}

/// Negative control for the stationarity check: compares the `[0,1]` count
/// distribution of the driver against the time-rescaled driver `t -> x(2t)`,
/// whose law differs by the scaling factor `2^H`.
pub fn scaled_control_ks(
    spec: FbmSpec,
    steps_per_unit: usize,
    gamma: f64,
    p: f64,
    sigma: f64,
    samples: usize,
    master_seed: u64,
) -> Result<KsRow> {
    if samples == 0 {
        return Err(Error::domain("control study needs samples"));
    }
    let grid2 = TimeGrid::uniform(0.0, 2.0, 2 * steps_per_unit)?;
    let sampler = FbmSampler::new(spec, grid2)?;
    let unit = TimeGrid::uniform(0.0, 1.0, steps_per_unit)?;
    let pairs: Vec<(usize, usize)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let path = sampler.sample(master_seed, s as u64);
            let n = steps_per_unit;
            let base =
                greedy_times(
                    &RoughPath::lift_piecewise_linear(path.window(0, n).expect("window"))
                        .expect("lift"),
                    gamma,
                    p,
                    sigma,
                    0,
                    n,
                    GreedyVariant::WithTimeTerm,
                )
                .expect("scan")
                .crossings;
            // x(2t) on [0,1]: every second sample point of the [0,2] path.
            let mut values = ndarray::Array2::<f64>::zeros((n + 1, path.dims()));
            for j in 0..=n {
                for a in 0..path.dims() {
                    values[(j, a)] = path.values()[(2 * j, a)];
                }
            }
            let scaled = crate::path::SamplePath::new(unit.clone(), values).expect("path");
            let ctrl = greedy_times(
                &RoughPath::lift_piecewise_linear(scaled).expect("lift"),
                gamma,
                p,
                sigma,
                0,
                n,
                GreedyVariant::WithTimeTerm,
            )
            .expect("scan")
            .crossings;
            (base, ctrl)
        })
        .collect();
    let base: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
    let ctrl: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
    let statistic = ks_statistic(&base, &ctrl);
    let critical = ks_critical_1pct(samples, samples);
    Ok(KsRow { window: (0, 0), statistic, critical_1pct: critical, below_critical: statistic < critical })
}
