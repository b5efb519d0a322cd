//! Weighted variation seminorms over grid partitions.
//!
//! The central object is the interval-weighted p-variation
//!
//! ```text
//! [[x]]_{p,sigma,[s,t]} = ( sup_P  sum_{[u,v] in P} |x_{u,v}|^p (v-u)^{-sigma p} )^{1/p}
//! ```
//!
//! with the supremum over partitions P of `[s, t]` drawn from grid points.
//! Since the objective is additive over pieces, the supremum is computed
//! exactly by dynamic programming over the grid in O(n^2) evaluations; a
//! brute-force enumeration over all partitions is kept alongside as the
//! reference oracle for small n. `sigma = 0` recovers the plain p-variation.
//!
//! The same machinery serves the first level of a rough path, its second
//! level (exponent q = p/2 on block norms), remainders of controlled paths
//! and rectangular covariance increments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::CovKernel;
use crate::grid::TimeGrid;
use crate::path::SamplePath;
use crate::rough::RoughPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    PVar,
    PSigmaVar,
    Holder,
    TwoParamVar,
}

/// Outcome of a seminorm optimization: the value together with the witness
/// partition that attains it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeminormReport {
    pub kind: SeminormKind,
    pub p: f64,
    pub sigma: f64,
    /// Optimized seminorm value (already re-normalized by the 1/p root for
    /// variation kinds; the raw ratio for the Holder kind).
    pub value: f64,
    /// Grid indices of the witness partition (or the witness pair for the
    /// Holder kind), including both interval endpoints.
    pub partition: Vec<usize>,
    /// Witness partition in time coordinates.
    pub partition_times: Vec<f64>,
    /// Interval of optimization in time coordinates.
    pub interval: (f64, f64),
    /// Set when the parameters leave the summable regime (sigma * p >= 1),
    /// where refining the grid makes the value diverge.
    pub warning: Option<String>,
}

fn validate_exponents(p: f64, sigma: f64) -> Result<Option<String>> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("variation exponent p must be >= 1, got {p}")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::domain(format!("weight exponent sigma must be >= 0, got {sigma}")));
    }
    Ok(if sigma * p >= 1.0 {
        Some(format!(
            "sigma * p = {:.3} >= 1: the weighted sum diverges under grid refinement",
            sigma * p
        ))
    } else {
        None
    })
}

fn validate_range(grid: &TimeGrid, lo: usize, hi: usize) -> Result<()> {
    if lo >= hi || hi >= grid.len() {
        return Err(Error::domain(format!(
            "invalid index range [{lo}, {hi}] on a grid of {} points",
            grid.len()
        )));
    }
    Ok(())
}

/// Exact optimizer for the weighted variation functional of an arbitrary
/// two-point size `inc(i, j)` over grid indices `lo..=hi`.
///
/// Ties are broken toward fewer partition points, then toward the earliest
/// predecessor, which makes the witness deterministic.
pub fn var_report<F>(
    grid: &TimeGrid,
    inc: F,
    kind: SeminormKind,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<SeminormReport>
where
    F: Fn(usize, usize) -> f64,
{
    let warning = validate_exponents(p, sigma)?;
    validate_range(grid, lo, hi)?;

    let n = hi - lo + 1;
    let mut best = vec![0.0f64; n];
    let mut pieces = vec![0usize; n];
    let mut pred = vec![0usize; n];
    for j in 1..n {
        let tj = grid.t(lo + j);
        let mut bj = f64::NEG_INFINITY;
        let mut cj = usize::MAX;
        let mut pj = 0usize;
        for i in 0..j {
            let dt = tj - grid.t(lo + i);
            let w = inc(lo + i, lo + j).powf(p) * dt.powf(-sigma * p);
            let cand = best[i] + w;
            let cand_pieces = pieces[i] + 1;
            if cand > bj || (cand == bj && cand_pieces < cj) {
                bj = cand;
                cj = cand_pieces;
                pj = i;
            }
        }
        best[j] = bj;
        pieces[j] = cj;
        pred[j] = pj;
    }

    let mut partition = Vec::with_capacity(pieces[n - 1] + 1);
    let mut at = n - 1;
    while at > 0 {
        partition.push(lo + at);
        at = pred[at];
    }
    partition.push(lo);
    partition.reverse();

    Ok(report_from(
        grid,
        kind,
        p,
        sigma,
        best[n - 1].powf(1.0 / p),
        partition,
        lo,
        hi,
        warning,
    ))
}

#[allow(clippy::too_many_arguments)]
fn report_from(
    grid: &TimeGrid,
    kind: SeminormKind,
    p: f64,
    sigma: f64,
    value: f64,
    partition: Vec<usize>,
    lo: usize,
    hi: usize,
    warning: Option<String>,
) -> SeminormReport {
    let partition_times = partition.iter().map(|&i| grid.t(i)).collect();
    SeminormReport {
        kind,
        p,
        sigma,
        value,
        partition,
        partition_times,
        interval: (grid.t(lo), grid.t(hi)),
        warning,
    }
}

/// Re-evaluates the weighted functional on an explicit partition; the
/// optimizer's witness must reproduce its reported value.
pub fn evaluate_partition<F>(
    grid: &TimeGrid,
    inc: F,
    p: f64,
    sigma: f64,
    partition: &[usize],
) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    let mut sum = 0.0;
    for w in partition.windows(2) {
        let dt = grid.t(w[1]) - grid.t(w[0]);
        sum += inc(w[0], w[1]).powf(p) * dt.powf(-sigma * p);
    }
    sum.powf(1.0 / p)
}

/// Brute-force reference: enumerates every partition of `lo..=hi` (all
/// subsets of interior points). Exponential; capped at 20 interior points.
pub fn var_by_enumeration<F>(
    grid: &TimeGrid,
    inc: F,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<(f64, Vec<usize>)>
where
    F: Fn(usize, usize) -> f64,
{
    validate_exponents(p, sigma)?;
    validate_range(grid, lo, hi)?;
    let interior = hi - lo - 1;
    if interior > 20 {
        return Err(Error::domain("enumeration oracle capped at 20 interior points"));
    }
    let mut best = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for mask in 0..(1u64 << interior) {
        let mut partition = vec![lo];
        for b in 0..interior {
            if mask >> b & 1 == 1 {
                partition.push(lo + 1 + b);
            }
        }
        partition.push(hi);
        let mut sum = 0.0;
        for w in partition.windows(2) {
            let dt = grid.t(w[1]) - grid.t(w[0]);
            sum += inc(w[0], w[1]).powf(p) * dt.powf(-sigma * p);
        }
        if sum > best {
            best = sum;
            witness = partition;
        }
    }
    Ok((best.powf(1.0 / p), witness))
}

/// Plain p-variation of a path over grid indices `lo..=hi`.
pub fn p_var(path: &SamplePath, p: f64, lo: usize, hi: usize) -> Result<SeminormReport> {
    var_report(
        path.grid(),
        |i, j| path.increment_norm(i, j),
        SeminormKind::PVar,
        p,
        0.0,
        lo,
        hi,
    )
}

/// Interval-weighted (p, sigma)-variation of a path.
pub fn p_sigma_var(
    path: &SamplePath,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<SeminormReport> {
    var_report(
        path.grid(),
        |i, j| path.increment_norm(i, j),
        SeminormKind::PSigmaVar,
        p,
        sigma,
        lo,
        hi,
    )
}

/// Grid Holder seminorm: the largest ratio `|x_{u,v}| / (v-u)^beta` over
/// grid pairs in `lo..=hi`. The witness pair is reported as the partition.
pub fn holder_seminorm(
    path: &SamplePath,
    beta: f64,
    lo: usize,
    hi: usize,
) -> Result<SeminormReport> {
    holder_of(path.grid(), |i, j| path.increment_norm(i, j), beta, lo, hi)
}

/// Holder seminorm of an arbitrary two-point size.
pub fn holder_of<F>(
    grid: &TimeGrid,
    inc: F,
    beta: f64,
    lo: usize,
    hi: usize,
) -> Result<SeminormReport>
where
    F: Fn(usize, usize) -> f64,
{
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(format!("holder exponent must lie in (0, 1], got {beta}")));
    }
    validate_range(grid, lo, hi)?;
    let mut best = f64::NEG_INFINITY;
    let mut pair = (lo, hi);
    for i in lo..hi {
        for j in i + 1..=hi {
            let r = inc(i, j) / (grid.t(j) - grid.t(i)).powf(beta);
            if r > best {
                best = r;
                pair = (i, j);
            }
        }
    }
    Ok(report_from(
        grid,
        SeminormKind::Holder,
        1.0,
        beta,
        best,
        vec![pair.0, pair.1],
        lo,
        hi,
        None,
    ))
}

/// Weighted q-variation of the second level of a rough path, using the
/// Frobenius norm of the assembled blocks.
pub fn area_var(
    rp: &RoughPath,
    q: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<SeminormReport> {
    var_report(
        rp.grid(),
        |i, j| rp.area_norm(i, j),
        SeminormKind::TwoParamVar,
        q,
        sigma,
        lo,
        hi,
    )
}

/// Combined rough-path size used by greedy partitions and bound checks:
///
/// ```text
/// [[x]]_{(p,sigma)} = [[x]]_{p,sigma} + [[X]]_{p/2,sigma}^{1/2}.
/// ```
pub fn rough_norm(rp: &RoughPath, p: f64, sigma: f64, lo: usize, hi: usize) -> Result<f64> {
    let first = p_sigma_var(rp.path(), p, sigma, lo, hi)?.value;
    let second = area_var(rp, p / 2.0, sigma, lo, hi)?.value;
    Ok(first + second.sqrt())
}

/// Incremental optimizer for a fixed left endpoint: extending the window one
/// grid point costs O(window length), which lets greedy scans reuse work.
pub struct RunningVar<'a, F>
where
    F: Fn(usize, usize) -> f64,
{
    grid: &'a TimeGrid,
    inc: F,
    p: f64,
    sigma: f64,
    start: usize,
    end: usize,
    best: Vec<f64>,
}

impl<'a, F> RunningVar<'a, F>
where
    F: Fn(usize, usize) -> f64,
{
    pub fn new(grid: &'a TimeGrid, inc: F, p: f64, sigma: f64, start: usize) -> Self {
        RunningVar {
            grid,
            inc,
            p,
            sigma,
            start,
            end: start,
            best: vec![0.0],
        }
    }

    /// Current window `[start, end]`.
    pub fn end(&self) -> usize {
        self.end
    }

    /// Extends the window to `self.end() + 1` and returns the seminorm value
    /// over the extended window.
    pub fn extend(&mut self) -> f64 {
        let j = self.end + 1;
        let tj = self.grid.t(j);
        let mut bj = f64::NEG_INFINITY;
        for i in self.start..j {
            let dt = tj - self.grid.t(i);
            let w = (self.inc)(i, j).powf(self.p) * dt.powf(-self.sigma * self.p);
            let cand = self.best[i - self.start] + w;
            if cand > bj {
                bj = cand;
            }
        }
        self.best.push(bj);
        self.end = j;
        bj.powf(1.0 / self.p)
    }

    /// Value over the current window (0 for the degenerate window).
    pub fn value(&self) -> f64 {
        if self.end == self.start {
            0.0
        } else {
            self.best[self.end - self.start].powf(1.0 / self.p)
        }
    }
}

/// Control-function table: `omega(s, t) = [[x]]_{p,sigma,[s,t]}^p` over all
/// grid subintervals, with its worst superadditivity defect
/// `omega(s,u) + omega(u,t) - omega(s,t)` (nonpositive up to roundoff for a
/// genuine control). O(n^3); intended for small diagnostic grids.
pub struct ControlTable {
    pub omega: Vec<Vec<f64>>,
    pub max_superadditivity_defect: f64,
}

pub fn check_control(path: &SamplePath, p: f64, sigma: f64) -> Result<ControlTable> {
    validate_exponents(p, sigma)?;
    let n = path.len();
    if n > 64 {
        return Err(Error::domain("control table capped at 64 grid points"));
    }
    let grid = path.grid();
    let mut omega = vec![vec![0.0f64; n]; n];
    for s in 0..n - 1 {
        let mut best = vec![0.0f64; n - s];
        for j in 1..n - s {
            let tj = grid.t(s + j);
            let mut bj = f64::NEG_INFINITY;
            for i in 0..j {
                let dt = tj - grid.t(s + i);
                let w = path.increment_norm(s + i, s + j).powf(p) * dt.powf(-sigma * p);
                bj = bj.max(best[i] + w);
            }
            best[j] = bj;
            omega[s][s + j] = bj;
        }
    }
    let mut defect = f64::NEG_INFINITY;
    for s in 0..n - 2 {
        for u in s + 1..n - 1 {
            for t in u + 1..n {
                defect = defect.max(omega[s][u] + omega[u][t] - omega[s][t]);
            }
        }
    }
    Ok(ControlTable {
        omega,
        max_superadditivity_defect: defect,
    })
}

/// Scale comparison around the weighted seminorm on one interval:
///
/// ```text
/// |I|^{-sigma} [[x]]_{p-var} <= [[x]]_{p,sigma} <= |I|^{1/p} [[x]]_{Holder(1/p + sigma)}.
/// ```
#[derive(Debug, Clone, Serialize)]
pub struct SandwichCheck {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub pass: bool,
}

pub fn sandwich_check(
    path: &SamplePath,
    p: f64,
    sigma: f64,
    lo: usize,
    hi: usize,
) -> Result<SandwichCheck> {
    let span = path.grid().t(hi) - path.grid().t(lo);
    let lower = span.powf(-sigma) * p_var(path, p, lo, hi)?.value;
    let middle = p_sigma_var(path, p, sigma, lo, hi)?.value;
    let upper = span.powf(1.0 / p) * holder_seminorm(path, 1.0 / p + sigma, lo, hi)?.value;
    let tol = 1e-12 * middle.max(1.0);
    Ok(SandwichCheck {
        lower,
        middle,
        upper,
        pass: lower <= middle + tol && middle <= upper + tol,
    })
}

/// Splitting bound over `N` consecutive windows `[tau_i, tau_{i+1}]`:
///
/// ```text
/// [[x]]_{p,sigma,[a,b]} <= N^{(p-1)/p} sum_i [[x]]_{p,sigma,[tau_i, tau_{i+1}]}.
/// ```
#[derive(Debug, Clone, Serialize)]
pub struct SplittingBound {
    pub whole: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn additive_partition_bound(
    path: &SamplePath,
    p: f64,
    sigma: f64,
    breakpoints: &[usize],
) -> Result<SplittingBound> {
    if breakpoints.len() < 2 {
        return Err(Error::domain("need at least one window"));
    }
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::domain("breakpoints must be strictly increasing"));
        }
    }
    let lo = breakpoints[0];
    let hi = *breakpoints.last().unwrap();
    let whole = p_sigma_var(path, p, sigma, lo, hi)?.value;
    let windows = breakpoints.len() - 1;
    let mut sum = 0.0;
    for w in breakpoints.windows(2) {
        sum += p_sigma_var(path, p, sigma, w[0], w[1])?.value;
    }
    let bound = (windows as f64).powf((p - 1.0) / p) * sum;
    let tol = 1e-12 * bound.max(1.0);
    Ok(SplittingBound {
        whole,
        bound,
        pass: whole <= bound + tol,
    })
}

/// Weighted q-variation of a rectangular covariance increment, maximized
/// over partition pairs by coordinate ascent (each axis solved exactly by
/// the DP while the other is frozen). The result is a certified lower bound
/// of the joint supremum; `two_param_var_enumeration` is the exact reference
/// for tiny grids.
pub fn cov_two_param_var(
    kernel: &CovKernel,
    grid: &TimeGrid,
    q: f64,
    sigma: f64,
) -> Result<f64> {
    let warning = validate_exponents(q, sigma)?;
    let _ = warning;
    let n = grid.len();
    if n < 2 {
        return Err(Error::domain("grid too small"));
    }
    let rect = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        kernel
            .rect_cov(grid.t(a), grid.t(b), grid.t(c), grid.t(d))
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    };
    let mut axis2: Vec<usize> = (0..n).collect();
    let mut value = f64::NEG_INFINITY;
    for _ in 0..32 {
        // optimize axis 1 against frozen axis 2, then swap roles
        let (v1, axis1) = best_axis(grid, q, sigma, &axis2, &rect, false)?;
        let (v2, a2) = best_axis(grid, q, sigma, &axis1, &rect, true)?;
        axis2 = a2;
        if (v2 - value).abs() <= 1e-13 * v2.abs().max(1.0) {
            value = v2.max(v1);
            break;
        }
        value = v2;
    }
    Ok(value.powf(1.0 / q))
}

fn best_axis<F>(
    grid: &TimeGrid,
    q: f64,
    sigma: f64,
    frozen: &[usize],
    rect: &F,
    frozen_is_first: bool,
) -> Result<(f64, Vec<usize>)>
where
    F: Fn(usize, usize, usize, usize) -> f64,
{
    let n = grid.len();
    let cost = |i: usize, j: usize| -> f64 {
        let dt = (grid.t(j) - grid.t(i)).powf(-sigma * q);
        let mut s = 0.0;
        for w in frozen.windows(2) {
            let du = (grid.t(w[1]) - grid.t(w[0])).powf(-sigma * q);
            let r = if frozen_is_first {
                rect(w[0], w[1], i, j)
            } else {
                rect(i, j, w[0], w[1])
            };
            s += r.powf(q) * dt * du;
        }
        s
    };
    let mut best = vec![0.0f64; n];
    let mut pred = vec![0usize; n];
    for j in 1..n {
        let mut bj = f64::NEG_INFINITY;
        let mut pj = 0;
        for i in 0..j {
            let cand = best[i] + cost(i, j);
            if cand > bj {
                bj = cand;
                pj = i;
            }
        }
        best[j] = bj;
        pred[j] = pj;
    }
    let mut axis = Vec::new();
    let mut at = n - 1;
    while at > 0 {
        axis.push(at);
        at = pred[at];
    }
    axis.push(0);
    axis.reverse();
    Ok((best[n - 1], axis))
}

/// Exhaustive supremum over all pairs of partitions; exponential in the grid
/// size, capped at 8 points.
pub fn cov_two_param_var_enumeration(
    kernel: &CovKernel,
    grid: &TimeGrid,
    q: f64,
    sigma: f64,
) -> Result<f64> {
    validate_exponents(q, sigma)?;
    let n = grid.len();
    if n > 8 {
        return Err(Error::domain("exhaustive double-partition search capped at 8 points"));
    }
    let interior = n - 2;
    let partitions: Vec<Vec<usize>> = (0..(1u64 << interior))
        .map(|mask| {
            let mut p = vec![0];
            for b in 0..interior {
                if mask >> b & 1 == 1 {
                    p.push(1 + b);
                }
            }
            p.push(n - 1);
            p
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for p1 in &partitions {
        for p2 in &partitions {
            let mut sum = 0.0;
            for w1 in p1.windows(2) {
                let dt = (grid.t(w1[1]) - grid.t(w1[0])).powf(-sigma * q);
                for w2 in p2.windows(2) {
                    let du = (grid.t(w2[1]) - grid.t(w2[0])).powf(-sigma * q);
                    let r = kernel
                        .rect_cov(grid.t(w1[0]), grid.t(w1[1]), grid.t(w2[0]), grid.t(w2[1]))
                        .iter()
                        .map(|v| v * v)
                        .sum::<f64>()
                        .sqrt();
                    sum += r.powf(q) * dt * du;
                }
            }
            best = best.max(sum);
        }
    }
    Ok(best.powf(1.0 / q))
}
