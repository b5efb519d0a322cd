//! Command-line front end for the rough-path laboratory.
//!
//! Every subcommand resolves its parameters from built-in defaults, an
//! optional JSON config file, and command-line flags, in that order of
//! increasing precedence. Each run writes its data files plus a
//! `manifest.json` holding the fully resolved configuration and content
//! hashes; re-running with `--config manifest.json` reproduces the outputs
//! byte for byte. Exit codes: 2 invalid input, 3 numerical failure, 4 I/O
//! or file-format failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndarray::Array1;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use roughlab_core::error::{Error, Result};
use roughlab_core::fbm::{FbmSampler, FbmSpec};
use roughlab_core::greedy::{greedy_times, tail_estimate, GreedyVariant};
use roughlab_core::grid::TimeGrid;
use roughlab_core::io;
use roughlab_core::norms::{holder_seminorm, p_sigma_var, p_var};
use roughlab_core::path::SamplePath;
use roughlab_core::rough::RoughPath;
use roughlab_core::solver::{solve, DiffusionSpec, DriftSpec};
use roughlab_core::stability::lyapunov_sweep;
use roughlab_core::systems;

#[derive(Parser)]
#[command(
    name = "roughlab",
    version,
    about = "Generate rough paths, measure their regularity, and study pathwise stability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a fractional Brownian path and dump it as CSV.
    Sample(SampleArgs),
    /// Sample a path and dump its piecewise-linear second-level lift.
    Lift(LiftArgs),
    /// Compute a variation seminorm of a path (sampled or loaded).
    Norms(NormsArgs),
    /// Run the greedy interval partition on a lifted path.
    Greedy(GreedyArgs),
    /// Monte-Carlo tail study of greedy crossing counts.
    Tail(TailArgs),
    /// Solve a rough differential equation from the system registry.
    Solve(SolveArgs),
    /// Lyapunov-exponent sweep over diffusion strengths.
    Stability(StabilityArgs),
}

/// Flags shared by every subcommand. These control where work happens and
/// are not part of the resolved experiment configuration.
#[derive(Args)]
struct CommonArgs {
    /// JSON config file (a previous run's manifest.json also works).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker-thread bound for parallel studies.
    #[arg(long)]
    jobs: Option<usize>,
}

macro_rules! overlay_struct {
    ($name:ident { $($(#[$doc:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        #[derive(Args, Serialize)]
        struct $name {
            $(
                $(#[$doc])*
                #[arg(long)]
                #[serde(skip_serializing_if = "Option::is_none")]
                $field: Option<$ty>,
            )*
            #[command(flatten)]
            #[serde(skip)]
            common: CommonArgs,
        }
    };
}

overlay_struct!(SampleArgs {
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Path dimension.
    dims: usize,
    /// Number of grid points (rows in the CSV).
    n: usize,
    /// Horizon: the grid covers [0, t1].
    t1: f64,
    /// Master seed.
    seed: u64,
    /// Stream index under the master seed.
    stream: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct SampleParams {
    hurst: f64,
    dims: usize,
    n: usize,
    t1: f64,
    seed: u64,
    stream: u64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams { hurst: 0.45, dims: 1, n: 1024, t1: 1.0, seed: 0, stream: 0 }
    }
}

overlay_struct!(LiftArgs {
    /// Existing path CSV to lift instead of sampling.
    input: PathBuf,
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Path dimension.
    dims: usize,
    /// Number of grid points.
    n: usize,
    /// Horizon: the grid covers [0, t1].
    t1: f64,
    /// Master seed.
    seed: u64,
    /// Stream index under the master seed.
    stream: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct LiftParams {
    input: Option<PathBuf>,
    hurst: f64,
    dims: usize,
    n: usize,
    t1: f64,
    seed: u64,
    stream: u64,
}

impl Default for LiftParams {
    fn default() -> Self {
        LiftParams { input: None, hurst: 0.45, dims: 1, n: 1024, t1: 1.0, seed: 0, stream: 0 }
    }
}

overlay_struct!(NormsArgs {
    /// Existing path CSV to measure instead of sampling.
    input: PathBuf,
    /// Seminorm kind: p-var, p-sigma-var, or holder.
    kind: String,
    /// Variation exponent p.
    p: f64,
    /// Weight exponent for the (p, sigma) variant.
    sigma: f64,
    /// Exponent for the holder kind.
    beta: f64,
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Path dimension.
    dims: usize,
    /// Number of grid points.
    n: usize,
    /// Horizon: the grid covers [0, t1].
    t1: f64,
    /// Master seed.
    seed: u64,
    /// Stream index under the master seed.
    stream: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct NormsParams {
    input: Option<PathBuf>,
    kind: String,
    p: f64,
    sigma: f64,
    beta: f64,
    hurst: f64,
    dims: usize,
    n: usize,
    t1: f64,
    seed: u64,
    stream: u64,
}

impl Default for NormsParams {
    fn default() -> Self {
        NormsParams {
            input: None,
            kind: "p-var".to_string(),
            p: 2.5,
            sigma: 0.02,
            beta: 0.4,
            hurst: 0.45,
            dims: 1,
            n: 256,
            t1: 1.0,
            seed: 0,
            stream: 0,
        }
    }
}

overlay_struct!(GreedyArgs {
    /// Existing path CSV to partition instead of sampling.
    input: PathBuf,
    /// Crossing threshold.
    gamma: f64,
    /// Variation exponent p.
    p: f64,
    /// Weight exponent sigma.
    sigma: f64,
    /// Partition functional: plain or time-term.
    variant: String,
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Path dimension.
    dims: usize,
    /// Number of grid points.
    n: usize,
    /// Horizon: the grid covers [0, t1].
    t1: f64,
    /// Master seed.
    seed: u64,
    /// Stream index under the master seed.
    stream: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct GreedyParams {
    input: Option<PathBuf>,
    gamma: f64,
    p: f64,
    sigma: f64,
    variant: String,
    hurst: f64,
    dims: usize,
    n: usize,
    t1: f64,
    seed: u64,
    stream: u64,
}

impl Default for GreedyParams {
    fn default() -> Self {
        GreedyParams {
            input: None,
            gamma: 0.25,
            p: 2.5,
            sigma: 0.02,
            variant: "plain".to_string(),
            hurst: 0.45,
            dims: 1,
            n: 256,
            t1: 1.0,
            seed: 0,
            stream: 0,
        }
    }
}

overlay_struct!(TailArgs {
    /// Crossing threshold before inflation.
    gamma: f64,
    /// Variation exponent p.
    p: f64,
    /// Weight exponent sigma.
    sigma: f64,
    /// Monte-Carlo sample count.
    samples: usize,
    /// Steps of the unit-interval grid per sample.
    steps: usize,
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Path dimension.
    dims: usize,
    /// Master seed.
    seed: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct TailParams {
    gamma: f64,
    p: f64,
    sigma: f64,
    samples: usize,
    steps: usize,
    hurst: f64,
    dims: usize,
    seed: u64,
}

impl Default for TailParams {
    fn default() -> Self {
        TailParams {
            gamma: 0.25,
            p: 2.5,
            sigma: 0.02,
            samples: 500,
            steps: 256,
            hurst: 0.45,
            dims: 1,
            seed: 0,
        }
    }
}

overlay_struct!(SolveArgs {
    /// Drift preset: scalar-linear, diagonal-linear, or cubic-rotation.
    drift: String,
    /// Diffusion preset: scalar-linear, diagonal-linear, sin,
    /// coordinate-sin, additive, or zero.
    diffusion: String,
    /// Linear decay rate of the drift presets.
    lambda: f64,
    /// Contraction rate of the cubic-rotation drift.
    mu: f64,
    /// Rotation rate of the cubic-rotation drift.
    nu: f64,
    /// State dimension for the diagonal presets.
    dims: usize,
    /// Diffusion strength.
    sigma_g: f64,
    /// Initial state, comma separated.
    #[arg(value_delimiter = ',')]
    y0: Vec<f64>,
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Driver steps.
    steps: usize,
    /// Horizon: the equation runs on [0, t1].
    t1: f64,
    /// Master seed.
    seed: u64,
    /// Stream index under the master seed.
    stream: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct SolveParams {
    drift: String,
    diffusion: String,
    lambda: f64,
    mu: f64,
    nu: f64,
    dims: usize,
    sigma_g: f64,
    y0: Option<Vec<f64>>,
    hurst: f64,
    steps: usize,
    t1: f64,
    seed: u64,
    stream: u64,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            drift: "scalar-linear".to_string(),
            diffusion: "scalar-linear".to_string(),
            lambda: 1.0,
            mu: 1.0,
            nu: 1.0,
            dims: 1,
            sigma_g: 0.2,
            y0: None,
            hurst: 0.45,
            steps: 512,
            t1: 1.0,
            seed: 0,
            stream: 0,
        }
    }
}

overlay_struct!(StabilityArgs {
    /// System preset: scalar-linear, diagonal-linear, sin-diffusion, or
    /// cubic-rotation.
    preset: String,
    /// Linear decay rate.
    lambda: f64,
    /// Contraction rate of the cubic-rotation preset.
    mu: f64,
    /// Rotation rate of the cubic-rotation preset.
    nu: f64,
    /// State dimension for the diagonal preset.
    dims: usize,
    /// Single diffusion strength (shorthand for a one-point sweep).
    sigma: f64,
    /// Sweep strengths, comma separated.
    #[arg(value_delimiter = ',')]
    sigmas: Vec<f64>,
    /// Seeds per strength.
    seeds: usize,
    /// Horizon of each trajectory.
    horizon: f64,
    /// Driver steps over the horizon.
    steps: usize,
    /// Hurst exponent in (0, 1).
    hurst: f64,
    /// Initial state, comma separated.
    #[arg(value_delimiter = ',')]
    y0: Vec<f64>,
    /// Master seed.
    seed: u64,
});

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields, default)]
struct StabilityParams {
    preset: String,
    lambda: f64,
    mu: f64,
    nu: f64,
    dims: usize,
    sigma: Option<f64>,
    sigmas: Vec<f64>,
    seeds: usize,
    horizon: f64,
    steps: usize,
    hurst: f64,
    y0: Option<Vec<f64>>,
    seed: u64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        StabilityParams {
            preset: "scalar-linear".to_string(),
            lambda: 1.0,
            mu: 1.0,
            nu: 1.0,
            dims: 1,
            sigma: None,
            sigmas: vec![0.2],
            seeds: 10,
            horizon: 20.0,
            steps: 2048,
            hurst: 0.45,
            y0: None,
            seed: 0,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Lift(a) => cmd_lift(a),
        Command::Norms(a) => cmd_norms(a),
        Command::Greedy(a) => cmd_greedy(a),
        Command::Tail(a) => cmd_tail(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Stability(a) => cmd_stability(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) => 2,
                Error::Numerical(_) | Error::Diverged { .. } => 3,
                Error::Io(_) | Error::Format { .. } => 4,
            })
        }
    }
}

/// Deep-merges `over` into `base` (objects merge, everything else replaces).
fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

/// Resolves defaults <- config file <- flags into a parameter record, and
/// returns it with the serialized form used in the manifest. A manifest
/// from an earlier run is accepted in place of a config file as long as its
/// command matches.
fn resolve_params<P>(command: &str, common: &CommonArgs, overlay: Value) -> Result<(P, Value)>
where
    P: Serialize + DeserializeOwned + Default,
{
    let mut doc = serde_json::to_value(P::default()).expect("defaults serialize");
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)?;
        let parsed: Value = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let config = match (parsed.get("command"), parsed.get("config")) {
            (Some(Value::String(cmd)), Some(cfg)) => {
                if cmd != command {
                    return Err(Error::domain(format!(
                        "manifest was produced by `{cmd}`, not `{command}`"
                    )));
                }
                cfg.clone()
            }
            _ => parsed,
        };
        merge(&mut doc, &config);
    }
    merge(&mut doc, &overlay);
    let params: P = serde_json::from_value(doc).map_err(|e| Error::domain(e.to_string()))?;
    let canonical = serde_json::to_value(&params).expect("params serialize");
    Ok((params, canonical))
}

fn configure_jobs(common: &CommonArgs) -> Result<()> {
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(Error::domain("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    }
    Ok(())
}

struct RunWriter {
    dir: PathBuf,
    manifest: io::Manifest,
    written: Vec<String>,
}

impl RunWriter {
    fn new(common: &CommonArgs, command: &str, config: Value) -> Result<Self> {
        std::fs::create_dir_all(&common.out)?;
        Ok(RunWriter {
            dir: common.out.clone(),
            manifest: io::Manifest::new(command, config),
            written: Vec::new(),
        })
    }

    fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.manifest.record_input(path.display().to_string(), bytes);
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        io::write_atomic(&self.dir.join(name), content.as_bytes())?;
        self.manifest.record_output(name, content.as_bytes());
        self.written.push(name.to_string());
        Ok(())
    }

    fn finish(mut self) -> Result<String> {
        let text = self.manifest.to_json();
        io::write_atomic(&self.dir.join("manifest.json"), text.as_bytes())?;
        self.written.push("manifest.json".to_string());
        Ok(format!("wrote {} to {}", self.written.join(", "), self.dir.display()))
    }
}

fn validate_points(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::domain("need at least 2 grid points"));
    }
    Ok(n - 1)
}

fn sample_one(hurst: f64, dims: usize, n: usize, t1: f64, seed: u64, stream: u64) -> Result<SamplePath> {
    let steps = validate_points(n)?;
    let grid = TimeGrid::uniform(0.0, t1, steps)?;
    let sampler = FbmSampler::new(FbmSpec::new(hurst, dims)?, grid)?;
    Ok(sampler.sample(seed, stream))
}

/// Loads `input` when given (hashing it into the manifest), else samples.
fn input_or_sample(
    writer: &mut RunWriter,
    input: &Option<PathBuf>,
    hurst: f64,
    dims: usize,
    n: usize,
    t1: f64,
    seed: u64,
    stream: u64,
) -> Result<SamplePath> {
    match input {
        Some(file) => {
            let bytes = std::fs::read(file)?;
            writer.record_input(file, &bytes);
            let text = String::from_utf8(bytes).map_err(|e| Error::Format {
                path: file.display().to_string(),
                reason: e.to_string(),
            })?;
            io::path_from_csv(&text, &file.display().to_string())
        }
        None => sample_one(hurst, dims, n, t1, seed, stream),
    }
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<SampleParams>("sample", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let path = sample_one(p.hurst, p.dims, p.n, p.t1, p.seed, p.stream)?;
    let mut writer = RunWriter::new(&args.common, "sample", config)?;
    writer.write("path.csv", &io::path_csv(&path))?;
    println!("sampled {} points in {} dims; {}", p.n, p.dims, writer.finish()?);
    Ok(())
}

fn cmd_lift(args: &LiftArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<LiftParams>("lift", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let mut writer = RunWriter::new(&args.common, "lift", config)?;
    let path =
        input_or_sample(&mut writer, &p.input, p.hurst, p.dims, p.n, p.t1, p.seed, p.stream)?;
    let rows = (path.len() - 1) * path.dims() * path.dims();
    writer.write("path.csv", &io::path_csv(&path))?;
    let rp = RoughPath::lift_piecewise_linear(path)?;
    writer.write("lift.csv", &io::lift_csv(&rp))?;
    println!("lifted {} steps ({rows} second-level entries); {}", rp.len() - 1, writer.finish()?);
    Ok(())
}

fn cmd_norms(args: &NormsArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<NormsParams>("norms", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let mut writer = RunWriter::new(&args.common, "norms", config)?;
    let path =
        input_or_sample(&mut writer, &p.input, p.hurst, p.dims, p.n, p.t1, p.seed, p.stream)?;
    let hi = path.len() - 1;
    let report = match p.kind.as_str() {
        "p-var" => p_var(&path, p.p, 0, hi)?,
        "p-sigma-var" => p_sigma_var(&path, p.p, p.sigma, 0, hi)?,
        "holder" => holder_seminorm(&path, p.beta, 0, hi)?,
        other => {
            return Err(Error::domain(format!(
                "unknown seminorm kind {other:?} (expected p-var, p-sigma-var, or holder)"
            )))
        }
    };
    writer.write("norms.json", &io::seminorm_report_json(&report))?;
    println!("{} = {:.6e}; {}", p.kind, report.value, writer.finish()?);
    Ok(())
}

fn cmd_greedy(args: &GreedyArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<GreedyParams>("greedy", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let variant = match p.variant.as_str() {
        "plain" => GreedyVariant::Plain,
        "time-term" => GreedyVariant::WithTimeTerm,
        other => {
            return Err(Error::domain(format!(
                "unknown variant {other:?} (expected plain or time-term)"
            )))
        }
    };
    let mut writer = RunWriter::new(&args.common, "greedy", config)?;
    let path =
        input_or_sample(&mut writer, &p.input, p.hurst, p.dims, p.n, p.t1, p.seed, p.stream)?;
    let rp = RoughPath::lift_piecewise_linear(path)?;
    let part = greedy_times(&rp, p.gamma, p.p, p.sigma, 0, rp.len() - 1, variant)?;
    writer.write("partition.csv", &io::partition_csv(&part, rp.grid()))?;
    println!(
        "crossings = {}, pieces = {}; {}",
        part.crossings,
        part.attained.len(),
        writer.finish()?
    );
    Ok(())
}

fn cmd_tail(args: &TailArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<TailParams>("tail", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let spec = FbmSpec::new(p.hurst, p.dims)?;
    let report = tail_estimate(spec, p.steps, p.gamma, p.p, p.sigma, p.samples, p.seed)?;
    let summary = serde_json::json!({
        "threshold": report.threshold,
        "gamma": report.gamma,
        "samples": report.samples,
        "slope": report.slope,
        "intercept": report.intercept,
        "r_squared": report.r_squared,
        "regression_points": report.regression_points,
        "degenerate": report.degenerate,
        "exp_moment_full": report.exp_moment_full,
        "exp_moment_half": report.exp_moment_half,
    });
    let mut writer = RunWriter::new(&args.common, "tail", config)?;
    writer.write("tail.csv", &io::tail_csv(&report))?;
    writer.write(
        "tail_summary.json",
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    println!(
        "slope = {:.4}, r2 = {:.4}, threshold = {:.4}; {}",
        report.slope,
        report.r_squared,
        report.threshold,
        writer.finish()?
    );
    Ok(())
}

fn build_drift(name: &str, lambda: f64, mu: f64, nu: f64, dims: usize) -> Result<DriftSpec> {
    match name {
        "scalar-linear" => systems::scalar_linear_drift(lambda),
        "diagonal-linear" => systems::diagonal_linear_drift(lambda, dims),
        "cubic-rotation" => systems::cubic_rotation_drift(mu, nu),
        other => Err(Error::domain(format!(
            "unknown drift {other:?} (expected scalar-linear, diagonal-linear, or cubic-rotation)"
        ))),
    }
}

fn build_diffusion(name: &str, strength: f64, dims: usize) -> Result<DiffusionSpec> {
    match name {
        "scalar-linear" => systems::scalar_linear_diffusion(strength),
        "diagonal-linear" => systems::diagonal_linear_diffusion(strength, dims),
        "sin" => systems::sin_diffusion(strength),
        "coordinate-sin" => systems::coordinate_sin_diffusion(strength, dims),
        "additive" => systems::additive_diffusion(dims),
        "zero" => systems::zero_diffusion(dims, 1),
        other => Err(Error::domain(format!(
            "unknown diffusion {other:?} (expected scalar-linear, diagonal-linear, sin, \
             coordinate-sin, additive, or zero)"
        ))),
    }
}

fn initial_state(y0: &Option<Vec<f64>>, d: usize) -> Result<Array1<f64>> {
    match y0 {
        Some(v) => {
            if v.len() != d {
                return Err(Error::domain(format!(
                    "initial state has {} entries, system has dimension {d}",
                    v.len()
                )));
            }
            Ok(Array1::from_vec(v.clone()))
        }
        None => Ok(Array1::ones(d)),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<SolveParams>("solve", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let drift = build_drift(&p.drift, p.lambda, p.mu, p.nu, p.dims)?;
    let d = drift.dims();
    let diff = build_diffusion(&p.diffusion, p.sigma_g, d)?;
    let y0 = initial_state(&p.y0, d)?;
    let grid = TimeGrid::uniform(0.0, p.t1, p.steps)?;
    let sampler = FbmSampler::new(FbmSpec::new(p.hurst, diff.noise_dims())?, grid)?;
    let rp = RoughPath::lift_piecewise_linear(sampler.sample(p.seed, p.stream))?;
    let traj = solve(&drift, &diff, &rp, &y0, 0, rp.len() - 1)?;
    let mut writer = RunWriter::new(&args.common, "solve", config)?;
    writer.write("trajectory.csv", &io::trajectory_csv(&traj))?;
    println!(
        "final |y| = {:.6e} after {} steps; {}",
        traj.norm_at(traj.len() - 1),
        p.steps,
        writer.finish()?
    );
    Ok(())
}

fn cmd_stability(args: &StabilityArgs) -> Result<()> {
    let overlay = serde_json::to_value(args).expect("flags serialize");
    let (p, config) = resolve_params::<StabilityParams>("stability", &args.common, overlay)?;
    configure_jobs(&args.common)?;
    let (drift, family): (DriftSpec, Box<dyn Fn(f64) -> Result<DiffusionSpec>>) =
        match p.preset.as_str() {
            "scalar-linear" => (
                systems::scalar_linear_drift(p.lambda)?,
                Box::new(systems::scalar_linear_diffusion),
            ),
            "diagonal-linear" => {
                let d = p.dims;
                (
                    systems::diagonal_linear_drift(p.lambda, d)?,
                    Box::new(move |s| systems::diagonal_linear_diffusion(s, d)),
                )
            }
            "sin-diffusion" => {
                (systems::scalar_linear_drift(p.lambda)?, Box::new(systems::sin_diffusion))
            }
            "cubic-rotation" => (
                systems::cubic_rotation_drift(p.mu, p.nu)?,
                Box::new(|s| systems::coordinate_sin_diffusion(s, 2)),
            ),
            other => {
                return Err(Error::domain(format!(
                    "unknown preset {other:?} (expected scalar-linear, diagonal-linear, \
                     sin-diffusion, or cubic-rotation)"
                )))
            }
        };
    let strengths: Vec<f64> = match p.sigma {
        Some(s) => vec![s],
        None => p.sigmas.clone(),
    };
    let d = drift.dims();
    let y0 = initial_state(&p.y0, d)?;
    let report = lyapunov_sweep(
        &drift,
        |s| family(s),
        &strengths,
        FbmSpec::new(p.hurst, d.max(1))?,
        p.steps,
        p.horizon,
        &y0,
        p.seeds,
        p.seed,
    )?;
    let mut writer = RunWriter::new(&args.common, "stability", config)?;
    writer.write("sweep.csv", &io::sweep_csv(&report))?;
    writer.write("sweep_summary.json", &io::sweep_summary_json(&report))?;
    for row in &report.rows {
        println!(
            "cg = {:.4}: mean exponent = {:.4}, fraction stable = {:.2}, diverged = {}",
            row.c_g, row.mean_exponent, row.fraction_stable, row.diverged
        );
    }
    println!("{}", writer.finish()?);
    Ok(())
}
