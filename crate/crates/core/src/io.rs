//! Artifact formats: CSV dumps for paths, lifts, trajectories and study
//! tables, JSON reports and run manifests, content hashing, and atomic file
//! writes so failed runs never leave partial outputs behind.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::greedy::{GreedyPartition, TailReport};
use crate::grid::TimeGrid;
use crate::norms::{SeminormKind, SeminormReport};
use crate::path::SamplePath;
use crate::rough::RoughPath;
use crate::solver::Trajectory;
use crate::stability::SweepReport;

/// Full-precision float formatting: 17 significant digits, enough to
/// round-trip any finite `f64` exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Format { path: path.to_string(), reason: reason.into() }
}

/// CSV dump `t,x1..xm`, one row per grid point.
pub fn path_csv(path: &SamplePath) -> String {
    let m = path.dims();
    let mut out = String::from("t");
    for a in 1..=m {
        out.push_str(&format!(",x{a}"));
    }
    out.push('\n');
    for i in 0..path.len() {
        out.push_str(&fmt_float(path.grid().t(i)));
        for a in 0..m {
            out.push(',');
            out.push_str(&fmt_float(path.values()[(i, a)]));
        }
        out.push('\n');
    }
    out
}

/// Parses the `t,x1..xm` format back into a sample path.
pub fn path_from_csv(text: &str, name: &str) -> Result<SamplePath> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| format_err(name, "empty file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 2 || cols[0] != "t" {
        return Err(format_err(name, format!("expected header t,x1..., got {header:?}")));
    }
    let m = cols.len() - 1;
    for (a, c) in cols[1..].iter().enumerate() {
        if *c != format!("x{}", a + 1) {
            return Err(format_err(name, format!("unexpected column name {c:?}")));
        }
    }
    let mut times = Vec::new();
    let mut flat = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != m + 1 {
            return Err(format_err(name, format!("row {} has {} fields", row + 2, fields.len())));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| format_err(name, format!("row {}: {e}: {s:?}", row + 2)))
        };
        times.push(parse(fields[0])?);
        for f in &fields[1..] {
            flat.push(parse(f)?);
        }
    }
    let n = times.len();
    let grid = TimeGrid::new(times)?;
    let values = Array2::from_shape_vec((n, m), flat)
        .map_err(|e| format_err(name, format!("shape: {e}")))?;
    SamplePath::new(grid, values)
}

/// CSV dump `i,j,k,l,value` of the per-step second-level blocks, `j = i+1`.
pub fn lift_csv(rp: &RoughPath) -> String {
    let m = rp.dims();
    let areas = rp.step_areas();
    let mut out = String::from("i,j,k,l,value\n");
    for i in 0..rp.len() - 1 {
        for k in 0..m {
            for l in 0..m {
                out.push_str(&format!("{i},{},{k},{l},{}\n", i + 1, fmt_float(areas[(i, k, l)])));
            }
        }
    }
    out
}

/// CSV dump `t,y1..yd`, one row per grid point.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let d = traj.dims();
    let mut out = String::from("t");
    for a in 1..=d {
        out.push_str(&format!(",y{a}"));
    }
    out.push('\n');
    for k in 0..traj.len() {
        out.push_str(&fmt_float(traj.grid().t(k)));
        for a in 0..d {
            out.push(',');
            out.push_str(&fmt_float(traj.y()[(k, a)]));
        }
        out.push('\n');
    }
    out
}

fn kind_name(kind: SeminormKind) -> &'static str {
    match kind {
        SeminormKind::PVar => "p-var",
        SeminormKind::PSigmaVar => "p-sigma-var",
        SeminormKind::Holder => "holder",
        SeminormKind::TwoParamVar => "two-param-var",
    }
}

/// JSON report `{kind, p, sigma, value, partition, interval}`.
pub fn seminorm_report_json(rep: &SeminormReport) -> String {
    let doc = serde_json::json!({
        "kind": kind_name(rep.kind),
        "p": rep.p,
        "sigma": rep.sigma,
        "value": rep.value,
        "partition": rep.partition,
        "interval": [rep.interval.0, rep.interval.1],
        "warning": rep.warning,
    });
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

/// CSV table `n,count,prob` of the crossing-count tail.
pub fn tail_csv(rep: &TailReport) -> String {
    let mut out = String::from("n,count,prob\n");
    for row in &rep.rows {
        out.push_str(&format!("{},{},{}\n", row.n, row.exceed, fmt_float(row.prob)));
    }
    out
}

/// CSV table `i,tau_i,attained_norm`, one row per greedy piece; `tau_i` is
/// the right endpoint of piece `i`.
pub fn partition_csv(part: &GreedyPartition, grid: &TimeGrid) -> String {
    let mut out = String::from("i,tau_i,attained_norm\n");
    for (i, value) in part.attained.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{}\n",
            fmt_float(grid.t(part.times[i + 1])),
            fmt_float(*value)
        ));
    }
    out
}

/// CSV table `cg,seed,exponent,stable` flattening a sweep, stable as 0/1.
pub fn sweep_csv(rep: &SweepReport) -> String {
    let mut out = String::from("cg,seed,exponent,stable\n");
    for row in &rep.rows {
        for (seed, e) in row.exponents.iter().enumerate() {
            let stable = if *e < 0.0 { 1 } else { 0 };
            out.push_str(&format!("{},{seed},{},{stable}\n", fmt_float(row.c_g), fmt_float(*e)));
        }
    }
    out
}

/// Sweep summary with the threshold scan over strengths.
pub fn sweep_summary_json(rep: &SweepReport) -> String {
    let rows: Vec<serde_json::Value> = rep
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "cg": r.c_g,
                "mean_exponent": r.mean_exponent,
                "fraction_stable": r.fraction_stable,
                "diverged": r.diverged,
                "floored": r.floored,
            })
        })
        .collect();
    let doc = serde_json::json!({
        "seeds": rep.seeds,
        "horizon": rep.horizon,
        "rows": rows,
        "largest_all_stable": rep.largest_all_stable,
        "fraction_monotone_nonincreasing": rep.fraction_monotone_nonincreasing,
    });
    serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n"
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Run manifest: the resolved configuration, hashes of any file inputs, and
/// names plus hashes of every produced output. Feeding the manifest back as
/// the configuration reproduces the outputs byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(default)]
    pub input_hashes: BTreeMap<String, String>,
    #[serde(default)]
    pub outputs: Vec<OutputFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            config,
            input_hashes: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_input(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.input_hashes.insert(name.into(), sha256_hex(bytes));
    }

    pub fn record_output(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.outputs.push(OutputFile { name: name.into(), sha256: sha256_hex(bytes) });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str, name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_err(name, e.to_string()))
    }
}

/// Writes through a temporary file in the target directory followed by an
/// atomic rename, so the destination either keeps its old content or holds
/// the complete new content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::Builder::new()
        .prefix(".roughlab-tmp")
        .tempfile_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
