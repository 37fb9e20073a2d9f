//! Each command is first turned into a `Plan`, which checks every key and
//! touches no output path, then executed.

use std::io::Write;
use std::path::{Path, PathBuf};

use mesozeta::density::{
    check_window, fujii_coverage, fujii_moment, q_smoothed_lk, synthesize_offline_zeros, windowed_lk,
    write_density_csv, DensityReport, StepFunction,
};
use mesozeta::explicit::{explicit_formula_discrepancy, PairingFunction};
use mesozeta::rmt::{cue_clt_with, CircleFunction, CueSampler, MAX_DIMENSION};
use mesozeta::specialfn::EvaluationPrecision;
use mesozeta::stats::{draw_samples, sampling_coverage, summarize, write_samples_csv, ExperimentConfig};
use mesozeta::testfn::{SmoothingWeight, TestFunction};
use mesozeta::zeros::{
    fetch_zero_table, find_zeros, read_table, verify_cached_source, write_table, SourceRegistry, ZeroTable, MAX_HEIGHT,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{invalid, rejected, CliError, Context};
use crate::tables::{cache_dir, TableRequest};

/// Weighted height sampling computes zeros this many bulk widths either side
/// of the weight's center.
const WEIGHT_SPREAD: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DensityMode {
    Windowed,
    Smoothed,
}

#[derive(Debug)]
pub enum Plan {
    ZerosCompute { t_min: f64, t_max: f64, precision: EvaluationPrecision, save: PathBuf },
    ZerosFetch { source: String, registry: SourceRegistry },
    ZerosVerify { source: Option<String>, table: Option<PathBuf>, registry: SourceRegistry },
    Clt { config: ExperimentConfig, table: TableRequest, samples_csv: Option<PathBuf> },
    Explicit { g: PairingFunction, cutoff: f64, table: TableRequest },
    Fujii { height: f64, span: f64, h_logs: Vec<f64>, ks: Vec<u32>, a: f64, table: TableRequest },
    DensitySynth { height: f64, c: f64, fraction: f64, zeros_csv: Option<PathBuf> },
    DensityWindows(Box<DensityPlan>),
    Cue { sampler: CueSampler, n: usize, f: CircleFunction, samples: usize },
}

#[derive(Debug)]
pub struct DensityPlan {
    height: f64,
    c: f64,
    fraction: f64,
    mode: DensityMode,
    sigma_offsets: Vec<f64>,
    windows: Vec<f64>,
    ks: Vec<u32>,
    weight: SmoothingWeight,
    f: StepFunction,
    csv: Option<PathBuf>,
}

/// Result record plus extra files to write next to it.
pub struct Outcome {
    pub result: Value,
    pub artifacts: Vec<(PathBuf, Vec<u8>)>,
}

fn range(key: &str, ok: bool, message: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Range { key: key.into(), message: message.into() })
    }
}

/// Output files must land in an existing directory.
pub fn check_output(key: &str, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    range(key, parent.is_dir(), &format!("directory {} does not exist", parent.display()))?;
    range(key, !path.is_dir(), &format!("{} is a directory", path.display()))
}

fn parsed<T: std::str::FromStr<Err = mesozeta::Error>>(key: &str, text: &str) -> Result<T, CliError> {
    text.parse().map_err(|e| invalid(key, e))
}

fn small_ints(key: &str, values: &[u64]) -> Result<Vec<u32>, CliError> {
    values
        .iter()
        .map(|&k| u32::try_from(k).ok().filter(|&k| k >= 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CliError::Range { key: key.into(), message: "need integers in 1..2^32".into() })
}

fn synth_ranges(height: f64, c: f64, fraction: f64) -> Result<(), CliError> {
    range("T", height >= 100.0, "need T ≥ 100")?;
    range("c", c > 0.0 && c < 1.0, "need 0 < c < 1")?;
    range("fraction", (0.0..=1.0).contains(&fraction), "need 0 ≤ fraction ≤ 1")
}

impl Plan {
    pub fn new(run: &RunConfig) -> Result<Plan, CliError> {
        let seed = run.master_seed;
        Ok(match run.command.as_str() {
            "zeros-compute" => {
                let (t_min, t_max) = (run.float("t_min"), run.float("t_max"));
                range("t_min", t_min >= 0.0, "need t_min ≥ 0")?;
                range("t_max", t_max > t_min && t_max <= MAX_HEIGHT, &format!("need t_min < t_max ≤ {MAX_HEIGHT:e}"))?;
                let precision =
                    EvaluationPrecision::new(run.float("abs_tol"), EvaluationPrecision::default().max_terms)
                        .map_err(|e| invalid("abs_tol", e))?;
                let save = match run.path("save") {
                    Some(p) => p.to_path_buf(),
                    None => cache_dir().join(format!("zeros-{t_min}-{t_max}.ztbl")),
                };
                if run.path("save").is_some() {
                    check_output("save", Some(&save))?;
                }
                Plan::ZerosCompute { t_min, t_max, precision, save }
            }
            "zeros-fetch" => {
                let source = run.text("source").unwrap_or_default().to_string();
                run.registry.get(&source).map_err(|e| invalid("source", e))?;
                Plan::ZerosFetch { source, registry: run.registry.clone() }
            }
            "zeros-verify" => {
                let source = run.text("source").map(str::to_string);
                let table = run.path("table").map(Path::to_path_buf);
                range("source", source.is_some() != table.is_some(), "give exactly one of `source` or `table`")?;
                if let Some(id) = &source {
                    run.registry.get(id).map_err(|e| invalid("source", e))?;
                }
                Plan::ZerosVerify { source, table, registry: run.registry.clone() }
            }
            "clt" => {
                let eta: TestFunction = parsed("eta", run.text("eta").unwrap_or_default())?;
                let weight = match run.text("weight") {
                    Some(w) => Some(parsed::<SmoothingWeight>("weight", w)?),
                    None => None,
                };
                let samples = usize::try_from(run.int("samples")).unwrap_or(usize::MAX);
                let mut config = ExperimentConfig::new(run.float("T"), run.float("n"), eta, samples, seed);
                config.weight = weight;
                let samples_csv = run.path("samples_csv").map(Path::to_path_buf);
                check_output("samples_csv", samples_csv.as_deref())?;
                let (lo, hi) = sampling_coverage(&config, samples_csv.is_some(), WEIGHT_SPREAD).map_err(rejected)?;
                // Weighted sampling clips its height law to a given table.
                let table = match (&config.weight, run.path("table")) {
                    (Some(_), Some(p)) => TableRequest::read(p)?,
                    (_, path) => TableRequest::new(path, lo, hi)?,
                };
                Plan::Clt { config, table, samples_csv }
            }
            "explicit" => {
                let g: PairingFunction = parsed("g", run.text("g").unwrap_or_default())?;
                let cutoff = run.float("V");
                range("V", cutoff > 0.0 && cutoff <= MAX_HEIGHT, "need 0 < V ≤ 1e8")?;
                let table = TableRequest::new(run.path("table"), 0.0, cutoff)?;
                Plan::Explicit { g, cutoff, table }
            }
            "fujii" => {
                let height = run.float("T");
                range("T", height > 1.0 && height <= MAX_HEIGHT, "need 1 < T ≤ 1e8")?;
                let span = height.powf(run.float("span_exponent"));
                let h_logs = run.floats("h_log").to_vec();
                let ks = small_ints("k", run.ints("k"))?;
                let a = run.float("a");
                let mut top = height;
                for &h_log in &h_logs {
                    let h = h_log / height.ln();
                    for &k in &ks {
                        let (_, hi) = fujii_coverage(height, span, h, k, a).map_err(|e| match e {
                            mesozeta::Error::ParameterRange { name: "H", .. } => invalid("span_exponent", e),
                            mesozeta::Error::ParameterRange { name: "h", .. } => invalid("h_log", e),
                            other => rejected(other),
                        })?;
                        top = top.max(hi);
                    }
                }
                let table = TableRequest::new(run.path("table"), height, top)?;
                Plan::Fujii { height, span, h_logs, ks, a, table }
            }
            "density-synth" => {
                let (height, c, fraction) = (run.float("T"), run.float("c"), run.float("fraction"));
                synth_ranges(height, c, fraction)?;
                let zeros_csv = run.path("zeros_csv").map(Path::to_path_buf);
                check_output("zeros_csv", zeros_csv.as_deref())?;
                Plan::DensitySynth { height, c, fraction, zeros_csv }
            }
            "density-windows" => {
                let (height, c, fraction) = (run.float("T"), run.float("c"), run.float("fraction"));
                synth_ranges(height, c, fraction)?;
                let mode = match run.text("mode").unwrap_or_default() {
                    "windowed" => DensityMode::Windowed,
                    "smoothed" => DensityMode::Smoothed,
                    other => {
                        return Err(CliError::Range {
                            key: "mode".into(),
                            message: format!("`{other}` is neither `windowed` nor `smoothed`"),
                        })
                    }
                };
                let sigma_offsets = run.floats("sigma_offsets").to_vec();
                range("sigma_offsets", sigma_offsets.iter().all(|&d| d >= 0.0), "offsets must be non-negative")?;
                let windows = run.floats("windows").to_vec();
                let ks = small_ints("k", run.ints("k"))?;
                for &h in &windows {
                    for &k in &ks {
                        check_window(h, k, height).map_err(|e| invalid("windows", e))?;
                    }
                }
                let weight: SmoothingWeight = parsed("weight", run.text("weight").unwrap_or_default())?;
                let f = StepFunction::indicator_above(run.float("f_alpha")).map_err(|e| invalid("f_alpha", e))?;
                let csv = run.path("csv").map(Path::to_path_buf);
                check_output("csv", csv.as_deref())?;
                Plan::DensityWindows(Box::new(DensityPlan {
                    height,
                    c,
                    fraction,
                    mode,
                    sigma_offsets,
                    windows,
                    ks,
                    weight,
                    f,
                    csv,
                }))
            }
            "cue" => {
                let n = run.int("N");
                range("N", (1..=MAX_DIMENSION as u64).contains(&n), &format!("need 1 ≤ N ≤ {MAX_DIMENSION}"))?;
                let samples = run.int("samples");
                range("samples", samples >= 2, "need at least two samples")?;
                let f: CircleFunction = parsed("f", run.text("f").unwrap_or_default())?;
                let sampler: CueSampler = parsed("sampler", run.text("sampler").unwrap_or_default())?;
                Plan::Cue { sampler, n: n as usize, f, samples: samples as usize }
            }
            other => return Err(CliError::UnknownCommand(other.to_string())),
        })
    }

    pub fn execute(self, seed: u64) -> Result<Outcome, CliError> {
        let mut artifacts = Vec::new();
        let result = match self {
            Plan::ZerosCompute { t_min, t_max, precision, save } => {
                let table = find_zeros(t_min, t_max, &precision).context("computing zeros")?;
                if let Some(dir) = save.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).context("creating table directory")?;
                }
                write_table(&table, &save).context("writing zero table")?;
                let mut v = table_summary(&table);
                v["path"] = json!(save.display().to_string());
                v
            }
            Plan::ZerosFetch { source, registry } => {
                let table = fetch_zero_table(&registry, &source, &cache_dir()).context("fetching zero table")?;
                let mut v = table_summary(&table);
                v["source"] = json!(source);
                v
            }
            Plan::ZerosVerify { source: Some(id), registry, .. } => {
                let count = verify_cached_source(&registry, &id, &cache_dir()).context("verifying cache")?;
                json!({ "source": id, "zeros": count, "status": "ok" })
            }
            Plan::ZerosVerify { table, .. } => {
                let path = table.expect("one of source or table");
                let table = read_table(&path).context("verifying table")?;
                let mut v = table_summary(&table);
                v["path"] = json!(path.display().to_string());
                v["status"] = json!("ok");
                v
            }
            Plan::Clt { config, table, samples_csv } => {
                let table = table.load()?;
                let samples = draw_samples(&table, &config, samples_csv.is_some()).context("sampling")?;
                let deltas: Vec<f64> = samples.iter().map(|s| s.delta).collect();
                let report = summarize(&deltas, &config).context("summarizing")?;
                if let Some(path) = samples_csv {
                    let mut buf = Vec::new();
                    write_samples_csv(&samples, &mut buf).context("formatting samples")?;
                    artifacts.push((path, buf));
                }
                serde_json::to_value(report).expect("report serializes")
            }
            Plan::Explicit { g, cutoff, table } => {
                let table = table.load()?;
                let report = explicit_formula_discrepancy(&g, &table, cutoff).context("explicit formula")?;
                serde_json::to_value(report).expect("report serializes")
            }
            Plan::Fujii { height, span, h_logs, ks, a, table } => {
                let table = table.load()?;
                let mut rows = Vec::new();
                for &h_log in &h_logs {
                    for &k in &ks {
                        let m =
                            fujii_moment(&table, height, span, h_log / height.ln(), k, a).context("Fujii moment")?;
                        let mut v = serde_json::to_value(m).expect("moment serializes");
                        v["h_log"] = json!(h_log);
                        rows.push(v);
                    }
                }
                json!({ "moments": rows })
            }
            Plan::DensitySynth { height, c, fraction, zeros_csv } => {
                let ensemble = synthesize_offline_zeros(height, c, fraction, seed).context("synthesizing zeros")?;
                if let Some(path) = zeros_csv {
                    artifacts.push((path, zeros_csv_bytes(&ensemble.table)?));
                }
                let off_axis = (0..ensemble.table.len()).filter(|&i| ensemble.table.off_axis(i) != 0.0).count();
                let mut v = serde_json::to_value(ensemble.parameters()).expect("parameters serialize");
                v["off_axis_zeros"] = json!(off_axis);
                v
            }
            Plan::DensityWindows(plan) => density_windows(*plan, seed, &mut artifacts)?,
            Plan::Cue { sampler, n, f, samples } => {
                let report = cue_clt_with(sampler, n, &f, samples, seed).context("CUE sampling")?;
                let mut v = json!({ "model": "cue", "N": n, "sampler": sampler_name(sampler), "f": f.to_string() });
                if let (Value::Object(dst), Value::Object(src)) =
                    (&mut v, serde_json::to_value(report).expect("report serializes"))
                {
                    for (k, x) in src {
                        dst.entry(k).or_insert(x);
                    }
                }
                v
            }
        };
        Ok(Outcome { result, artifacts })
    }
}

fn sampler_name(s: CueSampler) -> &'static str {
    match s {
        CueSampler::Matrix => "matrix",
        CueSampler::Verblunsky => "verblunsky",
    }
}

fn table_summary(table: &ZeroTable) -> Value {
    json!({
        "zeros": table.len(),
        "t_min": table.t_min(),
        "t_max": table.t_max(),
        "zeros_below": table.zeros_below(),
        "certified_at": table.certified_at(),
    })
}

fn zeros_csv_bytes(table: &ZeroTable) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io { context: "formatting zeros".into(), source: e.into() };
    w.write_record(["ordinate", "off_axis", "multiplicity"]).map_err(io)?;
    for i in 0..table.len() {
        let row = [table.ordinates()[i].to_string(), table.off_axis(i).to_string(), table.multiplicity(i).to_string()];
        w.write_record(&row).map_err(io)?;
    }
    w.flush().context("formatting zeros")?;
    w.into_inner().map_err(|e| CliError::Io { context: "formatting zeros".into(), source: e.into_error() })
}

fn density_windows(plan: DensityPlan, seed: u64, artifacts: &mut Vec<(PathBuf, Vec<u8>)>) -> Result<Value, CliError> {
    let ensemble = synthesize_offline_zeros(plan.height, plan.c, plan.fraction, seed).context("synthesizing zeros")?;
    let log_t = plan.height.ln();
    let mut rows: Vec<(String, DensityReport)> = Vec::new();
    for &h in &plan.windows {
        for &k in &plan.ks {
            match plan.mode {
                DensityMode::Windowed => {
                    for &d in &plan.sigma_offsets {
                        let report = windowed_lk(&ensemble.table, 0.5 + d / log_t, h, k, plan.height, plan.c)
                            .context("windowed moment")?;
                        rows.push((format!("offset={d};H={h};k={k}"), report));
                    }
                }
                DensityMode::Smoothed => {
                    let report = q_smoothed_lk(&ensemble.table, &plan.f, h, k, plan.height, &plan.weight, plan.c)
                        .context("smoothed moment")?;
                    rows.push((format!("H={h};k={k}"), report));
                }
            }
        }
    }
    if let Some(path) = plan.csv {
        let mut buf = Vec::new();
        write_density_csv(rows.iter().map(|(l, r)| (l.as_str(), r)), &mut buf).context("formatting density rows")?;
        artifacts.push((path, buf));
    }
    let rows: Vec<Value> = rows
        .into_iter()
        .map(|(label, report)| {
            let mut v = serde_json::to_value(report).expect("report serializes");
            v["param_set"] = json!(label);
            v
        })
        .collect();
    Ok(json!({ "ensemble": ensemble.parameters(), "rows": rows }))
}

/// Writes `bytes` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).context("creating temporary file")?;
    tmp.write_all(bytes).context("writing temporary file")?;
    tmp.as_file().sync_all().context("syncing temporary file")?;
    tmp.persist(path)
        .map_err(|e| CliError::Io { context: format!("renaming into {}", path.display()), source: e.error })?;
    Ok(())
}
