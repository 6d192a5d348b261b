//! Command implementations behind the `sealoss` binary.
//!
//! Each command returns a [`CommandResult`] rather than exiting. Exit codes: 0 ok, 1 I/O failure, 2 bad
//! configuration or input, 3 model outside its domain, 4 no usable samples,
//! 5 no coverage.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sealoss_core::config::CampaignConfig;
use sealoss_core::fit::{compare_models, fit_log_distance_with_errors, Comparison, LogDistanceFit, SampleSet};
use sealoss_core::ingest::{
    apply_calibration, geolocate, parse_log, rssi_to_pathloss, to_sample_set, CalibrationTable, MeasurementRecord,
    Reject,
};
use sealoss_core::models::{link_budget_db, max_range, sweep, ModelCurve, RangeResult, Spacing};
use sealoss_core::report::{curves_csv, error_table_csv, error_table_text, samples_csv};
use sealoss_core::synthetic::{generate, write_log, SyntheticTrack};
use sealoss_core::{Error, Model, ModelId};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MODEL_DOMAIN: i32 = 3;
pub const EXIT_NO_SAMPLES: i32 = 4;
pub const EXIT_NO_COVERAGE: i32 = 5;

/// The five models drawn in the campaign comparison plots.
pub const DEFAULT_CURVE_MODELS: [ModelId; 5] = [
    ModelId::FreeSpace,
    ModelId::TwoRayFlat,
    ModelId::Rel,
    ModelId::Bullington,
    ModelId::ItuP2001,
];

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    pub report: String,
}

impl CommandResult {
    fn failure(exit_code: i32, report: impl Into<String>) -> Self {
        CommandResult {
            exit_code,
            artifacts: Vec::new(),
            report: report.into(),
        }
    }
}

/// Maps a library error to the CLI exit-code contract.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::AntennaTooHigh { .. }
        | Error::FrequencyOutOfRange(_)
        | Error::UnsupportedTimePercentage(_)
        | Error::NoSpecularPoint { .. }
        | Error::NumericalFailure(_) => EXIT_MODEL_DOMAIN,
        Error::NoValidSamples | Error::DegenerateFit | Error::EmptyLog | Error::Empty(_) => EXIT_NO_SAMPLES,
        Error::NoCoverage(_) => EXIT_NO_COVERAGE,
        _ => EXIT_CONFIG,
    }
}

fn load_config(path: &Path) -> Result<CampaignConfig, CommandResult> {
    CampaignConfig::load(path)
        .map_err(|e| CommandResult::failure(EXIT_CONFIG, format!("config {}: {e}", path.display())))
}

fn resolve_models(ids: &[ModelId], cfg: &CampaignConfig) -> Result<Vec<Model>, CommandResult> {
    if ids.is_empty() {
        return Err(CommandResult::failure(EXIT_CONFIG, "no models selected"));
    }
    let params = cfg
        .log_distance_params()
        .map_err(|e| CommandResult::failure(EXIT_CONFIG, e.to_string()))?;
    ids.iter()
        .map(|&id| Model::from_id(id, Some(params)).map_err(|e| CommandResult::failure(EXIT_CONFIG, e.to_string())))
        .collect()
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Artifacts {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CommandResult> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)
            .map_err(|e| CommandResult::failure(EXIT_IO, format!("writing {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CommandResult> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CommandResult::failure(EXIT_IO, format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

#[derive(Debug, Clone)]
pub struct CurvesOptions {
    pub config: PathBuf,
    pub models: Vec<ModelId>,
    pub d_min: f64,
    pub d_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct CurvesDocument<'a> {
    config: &'a CampaignConfig,
    d_min_m: f64,
    d_max_m: f64,
    points: usize,
    spacing: Spacing,
    curves: &'a [ModelCurve],
}

/// Evaluates each model on a distance grid and writes `curves_<model>.csv`
/// plus a combined `curves.json`.
pub fn cmd_curves(opts: &CurvesOptions) -> CommandResult {
    run(|| {
        let cfg = load_config(&opts.config)?;
        let models = resolve_models(&opts.models, &cfg)?;
        let ctx = cfg.model_context();
        let mut curves = Vec::with_capacity(models.len());
        for m in &models {
            let c = sweep(m, &ctx, opts.d_min, opts.d_max, opts.points, opts.spacing)
                .map_err(|e| CommandResult::failure(EXIT_CONFIG, e.to_string()))?;
            curves.push(c);
        }

        let mut out = Artifacts::new(&opts.out_dir);
        let mut report = String::new();
        let mut exit_code = EXIT_OK;
        for c in &curves {
            out.write(&format!("curves_{}.csv", c.model_id), curves_csv(std::slice::from_ref(c)).as_bytes())?;
            let _ = write!(report, "{:<20} {:>5} points", c.model_id.as_str(), c.len());
            if !c.missing.is_empty() {
                let _ = write!(report, ", {} not evaluated ({})", c.missing.len(), c.missing[0].reason);
            }
            report.push('\n');
            for w in &c.warnings {
                let _ = writeln!(report, "  warning: {w}");
            }
            if c.is_empty() {
                exit_code = EXIT_MODEL_DOMAIN;
            }
        }
        out.json(
            "curves.json",
            &CurvesDocument {
                config: &cfg,
                d_min_m: opts.d_min,
                d_max_m: opts.d_max,
                points: opts.points,
                spacing: opts.spacing,
                curves: &curves,
            },
        )?;
        Ok(CommandResult {
            exit_code,
            artifacts: out.written,
            report,
        })
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub config: PathBuf,
    pub log: PathBuf,
    /// Identity calibration when absent.
    pub calibration: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub models: Vec<ModelId>,
    /// Average samples into this many log-distance bins before fitting.
    pub bins: Option<usize>,
}

#[derive(Serialize)]
struct RecordCounts {
    parsed: usize,
    rejected: usize,
    clamped: usize,
    excluded: usize,
    below_minimum: usize,
    samples: usize,
}

#[derive(Serialize)]
struct AnalysisDocument<'a> {
    config: &'a CampaignConfig,
    log: String,
    calibration: Option<String>,
    bins: Option<usize>,
    counts: RecordCounts,
    rejects: &'a [Reject],
    fit: &'a LogDistanceFit,
    comparison: &'a Comparison,
}

/// Log → calibration → geolocation → path loss → fit → model comparison.
///
/// Writes `analysis.json`, `error_table.csv`, `samples.csv`, `records.csv`
/// and `curves.csv`.
pub fn cmd_analyze(opts: &AnalyzeOptions) -> CommandResult {
    run(|| {
        let cfg = load_config(&opts.config)?;
        let log_bytes = fs::read(&opts.log)
            .map_err(|e| CommandResult::failure(EXIT_CONFIG, format!("log {}: {e}", opts.log.display())))?;
        let table = match &opts.calibration {
            Some(p) => {
                let bytes = fs::read(p)
                    .map_err(|e| CommandResult::failure(EXIT_CONFIG, format!("calibration {}: {e}", p.display())))?;
                CalibrationTable::from_csv(bytes.as_slice())
                    .map_err(|e| CommandResult::failure(EXIT_CONFIG, format!("calibration {}: {e}", p.display())))?
            }
            None => CalibrationTable::identity(),
        };
        let stage = |e: Error| CommandResult::failure(exit_code_for(&e), e.to_string());

        let parsed = parse_log(log_bytes.as_slice()).map_err(stage)?;
        let records = apply_calibration(parsed.records, &table).map_err(stage)?;
        let records = geolocate(records, &cfg);
        let records = rssi_to_pathloss(records, &cfg.radio).map_err(stage)?;
        let raw = to_sample_set(&records, &opts.log.display().to_string()).map_err(stage)?;
        let samples = match opts.bins {
            Some(n) => raw.binned(n).map_err(stage)?,
            None => raw.clone(),
        };
        let fit = fit_log_distance_with_errors(&samples, cfg.reference_distance_m).map_err(stage)?;

        let mut models = resolve_models(&opts.models, &cfg)?;
        for m in &mut models {
            if let Model::LogDistance(p) = m {
                *p = fit.params;
            }
        }
        let ctx = cfg.model_context();
        let comparison = compare_models(&samples, &models, &ctx).map_err(stage)?;

        let (d_lo, d_hi) = (raw.pairs[0].0, raw.pairs[raw.len() - 1].0);
        let mut curves = Vec::new();
        if d_hi > d_lo {
            for m in &models {
                if let Ok(c) = sweep(m, &ctx, d_lo, d_hi, 200, Spacing::Log) {
                    curves.push(c);
                }
            }
        }

        let counts = RecordCounts {
            parsed: records.len(),
            rejected: parsed.rejects.len(),
            clamped: records.iter().filter(|r| r.clamped).count(),
            excluded: records.iter().filter(|r| r.excluded).count(),
            below_minimum: records.iter().filter(|r| r.below_minimum).count(),
            samples: samples.len(),
        };
        let mut report = format!(
            "{} records, {} rejected, {} excluded, {} below minimum distance; {} samples{}\n",
            counts.parsed,
            counts.rejected,
            counts.excluded,
            counts.below_minimum,
            counts.samples,
            opts.bins.map(|b| format!(" in {b} bins")).unwrap_or_default(),
        );
        let _ = writeln!(
            report,
            "log-distance fit: n = {:.3}{}, L_p0 = {:.2} dB at d_0 = {} m",
            fit.params.n,
            fit.n_std_error.map(|s| format!(" ± {s:.3}")).unwrap_or_default(),
            fit.params.lp0_db,
            fit.params.d0_m
        );
        for w in &parsed.warnings {
            let _ = writeln!(report, "warning: {w}");
        }
        report.push('\n');
        report.push_str(&error_table_text(&comparison));

        let mut out = Artifacts::new(&opts.out_dir);
        out.json(
            "analysis.json",
            &AnalysisDocument {
                config: &cfg,
                log: opts.log.display().to_string(),
                calibration: opts.calibration.as_ref().map(|p| p.display().to_string()),
                bins: opts.bins,
                counts,
                rejects: &parsed.rejects,
                fit: &fit,
                comparison: &comparison,
            },
        )?;
        out.write("error_table.csv", error_table_csv(&comparison.reports).as_bytes())?;
        out.write("samples.csv", samples_csv(&samples).as_bytes())?;
        out.write("records.csv", records_csv(&records).as_bytes())?;
        out.write("curves.csv", curves_csv(&curves).as_bytes())?;
        Ok(CommandResult {
            exit_code: EXIT_OK,
            artifacts: out.written,
            report,
        })
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn records_csv(records: &[MeasurementRecord]) -> String {
    let mut s = String::from(
        "line,timestamp,lat,lon,raw_rssi_dbm,calibrated_rssi_dbm,distance_m,path_loss_db,clamped,excluded,below_minimum\n",
    );
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.line,
            sealoss_core::ingest::format_timestamp(r.timestamp),
            r.position.latitude(),
            r.position.longitude(),
            r.raw_rssi_dbm,
            opt(r.calibrated_rssi_dbm),
            opt(r.distance_m),
            opt(r.path_loss_db),
            r.clamped,
            r.excluded,
            r.below_minimum
        );
    }
    s
}

#[derive(Debug, Clone)]
pub struct RangeOptions {
    pub config: PathBuf,
    pub models: Vec<ModelId>,
    /// Replaces the configured receiver sensitivity.
    pub sensitivity_dbm: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeEntry {
    pub model_id: ModelId,
    #[serde(flatten)]
    pub outcome: RangeOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RangeOutcome {
    Found(RangeResult),
    /// The budget still closes at the search cap.
    BeyondCap { cap_m: f64 },
    Failed { reason: String },
}

#[derive(Serialize)]
struct RangeDocument<'a> {
    config: &'a CampaignConfig,
    budget_db: f64,
    ranges: &'a [RangeEntry],
}

/// Maximum range per model for the configured link budget.
pub fn cmd_range(opts: &RangeOptions) -> CommandResult {
    run(|| {
        let mut cfg = load_config(&opts.config)?;
        if let Some(s) = opts.sensitivity_dbm {
            cfg.radio.rx_sensitivity_dbm = s;
            cfg.validate()
                .map_err(|e| CommandResult::failure(EXIT_CONFIG, format!("sensitivity override: {e}")))?;
        }
        let models = resolve_models(&opts.models, &cfg)?;
        let ctx = cfg.model_context();
        let r = &cfg.radio;
        let budget = link_budget_db(r);
        let mut report = format!(
            "link budget {budget:.2} dB = {:.2} dBm tx {:+.2} dBi tx {:+.2} dBi rx - {:.2} dB polarization - ({:.2} dBm sensitivity)\n",
            r.tx_power_dbm, r.tx_antenna_gain_dbi, r.rx_antenna_gain_dbi, r.polarization_loss_db, r.rx_sensitivity_dbm
        );
        let mut exit_code = EXIT_OK;
        let mut entries = Vec::with_capacity(models.len());
        for m in &models {
            let outcome = match max_range(m, &ctx, r) {
                Ok(res) => {
                    let _ = writeln!(report, "{:<20} {:>12.1} m", m.id().as_str(), res.range_m);
                    RangeOutcome::Found(res)
                }
                Err(Error::Unbounded { cap_m }) => {
                    let _ = writeln!(report, "{:<20} {:>12} (budget closes at {cap_m} m)", m.id().as_str(), "beyond cap");
                    RangeOutcome::BeyondCap { cap_m }
                }
                Err(e) => {
                    exit_code = exit_code.max(exit_code_for(&e));
                    let _ = writeln!(report, "{:<20} {e}", m.id().as_str());
                    RangeOutcome::Failed { reason: e.to_string() }
                }
            };
            entries.push(RangeEntry {
                model_id: m.id(),
                outcome,
            });
        }
        let mut artifacts = Vec::new();
        if let Some(dir) = &opts.out_dir {
            let mut out = Artifacts::new(dir);
            out.json(
                "range.json",
                &RangeDocument {
                    config: &cfg,
                    budget_db: budget,
                    ranges: &entries,
                },
            )?;
            artifacts = out.written;
        }
        Ok(CommandResult {
            exit_code,
            artifacts,
            report,
        })
    })
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub config: PathBuf,
    pub model: ModelId,
    pub track: SyntheticTrack,
    pub out: PathBuf,
}

/// Writes a seeded synthetic measurement log for a campaign config.
pub fn cmd_synth(opts: &SynthOptions) -> CommandResult {
    run(|| {
        let cfg = load_config(&opts.config)?;
        let model = resolve_models(&[opts.model], &cfg)?.remove(0);
        let rows = generate(&cfg, &model, &opts.track)
            .map_err(|e| CommandResult::failure(exit_code_for(&e), e.to_string()))?;
        let mut buf = Vec::new();
        write_log(&rows, &mut buf).map_err(|e| CommandResult::failure(EXIT_IO, e.to_string()))?;
        write_atomic(&opts.out, &buf)
            .map_err(|e| CommandResult::failure(EXIT_IO, format!("writing {}: {e}", opts.out.display())))?;
        Ok(CommandResult {
            exit_code: EXIT_OK,
            artifacts: vec![opts.out.clone()],
            report: format!(
                "{} of {} packets above sensitivity written to {}\n",
                rows.len(),
                opts.track.n_samples,
                opts.out.display()
            ),
        })
    })
}

fn run(f: impl FnOnce() -> Result<CommandResult, CommandResult>) -> CommandResult {
    match f() {
        Ok(r) | Err(r) => r,
    }
}

/// Samples from a finished analysis, for callers that want the data rather
/// than the files.
pub fn analysis_samples(cfg: &CampaignConfig, log: &[u8], table: &CalibrationTable) -> sealoss_core::Result<SampleSet> {
    let parsed = parse_log(log)?;
    let records = apply_calibration(parsed.records, table)?;
    let records = rssi_to_pathloss(geolocate(records, cfg), &cfg.radio)?;
    to_sample_set(&records, "log")
}
