//! Experiment configuration, built-in presets and the batch runner.
//!
//! An experiment draws `realizations` channels, schedules each with every
//! configured method, evaluates the schedules by Monte-Carlo link simulation
//! and reports per-UE metrics plus their 90th-percentile summaries.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, DEFAULT_ES_CAP};
use crate::channel::{self, ChannelKind, ChannelModel, ChannelSet, NoiseModel, NORMALIZED_NOISE};
use crate::error::{Error, Result};
use crate::eval::stats::{percentile90, Direction};
use crate::eval::{evaluate, Modulation, ModulationKind};
use crate::model::{is_feasible, ConstraintBox, Scenario, SchedulingMatrix};
use crate::objectives::{ObjectiveKind, ObjectiveSpec};
use crate::rng::{derive_seed, Purpose};
use crate::solver::{schedule, FbsConfig};

/// A scheduling method that can appear in an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Method {
    /// FBS on the given objective followed by quantization.
    Proposed(ObjectiveKind),
    Random,
    /// All UEs active in all slots.
    Aua,
    /// Exhaustive search minimizing the given objective.
    Exhaustive(ObjectiveKind),
    /// Schedules read from `<schedule_dir>/<name>/<realization>.txt`.
    File(String),
}

impl Method {
    /// Box the method's schedules must satisfy; `None` for imported schedules.
    pub fn constraint_box(&self, scenario: &Scenario, configured: &ConstraintBox) -> Result<Option<ConstraintBox>> {
        Ok(match self {
            Method::Proposed(_) | Method::Exhaustive(_) => Some(*configured),
            Method::Random => Some(baselines::random_box(scenario.ues, scenario.slots)?),
            Method::Aua => Some(baselines::aua_box(scenario.ues, scenario.slots)),
            Method::File(_) => None,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Proposed(k) => write!(f, "{k}"),
            Method::Random => f.write_str("random"),
            Method::Aua => f.write_str("aua"),
            Method::Exhaustive(ObjectiveKind::MseLmmse) => f.write_str("es-mse"),
            Method::Exhaustive(ObjectiveKind::Capacity) => f.write_str("es-capacity"),
            Method::Exhaustive(ObjectiveKind::SumRate) => f.write_str("es-rate"),
            Method::File(name) => write!(f, "file:{name}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => Method::Random,
            "aua" => Method::Aua,
            "es-mse" => Method::Exhaustive(ObjectiveKind::MseLmmse),
            "es-capacity" => Method::Exhaustive(ObjectiveKind::Capacity),
            "es-rate" => Method::Exhaustive(ObjectiveKind::SumRate),
            _ => {
                if let Some(name) = s.strip_prefix("file:") {
                    if name.is_empty() || name.contains(['/', '\\']) {
                        return Err(Error::Parse(format!("bad imported schedule name in {s:?}")));
                    }
                    Method::File(name.to_string())
                } else {
                    Method::Proposed(s.parse().map_err(|_| Error::Parse(format!("unknown method {s:?}")))?)
                }
            }
        })
    }
}

/// Table-I style system parameters as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub antennas: usize,
    pub aps: usize,
    pub antennas_per_ap: usize,
    pub ues: usize,
    pub slots: usize,
    /// Per-UE transmit power in watts.
    pub tx_power: f64,
    #[serde(default = "default_eta")]
    pub eta_db: f64,
    pub bits_per_symbol: u32,
    pub restarts: usize,
}

fn default_eta() -> f64 {
    6.0
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub channel_model: ChannelKind,
    pub realizations: usize,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Directory of raw channels named `<realization>.txt`; synthetic when absent.
    #[serde(default)]
    pub channel_dir: Option<PathBuf>,
    /// Root of imported schedules for `file:<name>` methods.
    #[serde(default)]
    pub schedule_dir: Option<PathBuf>,
    #[serde(default = "default_cap")]
    pub es_cap: u64,
    pub scenario: ScenarioConfig,
    #[serde(rename = "box")]
    pub bounds: ConstraintBox,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Regularizer weight per objective name.
    #[serde(default)]
    pub alpha: BTreeMap<String, f64>,
    #[serde(default)]
    pub solver: FbsConfig,
}

fn default_cap() -> u64 {
    DEFAULT_ES_CAP
}

const PRESETS: [(&str, &str); 6] = [
    ("s1-desk", include_str!("../presets/s1-desk.toml")),
    ("s2-desk", include_str!("../presets/s2-desk.toml")),
    ("s3-desk", include_str!("../presets/s3-desk.toml")),
    ("s4-desk", include_str!("../presets/s4-desk.toml")),
    ("s5-desk", include_str!("../presets/s5-desk.toml")),
    ("s6-desk", include_str!("../presets/s6-desk.toml")),
];

/// Names of the built-in presets.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// TOML source of a built-in preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let src = preset_source(name)
            .ok_or_else(|| Error::Config(vec![format!("unknown preset {name:?}; known: {}", preset_names().join(", "))]))?;
        Self::from_toml(src)
    }

    /// Reads a config file, or a built-in preset when `path` names one and no such file exists.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            if let Some(name) = path.to_str().filter(|n| preset_source(n).is_some()) {
                return Self::preset(name);
            }
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn scenario(&self) -> Scenario {
        let s = &self.scenario;
        Scenario {
            antennas: s.antennas,
            aps: s.aps,
            antennas_per_ap: s.antennas_per_ap,
            ues: s.ues,
            slots: s.slots,
            tx_power: s.tx_power,
            eta_db: s.eta_db,
            noise_power: channel::noise_power(&self.noise),
            bits_per_symbol: s.bits_per_symbol,
            restarts: s.restarts,
        }
    }

    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&self.name))
    }

    fn solver_config(&self) -> FbsConfig {
        FbsConfig { restarts: self.scenario.restarts, ..self.solver }
    }

    /// Every problem with the config; empty when it can run.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let scenario = self.scenario();
        if let Err(e) = scenario.validate() {
            out.push(e.to_string());
        }
        if let Err(e) = self.bounds.validate_for(scenario.ues, scenario.slots) {
            out.push(e.to_string());
        }
        if self.realizations == 0 {
            out.push("realizations must be at least 1".into());
        }
        if self.trials == 0 {
            out.push("trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            out.push("no methods configured".into());
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.methods {
            if !seen.insert(name) {
                out.push(format!("method {name:?} listed twice"));
            }
            match name.parse::<Method>() {
                Err(e) => out.push(e.to_string()),
                Ok(Method::Proposed(kind)) => match self.alpha.get(kind.name()) {
                    None => out.push(format!("method {name:?} needs alpha.{kind}")),
                    Some(a) if !(*a >= 0.0 && a.is_finite()) => out.push(format!("alpha.{kind} = {a} must be non-negative")),
                    _ => {}
                },
                Ok(Method::Random) => {
                    if let Err(e) = baselines::random_box(scenario.ues, scenario.slots) {
                        out.push(format!("random baseline: {e}"));
                    }
                }
                Ok(Method::Exhaustive(_)) => {
                    if scenario.ues > 64 {
                        out.push(format!("{name}: exhaustive search supports at most 64 UEs"));
                    } else if self.bounds.validate_for(scenario.ues, scenario.slots).is_ok() {
                        match baselines::count_schedules(scenario.ues, scenario.slots, &self.bounds, self.es_cap) {
                            Ok(n) if n > self.es_cap => out.push(format!(
                                "{name}: more than {} feasible schedules (cap {}); use a smaller instance",
                                self.es_cap, self.es_cap
                            )),
                            Err(e) => out.push(format!("{name}: {e}")),
                            _ => {}
                        }
                    }
                }
                Ok(Method::File(sched)) => match &self.schedule_dir {
                    None => out.push(format!("{name} needs schedule_dir")),
                    Some(dir) if !dir.join(&sched).is_dir() => {
                        out.push(format!("{name}: {} is not a directory", dir.join(&sched).display()))
                    }
                    _ => {}
                },
                Ok(Method::Aua) => {}
            }
        }
        for key in self.alpha.keys() {
            if key.parse::<ObjectiveKind>().is_err() {
                out.push(format!("alpha.{key} does not name an objective"));
            }
        }
        if let Err(e) = self.solver_config().validate() {
            out.push(e.to_string());
        }
        if let Some(dir) = &self.channel_dir {
            if !dir.is_dir() {
                out.push(format!("channel_dir {} is not a directory", dir.display()));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(d))
        }
    }
}

/// One CSV row: the metrics of one UE under one method on one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: String,
    pub realization: usize,
    pub ue: usize,
    /// Active slots of the UE, e.g. `"10"` for the first of two.
    pub schedule: String,
    pub ber: Option<f64>,
    pub hmi: Option<f64>,
    pub mse_db: Option<f64>,
    pub rate: Option<f64>,
    pub status: String,
}

/// 90th-percentile summary of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub ber_cdf90: Option<f64>,
    pub hmi_ccdf90: Option<f64>,
    pub mse_db_cdf90: Option<f64>,
    pub rate_ccdf90: Option<f64>,
    /// UE samples that entered the percentiles.
    pub samples: usize,
    /// Realizations on which the method failed.
    pub failures: usize,
}

/// Summary file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub realizations: usize,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<MethodSummary>,
}

/// All rows of an experiment plus their summary.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<MetricRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// Any method failed on any realization.
    pub fn has_failures(&self) -> bool {
        self.summary.methods.iter().any(|m| m.failures > 0)
    }

    /// Per-realization samples of one metric for one method.
    pub fn samples_by_realization(&self, method: &str, metric: fn(&MetricRow) -> Option<f64>) -> Vec<Vec<f64>> {
        let realizations = self.summary.realizations;
        let mut out = vec![Vec::new(); realizations];
        for row in self.rows.iter().filter(|r| r.method == method) {
            if let Some(v) = metric(row) {
                out[row.realization].push(v);
            }
        }
        out
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn summary_table(&self) -> String {
        let fmt = |v: Option<f64>, digits: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} ({} realizations, {} trials, seed {})",
            self.summary.name, self.summary.realizations, self.summary.trials, self.summary.seed
        );
        let _ = writeln!(
            s,
            "{:<16} {:>12} {:>12} {:>14} {:>13} {:>8} {:>8}",
            "method", "BER@90%", "HMI@90%", "MSE dB@90%", "rate@90%", "samples", "failed"
        );
        for m in &self.summary.methods {
            let _ = writeln!(
                s,
                "{:<16} {:>12} {:>12} {:>14} {:>13} {:>8} {:>8}",
                m.method,
                fmt(m.ber_cdf90, 5),
                fmt(m.hmi_ccdf90, 4),
                fmt(m.mse_db_cdf90, 3),
                fmt(m.rate_ccdf90, 4),
                m.samples,
                m.failures
            );
        }
        s
    }

    /// Writes `metrics.csv`, `summary.json` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("metrics.csv"), self.csv_string()?)?;
        std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&self.summary)? + "\n")?;
        std::fs::write(dir.join("summary.txt"), self.summary_table())?;
        Ok(())
    }
}

/// Recomputes the per-method summary from metric rows.
pub fn summarize(rows: &[MetricRow], methods: &[String]) -> Vec<MethodSummary> {
    methods
        .iter()
        .map(|m| {
            let mine: Vec<&MetricRow> = rows.iter().filter(|r| &r.method == m).collect();
            let collect = |f: fn(&MetricRow) -> Option<f64>| mine.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
            let failures: std::collections::BTreeSet<usize> =
                mine.iter().filter(|r| r.status.starts_with("error")).map(|r| r.realization).collect();
            MethodSummary {
                method: m.clone(),
                ber_cdf90: percentile90(&collect(|r| r.ber), Direction::Cdf),
                hmi_ccdf90: percentile90(&collect(|r| r.hmi), Direction::Ccdf),
                mse_db_cdf90: percentile90(&collect(|r| r.mse_db), Direction::Cdf),
                rate_ccdf90: percentile90(&collect(|r| r.rate), Direction::Ccdf),
                samples: mine.iter().filter(|r| r.status == "ok").count(),
                failures: failures.len(),
            }
        })
        .collect()
}

/// Channel realization `r`: imported from `channel_dir` or synthetic.
pub fn realization_channel(cfg: &ExperimentConfig, r: usize) -> Result<ChannelSet> {
    let scenario = cfg.scenario();
    let seed = derive_seed(cfg.seed, Purpose::Channel, &[r as u64]);
    match &cfg.channel_dir {
        Some(dir) => {
            let (header, hbar) = channel::read_channel(&dir.join(format!("{r}.txt")))?;
            if header.aps != scenario.aps || header.antennas_per_ap != scenario.antennas_per_ap {
                return Err(Error::Dimension(format!(
                    "imported channel has L={}, n_A={}; scenario has L={}, n_A={}",
                    header.aps, header.antennas_per_ap, scenario.aps, scenario.antennas_per_ap
                )));
            }
            ChannelSet::from_raw(hbar, &scenario, seed)
        }
        None => ChannelSet::realize(&ChannelModel::for_kind(cfg.channel_model), &scenario, seed),
    }
}

/// Schedule produced by `method` on realization `r`.
pub fn schedule_for(cfg: &ExperimentConfig, method: &Method, channel: &ChannelSet, r: usize) -> Result<SchedulingMatrix> {
    let scenario = cfg.scenario();
    let (ues, slots) = (scenario.ues, scenario.slots);
    let solver_seed = derive_seed(cfg.seed, Purpose::Solver, &[r as u64]);
    let c = match method {
        Method::Proposed(kind) => {
            let alpha = *cfg.alpha.get(kind.name()).ok_or_else(|| Error::Config(vec![format!("missing alpha.{kind}")]))?;
            let objective = ObjectiveSpec::new(*kind, alpha, NORMALIZED_NOISE)?;
            schedule(&objective, channel, &cfg.bounds, slots, &cfg.solver_config(), solver_seed)?.binary
        }
        Method::Exhaustive(kind) => {
            let objective = ObjectiveSpec::new(*kind, 0.0, NORMALIZED_NOISE)?;
            baselines::exhaustive_search(&objective, channel, &cfg.bounds, slots, cfg.es_cap)?.binary
        }
        Method::Random => baselines::random_schedule(ues, slots, derive_seed(cfg.seed, Purpose::RandomBaseline, &[r as u64]))?,
        Method::Aua => baselines::aua_schedule(ues, slots),
        Method::File(name) => {
            let dir = cfg.schedule_dir.as_ref().ok_or_else(|| Error::Config(vec![format!("{method} needs schedule_dir")]))?;
            let c = baselines::read_schedule(&dir.join(name).join(format!("{r}.txt")))?;
            if c.ues() != ues || c.slots() != slots {
                return Err(Error::Dimension(format!("imported schedule is {}x{}, expected {ues}x{slots}", c.ues(), c.slots())));
            }
            c
        }
    };
    if let Some(b) = method.constraint_box(&scenario, &cfg.bounds)? {
        if !is_feasible(&c, &b) {
            return Err(Error::InvalidMatrix(format!("{method} produced a schedule outside {b}")));
        }
    }
    Ok(c)
}

fn run_realization(cfg: &ExperimentConfig, methods: &[Method], modulation: &Modulation, r: usize) -> Vec<MetricRow> {
    let ues = cfg.scenario.ues;
    let payload_seed = derive_seed(cfg.seed, Purpose::Payload, &[r as u64]);
    let channel = realization_channel(cfg, r);
    let mut rows = Vec::with_capacity(methods.len() * ues);
    for method in methods {
        let outcome = channel.as_ref().map_err(|e| e.to_string()).and_then(|ch| {
            let c = schedule_for(cfg, method, ch, r).map_err(|e| e.to_string())?;
            let metrics = evaluate(ch, &c, modulation, cfg.trials, payload_seed).map_err(|e| e.to_string())?;
            Ok((c, metrics))
        });
        match outcome {
            Ok((c, metrics)) => {
                for (u, m) in metrics.iter().enumerate() {
                    let active = m.ber.is_some();
                    rows.push(MetricRow {
                        method: method.to_string(),
                        realization: r,
                        ue: u,
                        schedule: c.row_pattern(u),
                        ber: m.ber,
                        hmi: m.hmi,
                        mse_db: m.mse_db(),
                        rate: active.then_some(m.rate),
                        status: if active { "ok" } else { "inactive" }.to_string(),
                    });
                }
            }
            Err(msg) => {
                log::warn!("{method} failed on realization {r}: {msg}");
                for u in 0..ues {
                    rows.push(MetricRow {
                        method: method.to_string(),
                        realization: r,
                        ue: u,
                        schedule: String::new(),
                        ber: None,
                        hmi: None,
                        mse_db: None,
                        rate: None,
                        status: format!("error: {msg}"),
                    });
                }
            }
        }
    }
    rows
}

/// Runs every method on every realization. Failures of individual methods
/// are recorded in the rows and the run continues.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let methods = cfg.parsed_methods()?;
    let modulation = Modulation::new(ModulationKind::from_bits(cfg.scenario.bits_per_symbol as usize)?);
    let per_realization: Vec<Vec<MetricRow>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| run_realization(cfg, &methods, &modulation, r))
        .collect();
    let rows: Vec<MetricRow> = per_realization.into_iter().flatten().collect();
    let names: Vec<String> = methods.iter().map(|m| m.to_string()).collect();
    let summary = Summary {
        name: cfg.name.clone(),
        realizations: cfg.realizations,
        trials: cfg.trials,
        seed: cfg.seed,
        methods: summarize(&rows, &names),
    };
    Ok(ExperimentReport { rows, summary })
}

/// Parses a `metrics.csv` back into rows.
pub fn read_metrics(path: &Path) -> Result<Vec<MetricRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}
