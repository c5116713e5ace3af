use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{sample_instance, SimDefaults};
use crate::baselines::{equal_share_result, run, Scheme, SchemeKind};
use crate::cost::{expected_user_breakdown, rate_for_share};
use crate::error::{Error, Result};
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Edge server speed, cycles/s.
    EdgeCompute,
    /// Cache slots per device.
    CacheCapacity,
    UserCount,
    /// Total bandwidth, Hz.
    TotalBandwidth,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::EdgeCompute => "edge_compute",
            SweepParam::CacheCapacity => "cache_capacity",
            SweepParam::UserCount => "user_count",
            SweepParam::TotalBandwidth => "total_bandwidth",
        }
    }

    /// Axis used when a sweep lists no values.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParam::EdgeCompute => (1..=8).map(|g| g as f64 * 1e9).collect(),
            SweepParam::CacheCapacity => (0..=10).map(f64::from).collect(),
            SweepParam::UserCount => (1..=10).map(|k| 5.0 * k as f64).collect(),
            SweepParam::TotalBandwidth => (1..=6).map(|k| 10e6 * k as f64).collect(),
        }
    }

    fn apply(self, defaults: &SimDefaults, value: f64) -> SimDefaults {
        let mut d = defaults.clone();
        match self {
            SweepParam::EdgeCompute => d.edge_compute = value,
            SweepParam::CacheCapacity => d.cache_capacity = value as usize,
            SweepParam::UserCount => d.users = value as usize,
            SweepParam::TotalBandwidth => d.total_bandwidth = value,
        }
        d
    }
}

/// Output columns a sweep can record besides the cell key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MaxCost,
    MinCost,
    FairCost,
    MeanDelayS,
    MeanEnergyJ,
    Iterations,
    Converged,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::MaxCost,
        Metric::MinCost,
        Metric::FairCost,
        Metric::MeanDelayS,
        Metric::MeanEnergyJ,
        Metric::Iterations,
        Metric::Converged,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Metric::MaxCost => "max_cost",
            Metric::MinCost => "min_cost",
            Metric::FairCost => "fair_cost",
            Metric::MeanDelayS => "mean_delay_s",
            Metric::MeanEnergyJ => "mean_energy_j",
            Metric::Iterations => "iterations",
            Metric::Converged => "converged",
        }
    }
}

fn default_schemes() -> Vec<Scheme> {
    SchemeKind::ALL.iter().map(|&k| k.into()).collect()
}

fn scheme_names<S: serde::Serializer>(schemes: &[Scheme], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(schemes.iter().map(ToString::to_string))
}

fn parse_schemes<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Scheme>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    /// Parameter values in SI units. Omitted means the parameter's default
    /// axis; an explicit empty list is an error.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
    #[serde(
        default = "default_schemes",
        serialize_with = "scheme_names",
        deserialize_with = "parse_schemes"
    )]
    pub schemes: Vec<Scheme>,
    /// Metric columns to write; all when omitted.
    #[serde(default)]
    pub record: Option<Vec<Metric>>,
    #[serde(default)]
    pub defaults: SimDefaults,
}

impl SweepSpec {
    pub fn new(parameter: SweepParam, values: Vec<f64>, seeds: Vec<u64>) -> Self {
        SweepSpec {
            parameter,
            values: Some(values),
            seeds,
            schemes: default_schemes(),
            record: None,
            defaults: SimDefaults::default(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.check()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn values(&self) -> Vec<f64> {
        self.values
            .clone()
            .unwrap_or_else(|| self.parameter.default_values())
    }

    pub fn metrics(&self) -> Vec<Metric> {
        self.record.clone().unwrap_or_else(|| Metric::ALL.to_vec())
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        let values = self.values();
        if values.is_empty() {
            return bad("values must not be empty".into());
        }
        let rising = values.windows(2).all(|w| w[0] < w[1]);
        let falling = values.windows(2).all(|w| w[0] > w[1]);
        if !(rising || falling) {
            return bad("values must be strictly monotone".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if self.schemes.is_empty() {
            return bad("schemes must not be empty".into());
        }
        if matches!(&self.record, Some(r) if r.is_empty()) {
            return bad("record must name at least one metric".into());
        }
        for &v in &values {
            let ok = match self.parameter {
                SweepParam::EdgeCompute | SweepParam::TotalBandwidth => v > 0.0 && v.is_finite(),
                SweepParam::CacheCapacity => {
                    v.fract() == 0.0 && v >= 0.0 && v <= self.defaults.contents as f64
                }
                SweepParam::UserCount => v.fract() == 0.0 && (1.0..=1e6).contains(&v),
            };
            if !ok {
                return bad(format!("{} cannot take value {v}", self.parameter.name()));
            }
        }
        Ok(())
    }
}

/// Outcome of one `(value, seed, scheme)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    /// Max and min per-user cost with even bandwidth shares.
    pub max_cost: f64,
    pub min_cost: f64,
    /// Max per-user cost with fair bandwidth allocation.
    pub fair_cost: f64,
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CellResult {
    fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::MaxCost => self.max_cost,
            Metric::MinCost => self.min_cost,
            Metric::FairCost => self.fair_cost,
            Metric::MeanDelayS => self.mean_delay_s,
            Metric::MeanEnergyJ => self.mean_energy_j,
            Metric::Iterations => self.iterations as f64,
            Metric::Converged => f64::from(u8::from(self.converged)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub value: f64,
    pub seed: u64,
    pub scheme: String,
    /// The error message when the cell failed.
    pub outcome: std::result::Result<CellResult, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub parameter: SweepParam,
    pub metrics: Vec<Metric>,
    /// Ordered by value, then seed, then scheme, as listed in the spec.
    pub records: Vec<SweepRecord>,
}

/// Solves `scheme` on `instance` and measures every metric.
pub fn evaluate_cell(scheme: Scheme, instance: &Instance) -> Result<CellResult> {
    instance.ensure_valid()?;
    let solved = run(scheme, instance)?;
    let even = equal_share_result(scheme, instance)?;
    let m = instance.users();
    let (mut delay, mut energy) = (0.0, 0.0);
    for u in 0..m {
        let rate = rate_for_share(instance, u, solved.policy.bandwidth[u]);
        let b = expected_user_breakdown(
            instance,
            u,
            &solved.policy.cache[u],
            &solved.policy.compute[u],
            rate,
        )?;
        delay += b.delay;
        energy += b.energy;
    }
    Ok(CellResult {
        max_cost: even.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_cost: even.iter().copied().fold(f64::INFINITY, f64::min),
        fair_cost: solved.max_cost,
        mean_delay_s: delay / m as f64,
        mean_energy_j: energy / m as f64,
        iterations: solved.iterations,
        converged: solved.converged,
    })
}

/// Runs every cell of the sweep on the current rayon pool. Failed cells are
/// kept with their error; the output order does not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.check()?;
    let values = spec.values();
    let cells: Vec<(f64, u64, Scheme)> = values
        .iter()
        .flat_map(|&v| {
            spec.seeds
                .iter()
                .flat_map(move |&s| spec.schemes.iter().map(move |&k| (v, s, k)))
        })
        .collect();
    let records = cells
        .into_par_iter()
        .map(|(value, seed, scheme)| {
            let instance = sample_instance(&spec.parameter.apply(&spec.defaults, value), seed);
            SweepRecord {
                value,
                seed,
                scheme: scheme.to_string(),
                outcome: evaluate_cell(scheme, &instance).map_err(|e| e.to_string()),
            }
        })
        .collect();
    Ok(SweepTable {
        parameter: spec.parameter,
        metrics: spec.metrics(),
        records,
    })
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn format_metric(m: Metric, cell: &CellResult) -> String {
    match m {
        Metric::Iterations => cell.iterations.to_string(),
        Metric::Converged => cell.converged.to_string(),
        _ => cell.metric(m).to_string(),
    }
}

fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

impl SweepTable {
    /// One row per cell. Failed cells leave the metric columns empty and
    /// carry the message in the trailing `error` column.
    pub fn results_csv(&self) -> String {
        let mut out = String::from("sweep_param,value,seed,scheme");
        for m in &self.metrics {
            out.push(',');
            out.push_str(m.column());
        }
        out.push_str(",error\n");
        for r in &self.records {
            write!(out, "{},{},{},{}", self.parameter.name(), r.value, r.seed, r.scheme).unwrap();
            match &r.outcome {
                Ok(cell) => {
                    for &m in &self.metrics {
                        write!(out, ",{}", format_metric(m, cell)).unwrap();
                    }
                    out.push_str(",\n");
                }
                Err(e) => {
                    out.push_str(&",".repeat(self.metrics.len()));
                    writeln!(out, ",{}", csv_field(e)).unwrap();
                }
            }
        }
        out
    }

    /// Mean and sample standard deviation over seeds for every
    /// `(value, scheme)` pair, skipping failed cells.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("sweep_param,value,scheme,cells,failed");
        for m in &self.metrics {
            write!(out, ",{0}_mean,{0}_std", m.column()).unwrap();
        }
        out.push('\n');
        let mut keys: Vec<(f64, &str)> = Vec::new();
        for r in &self.records {
            if !keys.iter().any(|&(v, s)| v == r.value && s == r.scheme) {
                keys.push((r.value, &r.scheme));
            }
        }
        for (value, scheme) in keys {
            let group: Vec<&SweepRecord> = self
                .records
                .iter()
                .filter(|r| r.value == value && r.scheme == scheme)
                .collect();
            let ok: Vec<&CellResult> = group.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            write!(
                out,
                "{},{},{},{},{}",
                self.parameter.name(),
                value,
                scheme,
                group.len(),
                group.len() - ok.len()
            )
            .unwrap();
            for &m in &self.metrics {
                if ok.is_empty() {
                    out.push_str(",,");
                    continue;
                }
                let xs: Vec<f64> = ok.iter().map(|c| c.metric(m)).collect();
                let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                write!(out, ",{},{}", mean, sample_std(&xs, mean)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Writes `results.csv` and `summary.csv` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in [
            ("results.csv", self.results_csv()),
            ("summary.csv", self.summary_csv()),
        ] {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| r.outcome.is_err()).count()
    }
}
