//! Experiment reporting: per-trial records, quantile summaries, and JSON or
//! CSV rendering with a stable field layout so runs can be diffed byte for
//! byte.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// Median and decile spread of a batch of trial values.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

/// Nearest-rank quantiles: `q(p)` is the `ceil(p n)`-th smallest value. The
/// median averages the two middle values when the count is even.
pub fn summarize(values: &[f64]) -> Summary {
    assert!(!values.is_empty(), "cannot summarize zero trials");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("trial values are finite"));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let rank = |p: f64| -> f64 {
        let idx = (p * n as f64).ceil() as usize;
        sorted[idx.clamp(1, n) - 1]
    };
    Summary { median, q10: rank(0.1), q90: rank(0.9) }
}

/// One trial of an experiment, keyed by its substream for replay.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub stream: u64,
    pub value: f64,
    pub pass: bool,
    /// Command-specific extras, e.g. worst defect words or block norms,
    /// inlined next to the fixed columns. Keys must avoid the fixed names.
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

/// What the trial values are measured against. The provenance string says
/// where the target number came from: "exact", "float", or
/// "sampled(seed=..)".
#[derive(Debug, Clone, Serialize)]
pub struct Targets {
    pub target_value: f64,
    pub tolerance: f64,
    pub provenance: String,
}

/// A full experiment run. Field order is the serialization order; the
/// timestamp is optional so reruns can be compared exactly.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// Provenance of the trial values; individual streams are per trial.
    pub provenance: String,
    pub params: Value,
    pub trials: u32,
    pub per_trial: Vec<TrialRecord>,
    pub summary: Summary,
    pub targets: Targets,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("report serializes");
        body.push('\n');
        body
    }

    /// Flat per-trial projection: one row per trial plus the shared seed and
    /// targets, for spreadsheet use.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,stream,value,target,tolerance,pass\n");
        for record in &self.per_trial {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                record.trial,
                self.seed,
                record.stream,
                record.value,
                self.targets.target_value,
                self.targets.tolerance,
                record.pass
            ));
        }
        out
    }
}

/// Fraction of trials that passed.
pub fn pass_fraction(records: &[TrialRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.pass).count() as f64 / records.len() as f64
}

/// Runs `f(0..trials)` across the rayon pool, returning results in trial
/// order. Each trial must derive its randomness from its own index, so the
/// output is independent of thread count and scheduling.
pub fn run_trials<T, F>(trials: u32, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u32) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

/// Seconds since the Unix epoch, labeled to make the convention explicit.
pub fn unix_timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .expect("clock after 1970")
        .as_secs();
    format!("unix:{secs}")
}
