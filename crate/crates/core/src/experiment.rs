//! Seeded learning experiments: metrics, the (n, seed) work pool and report
//! output.
//!
//! Cell `(n, seed)` learns from `draw_sample(target, n, seed)`. Samples for
//! one seed are nested prefixes of each other, so a seed traces a single
//! learning trajectory as `n` grows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automaton::{AnyAutomaton, MultiplicityAutomaton};
use crate::dees::{dees, DeesConfig};
use crate::error::{Error, Result};
use crate::exact::exactify_ma;
use crate::fixtures;
use crate::io;
use crate::normalize::NormalizedSeries;
use crate::reduced::prefixial_reduced_representation;
use crate::sampling::draw_sample;
use crate::weight::{Rational, Weight};

/// Enumeration limits for [`l1_on_ball`].
pub const MAX_BALL_DEPTH: usize = 10;
pub const MAX_BALL_ALPHABET: usize = 3;

/// Depth of the truncated `r(N)` reported by the `neg_mass` metric.
pub const NEG_MASS_DEPTH: usize = 8;

/// `Σ_{|w| <= k} |r_A(w) − r_B(w)|`.
pub fn l1_on_ball<W: Weight, V: Weight>(a: &MultiplicityAutomaton<W>, b: &MultiplicityAutomaton<V>, k: usize) -> Result<f64> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::InvalidArgument("automata have different alphabets".into()));
    }
    if k > MAX_BALL_DEPTH || a.alphabet().len() > MAX_BALL_ALPHABET {
        return Err(Error::InvalidArgument(format!(
            "ball of depth {k} over {} symbols is too large (limits: depth {MAX_BALL_DEPTH}, {MAX_BALL_ALPHABET} symbols)",
            a.alphabet().len()
        )));
    }
    let mut sum = 0.0;
    for w in a.alphabet().ball(k) {
        sum += (a.word_weight(&w)?.to_f64() - b.word_weight(&w)?.to_f64()).abs();
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `l1_on_ball(learned, target, l1_depth)`.
    L1Ball,
    StateCount,
    /// Largest parameter deviation from the target's reduced representation
    /// when the learned states carry the same labels; `inf` otherwise.
    ParamError,
    /// `|r(N)|` truncated at depth [`NEG_MASS_DEPTH`]; `inf` if the
    /// hypothesis cannot be certified.
    NegMass,
    /// 1 if exactification reproduces the reduced representation, else 0.
    ExactRecovery,
}

impl Metric {
    pub const ALL: [Metric; 5] =
        [Metric::L1Ball, Metric::StateCount, Metric::ParamError, Metric::NegMass, Metric::ExactRecovery];

    pub fn name(self) -> &'static str {
        match self {
            Metric::L1Ball => "l1_ball",
            Metric::StateCount => "state_count",
            Metric::ParamError => "param_error",
            Metric::NegMass => "neg_mass",
            Metric::ExactRecovery => "exact_recovery",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Fixture(String),
    File(PathBuf),
}

impl Target {
    pub fn load(&self) -> Result<AnyAutomaton> {
        match self {
            Target::Fixture(name) => fixtures::fixture(name),
            Target::File(path) => io::read_automaton(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub target: Target,
    pub sample_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub metrics: Vec<Metric>,
    /// Directory receiving `rows.jsonl` and `aggregate.csv`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub dees: DeesConfig,
    #[serde(default = "default_l1_depth")]
    pub l1_depth: usize,
}

fn default_l1_depth() -> usize {
    6
}

impl ExperimentConfig {
    pub fn new(target: Target, sample_sizes: Vec<usize>, seeds: Vec<u64>, metrics: Vec<Metric>) -> Self {
        ExperimentConfig { target, sample_sizes, seeds, metrics, output: None, dees: DeesConfig::default(), l1_depth: default_l1_depth() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("sample sizes must be strictly increasing".into()));
        }
        if self.sample_sizes.first() == Some(&0) {
            return Err(Error::InvalidArgument("sample sizes must be positive".into()));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(Error::InvalidArgument("seeds must be distinct".into()));
        }
        if self.metrics.iter().collect::<BTreeSet<_>>().len() != self.metrics.len() {
            return Err(Error::InvalidArgument("metrics must be distinct".into()));
        }
        if self.l1_depth > MAX_BALL_DEPTH {
            return Err(Error::InvalidArgument(format!("l1 depth must be at most {MAX_BALL_DEPTH}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub n: usize,
    pub seed: u64,
    pub values: BTreeMap<Metric, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub metric: Metric,
    pub count: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// Sorted by `(n, seed)`.
    pub rows: Vec<MetricRow>,
    /// Sorted by `(n, metric)`.
    pub aggregates: Vec<Aggregate>,
}

/// Linear-interpolation quantile of sorted data (`q ∈ [0, 1]`).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    if lo == hi {
        return sorted[lo];
    }
    let t = pos - lo as f64;
    if sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + t * (sorted[hi] - sorted[lo])
    }
}

/// Per-(n, metric) summaries; NaN values sort last.
pub fn aggregate(rows: &[MetricRow]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(usize, Metric), Vec<f64>> = BTreeMap::new();
    for r in rows {
        for (&m, &v) in &r.values {
            groups.entry((r.n, m)).or_default().push(v);
        }
    }
    groups
        .into_iter()
        .map(|((n, metric), mut vs)| {
            vs.sort_by(f64::total_cmp);
            Aggregate {
                n,
                metric,
                count: vs.len(),
                median: quantile(&vs, 0.5),
                q25: quantile(&vs, 0.25),
                q75: quantile(&vs, 0.75),
                min: vs[0],
                max: vs[vs.len() - 1],
            }
        })
        .collect()
}

/// Target-derived data shared by every cell.
struct Reference {
    target: AnyAutomaton,
    reduced_float: Option<MultiplicityAutomaton<f64>>,
    reduced_exact: Option<MultiplicityAutomaton<Rational>>,
}

impl Reference {
    fn new(target: AnyAutomaton, metrics: &[Metric]) -> Result<Self> {
        let needs_reduced = metrics.contains(&Metric::ParamError) || metrics.contains(&Metric::ExactRecovery);
        let (mut reduced_float, mut reduced_exact) = (None, None);
        if needs_reduced {
            match &target {
                AnyAutomaton::Rational(a) => {
                    let r = prefixial_reduced_representation(a)?.automaton;
                    reduced_float = Some(r.to_float());
                    reduced_exact = Some(r);
                }
                AnyAutomaton::Float(a) => reduced_float = Some(prefixial_reduced_representation(a)?.automaton),
            }
        }
        if metrics.contains(&Metric::ExactRecovery) && reduced_exact.is_none() {
            return Err(Error::InvalidArgument("exact_recovery needs a rational target".into()));
        }
        Ok(Reference { target, reduced_float, reduced_exact })
    }
}

/// Largest absolute difference over `ι`, `τ` and `φ` between automata with
/// the same state labels; `inf` if the labels differ.
pub fn parameter_error(learned: &MultiplicityAutomaton<f64>, reference: &MultiplicityAutomaton<f64>) -> f64 {
    if learned.labels().is_none() || learned.labels() != reference.labels() || learned.alphabet() != reference.alphabet() {
        return f64::INFINITY;
    }
    let pairs = learned
        .iota()
        .iter()
        .zip(reference.iota())
        .chain(learned.tau().iter().zip(reference.tau()))
        .chain(learned.letters().iter().zip(reference.letters()).flat_map(|(a, b)| a.entries().zip(b.entries())));
    pairs.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_cell(reference: &Reference, cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<MetricRow> {
    let sample = match &reference.target {
        AnyAutomaton::Rational(a) => draw_sample(a, n, seed)?,
        AnyAutomaton::Float(a) => draw_sample(a, n, seed)?,
    };
    let (learned, _) = dees(&sample, &cfg.dees)?;
    let mut values = BTreeMap::new();
    for &m in &cfg.metrics {
        let v = match m {
            Metric::L1Ball => match &reference.target {
                AnyAutomaton::Rational(a) => l1_on_ball(&learned, a, cfg.l1_depth)?,
                AnyAutomaton::Float(a) => l1_on_ball(&learned, a, cfg.l1_depth)?,
            },
            Metric::StateCount => learned.n() as f64,
            Metric::ParamError => parameter_error(&learned, reference.reduced_float.as_ref().expect("computed for param_error")),
            Metric::NegMass => match NormalizedSeries::new(learned.clone()) {
                Ok(ns) => ns.neg_total_and_abs_mass(NEG_MASS_DEPTH)?.neg_total.abs(),
                Err(Error::Uncertified(_)) => f64::INFINITY,
                Err(e) => return Err(e),
            },
            Metric::ExactRecovery => {
                let e = exactify_ma(&learned, n)?;
                let want = reference.reduced_exact.as_ref().expect("checked in Reference::new");
                f64::from(u8::from(matches!(&e.automaton, AnyAutomaton::Rational(r) if r == want)))
            }
        };
        values.insert(m, v);
    }
    Ok(MetricRow { n, seed, values })
}

/// Runs every `(n, seed)` cell in parallel and, if `cfg.output` is set,
/// writes the report there. Deterministic given `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricReport> {
    cfg.validate()?;
    if let Some(dir) = &cfg.output {
        std::fs::create_dir_all(dir)?;
    }
    let reference = Reference::new(cfg.target.load()?, &cfg.metrics)?;
    let cells: Vec<(usize, u64)> = cfg.sample_sizes.iter().flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s))).collect();
    let mut rows = cells
        .par_iter()
        .map(|&(n, seed)| run_cell(&reference, cfg, n, seed))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    let report = MetricReport { aggregates: aggregate(&rows), rows };
    if let Some(dir) = &cfg.output {
        write_report(&report, dir)?;
    }
    Ok(report)
}

/// JSON has no infinities; non-finite values are written as strings.
fn json_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(format_value(x)), Value::Number)
}

fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn rows_to_jsonl(rows: &[MetricRow]) -> Result<String> {
    let mut out = String::new();
    for r in rows {
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), Value::from(r.n));
        obj.insert("seed".into(), Value::from(r.seed));
        for (m, &v) in &r.values {
            obj.insert(m.name().into(), json_value(v));
        }
        out.push_str(&serde_json::to_string(&Value::Object(obj))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn aggregates_to_csv(aggs: &[Aggregate]) -> String {
    let mut out = String::from("n,metric,count,median,q25,q75,min,max\n");
    for a in aggs {
        let vals = [a.median, a.q25, a.q75, a.min, a.max].map(format_value).join(",");
        out.push_str(&format!("{},{},{},{}\n", a.n, a.metric, a.count, vals));
    }
    out
}

pub fn write_report(report: &MetricReport, dir: &Path) -> Result<()> {
    std::fs::write(dir.join("rows.jsonl"), rows_to_jsonl(&report.rows)?)?;
    std::fs::write(dir.join("aggregate.csv"), aggregates_to_csv(&report.aggregates))?;
    Ok(())
}

/// One line per aggregate, for terminals.
pub fn summary(report: &MetricReport) -> String {
    let mut out = String::new();
    for a in &report.aggregates {
        out.push_str(&format!(
            "n={:<8} {:<15} median={:<12} [q25={}, q75={}] over {} runs\n",
            a.n,
            a.metric.name(),
            format_value(a.median),
            format_value(a.q25),
            format_value(a.q75),
            a.count
        ));
    }
    out
}
