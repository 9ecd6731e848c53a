//! Seeded Monte-Carlo experiments.
//!
//! Every trial draws from its own substream `(seed, experiment name, trial)`,
//! so adding trials leaves earlier ones untouched, and trials run in
//! parallel on the ambient rayon pool. Results are collected in trial
//! order, which makes reports byte-identical for any thread count.

mod fact;
mod figures;
mod scans;
mod tails;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::format_sig;
use crate::graph::{sample_gnp, sample_regular, Graph};
use crate::matrix::adjacency_matrix;
use crate::nodal::{SignedFunction, DEFAULT_RELATIVE_TAU};
use crate::rng::RngStream;
use crate::spectral::{eigendecompose, SortOrder, Spectrum};

pub use fact::run_neighborhood_fact;
pub use figures::{run_fig1, run_fig2};
pub use scans::{run_courant_report, run_gnp_scan, run_inner_product_check, run_linf_scan};
pub use tails::run_tail_mc;

/// Significant digits of every float in a report.
pub const REPORT_DIGITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig1,
    Fig2,
    GnpScan,
    Tails,
    Inner,
    Linf,
    Fact,
    Courant,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Fig1,
        Experiment::Fig2,
        Experiment::GnpScan,
        Experiment::Tails,
        Experiment::Inner,
        Experiment::Linf,
        Experiment::Fact,
        Experiment::Courant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::GnpScan => "gnp_scan",
            Experiment::Tails => "tails",
            Experiment::Inner => "inner",
            Experiment::Linf => "linf",
            Experiment::Fact => "fact",
            Experiment::Courant => "courant",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Random graph source for experiments that accept either model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    Gnp,
    Regular,
}

/// Zero threshold applied to each eigenvector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// `tau = rel * ||f||_inf`.
    Relative(f64),
    Absolute(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Relative(DEFAULT_RELATIVE_TAU)
    }
}

impl Tolerance {
    pub fn signed(&self, values: Vec<f64>) -> Result<SignedFunction> {
        match *self {
            Tolerance::Relative(rel) => SignedFunction::with_relative_tolerance(values, rel),
            Tolerance::Absolute(tau) => SignedFunction::new(values, tau),
        }
    }

    fn validate(&self) -> Result<()> {
        let (Tolerance::Relative(x) | Tolerance::Absolute(x)) = *self;
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "tolerance {x} must be finite and >= 0"
            )))
        }
    }
}

/// Inputs of one experiment run. Fields an experiment does not use are
/// ignored but still echoed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Graph order, or the list of orders/sizes for scanning experiments.
    pub n: Vec<usize>,
    pub p: f64,
    /// Degrees for regular graphs.
    pub d: Vec<usize>,
    /// Tuple sizes for the neighbourhood experiment.
    pub k: Vec<usize>,
    /// Deviations for the tail experiment.
    pub xi: Vec<f64>,
    /// Aspect slack `m = (1 + delta) k` for rectangular matrices.
    pub delta: f64,
    pub model: GraphModel,
    pub trials: usize,
    pub seed: u64,
    pub tau: Tolerance,
    /// Keep per-trial raw records in the report.
    pub keep_records: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults.
    pub fn new(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            n: vec![100],
            p: 0.5,
            d: vec![3],
            k: vec![1, 2, 3, 4],
            xi: vec![0.25, 0.5, 1.0],
            delta: 1.0,
            model: GraphModel::Gnp,
            trials: 20,
            seed: 1,
            tau: Tolerance::default(),
            keep_records: false,
        };
        match experiment {
            Experiment::Fig1 => {
                cfg.n = vec![300];
                cfg.d = vec![3, 4, 5];
            }
            Experiment::Fig2 => {
                cfg.n = vec![20, 40, 60, 80, 100];
                cfg.trials = 500;
            }
            Experiment::Tails => {
                cfg.n = vec![200];
                cfg.trials = 200;
            }
            Experiment::Inner => {
                cfg.n = vec![200];
                cfg.trials = 50;
            }
            Experiment::Linf => cfg.n = vec![50, 100, 200, 400],
            Experiment::Fact => {
                cfg.n = vec![500];
                cfg.trials = 100;
            }
            Experiment::GnpScan | Experiment::Courant => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.n.is_empty() {
            return Err(Error::invalid("at least one n is required"));
        }
        self.tau.validate()?;
        let single_n = || {
            if self.n.len() == 1 {
                Ok(self.n[0])
            } else {
                Err(Error::invalid(format!(
                    "{} takes a single n",
                    self.experiment
                )))
            }
        };
        let open_p = || {
            if self.p > 0.0 && self.p < 1.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("p = {} must lie in (0, 1)", self.p)))
            }
        };
        match self.experiment {
            Experiment::Fig1 => {
                let n = single_n()?;
                if self.d.is_empty() {
                    return Err(Error::invalid("at least one d is required"));
                }
                for &d in &self.d {
                    if d < 3 {
                        return Err(Error::invalid(format!("d = {d} must be at least 3")));
                    }
                    check_regular(n, d)?;
                }
            }
            Experiment::Fig2 => {
                open_p()?;
                if let Some(n) = self.n.iter().find(|&&n| n < 4) {
                    return Err(Error::invalid(format!("n = {n} must be at least 4")));
                }
            }
            Experiment::GnpScan => {
                open_p()?;
                if single_n()? < 4 {
                    return Err(Error::invalid("n must be at least 4"));
                }
            }
            Experiment::Tails => {
                open_p()?;
                if let Some(n) = self.n.iter().find(|&&n| n < 2) {
                    return Err(Error::invalid(format!("size {n} must be at least 2")));
                }
                if self.xi.is_empty() || self.xi.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(Error::invalid("xi values must be positive"));
                }
                if !(self.delta >= 0.0 && self.delta.is_finite()) {
                    return Err(Error::invalid("delta must be finite and >= 0"));
                }
            }
            Experiment::Linf => {
                open_p()?;
                if let Some(n) = self.n.iter().find(|&&n| n < 2) {
                    return Err(Error::invalid(format!("n = {n} must be at least 2")));
                }
            }
            Experiment::Fact => {
                open_p()?;
                let n = single_n()?;
                if self.k.is_empty() {
                    return Err(Error::invalid("at least one k is required"));
                }
                if let Some(k) = self.k.iter().find(|&&k| k == 0 || k >= n) {
                    return Err(Error::invalid(format!(
                        "k = {k} must satisfy 1 <= k < n = {n}"
                    )));
                }
            }
            Experiment::Inner | Experiment::Courant => {
                let n = single_n()?;
                if n < 2 {
                    return Err(Error::invalid("n must be at least 2"));
                }
                match self.model {
                    GraphModel::Gnp => open_p()?,
                    GraphModel::Regular => {
                        let [d] = self.d[..] else {
                            return Err(Error::invalid("the regular model takes a single d"));
                        };
                        check_regular(n, d)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn trial_stream(&self, trial: u64) -> RngStream {
        RngStream::new(self.seed, self.experiment.name(), trial)
    }

    fn expect(&self, experiment: Experiment) -> Result<()> {
        if self.experiment == experiment {
            self.validate()
        } else {
            Err(Error::invalid(format!(
                "config is for {}, not {experiment}",
                self.experiment
            )))
        }
    }

    /// One graph per trial from the configured model.
    fn sample_graph(&self, n: usize, stream: &RngStream) -> Result<Graph> {
        match self.model {
            GraphModel::Gnp => sample_gnp(n, self.p, stream),
            GraphModel::Regular => sample_regular(n, self.d[0], stream),
        }
    }
}

fn check_regular(n: usize, d: usize) -> Result<()> {
    if d >= n || (n * d) % 2 == 1 {
        Err(Error::invalid(format!(
            "no {d}-regular graph on {n} vertices (need d < n, n*d even)"
        )))
    } else {
        Ok(())
    }
}

/// A report value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(x) => write!(f, "{x}"),
            Cell::Float(x) => f.write_str(&format_sig(*x, REPORT_DIGITS)),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(x) => s.serialize_i64(*x),
            // Same rounding as the CSV form.
            Cell::Float(x) if x.is_finite() => {
                s.serialize_f64(format_sig(*x, REPORT_DIGITS).parse().unwrap_or(*x))
            }
            Cell::Float(_) | Cell::Empty => s.serialize_none(),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(x) => Some(x as f64),
            Cell::Float(x) => Some(x),
            _ => None,
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self {
            columns: header.split(',').map(str::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column.
    pub fn values(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(i) => self.rows.iter().filter_map(|r| r[i].as_f64()).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub table: Table,
    /// Per-trial raw values, when requested.
    pub records: Option<Table>,
    pub summary: BTreeMap<String, Cell>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, table: Table) -> Self {
        Self {
            config: config.clone(),
            table,
            records: None,
            summary: BTreeMap::new(),
            wall_clock: Duration::ZERO,
        }
    }

    fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.insert(key.into(), value.into());
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Cell::as_f64)
    }

    /// Summary as `# key = value` comment lines, then the table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.table.to_csv());
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Runs the experiment named in `config`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let mut report = match config.experiment {
        Experiment::Fig1 => run_fig1(config),
        Experiment::Fig2 => run_fig2(config),
        Experiment::GnpScan => run_gnp_scan(config),
        Experiment::Tails => run_tail_mc(config),
        Experiment::Inner => run_inner_product_check(config),
        Experiment::Linf => run_linf_scan(config),
        Experiment::Fact => run_neighborhood_fact(config),
        Experiment::Courant => run_courant_report(config),
    }?;
    report.wall_clock = start.elapsed();
    Ok(report)
}

/// Maps `f` over `items` in parallel, keeping input order.
fn par_map<I, T, F>(items: Vec<I>, f: F) -> Result<Vec<T>>
where
    I: Send,
    T: Send,
    F: Fn(I) -> Result<T> + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

fn adjacency_spectrum(g: &Graph) -> Result<Spectrum> {
    eigendecompose(&adjacency_matrix(g), SortOrder::Descending)
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); 0 for a single value.
pub(crate) fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return if xs.is_empty() { f64::NAN } else { 0.0 };
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        (v[h - 1] + v[h]) / 2.0
    }
}

pub(crate) fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
