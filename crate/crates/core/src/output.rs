//! CSV and manifest emission. All floating-point fields are written in
//! scientific notation with 10 fractional digits (11 significant digits),
//! so re-running a command with the same config and seed produces
//! byte-identical files.

use std::fmt::Write as _;

use crate::dynamics::TimeSeries;
use crate::meanfield::MeanFieldTrajectory;
use crate::observables::{PersistenceReport, ThermalStats};

fn fmt(x: f64) -> String {
    format!("{x:.10e}")
}

/// `t,E,M,n_up,n_dn,P,R,H`, one row per sweep.
pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(series.len() * 96 + 32);
    out.push_str("t,E,M,n_up,n_dn,P,R,H\n");
    for r in series.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            fmt(r.energy),
            fmt(r.m_total),
            fmt(r.n_up),
            fmt(r.n_dn),
            fmt(r.price),
            fmt(r.ret),
            fmt(r.field),
        );
    }
    out
}

/// `T,E,Cv,M,chi`, one row per scanned temperature.
pub fn scan_csv(stats: &[ThermalStats]) -> String {
    let mut out = String::from("T,E,Cv,M,chi\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt(s.temperature),
            fmt(s.e_mean),
            fmt(s.c_v),
            fmt(s.m_mean),
            fmt(s.chi),
        );
    }
    out
}

/// One persistence verdict row.
pub struct PersistenceRow {
    pub h: f64,
    pub temperature: f64,
    pub report: PersistenceReport,
}

/// `H,T,baseline,during,after,retention,persistent`.
pub fn persistence_csv(rows: &[PersistenceRow]) -> String {
    let mut out = String::from("H,T,baseline,during,after,retention,persistent\n");
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(row.h),
            fmt(row.temperature),
            fmt(r.baseline),
            fmt(r.during),
            fmt(r.after),
            fmt(r.retention.unwrap_or(f64::NAN)),
            r.persistent,
        );
    }
    out
}

/// `t,s1,s2,P` for a mean-field trajectory.
pub fn mft_csv(traj: &MeanFieldTrajectory) -> String {
    let mut out = String::from("t,s1,s2,P\n");
    for r in traj.rows() {
        let _ = writeln!(out, "{},{},{},{}", r.t, fmt(r.s1), fmt(r.s2), fmt(r.price));
    }
    out
}

/// One row of a mean-field regime scan.
pub struct RegimeRow {
    pub temperature: f64,
    pub regime: String,
    pub period: Option<f64>,
    pub amplitude: f64,
}

/// `T,regime,period,amplitude`.
pub fn regime_scan_csv(rows: &[RegimeRow]) -> String {
    let mut out = String::from("T,regime,period,amplitude\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt(r.temperature),
            r.regime,
            fmt(r.period.unwrap_or(f64::NAN)),
            fmt(r.amplitude),
        );
    }
    out
}

/// Line-oriented `key = value` manifest: tool metadata, the full resolved
/// config (defaults included), and result values. Because config parsing
/// skips `meta.*` and `result.*`, a manifest is itself a valid config that
/// reproduces the run.
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, threads: usize) -> Self {
        let mut m = Self { lines: Vec::new() };
        m.push("meta.tool", "marketspin");
        m.push("meta.version", env!("CARGO_PKG_VERSION"));
        m.push("meta.command", command);
        m.push("meta.threads", threads.to_string());
        m.push("run.seed", seed.to_string());
        m
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.lines.push((key.to_string(), value.into()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, fmt(value));
    }

    /// Copy every config entry except `run.seed`, which the manifest pins
    /// to the resolved seed.
    pub fn extend_config<'a>(&mut self, entries: impl Iterator<Item = (&'a str, &'a str)>) {
        for (k, v) in entries {
            if k != "run.seed" {
                self.push(k, v);
            }
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
