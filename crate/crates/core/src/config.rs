//! Experiment configuration: a flat, strict `key = value` format.
//!
//! Lines are `key = value`, `#` starts a comment, blank lines are ignored.
//! Unknown keys and duplicate keys are errors (no silent overrides), and
//! only three kinds of defaults touch physics-adjacent values: the clearing
//! price A, the discard window, and the update mode — everything else that
//! affects a run must be spelled out. Keys under `meta.` and `result.` are
//! skipped on input, which is what lets a manifest file be fed back in as
//! a config to reproduce a run.
//!
//! The full key schema is listed in the README.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dynamics::{RunConfig, UpdateMode};
use crate::error::{Error, Result};
use crate::lattice::NeighborGraph;
use crate::meanfield::MeanFieldParams;
use crate::model::{FieldSchedule, FieldSegment, GlobalCoupling, ModelParams, SpinSpace};
use crate::observables::{PersistenceOptions, PulseSpec};

/// Keys with a fixed name.
const KNOWN_KEYS: &[&str] = &[
    "model.spin",
    "model.s",
    "model.j",
    "model.a",
    "model.clearing_price",
    "model.feedback",
    "lattice.l",
    "run.sweeps",
    "run.discard",
    "run.temperature",
    "run.f_up",
    "run.f_dn",
    "run.seed",
    "run.mode",
    "scan.t_min",
    "scan.t_max",
    "scan.t_step",
    "scan.t_list",
    "pulse.t1",
    "pulse.t2",
    "pulse.h",
    "pulse.horizon",
    "pulse.retention",
    "pulse.noise_mult",
    "hc.h_lo",
    "hc.h_hi",
    "hc.seeds",
    "hc.tol",
    "mf.j1",
    "mf.j2",
    "mf.k12",
    "mf.k21",
    "mf.a",
    "mf.temperature",
    "mf.m1",
    "mf.m2",
    "mf.s1_0",
    "mf.s2_0",
    "mf.steps",
    "mf.tail",
    "mf.tol",
    "mf.a_scaled",
    "mf.price_scale",
    "mf.clearing_price",
    "mf.t_min",
    "mf.t_max",
    "mf.t_step",
    "mf.t_list",
    "mf.boundary_tol",
];

fn key_is_known(key: &str) -> bool {
    if KNOWN_KEYS.contains(&key) {
        return true;
    }
    // schedule.0, schedule.1, ...
    key.strip_prefix("schedule.")
        .is_some_and(|suffix| suffix.parse::<u64>().is_ok())
}

/// Parsed but untyped configuration: key -> (value, line number).
#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl ExperimentConfig {
    /// Strict parse; errors carry the offending line number or key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {line_no}: expected `key = value`, got `{raw_line}`"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!(
                    "line {line_no}: empty key or value in `{raw_line}`"
                )));
            }
            if key.starts_with("meta.") || key.starts_with("result.") {
                continue;
            }
            if !key_is_known(&key) {
                return Err(Error::Config(format!(
                    "line {line_no}: unknown key `{key}`"
                )));
            }
            if entries.contains_key(&key) {
                return Err(Error::Config(format!(
                    "line {line_no}: duplicate key `{key}`"
                )));
            }
            entries.insert(key, (value, line_no));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str, value: &str) -> Result<T> {
        value.parse().map_err(|_| {
            Error::Config(format!(
                "key `{key}`: cannot parse `{value}` as {}",
                std::any::type_name::<T>()
            ))
        })
    }

    pub fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        match self.get(key) {
            Some(v) => self.parse_as(key, v),
            None => Err(Error::Config(format!("missing required key `{key}`"))),
        }
    }

    pub fn opt<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            Some(v) => self.parse_as(key, v),
            None => Ok(default),
        }
    }

    fn opt_bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => Err(Error::Config(format!(
                "key `{key}`: expected true or false, got `{other}`"
            ))),
            None => Ok(default),
        }
    }

    /// Spin space from `model.spin` / `model.s`.
    pub fn spin_space(&self) -> Result<SpinSpace> {
        match self.get("model.spin") {
            Some("discrete") | None => {
                let s: u32 = self.require("model.s")?;
                Ok(SpinSpace::Discrete { s })
            }
            Some("continuous") => {
                if self.get("model.s").is_some() {
                    return Err(Error::Config(
                        "key `model.s` conflicts with model.spin = continuous".into(),
                    ));
                }
                Ok(SpinSpace::Continuous)
            }
            Some(other) => Err(Error::Config(format!(
                "key `model.spin`: expected discrete or continuous, got `{other}`"
            ))),
        }
    }

    fn schedule(&self) -> Result<FieldSchedule> {
        let mut segments = Vec::new();
        for n in 0.. {
            let key = format!("schedule.{n}");
            let Some(value) = self.get(&key) else { break };
            let parts: Vec<&str> = value.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!(
                    "key `{key}`: expected `t_start t_end h`, got `{value}`"
                )));
            }
            segments.push(FieldSegment {
                t_start: self.parse_as(&key, parts[0])?,
                t_end: self.parse_as(&key, parts[1])?,
                h: self.parse_as(&key, parts[2])?,
            });
        }
        FieldSchedule::new(segments)
    }

    fn feedback(&self) -> Result<GlobalCoupling> {
        match self.get("model.feedback") {
            Some("contrarian") => Ok(GlobalCoupling::Contrarian),
            Some("herding") => Ok(GlobalCoupling::Herding),
            Some("price_only") | None => Ok(GlobalCoupling::PriceOnly),
            Some(other) => Err(Error::Config(format!(
                "key `model.feedback`: expected contrarian, herding or price_only, got `{other}`"
            ))),
        }
    }

    /// Model parameters. Grid commands pass their own temperature; the
    /// rest read the required `run.temperature` key.
    pub fn model_params(&self, temperature: Option<f64>) -> Result<ModelParams> {
        let params = ModelParams {
            spin_space: self.spin_space()?,
            j: self.require("model.j")?,
            a: self.require("model.a")?,
            clearing_price: self.opt("model.clearing_price", 3.0)?,
            temperature: match temperature {
                Some(t) => t,
                None => self.require("run.temperature")?,
            },
            schedule: self.schedule()?,
            coupling: self.feedback()?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn lattice_l(&self) -> Result<u32> {
        self.opt("lattice.l", 12)
    }

    pub fn update_mode(&self) -> Result<UpdateMode> {
        match self.get("run.mode") {
            Some("snapshot") | None => Ok(UpdateMode::Snapshot),
            Some("in_place") => Ok(UpdateMode::InPlace),
            Some(other) => Err(Error::Config(format!(
                "key `run.mode`: expected snapshot or in_place, got `{other}`"
            ))),
        }
    }

    /// Full run configuration (builds the lattice).
    pub fn run_config(
        &self,
        seed_override: Option<u64>,
        temperature: Option<f64>,
    ) -> Result<RunConfig> {
        let graph = Arc::new(NeighborGraph::build_fcc(self.lattice_l()?)?);
        let cfg = RunConfig {
            graph,
            params: self.model_params(temperature)?,
            n_sweeps: self.require("run.sweeps")?,
            f_up: self.require("run.f_up")?,
            f_dn: self.require("run.f_dn")?,
            seed: match seed_override {
                Some(s) => s,
                None => self.opt("run.seed", 0)?,
            },
            mode: self.update_mode()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn discard(&self, sweeps: u64) -> Result<u64> {
        let discard = self.opt("run.discard", sweeps / 2)?;
        if discard > sweeps {
            return Err(Error::Config(format!(
                "key `run.discard`: {discard} exceeds run.sweeps = {sweeps}"
            )));
        }
        Ok(discard)
    }

    fn grid(&self, prefix: &str) -> Result<Vec<f64>> {
        let list_key = format!("{prefix}.t_list");
        if let Some(list) = self.get(&list_key) {
            for k in ["t_min", "t_max", "t_step"] {
                if self.get(&format!("{prefix}.{k}")).is_some() {
                    return Err(Error::Config(format!(
                        "key `{prefix}.{k}` conflicts with `{list_key}`"
                    )));
                }
            }
            let grid: Result<Vec<f64>> = list
                .split(',')
                .map(|v| self.parse_as(&list_key, v.trim()))
                .collect();
            let grid = grid?;
            if grid.is_empty() {
                return Err(Error::Config(format!("key `{list_key}`: empty grid")));
            }
            return Ok(grid);
        }
        let t_min: f64 = self.require(&format!("{prefix}.t_min"))?;
        let t_max: f64 = self.require(&format!("{prefix}.t_max"))?;
        let t_step: f64 = self.require(&format!("{prefix}.t_step"))?;
        if !(t_step > 0.0) || t_max < t_min {
            return Err(Error::Config(format!(
                "keys `{prefix}.t_min/t_max/t_step`: bad grid ({t_min}, {t_max}, {t_step})"
            )));
        }
        let mut grid = Vec::new();
        let n = ((t_max - t_min) / t_step).round() as usize;
        for i in 0..=n {
            let t = t_min + t_step * i as f64;
            if t <= t_max + 1e-9 {
                grid.push(t);
            }
        }
        Ok(grid)
    }

    pub fn scan_grid(&self) -> Result<Vec<f64>> {
        self.grid("scan")
    }

    pub fn mf_grid(&self) -> Result<Vec<f64>> {
        self.grid("mf")
    }

    /// Pulse window and persistence options; `with_h` controls whether
    /// `pulse.h` is required (the critical-boost search supplies its own).
    pub fn pulse_spec(&self) -> Result<PulseSpec> {
        let t1: u64 = self.require("pulse.t1")?;
        let t2: u64 = self.require("pulse.t2")?;
        if t1 >= t2 {
            return Err(Error::Config(format!(
                "keys `pulse.t1/t2`: need t1 < t2, got [{t1}, {t2})"
            )));
        }
        let horizon = self.opt("pulse.horizon", t2 - t1)?;
        Ok(PulseSpec {
            t1,
            t2,
            horizon,
            opts: PersistenceOptions {
                retention_threshold: self.opt("pulse.retention", 0.5)?,
                noise_multiple: self.opt("pulse.noise_mult", 3.0)?,
            },
        })
    }

    pub fn pulse_h(&self) -> Result<f64> {
        self.require("pulse.h")
    }

    pub fn hc_bracket(&self) -> Result<(f64, f64, u64, f64)> {
        Ok((
            self.require("hc.h_lo")?,
            self.require("hc.h_hi")?,
            self.opt("hc.seeds", 7)?,
            self.opt("hc.tol", 0.005)?,
        ))
    }

    /// Mean-field parameters; `with_temperature` picks `mf.temperature` or
    /// a placeholder for grid commands.
    pub fn mf_params(&self, temperature: Option<f64>) -> Result<MeanFieldParams> {
        let a: f64 = self.require("mf.a")?;
        let params = MeanFieldParams {
            j1: self.require("mf.j1")?,
            j2: self.require("mf.j2")?,
            k12: self.require("mf.k12")?,
            k21: self.require("mf.k21")?,
            a,
            temperature: match temperature {
                Some(t) => t,
                None => self.require("mf.temperature")?,
            },
            m1: self.opt("mf.m1", 1)?,
            m2: self.opt("mf.m2", 1)?,
            s1_0: self.opt("mf.s1_0", 1.0)?,
            s2_0: self.opt("mf.s2_0", -1.0)?,
            a_scaled: self.opt_bool("mf.a_scaled", false)?,
            price_scale: self.opt("mf.price_scale", a)?,
            clearing_price: self.opt("mf.clearing_price", 3.0)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn mf_steps(&self) -> Result<u64> {
        self.opt("mf.steps", 2000)
    }

    pub fn mf_tail(&self) -> Result<usize> {
        self.opt("mf.tail", 500)
    }

    pub fn mf_tol(&self) -> Result<f64> {
        self.opt("mf.tol", 1e-3)
    }

    pub fn mf_boundary_tol(&self) -> Result<f64> {
        self.opt("mf.boundary_tol", 0.05)
    }

    /// All raw entries, for manifest emission.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }
}
