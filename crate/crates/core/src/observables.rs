//! Reductions over time series: thermal statistics, critical-temperature
//! estimation, autocorrelation, rolling volatility, pulse persistence, and
//! the bisection search for the critical boost strength.

use rayon::prelude::*;

use crate::dynamics::{run_market, RunConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Per-agent thermal averages of one run at temperature `T` (k_B = 1).
#[derive(Debug, Clone, Copy)]
pub struct ThermalStats {
    pub temperature: f64,
    /// Mean energy per agent.
    pub e_mean: f64,
    /// Specific heat per agent, `(<E^2> - <E>^2) / (N T^2)`.
    pub c_v: f64,
    /// Mean order parameter per agent.
    pub m_mean: f64,
    /// Susceptibility per agent, `N (<m^2> - <m>^2) / T` with `m = M/N`.
    pub chi: f64,
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let mut n = 0usize;
    let mut mean = 0.0;
    for v in values.clone() {
        n += 1;
        mean += v;
    }
    if n == 0 {
        return (0.0, 0.0, 0);
    }
    mean /= n as f64;
    let mut var = 0.0;
    for v in values {
        let d = v - mean;
        var += d * d;
    }
    (mean, var / n as f64, n)
}

/// Time averages over rows `t >= discard`.
pub fn thermal_stats(series: &TimeSeries, discard: u64, temperature: f64) -> Result<ThermalStats> {
    if discard as usize >= series.len() {
        return Err(Error::EmptyWindow {
            discard,
            len: series.len(),
        });
    }
    let n = series.n_agents() as f64;
    let window = &series.rows()[discard as usize..];
    let (e_mean, e_var, _) = mean_var(window.iter().map(|r| r.energy));
    let (m_mean, m_var, _) = mean_var(window.iter().map(|r| r.m_total / n));
    Ok(ThermalStats {
        temperature,
        e_mean: e_mean / n,
        c_v: e_var / (n * temperature * temperature),
        m_mean,
        chi: n * m_var / temperature,
    })
}

/// One independent run per temperature (fresh init from the base config's
/// fractions, seed derived per grid index), reduced by `thermal_stats`.
/// Runs execute in parallel; results keep grid order.
pub fn temperature_scan(
    base: &RunConfig,
    t_grid: &[f64],
    discard: u64,
    measure: u64,
) -> Result<Vec<ThermalStats>> {
    if t_grid.is_empty() {
        return Err(Error::GridTooSmall { min: 1, got: 0 });
    }
    t_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &t)| {
            let mut cfg = base.clone();
            cfg.params.temperature = t;
            cfg.n_sweeps = discard + measure;
            cfg.seed = derive_seed(base.seed, "scan", idx as u64);
            let series = run_market(&cfg)?;
            thermal_stats(&series, discard, t)
        })
        .collect()
}

/// Locate the susceptibility peak: argmax of chi refined by a three-point
/// quadratic fit; the uncertainty is the local grid spacing.
pub fn estimate_tc(scan: &[ThermalStats]) -> Result<(f64, f64)> {
    if scan.len() < 3 {
        return Err(Error::GridTooSmall {
            min: 3,
            got: scan.len(),
        });
    }
    let peak = scan
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.chi.total_cmp(&b.1.chi))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    if peak == 0 || peak == scan.len() - 1 {
        return Err(Error::PeakAtBoundary(scan[peak].temperature));
    }
    let (x0, y0) = (scan[peak - 1].temperature, scan[peak - 1].chi);
    let (x1, y1) = (scan[peak].temperature, scan[peak].chi);
    let (x2, y2) = (scan[peak + 1].temperature, scan[peak + 1].chi);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    let tc = if den.abs() < 1e-300 {
        x1
    } else {
        x1 - 0.5 * num / den
    };
    let spacing = (x1 - x0).abs().max((x2 - x1).abs());
    Ok((tc, spacing))
}

/// Normalized autocorrelation `C(tau)` for `tau = 0..=max_lag`, with
/// `C(0) = 1`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if x.len() <= max_lag {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            window: max_lag + 1,
        });
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for tau in 0..=max_lag {
        let m = n - tau;
        let cov = (0..m)
            .map(|t| (x[t] - mean) * (x[t + tau] - mean))
            .sum::<f64>()
            / m as f64;
        out.push(cov / var);
    }
    Ok(out)
}

/// Standard deviation of the series over each sliding window.
pub fn rolling_volatility(returns: &[f64], window: usize) -> Result<Vec<f64>> {
    if window < 2 {
        return Err(Error::InvalidParams(format!(
            "volatility window must be >= 2, got {window}"
        )));
    }
    if returns.len() < window {
        return Err(Error::SeriesTooShort {
            len: returns.len(),
            window,
        });
    }
    let mut out = Vec::with_capacity(returns.len() - window + 1);
    for chunk in returns.windows(window) {
        let (_, var, _) = mean_var(chunk.iter().copied());
        out.push(var.sqrt());
    }
    Ok(out)
}

/// Options for the pulse-persistence verdict.
#[derive(Debug, Clone, Copy)]
pub struct PersistenceOptions {
    /// Minimum retained fraction of the pulse response, default 0.5.
    pub retention_threshold: f64,
    /// Noise floor as a multiple of the baseline-window standard error,
    /// default 3.
    pub noise_multiple: f64,
}

impl Default for PersistenceOptions {
    fn default() -> Self {
        Self {
            retention_threshold: 0.5,
            noise_multiple: 3.0,
        }
    }
}

/// Price response to a boost pulse on `[t1, t2)`.
#[derive(Debug, Clone, Copy)]
pub struct PersistenceReport {
    /// Mean price over `[t1 - horizon, t1)`.
    pub baseline: f64,
    /// Mean price over `[t1, t2)`.
    pub during: f64,
    /// Mean price over `[t2, t2 + horizon)`.
    pub after: f64,
    /// Retained fraction of the pulse response; only defined when the
    /// response clears the noise floor.
    pub retention: Option<f64>,
    /// `noise_multiple` times the baseline-window price standard deviation.
    pub noise_floor: f64,
    pub persistent: bool,
}

/// Compare mean prices before, during, and after a pulse.
///
/// Near the critical temperature the pulse-free price wanders slowly (the
/// finite system drifts between the ordered wells), so the verdict has to
/// separate a genuine pulse response from that background motion. Two
/// guards do this: the baseline window is fit with a linear trend whose
/// level at `t1` replaces the flat mean as the pulse-free reference, and
/// the noise floor is a multiple of the baseline's standard deviation —
/// the full width of the price band an observer sees before the pulse,
/// wander included — rather than the standard error of its mean (which
/// shrinks with window length and would flag any slow drift as a
/// response). A verdict is persistent iff the pulse response clears that
/// floor and at least `retention_threshold` of it survives into the
/// after-window.
pub fn persistence_score(
    series: &TimeSeries,
    t1: u64,
    t2: u64,
    horizon: u64,
    opts: PersistenceOptions,
) -> Result<PersistenceReport> {
    if horizon == 0 || t1 < horizon + 1 || t1 >= t2 {
        return Err(Error::WindowOutOfRange {
            lo: t1.saturating_sub(horizon),
            hi: t2,
            len: series.len(),
        });
    }
    if (t2 + horizon) as usize > series.len() {
        return Err(Error::WindowOutOfRange {
            lo: t2,
            hi: t2 + horizon,
            len: series.len(),
        });
    }
    let window_mean = |lo: u64, hi: u64| {
        let rows = &series.rows()[lo as usize..hi as usize];
        mean_var(rows.iter().map(|r| r.price)).0
    };
    // Least-squares line through the baseline window; its level at t1 is
    // the pulse-free reference.
    let base_rows = &series.rows()[(t1 - horizon) as usize..t1 as usize];
    let n = base_rows.len() as f64;
    let t_mean = base_rows.iter().map(|r| r.t as f64).sum::<f64>() / n;
    let p_mean = base_rows.iter().map(|r| r.price).sum::<f64>() / n;
    let mut s_tt = 0.0;
    let mut s_tp = 0.0;
    for r in base_rows {
        let dt = r.t as f64 - t_mean;
        s_tt += dt * dt;
        s_tp += dt * (r.price - p_mean);
    }
    let slope = if s_tt > 0.0 { s_tp / s_tt } else { 0.0 };
    let level = p_mean + slope * (t1 as f64 - t_mean);
    let base_std = (base_rows
        .iter()
        .map(|r| {
            let d = r.price - p_mean;
            d * d
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let noise_floor = opts.noise_multiple * base_std;

    let baseline = p_mean;
    let during = window_mean(t1, t2);
    let after = window_mean(t2, t2 + horizon);
    let response = during - level;
    let retained = after - level;
    let retention = if response.abs() > noise_floor && noise_floor.is_finite() {
        Some(retained / response)
    } else {
        None
    };
    let persistent = retention.is_some_and(|r| r >= opts.retention_threshold);
    Ok(PersistenceReport {
        baseline,
        during,
        after,
        retention,
        noise_floor,
        persistent,
    })
}

/// Pulse window used by the critical-boost search.
#[derive(Debug, Clone, Copy)]
pub struct PulseSpec {
    pub t1: u64,
    pub t2: u64,
    pub horizon: u64,
    pub opts: PersistenceOptions,
}

/// Persistence reports at pulse strength `h` for `n_seeds` replica runs
/// (seeds derived from the base seed per replica index, shared across
/// probes so verdicts stay comparable in `h`). Replicas run in parallel.
pub fn replica_persistence(
    base: &RunConfig,
    pulse: &PulseSpec,
    h: f64,
    n_seeds: u64,
) -> Result<Vec<PersistenceReport>> {
    (0..n_seeds)
        .into_par_iter()
        .map(|replica| {
            let mut cfg = base.clone();
            cfg.seed = derive_seed(base.seed, "hc-replica", replica);
            cfg.params.schedule = crate::model::FieldSchedule::new(vec![
                crate::model::FieldSegment {
                    t_start: pulse.t1,
                    t_end: pulse.t2,
                    h,
                },
            ])?;
            let series = run_market(&cfg)?;
            persistence_score(&series, pulse.t1, pulse.t2, pulse.horizon, pulse.opts)
        })
        .collect()
}

fn majority(reports: &[PersistenceReport]) -> bool {
    reports.iter().filter(|r| r.persistent).count() * 2 > reports.len()
}

/// Majority persistence verdict at pulse strength `h`.
pub fn majority_persistent(
    base: &RunConfig,
    pulse: &PulseSpec,
    h: f64,
    n_seeds: u64,
) -> Result<bool> {
    Ok(majority(&replica_persistence(base, pulse, h, n_seeds)?))
}

/// Result of the critical-boost bisection: the final bracket plus every
/// probe's replica reports, in probe order.
#[derive(Debug, Clone)]
pub struct CriticalFieldSearch {
    pub bracket: (f64, f64),
    pub probes: Vec<(f64, Vec<PersistenceReport>)>,
}

/// Bisect the critical boost strength between `h_lo` (not persistent) and
/// `h_hi` (persistent), each probe decided by majority over `n_seeds`
/// replicas. The final bracket has width <= `tol`.
pub fn find_critical_h(
    base: &RunConfig,
    pulse: &PulseSpec,
    h_lo: f64,
    h_hi: f64,
    n_seeds: u64,
    tol: f64,
) -> Result<CriticalFieldSearch> {
    if !(h_lo < h_hi) || !(tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need h_lo < h_hi and tol > 0, got [{h_lo}, {h_hi}], tol {tol}"
        )));
    }
    let mut probes = Vec::new();
    let mut probe = |h: f64| -> Result<bool> {
        let reports = replica_persistence(base, pulse, h, n_seeds)?;
        let verdict = majority(&reports);
        probes.push((h, reports));
        Ok(verdict)
    };
    let lo_verdict = probe(h_lo)?;
    let hi_verdict = probe(h_hi)?;
    if lo_verdict || !hi_verdict {
        return Err(Error::UnorderedBracket {
            lo: h_lo,
            hi: h_hi,
            lo_verdict,
            hi_verdict,
        });
    }
    let (mut lo, mut hi) = (h_lo, h_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalFieldSearch {
        bracket: (lo, hi),
        probes,
    })
}
