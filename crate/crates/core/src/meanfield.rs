//! Two-community mean-field iterated map: each group's average stance is
//! pushed through a Brillouin response to the effective field produced by
//! the previous step's averages. Includes trajectory iteration, price
//! readout, regime classification (ordered / oscillating / clearing), and
//! bisection of the regime boundaries in temperature.

use crate::error::{Error, Result};

/// Brillouin response of a `2M+1`-state spin:
/// `B(u) = (M + 1/2) coth((M + 1/2) u) - (1/2) coth(u/2)`.
///
/// Both coth terms diverge at zero but the combination is analytic; for
/// `|u| < 1e-4` the odd Taylor series is used instead.
pub fn brillouin(u: f64, m: u32) -> f64 {
    let mf = m as f64;
    if u.abs() < 1e-4 {
        let slope = mf * (mf + 1.0) / 3.0;
        let c3 = ((mf + 0.5).powi(4) - 1.0 / 16.0) / 45.0;
        return slope * u - c3 * u * u * u;
    }
    let a = mf + 0.5;
    a / (a * u).tanh() - 0.5 / (0.5 * u).tanh()
}

/// Parameters of the two-community map.
#[derive(Debug, Clone)]
pub struct MeanFieldParams {
    /// Intra-group couplings.
    pub j1: f64,
    pub j2: f64,
    /// Inter-group couplings (need not be symmetric).
    pub k12: f64,
    pub k21: f64,
    /// Global price coupling.
    pub a: f64,
    pub temperature: f64,
    /// Spin amplitudes of the two groups.
    pub m1: u32,
    pub m2: u32,
    /// Initial group averages.
    pub s1_0: f64,
    pub s2_0: f64,
    /// When true, the price coupling is divided by T like the j and k
    /// couplings; when false it enters the effective field unscaled,
    /// exactly as the update equations are written.
    pub a_scaled: bool,
    /// Price readout scale.
    pub price_scale: f64,
    /// Market clearing price.
    pub clearing_price: f64,
}

impl MeanFieldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidParams(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidParams(
                "group spin amplitudes must be >= 1".into(),
            ));
        }
        if self.s1_0.abs() > self.m1 as f64 || self.s2_0.abs() > self.m2 as f64 {
            return Err(Error::InvalidParams(format!(
                "initial averages ({}, {}) exceed the amplitudes ({}, {})",
                self.s1_0, self.s2_0, self.m1, self.m2
            )));
        }
        Ok(())
    }

    fn effective_a(&self) -> f64 {
        if self.a_scaled {
            self.a / self.temperature
        } else {
            self.a
        }
    }
}

/// One map step: `u1 = j1 s1 + k12 s2 - a (s1 - s2)` and
/// `u2 = j2 s2 + k21 s1 - a (s1 - s2)` with `j = J/T`, `k = K/T`, and `a`
/// scaled or not per the params; returns `(B(u1; M1), B(u2; M2))`.
pub fn mf_step(s1: f64, s2: f64, p: &MeanFieldParams) -> (f64, f64) {
    let t = p.temperature;
    let a = p.effective_a();
    let drift = a * (s1 - s2);
    let u1 = (p.j1 * s1 + p.k12 * s2) / t - drift;
    let u2 = (p.j2 * s2 + p.k21 * s1) / t - drift;
    (brillouin(u1, p.m1), brillouin(u2, p.m2))
}

/// Mean-field price readout: `P = A + a_p (s1 + s2) / 2`.
pub fn mf_price(s1: f64, s2: f64, price_scale: f64, clearing_price: f64) -> f64 {
    clearing_price + price_scale * 0.5 * (s1 + s2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfRow {
    pub t: u64,
    pub s1: f64,
    pub s2: f64,
    pub price: f64,
}

/// Iterated `(s1, s2)` sequence with the derived price.
#[derive(Debug, Clone)]
pub struct MeanFieldTrajectory {
    rows: Vec<MfRow>,
}

impl MeanFieldTrajectory {
    pub fn rows(&self) -> &[MfRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn s1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.s1).collect()
    }

    pub fn s2(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.s2).collect()
    }
}

/// Iterate the map for `steps` steps from the configured initial averages;
/// row 0 is the initial condition.
pub fn mf_run(p: &MeanFieldParams, steps: u64) -> Result<MeanFieldTrajectory> {
    p.validate()?;
    let (mut s1, mut s2) = (p.s1_0, p.s2_0);
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(MfRow {
        t: 0,
        s1,
        s2,
        price: mf_price(s1, s2, p.price_scale, p.clearing_price),
    });
    for t in 1..=steps {
        (s1, s2) = mf_step(s1, s2, p);
        rows.push(MfRow {
            t,
            s1,
            s2,
            price: mf_price(s1, s2, p.price_scale, p.clearing_price),
        });
    }
    Ok(MeanFieldTrajectory { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Both groups settle on nonzero averages of constant sign.
    Ordered,
    /// Persistent, non-decaying oscillation.
    Oscillating,
    /// Decay to the market-clearing point (0, 0).
    Clearing,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Ordered => write!(f, "ordered"),
            Regime::Oscillating => write!(f, "oscillating"),
            Regime::Clearing => write!(f, "clearing"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegimeReport {
    pub regime: Regime,
    /// Estimated oscillation period (oscillating only).
    pub period: Option<f64>,
    /// Peak-to-peak range of s1 over the tail.
    pub amplitude: f64,
    /// Final `(s1, s2)`.
    pub final_state: (f64, f64),
}

fn converged(tail: &[f64], tol: f64) -> bool {
    let last = *tail.last().expect("nonempty tail");
    if last.abs() < tol {
        return false;
    }
    let sign = last.signum();
    tail.windows(2).all(|w| (w[1] - w[0]).abs() < tol)
        && tail.iter().all(|&v| v.signum() == sign && v != 0.0)
}

fn range(xs: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    hi - lo
}

/// Classify the last `tail` steps of a trajectory.
///
/// Clearing: both averages stay below `tol` in magnitude. Ordered: both
/// sequences converge (successive differences below `tol`) to nonzero
/// values of constant sign. Oscillating: otherwise, provided the swing is
/// not decaying (last-quarter range at least 0.9 of the previous quarter's)
/// and at least two mean crossings are present — the period estimate is
/// twice the mean crossing spacing. Anything else is a transient and an
/// error asking for a longer run.
pub fn classify_regime(traj: &MeanFieldTrajectory, tail: usize, tol: f64) -> Result<RegimeReport> {
    if tail < 8 || tail >= traj.len() {
        return Err(Error::InvalidParams(format!(
            "tail must be in [8, len); got tail {tail} for length {}",
            traj.len()
        )));
    }
    let rows = &traj.rows()[traj.len() - tail..];
    let s1: Vec<f64> = rows.iter().map(|r| r.s1).collect();
    let s2: Vec<f64> = rows.iter().map(|r| r.s2).collect();
    let final_state = (*s1.last().unwrap(), *s2.last().unwrap());
    let amplitude = range(&s1);

    let max_abs = s1
        .iter()
        .chain(s2.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if max_abs < tol {
        return Ok(RegimeReport {
            regime: Regime::Clearing,
            period: None,
            amplitude,
            final_state,
        });
    }

    if converged(&s1, tol) && converged(&s2, tol) {
        return Ok(RegimeReport {
            regime: Regime::Ordered,
            period: None,
            amplitude,
            final_state,
        });
    }

    let mean = s1.iter().sum::<f64>() / s1.len() as f64;
    let centered: Vec<f64> = s1.iter().map(|v| v - mean).collect();
    let crossings: Vec<usize> = centered
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] * w[1] < 0.0)
        .map(|(i, _)| i)
        .collect();
    let quarter = tail / 4;
    let last_q = range(&s1[tail - quarter..]);
    let prev_q = range(&s1[tail - 2 * quarter..tail - quarter]);
    let non_decaying = last_q >= 0.9 * prev_q;
    if crossings.len() >= 2 && non_decaying && amplitude > tol {
        let spacing =
            (crossings[crossings.len() - 1] - crossings[0]) as f64 / (crossings.len() - 1) as f64;
        return Ok(RegimeReport {
            regime: Regime::Oscillating,
            period: Some(2.0 * spacing),
            amplitude,
            final_state,
        });
    }
    Err(Error::TransientTail)
}

/// Classify at temperature `t`, lengthening the run up to two times (x4
/// each) when the tail is still transient.
pub fn classify_at_temperature(
    p: &MeanFieldParams,
    t: f64,
    steps: u64,
    tail: usize,
    tol: f64,
) -> Result<RegimeReport> {
    let mut params = p.clone();
    params.temperature = t;
    let mut steps = steps;
    let mut tail = tail;
    for attempt in 0..3 {
        let traj = mf_run(&params, steps)?;
        match classify_regime(&traj, tail, tol) {
            Ok(report) => return Ok(report),
            Err(Error::TransientTail) if attempt < 2 => {
                steps *= 4;
                tail *= 4;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop either returns or propagates the error")
}

fn classify_at(p: &MeanFieldParams, t: f64, steps: u64, tail: usize, tol: f64) -> Result<Regime> {
    classify_at_temperature(p, t, steps, tail, tol).map(|r| r.regime)
}

/// Locate the ordered/oscillating and oscillating/clearing boundaries by
/// bisection, to brackets of width <= `tol_t`. Requires the map to be
/// ordered at `t_lo` and clearing at `t_hi`; a non-monotone regime sequence
/// across the probe grid is reported with the observed labels.
pub fn regime_boundaries(
    p: &MeanFieldParams,
    t_lo: f64,
    t_hi: f64,
    tol_t: f64,
) -> Result<(f64, f64)> {
    if !(t_lo < t_hi) || !(tol_t > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need t_lo < t_hi and tol > 0, got [{t_lo}, {t_hi}], tol {tol_t}"
        )));
    }
    let steps = 2000u64;
    let tail = 500usize;
    let tol_s = 1e-3;
    let classify = |t: f64| classify_at(p, t, steps, tail, tol_s);

    let lo_regime = classify(t_lo)?;
    if lo_regime != Regime::Ordered {
        return Err(Error::RegimePrecondition(format!(
            "expected ordered at T={t_lo}, found {lo_regime}"
        )));
    }
    let hi_regime = classify(t_hi)?;
    if hi_regime != Regime::Clearing {
        return Err(Error::RegimePrecondition(format!(
            "expected clearing at T={t_hi}, found {hi_regime}"
        )));
    }

    // Coarse monotonicity check: ordered, then oscillating (possibly
    // absent), then clearing.
    let n_grid = 17usize;
    let mut labels = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (n_grid - 1) as f64;
        labels.push((t, classify(t)?));
    }
    let rank = |r: Regime| match r {
        Regime::Ordered => 0,
        Regime::Oscillating => 1,
        Regime::Clearing => 2,
    };
    if labels.windows(2).any(|w| rank(w[1].1) < rank(w[0].1)) {
        let shown: Vec<String> = labels
            .iter()
            .map(|(t, r)| format!("T={t:.4}:{r}"))
            .collect();
        return Err(Error::NonMonotoneRegimes(shown.join(", ")));
    }

    // Bisect the end of the ordered phase.
    let mut lo = labels
        .iter()
        .filter(|(_, r)| *r == Regime::Ordered)
        .map(|(t, _)| *t)
        .fold(t_lo, f64::max);
    let mut hi = labels
        .iter()
        .find(|(t, r)| *r != Regime::Ordered && *t > lo)
        .map(|(t, _)| *t)
        .unwrap_or(t_hi);
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        if classify(mid)? == Regime::Ordered {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_c1 = 0.5 * (lo + hi);

    // Bisect the onset of clearing.
    let mut hi2 = labels
        .iter()
        .filter(|(_, r)| *r == Regime::Clearing)
        .map(|(t, _)| *t)
        .fold(t_hi, f64::min);
    let mut lo2 = labels
        .iter()
        .rev()
        .find(|(t, r)| *r != Regime::Clearing && *t < hi2)
        .map(|(t, _)| *t)
        .unwrap_or(t_lo);
    while hi2 - lo2 > tol_t {
        let mid = 0.5 * (lo2 + hi2);
        if classify(mid)? == Regime::Clearing {
            hi2 = mid;
        } else {
            lo2 = mid;
        }
    }
    let t_c2 = 0.5 * (lo2 + hi2);

    Ok((t_c1, t_c2))
}
