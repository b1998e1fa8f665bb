//! Monte Carlo time evolution: initialization with chosen buyer/seller
//! percentages, Metropolis sweeps, and the per-sweep observable record.
//!
//! The default update mode is `Snapshot`: within one sweep every agent's
//! energy is evaluated against the configuration and global counts frozen
//! at the end of the previous sweep. Each site draws from its own random
//! stream keyed by `(run seed, sweep, site)`, so the result of a sweep does
//! not depend on the order sites are visited in, and sweeps may be
//! parallelized without changing the trajectory.
//!
//! `InPlace` mode is a standard sequential Metropolis chain (updates take
//! effect immediately); with `a = 0` it satisfies detailed balance with
//! respect to the Gibbs measure of the pair Hamiltonian and is used by the
//! equilibrium oracle tests. For `a > 0` the per-agent energy difference
//! does not include the O(1/N) feedback of the global term on every other
//! agent, so exact Gibbs correspondence holds only at `a = 0`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::lattice::NeighborGraph;
use crate::model::{
    self, local_field, MarketState, ModelParams, SpinSpace,
};
use crate::rng::{derive_seed, site_stream, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    #[default]
    Snapshot,
    InPlace,
}

impl std::fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UpdateMode::Snapshot => write!(f, "snapshot"),
            UpdateMode::InPlace => write!(f, "in_place"),
        }
    }
}

/// Everything needed to reproduce one market run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: Arc<NeighborGraph>,
    pub params: ModelParams,
    pub n_sweeps: u64,
    /// Initial buyer fraction.
    pub f_up: f64,
    /// Initial seller fraction.
    pub f_dn: f64,
    pub seed: u64,
    pub mode: UpdateMode,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for f in [self.f_up, self.f_dn] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParams(format!(
                    "init fraction {f} is outside [0, 1]"
                )));
            }
        }
        if self.f_up + self.f_dn > 1.0 + 1e-12 {
            return Err(Error::InvalidParams(format!(
                "f_up + f_dn = {} exceeds 1",
                self.f_up + self.f_dn
            )));
        }
        Ok(())
    }
}

/// One per-sweep record of the observable suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRow {
    pub t: u64,
    pub energy: f64,
    pub m_total: f64,
    pub n_up: f64,
    pub n_dn: f64,
    pub price: f64,
    /// Gross return against the previous row; 0 for the initial row.
    pub ret: f64,
    /// Boost field in force during the sweep that produced this row.
    pub field: f64,
}

/// Per-sweep records for one run, row 0 being the initial state.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    rows: Vec<TimeSeriesRow>,
    n_agents: usize,
}

impl TimeSeries {
    pub fn new(rows: Vec<TimeSeriesRow>, n_agents: usize) -> Self {
        Self { rows, n_agents }
    }

    pub fn rows(&self) -> &[TimeSeriesRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn prices(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.price).collect()
    }

    pub fn returns(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ret).collect()
    }

    pub fn magnetizations(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.m_total).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// `n_up - n_dn` per row.
    pub fn imbalances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.n_up - r.n_dn).collect()
    }
}

fn draw_candidate(space: SpinSpace, stream: &mut SplitMix64) -> f64 {
    match space {
        SpinSpace::Discrete { s } => stream.next_below(2 * s as u64 + 1) as f64 - s as f64,
        SpinSpace::Continuous => stream.next_f64() * 2.0 - 1.0,
    }
}

fn draw_candidate_rng<R: Rng>(space: SpinSpace, rng: &mut R) -> f64 {
    match space {
        SpinSpace::Discrete { s } => rng.random_range(0..2 * s as u64 + 1) as f64 - s as f64,
        SpinSpace::Continuous => rng.random::<f64>() * 2.0 - 1.0,
    }
}

#[inline]
fn metropolis_accept(delta_e: f64, temperature: f64, draw: impl FnOnce() -> f64) -> bool {
    delta_e <= 0.0 || draw() < (-delta_e / temperature).exp()
}

/// Build the initial state: exactly `round(f_up * N)` buyers and
/// `round(f_dn * N)` sellers placed at seed-shuffled positions, the rest
/// neutral. Multi-state buyers (sellers) spread uniformly over the positive
/// (negative) states; continuous neutrals get a small value in
/// [-0.05, 0.05) rather than an atypical exact zero.
pub fn init_state(config: &RunConfig) -> MarketState {
    let n = config.graph.n_sites();
    let up = (config.f_up * n as f64).round() as usize;
    let dn = ((config.f_dn * n as f64).round() as usize).min(n - up);
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(config.seed, "init", 0));
    let space = config.params.spin_space;

    let mut spins = Vec::with_capacity(n);
    for _ in 0..up {
        spins.push(match space {
            SpinSpace::Discrete { s } => rng.random_range(1..=s as u64) as f64,
            SpinSpace::Continuous => 1.0 - rng.random::<f64>(),
        });
    }
    for _ in 0..dn {
        spins.push(match space {
            SpinSpace::Discrete { s } => -(rng.random_range(1..=s as u64) as f64),
            SpinSpace::Continuous => rng.random::<f64>() - 1.0,
        });
    }
    for _ in 0..n - up - dn {
        spins.push(match space {
            SpinSpace::Discrete { .. } => 0.0,
            SpinSpace::Continuous => rng.random::<f64>() * 0.1 - 0.05,
        });
    }
    // Fisher-Yates placement shuffle.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        spins.swap(i, j);
    }
    MarketState::new(spins, 0)
}

/// One snapshot-mode sweep: all neighbor reads and the global imbalance
/// come from `state` as it was at the start of the sweep. Returns the state
/// at `state.t() + 1`.
pub fn metropolis_sweep_snapshot(
    state: &MarketState,
    graph: &NeighborGraph,
    params: &ModelParams,
    h: f64,
    sweep_seed: u64,
) -> MarketState {
    let order: Vec<usize> = (0..state.n_agents()).collect();
    snapshot_sweep_ordered(state, graph, params, h, sweep_seed, &order)
}

/// Snapshot sweep visiting sites in the given order. The per-site random
/// streams make the result identical for every permutation; the plain
/// index-order entry point is `metropolis_sweep_snapshot`.
pub fn snapshot_sweep_ordered(
    state: &MarketState,
    graph: &NeighborGraph,
    params: &ModelParams,
    h: f64,
    sweep_seed: u64,
    order: &[usize],
) -> MarketState {
    let sweep = state.t() + 1;
    let imbalance = state.imbalance();
    let prev = state.spins();
    let mut next = prev.to_vec();
    for &i in order {
        let mut stream = site_stream(sweep_seed, sweep, i as u64);
        let cand = draw_candidate(params.spin_space, &mut stream);
        let cur = prev[i];
        let nbr_sum: f64 = graph
            .neighbors(i)
            .iter()
            .map(|&j| prev[j as usize])
            .sum();
        let phi = local_field(nbr_sum, imbalance, params, h);
        let delta_e = (cand - cur) * phi;
        if metropolis_accept(delta_e, params.temperature, || stream.next_f64()) {
            next[i] = cand;
        }
    }
    MarketState::new(next, sweep)
}

/// One in-place sweep: sites are visited in index order, accepted updates
/// take effect immediately, and the buyer/seller counts track every flip.
pub fn metropolis_sweep_in_place<R: Rng>(
    state: &mut MarketState,
    graph: &NeighborGraph,
    params: &ModelParams,
    h: f64,
    rng: &mut R,
) {
    let n = state.n_agents();
    let n_f = n as f64;
    let temperature = params.temperature;
    for i in 0..n {
        let cand = draw_candidate_rng(params.spin_space, rng);
        let cur = state.spins[i];
        let nbr_sum: f64 = graph
            .neighbors(i)
            .iter()
            .map(|&j| state.spins[j as usize])
            .sum();
        let imbalance = (state.up_count as f64 - state.dn_count as f64) / n_f;
        let phi = local_field(nbr_sum, imbalance, params, h);
        let delta_e = (cand - cur) * phi;
        if metropolis_accept(delta_e, temperature, || rng.random::<f64>()) {
            state.spins[i] = cand;
            if cur > 0.0 {
                state.up_count -= 1;
            } else if cur < 0.0 {
                state.dn_count -= 1;
            }
            if cand > 0.0 {
                state.up_count += 1;
            } else if cand < 0.0 {
                state.dn_count += 1;
            }
        }
    }
    state.t += 1;
}

/// Run the full market evolution and record every sweep.
///
/// Row 0 is the initial state; the row at sweep `t` is recorded with the
/// field that was in force during that sweep. When `a > |A|` a deep seller
/// (or buyer) majority can drive the price through zero; the return at
/// such a crossing is undefined and recorded as NaN rather than aborting
/// the run.
pub fn run_market(config: &RunConfig) -> Result<TimeSeries> {
    config.validate()?;
    let graph = config.graph.as_ref();
    let params = &config.params;
    let sweep_seed = derive_seed(config.seed, "sweeps", 0);
    let mut in_place_rng = ChaCha12Rng::seed_from_u64(derive_seed(config.seed, "inplace", 0));

    let mut state = init_state(config);
    let mut rows = Vec::with_capacity(config.n_sweeps as usize + 1);
    let h0 = params.schedule.field_at(0);
    let p0 = model::price(state.n_up(), state.n_dn(), params.a, params.clearing_price);
    rows.push(TimeSeriesRow {
        t: 0,
        energy: model::total_energy(&state, graph, params, h0),
        m_total: state.magnetization(),
        n_up: state.n_up(),
        n_dn: state.n_dn(),
        price: p0,
        ret: 0.0,
        field: h0,
    });

    let mut prev_price = p0;
    for t in 1..=config.n_sweeps {
        let h = params.schedule.field_at(t);
        match config.mode {
            UpdateMode::Snapshot => {
                state = metropolis_sweep_snapshot(&state, graph, params, h, sweep_seed);
            }
            UpdateMode::InPlace => {
                metropolis_sweep_in_place(&mut state, graph, params, h, &mut in_place_rng);
            }
        }
        let price = model::price(state.n_up(), state.n_dn(), params.a, params.clearing_price);
        let ret = model::gross_return(price, prev_price).unwrap_or(f64::NAN);
        rows.push(TimeSeriesRow {
            t,
            energy: model::total_energy(&state, graph, params, h),
            m_total: state.magnetization(),
            n_up: state.n_up(),
            n_dn: state.n_dn(),
            price,
            ret,
            field: h,
        });
        prev_price = price;
    }
    Ok(TimeSeries::new(rows, graph.n_sites()))
}
