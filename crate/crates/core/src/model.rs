//! The model algebra: spin spaces, field schedules, per-agent and total
//! energy, the market price, and gross returns.
//!
//! Each agent carries a spin whose sign encodes its stance (positive buys,
//! negative sells, zero waits). The per-agent energy has three parts: an
//! imitation term against the neighbors' previous states, a global coupling
//! to the buyer/seller imbalance, and an external boost field. The global
//! term uses per-capita fractions, `n_up - n_dn` in [-1, 1], so it competes
//! with the 12-neighbor imitation term on equal footing at any system size.
//!
//! The energetic back-action of the imbalance is configurable via
//! [`GlobalCoupling`]; the `PriceOnly` default keeps it out of the energy
//! entirely, which is the variant that reproduces the reference critical
//! temperatures. See the README.

use crate::error::{Error, Result};
use crate::lattice::NeighborGraph;

/// State space of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSpace {
    /// The `2S+1` integer states `-S ..= S`.
    Discrete { s: u32 },
    /// Real-valued states in `[-1, 1]`.
    Continuous,
}

impl SpinSpace {
    pub fn contains(&self, value: f64) -> bool {
        match *self {
            SpinSpace::Discrete { s } => {
                value.fract() == 0.0 && value.abs() <= s as f64
            }
            SpinSpace::Continuous => (-1.0..=1.0).contains(&value),
        }
    }

    /// Largest state value (S, or 1 for the continuous space).
    pub fn amplitude(&self) -> f64 {
        match *self {
            SpinSpace::Discrete { s } => s as f64,
            SpinSpace::Continuous => 1.0,
        }
    }

    pub fn n_states(&self) -> Option<u64> {
        match *self {
            SpinSpace::Discrete { s } => Some(2 * s as u64 + 1),
            SpinSpace::Continuous => None,
        }
    }
}

impl std::fmt::Display for SpinSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SpinSpace::Discrete { s } => write!(f, "discrete(S={s})"),
            SpinSpace::Continuous => write!(f, "continuous[-1,1]"),
        }
    }
}

/// One boost-field window: `h` is in force for sweeps `t_start <= t < t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSegment {
    pub t_start: u64,
    pub t_end: u64,
    pub h: f64,
}

/// Piecewise-constant boost field over sweep time; zero outside all segments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldSchedule {
    segments: Vec<FieldSegment>,
}

impl FieldSchedule {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(mut segments: Vec<FieldSegment>) -> Result<Self> {
        segments.sort_by_key(|s| s.t_start);
        for seg in &segments {
            if seg.t_start >= seg.t_end {
                return Err(Error::InvalidParams(format!(
                    "field segment [{}, {}) is empty",
                    seg.t_start, seg.t_end
                )));
            }
        }
        for pair in segments.windows(2) {
            if pair[1].t_start < pair[0].t_end {
                return Err(Error::InvalidParams(format!(
                    "field segments [{}, {}) and [{}, {}) overlap",
                    pair[0].t_start, pair[0].t_end, pair[1].t_start, pair[1].t_end
                )));
            }
        }
        Ok(Self { segments })
    }

    /// Field in force at sweep `t` (half-open segments, so the sweep at
    /// `t_end` is already field-free).
    pub fn field_at(&self, t: u64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.t_start <= t && t < s.t_end)
            .map_or(0.0, |s| s.h)
    }

    pub fn segments(&self) -> &[FieldSegment] {
        &self.segments
    }
}

/// How the aggregate buyer/seller imbalance feeds back into each agent's
/// energy. The price readout always uses `a`; this knob only controls the
/// energetic back-action of the imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GlobalCoupling {
    /// `+a * v * (n_up - n_dn)`: a buyer majority raises the energy of
    /// buying, so agents lean against the majority side.
    Contrarian,
    /// `-a * v * (n_up - n_dn)`: the majority side is reinforced.
    Herding,
    /// The imbalance does not enter the energy at all; `a` only scales the
    /// price. This is the variant that reproduces the reference critical
    /// temperatures (about 6.7, 21, and 3.5 for the three spin spaces at
    /// L = 12), so it is the default.
    #[default]
    PriceOnly,
}

impl GlobalCoupling {
    /// Sign multiplying `a * v * (n_up - n_dn)` in the energy.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            GlobalCoupling::Contrarian => 1.0,
            GlobalCoupling::Herding => -1.0,
            GlobalCoupling::PriceOnly => 0.0,
        }
    }
}

/// Full parameter set of one market model.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub spin_space: SpinSpace,
    /// Imitation coupling between neighbors (energy units).
    pub j: f64,
    /// Global price coupling, `a >= 0`.
    pub a: f64,
    /// Market-clearing price A.
    pub clearing_price: f64,
    /// Market temperature, `T > 0` (k_B = 1).
    pub temperature: f64,
    pub schedule: FieldSchedule,
    pub coupling: GlobalCoupling,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidParams(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        if !(self.a >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "price coupling a must be >= 0, got {}",
                self.a
            )));
        }
        if let SpinSpace::Discrete { s } = self.spin_space {
            if s == 0 {
                return Err(Error::InvalidParams(
                    "discrete spin amplitude S must be >= 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Per-agent spin values plus cached buyer/seller counts at one sweep.
#[derive(Debug, Clone)]
pub struct MarketState {
    pub(crate) spins: Vec<f64>,
    pub(crate) t: u64,
    pub(crate) up_count: usize,
    pub(crate) dn_count: usize,
}

impl MarketState {
    pub fn new(spins: Vec<f64>, t: u64) -> Self {
        let (up_count, dn_count) = side_counts(&spins);
        Self {
            spins,
            t,
            up_count,
            dn_count,
        }
    }

    pub fn spins(&self) -> &[f64] {
        &self.spins
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn n_agents(&self) -> usize {
        self.spins.len()
    }

    /// Fraction of agents with spin > 0.
    pub fn n_up(&self) -> f64 {
        self.up_count as f64 / self.spins.len() as f64
    }

    /// Fraction of agents with spin < 0.
    pub fn n_dn(&self) -> f64 {
        self.dn_count as f64 / self.spins.len() as f64
    }

    /// Signed per-capita imbalance `n_up - n_dn`.
    pub fn imbalance(&self) -> f64 {
        (self.up_count as f64 - self.dn_count as f64) / self.spins.len() as f64
    }

    pub fn magnetization(&self) -> f64 {
        self.spins.iter().sum()
    }
}

/// Count buyers and sellers: an agent is a buyer iff its spin is > 0 and a
/// seller iff < 0, for every spin space (intermediate discrete states count
/// with weight one).
pub fn side_counts(spins: &[f64]) -> (usize, usize) {
    let mut up = 0usize;
    let mut dn = 0usize;
    for &v in spins {
        if v > 0.0 {
            up += 1;
        } else if v < 0.0 {
            dn += 1;
        }
    }
    (up, dn)
}

/// Buyer and seller fractions of a spin configuration.
pub fn count_sides(spins: &[f64]) -> (f64, f64) {
    let (up, dn) = side_counts(spins);
    let n = spins.len() as f64;
    (up as f64 / n, dn as f64 / n)
}

/// Energy of putting `value` on site `i` against the frozen `snapshot`:
/// `value * (-J * sum of neighbor spins) + sign * a * value * (n_up - n_dn)
///  - H * value`, with the sign set by `params.trend`.
pub fn agent_energy(
    snapshot: &MarketState,
    i: usize,
    value: f64,
    graph: &NeighborGraph,
    params: &ModelParams,
    h: f64,
) -> Result<f64> {
    if !params.spin_space.contains(value) {
        return Err(Error::ValueOutsideSpinSpace {
            value,
            space: params.spin_space.to_string(),
        });
    }
    let nbr_sum: f64 = graph
        .neighbors(i)
        .iter()
        .map(|&j| snapshot.spins[j as usize])
        .sum();
    Ok(value * local_field(nbr_sum, snapshot.imbalance(), params, h))
}

/// The factor multiplying the spin value in the agent energy.
#[inline]
pub(crate) fn local_field(nbr_sum: f64, imbalance: f64, params: &ModelParams, h: f64) -> f64 {
    -params.j * nbr_sum + params.coupling.sign() * params.a * imbalance - h
}

/// Total energy of a configuration; the pairwise imitation term is halved
/// so each edge is counted once, while the global and field terms are
/// per-agent couplings summed once each.
pub fn total_energy(state: &MarketState, graph: &NeighborGraph, params: &ModelParams, h: f64) -> f64 {
    let imbalance = state.imbalance();
    let mut pair_sum = 0.0;
    let mut m_total = 0.0;
    for i in 0..state.spins.len() {
        let si = state.spins[i];
        m_total += si;
        if si != 0.0 {
            let nbr_sum: f64 = graph
                .neighbors(i)
                .iter()
                .map(|&j| state.spins[j as usize])
                .sum();
            pair_sum += si * nbr_sum;
        }
    }
    -0.5 * params.j * pair_sum + (params.coupling.sign() * params.a * imbalance - h) * m_total
}

/// Market price from the buyer/seller fractions: `P = a*(n_up - n_dn) + A`.
pub fn price(n_up: f64, n_dn: f64, a: f64, clearing_price: f64) -> f64 {
    a * (n_up - n_dn) + clearing_price
}

/// Gross return `(P_t - P_prev) / P_prev`.
pub fn gross_return(p_t: f64, p_prev: f64) -> Result<f64> {
    if p_prev == 0.0 {
        return Err(Error::UndefinedReturn);
    }
    Ok((p_t - p_prev) / p_prev)
}
