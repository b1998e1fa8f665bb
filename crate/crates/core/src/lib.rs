//! Spin-agent market simulator.
//!
//! Agents sit on an interaction network (a face-centered-cubic lattice by
//! default) and carry a spin that encodes their trading stance: positive to
//! buy, negative to sell, zero to wait. The market evolves by Metropolis
//! Monte Carlo sweeps against a market temperature `T`, with an optional
//! external boost field applied over a window of sweeps. On top of the
//! simulation core there are thermal observables (energy, order parameter,
//! specific heat, susceptibility), critical-temperature estimation, pulse
//! persistence analysis, a bisection search for the critical boost, and a
//! two-community mean-field iterated map with regime classification.
//!
//! The `marketspin` binary exposes every experiment class as a subcommand;
//! see the crate README for the config-file schema and CSV formats.

// Validation guards negate float comparisons on purpose so that NaN is
// rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod meanfield;
pub mod model;
pub mod observables;
pub mod output;
pub mod rng;

pub use dynamics::{run_market, RunConfig, TimeSeries, UpdateMode};
pub use error::Error;
pub use lattice::NeighborGraph;
pub use meanfield::{MeanFieldParams, MeanFieldTrajectory, Regime, RegimeReport};
pub use model::{FieldSchedule, GlobalCoupling, MarketState, ModelParams, SpinSpace};
pub use observables::{PersistenceReport, ThermalStats};
