//! C ABI for the marketspin simulator: opaque handles, status codes, and
//! plain-data row structs. The header is generated by cbindgen into
//! `include/marketspin.h` at build time.
//!
//! Conventions: constructors return a status and write the handle through
//! an out-pointer; every handle has a matching `_free` that accepts null;
//! accessors on null handles return an error status (or a sentinel for
//! scalar getters).

use std::sync::Arc;

use marketspin::dynamics::{run_market, RunConfig, TimeSeries, UpdateMode};
use marketspin::lattice::NeighborGraph;
use marketspin::meanfield::{mf_run, MeanFieldParams, MeanFieldTrajectory};
use marketspin::model::{
    FieldSchedule, FieldSegment, GlobalCoupling, ModelParams, SpinSpace,
};
use marketspin::observables::thermal_stats;

/// Result codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    /// A parameter failed validation (bad sizes, fractions, temperatures).
    InvalidArgument = 1,
    /// The simulation itself failed.
    RuntimeError = 2,
    /// A required pointer was null.
    NullPointer = 3,
}

/// Opaque interaction network.
pub struct MsGraph(Arc<NeighborGraph>);

/// Opaque per-sweep record of one market run.
pub struct MsSeries(TimeSeries);

/// Opaque mean-field trajectory.
pub struct MsMfTrajectory(MeanFieldTrajectory);

/// Spin-space selector for `MsRunParams`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsSpinKind {
    /// Integer states -S..=S; set `s`.
    Discrete = 0,
    /// Real states in [-1, 1]; `s` is ignored.
    Continuous = 1,
}

/// Energetic back-action of the buyer/seller imbalance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsFeedback {
    Contrarian = 0,
    Herding = 1,
    /// Imbalance only scales the price (reference behavior).
    PriceOnly = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsUpdateMode {
    Snapshot = 0,
    InPlace = 1,
}

/// Market-run parameters. At most one boost pulse is expressible here;
/// richer schedules are a CLI/config feature.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsRunParams {
    pub spin_kind: MsSpinKind,
    /// Discrete amplitude S (>= 1); ignored for continuous spins.
    pub s: u32,
    pub j: f64,
    pub a: f64,
    pub clearing_price: f64,
    pub temperature: f64,
    pub feedback: MsFeedback,
    pub mode: MsUpdateMode,
    pub n_sweeps: u64,
    pub f_up: f64,
    pub f_dn: f64,
    pub seed: u64,
    /// When true, apply `pulse_h` on sweeps [pulse_t1, pulse_t2).
    pub has_pulse: bool,
    pub pulse_t1: u64,
    pub pulse_t2: u64,
    pub pulse_h: f64,
}

/// One row of a market time series.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsSeriesRow {
    pub t: u64,
    pub energy: f64,
    pub m_total: f64,
    pub n_up: f64,
    pub n_dn: f64,
    pub price: f64,
    pub ret: f64,
    pub field: f64,
}

/// Per-agent thermal averages.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsThermalStats {
    pub temperature: f64,
    pub e_mean: f64,
    pub c_v: f64,
    pub m_mean: f64,
    pub chi: f64,
}

/// Two-community mean-field parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsMfParams {
    pub j1: f64,
    pub j2: f64,
    pub k12: f64,
    pub k21: f64,
    pub a: f64,
    pub temperature: f64,
    pub m1: u32,
    pub m2: u32,
    pub s1_0: f64,
    pub s2_0: f64,
    /// Divide the price coupling by T like the j/k couplings.
    pub a_scaled: bool,
    pub price_scale: f64,
    pub clearing_price: f64,
}

/// One row of a mean-field trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsMfRow {
    pub t: u64,
    pub s1: f64,
    pub s2: f64,
    pub price: f64,
}

/// Build a periodic FCC lattice of `4 * l^3` sites.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_fcc(l: u32, out: *mut *mut MsGraph) -> MsStatus {
    if out.is_null() {
        return MsStatus::NullPointer;
    }
    match NeighborGraph::build_fcc(l) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(MsGraph(Arc::new(g))));
            MsStatus::Ok
        }
        Err(_) => MsStatus::InvalidArgument,
    }
}

/// Build a graph from `n_edges` undirected edges given as 2*n_edges site
/// indices (i0, j0, i1, j1, ...).
///
/// # Safety
/// `edges` must point to `2 * n_edges` readable u32 values (may be null
/// only when `n_edges` is zero); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_custom(
    edges: *const u32,
    n_edges: usize,
    n_sites: usize,
    out: *mut *mut MsGraph,
) -> MsStatus {
    if out.is_null() || (edges.is_null() && n_edges > 0) {
        return MsStatus::NullPointer;
    }
    let pairs: Vec<(u32, u32)> = (0..n_edges)
        .map(|k| (*edges.add(2 * k), *edges.add(2 * k + 1)))
        .collect();
    match NeighborGraph::build_custom(&pairs, n_sites) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(MsGraph(Arc::new(g))));
            MsStatus::Ok
        }
        Err(_) => MsStatus::InvalidArgument,
    }
}

/// Number of sites; 0 for a null graph.
///
/// # Safety
/// `graph` must be null or a live handle from a constructor.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_n_sites(graph: *const MsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.n_sites())
}

/// Degree of one site; -1 on a null graph or out-of-range site.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_degree(graph: *const MsGraph, site: usize) -> i64 {
    match graph.as_ref() {
        Some(g) if site < g.0.n_sites() => g.0.degree(site) as i64,
        _ => -1,
    }
}

/// # Safety
/// `graph` must be null or a live handle; it is consumed.
#[no_mangle]
pub unsafe extern "C" fn ms_graph_free(graph: *mut MsGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

fn build_run_config(graph: &MsGraph, p: &MsRunParams) -> Result<RunConfig, MsStatus> {
    let spin_space = match p.spin_kind {
        MsSpinKind::Discrete => SpinSpace::Discrete { s: p.s },
        MsSpinKind::Continuous => SpinSpace::Continuous,
    };
    let schedule = if p.has_pulse {
        FieldSchedule::new(vec![FieldSegment {
            t_start: p.pulse_t1,
            t_end: p.pulse_t2,
            h: p.pulse_h,
        }])
        .map_err(|_| MsStatus::InvalidArgument)?
    } else {
        FieldSchedule::none()
    };
    let cfg = RunConfig {
        graph: Arc::clone(&graph.0),
        params: ModelParams {
            spin_space,
            j: p.j,
            a: p.a,
            clearing_price: p.clearing_price,
            temperature: p.temperature,
            schedule,
            coupling: match p.feedback {
                MsFeedback::Contrarian => GlobalCoupling::Contrarian,
                MsFeedback::Herding => GlobalCoupling::Herding,
                MsFeedback::PriceOnly => GlobalCoupling::PriceOnly,
            },
        },
        n_sweeps: p.n_sweeps,
        f_up: p.f_up,
        f_dn: p.f_dn,
        seed: p.seed,
        mode: match p.mode {
            MsUpdateMode::Snapshot => UpdateMode::Snapshot,
            MsUpdateMode::InPlace => UpdateMode::InPlace,
        },
    };
    cfg.validate().map_err(|_| MsStatus::InvalidArgument)?;
    Ok(cfg)
}

/// Run the market and hand back the recorded series.
///
/// # Safety
/// `graph` and `params` must be live pointers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_run_market(
    graph: *const MsGraph,
    params: *const MsRunParams,
    out: *mut *mut MsSeries,
) -> MsStatus {
    let (Some(graph), Some(params)) = (graph.as_ref(), params.as_ref()) else {
        return MsStatus::NullPointer;
    };
    if out.is_null() {
        return MsStatus::NullPointer;
    }
    let cfg = match build_run_config(graph, params) {
        Ok(cfg) => cfg,
        Err(status) => return status,
    };
    match run_market(&cfg) {
        Ok(series) => {
            *out = Box::into_raw(Box::new(MsSeries(series)));
            MsStatus::Ok
        }
        Err(_) => MsStatus::RuntimeError,
    }
}

/// Number of recorded rows (sweeps + 1); 0 for null.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_series_len(series: *const MsSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Copy one row out of the series.
///
/// # Safety
/// `series` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_series_row(
    series: *const MsSeries,
    index: usize,
    out: *mut MsSeriesRow,
) -> MsStatus {
    let Some(s) = series.as_ref() else {
        return MsStatus::NullPointer;
    };
    if out.is_null() {
        return MsStatus::NullPointer;
    }
    let Some(r) = s.0.rows().get(index) else {
        return MsStatus::InvalidArgument;
    };
    *out = MsSeriesRow {
        t: r.t,
        energy: r.energy,
        m_total: r.m_total,
        n_up: r.n_up,
        n_dn: r.n_dn,
        price: r.price,
        ret: r.ret,
        field: r.field,
    };
    MsStatus::Ok
}

/// Time averages over rows `t >= discard`.
///
/// # Safety
/// `series` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_series_thermal_stats(
    series: *const MsSeries,
    discard: u64,
    temperature: f64,
    out: *mut MsThermalStats,
) -> MsStatus {
    let Some(s) = series.as_ref() else {
        return MsStatus::NullPointer;
    };
    if out.is_null() {
        return MsStatus::NullPointer;
    }
    match thermal_stats(&s.0, discard, temperature) {
        Ok(st) => {
            *out = MsThermalStats {
                temperature: st.temperature,
                e_mean: st.e_mean,
                c_v: st.c_v,
                m_mean: st.m_mean,
                chi: st.chi,
            };
            MsStatus::Ok
        }
        Err(_) => MsStatus::InvalidArgument,
    }
}

/// # Safety
/// `series` must be null or a live handle; it is consumed.
#[no_mangle]
pub unsafe extern "C" fn ms_series_free(series: *mut MsSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Brillouin response of a 2M+1 state spin.
#[no_mangle]
pub extern "C" fn ms_brillouin(u: f64, m: u32) -> f64 {
    marketspin::meanfield::brillouin(u, m)
}

fn build_mf_params(p: &MsMfParams) -> MeanFieldParams {
    MeanFieldParams {
        j1: p.j1,
        j2: p.j2,
        k12: p.k12,
        k21: p.k21,
        a: p.a,
        temperature: p.temperature,
        m1: p.m1,
        m2: p.m2,
        s1_0: p.s1_0,
        s2_0: p.s2_0,
        a_scaled: p.a_scaled,
        price_scale: p.price_scale,
        clearing_price: p.clearing_price,
    }
}

/// Iterate the two-community map for `steps` steps.
///
/// # Safety
/// `params` must be a live pointer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_mf_run(
    params: *const MsMfParams,
    steps: u64,
    out: *mut *mut MsMfTrajectory,
) -> MsStatus {
    let Some(p) = params.as_ref() else {
        return MsStatus::NullPointer;
    };
    if out.is_null() {
        return MsStatus::NullPointer;
    }
    match mf_run(&build_mf_params(p), steps) {
        Ok(traj) => {
            *out = Box::into_raw(Box::new(MsMfTrajectory(traj)));
            MsStatus::Ok
        }
        Err(_) => MsStatus::InvalidArgument,
    }
}

/// Number of trajectory rows (steps + 1); 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_mf_len(traj: *const MsMfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copy one trajectory row.
///
/// # Safety
/// `traj` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_mf_row(
    traj: *const MsMfTrajectory,
    index: usize,
    out: *mut MsMfRow,
) -> MsStatus {
    let Some(t) = traj.as_ref() else {
        return MsStatus::NullPointer;
    };
    if out.is_null() {
        return MsStatus::NullPointer;
    }
    let Some(r) = t.0.rows().get(index) else {
        return MsStatus::InvalidArgument;
    };
    *out = MsMfRow {
        t: r.t,
        s1: r.s1,
        s2: r.s2,
        price: r.price,
    };
    MsStatus::Ok
}

/// # Safety
/// `traj` must be null or a live handle; it is consumed.
#[no_mangle]
pub unsafe extern "C" fn ms_mf_free(traj: *mut MsMfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn ms_version() -> *const core::ffi::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const core::ffi::c_char
}
