//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them all). The temperature scans are
//! shared across criteria through a lazily-computed context; expect the
//! full suite to take a few minutes of CPU.

use std::sync::{Arc, OnceLock};

use marketspin::dynamics::{
    init_state, metropolis_sweep_in_place, run_market, RunConfig, UpdateMode,
};
use marketspin::lattice::NeighborGraph;
use marketspin::meanfield::{
    self, classify_at_temperature, mf_run, regime_boundaries, MeanFieldParams, Regime,
};
use marketspin::model::{FieldSchedule, GlobalCoupling, ModelParams, SpinSpace};
use marketspin::observables::{
    estimate_tc, find_critical_h, persistence_score, rolling_volatility, temperature_scan,
    PersistenceOptions, PulseSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

const L: u32 = 12;
const SCAN_SWEEPS: u64 = 20_000;
const SCAN_DISCARD: u64 = 10_000;

fn graph() -> Arc<NeighborGraph> {
    static GRAPH: OnceLock<Arc<NeighborGraph>> = OnceLock::new();
    GRAPH
        .get_or_init(|| Arc::new(NeighborGraph::build_fcc(L).expect("fcc")))
        .clone()
}

fn params(space: SpinSpace, a: f64, temperature: f64) -> ModelParams {
    ModelParams {
        spin_space: space,
        j: 1.0,
        a,
        clearing_price: 3.0,
        temperature,
        schedule: FieldSchedule::none(),
        coupling: GlobalCoupling::PriceOnly,
    }
}

#[derive(Clone, Copy)]
enum Model {
    ThreeState,
    FiveState,
    Continuous,
}

impl Model {
    fn space(self) -> SpinSpace {
        match self {
            Model::ThreeState => SpinSpace::Discrete { s: 1 },
            Model::FiveState => SpinSpace::Discrete { s: 2 },
            Model::Continuous => SpinSpace::Continuous,
        }
    }

    fn price_coupling(self) -> f64 {
        match self {
            Model::FiveState => 6.0,
            _ => 3.0,
        }
    }

    /// Temperature grid bracketing the transition, step <= 0.15.
    fn scan_grid(self) -> Vec<f64> {
        let (lo, step, n) = match self {
            Model::ThreeState => (5.0, 0.15, 21),
            Model::FiveState => (19.5, 0.15, 21),
            Model::Continuous => (3.2, 0.03, 21),
        };
        (0..n).map(|i| lo + step * i as f64).collect()
    }

    fn scan_seed(self) -> u64 {
        match self {
            Model::ThreeState => 101,
            Model::FiveState => 102,
            Model::Continuous => 103,
        }
    }
}

struct ScanResult {
    tc: f64,
    uncertainty: f64,
}

/// One scan per model, shared by several criteria. Ordered start (all
/// buyers) so each point relaxes into its phase quickly.
fn scan(model: Model) -> &'static ScanResult {
    fn compute(model: Model) -> ScanResult {
        let base = RunConfig {
            graph: graph(),
            params: params(model.space(), model.price_coupling(), 1.0),
            n_sweeps: SCAN_SWEEPS,
            f_up: 1.0,
            f_dn: 0.0,
            seed: model.scan_seed(),
            mode: UpdateMode::Snapshot,
        };
        let stats = temperature_scan(&base, &model.scan_grid(), SCAN_DISCARD, SCAN_SWEEPS - SCAN_DISCARD)
            .expect("scan");
        let (tc, uncertainty) = estimate_tc(&stats).expect("tc estimate");
        ScanResult { tc, uncertainty }
    }
    static THREE: OnceLock<ScanResult> = OnceLock::new();
    static FIVE: OnceLock<ScanResult> = OnceLock::new();
    static CONT: OnceLock<ScanResult> = OnceLock::new();
    match model {
        Model::ThreeState => THREE.get_or_init(|| compute(Model::ThreeState)),
        Model::FiveState => FIVE.get_or_init(|| compute(Model::FiveState)),
        Model::Continuous => CONT.get_or_init(|| compute(Model::Continuous)),
    }
}

fn report(name: &str, checks: &[(String, bool)]) {
    let pass = checks.iter().all(|(_, ok)| *ok);
    println!(
        "ACCEPTANCE {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    for (label, ok) in checks {
        println!("    [{}] {label}", if *ok { " ok " } else { "FAIL" });
    }
    assert!(pass, "{name} failed; see the lines above");
}

#[test]
fn c01_three_state_critical_temperature() {
    let s = scan(Model::ThreeState);
    let ok = (6.3..=7.1).contains(&s.tc);
    report(
        "c01 three-state T_c",
        &[(
            format!("estimate_tc = {:.4} +- {:.2} in [6.3, 7.1]", s.tc, s.uncertainty),
            ok,
        )],
    );
}

#[test]
fn c02_five_state_critical_temperature() {
    let s = scan(Model::FiveState);
    let ok = (20.3..=21.8).contains(&s.tc);
    report(
        "c02 five-state T_c",
        &[(
            format!("estimate_tc = {:.4} +- {:.2} in [20.3, 21.8]", s.tc, s.uncertainty),
            ok,
        )],
    );
}

#[test]
fn c03_continuous_critical_temperature() {
    let s = scan(Model::Continuous);
    let ok = (3.3..=3.7).contains(&s.tc);
    report(
        "c03 continuous T_c",
        &[(
            format!("estimate_tc = {:.4} +- {:.3} in [3.3, 3.7]", s.tc, s.uncertainty),
            ok,
        )],
    );
}

#[test]
fn c04_market_clearing_above_tc() {
    let mut checks = Vec::new();
    for (name, model, seed) in [
        ("three-state", Model::ThreeState, 41u64),
        ("five-state", Model::FiveState, 42),
        ("continuous", Model::Continuous, 43),
    ] {
        let tc = scan(model).tc;
        let cfg = RunConfig {
            graph: graph(),
            params: params(model.space(), model.price_coupling(), 1.2 * tc),
            n_sweeps: 10_000,
            f_up: 0.6,
            f_dn: 0.4,
            seed,
            mode: UpdateMode::Snapshot,
        };
        let series = run_market(&cfg).expect("run");
        let late = &series.rows()[5_000..];
        let mean_abs =
            late.iter().map(|r| (r.n_up - r.n_dn).abs()).sum::<f64>() / late.len() as f64;
        checks.push((
            format!("{name}: mean |n_up - n_dn| = {mean_abs:.4} < 0.02 at T = 1.2 T_c"),
            mean_abs < 0.02,
        ));
    }
    report("c04 market clearing above T_c", &checks);
}

fn pulse_run(temperature: f64, h: f64, seed: u64) -> bool {
    let mut p = params(SpinSpace::Discrete { s: 1 }, 3.0, temperature);
    p.schedule = FieldSchedule::new(vec![marketspin::model::FieldSegment {
        t_start: 400,
        t_end: 600,
        h,
    }])
    .expect("schedule");
    let cfg = RunConfig {
        graph: graph(),
        params: p,
        n_sweeps: 1_000,
        f_up: 0.4,
        f_dn: 0.6,
        seed,
        mode: UpdateMode::Snapshot,
    };
    let series = run_market(&cfg).expect("run");
    persistence_score(&series, 400, 600, 200, PersistenceOptions::default())
        .expect("score")
        .persistent
}

#[test]
fn c05_pulse_persistence_verdicts() {
    let seeds: Vec<u64> = (1..=7).collect();
    let count = |temperature: f64, h: f64, want: bool| -> usize {
        seeds
            .iter()
            .filter(|&&s| pulse_run(temperature, h, s) == want)
            .count()
    };
    let strong_near = count(6.692, 0.2, true);
    let strong_above = count(7.872, 0.2, false);
    let weak_near = count(6.692, 0.02, false);
    report(
        "c05 pulse persistence",
        &[
            (
                format!("H=0.2 at T=6.692 persistent for {strong_near}/7 seeds (need >= 5)"),
                strong_near >= 5,
            ),
            (
                format!("H=0.2 at T=7.872 non-persistent for {strong_above}/7 seeds (need >= 5)"),
                strong_above >= 5,
            ),
            (
                format!("H=0.02 at T=6.692 non-persistent for {weak_near}/7 seeds (majority)"),
                weak_near * 2 > seeds.len(),
            ),
        ],
    );
}

#[test]
fn c06_critical_boost_brackets() {
    // Probe each model at the same relative depth below T_c that the
    // reference results used, against this run's own T_c estimates.
    let mut checks = Vec::new();
    let cases = [
        ("three-state", Model::ThreeState, 6.692 / 6.6957, 0.01, 0.10, 0.01, (0.02, 0.05)),
        ("five-state", Model::FiveState, 19.308 / 21.051, 0.20, 0.60, 0.02, (0.35, 0.40)),
        ("continuous", Model::Continuous, 3.462 / 3.513, 0.005, 0.06, 0.002, (0.02, 0.025)),
    ];
    for (name, model, depth_ratio, h_lo, h_hi, tol, target) in cases {
        let tc = scan(model).tc;
        let probe_t = depth_ratio * tc;
        let base = RunConfig {
            graph: graph(),
            params: params(model.space(), model.price_coupling(), probe_t),
            n_sweeps: 1_000,
            f_up: 0.4,
            f_dn: 0.6,
            seed: 0,
            mode: UpdateMode::Snapshot,
        };
        let pulse = PulseSpec {
            t1: 400,
            t2: 600,
            horizon: 200,
            opts: PersistenceOptions::default(),
        };
        match find_critical_h(&base, &pulse, h_lo, h_hi, 7, tol) {
            Ok(search) => {
                let (lo, hi) = search.bracket;
                let intersects = lo <= target.1 && hi >= target.0;
                checks.push((
                    format!(
                        "{name}: H_c in [{lo:.4}, {hi:.4}] at T = {probe_t:.3}; target [{}, {}]",
                        target.0, target.1
                    ),
                    intersects,
                ));
            }
            Err(e) => checks.push((format!("{name}: search failed: {e}"), false)),
        }
    }
    report("c06 critical boost brackets", &checks);
}

#[test]
fn c07_volatility_contrast_near_tc() {
    // Five-state model: compare rolling return volatility at T_c against
    // 0.8 T_c (buyer-majority start keeps the price level comparable).
    let tc = scan(Model::FiveState).tc;
    let vol_at = |temperature: f64| -> f64 {
        let mut acc = 0.0;
        for seed in [11u64, 12] {
            let cfg = RunConfig {
                graph: graph(),
                params: params(SpinSpace::Discrete { s: 2 }, 6.0, temperature),
                n_sweeps: 20_000,
                f_up: 0.6,
                f_dn: 0.4,
                seed,
                mode: UpdateMode::Snapshot,
            };
            let series = run_market(&cfg).expect("run");
            let late: Vec<f64> = series.returns()[10_000..].to_vec();
            let vols = rolling_volatility(&late, 50).expect("vol");
            acc += vols.iter().sum::<f64>() / vols.len() as f64;
        }
        acc / 2.0
    };
    let low = vol_at(0.8 * tc);
    let high = vol_at(tc);
    let ratio = high / low;
    report(
        "c07 volatility clustering contrast",
        &[(
            format!("vol(T_c)/vol(0.8 T_c) = {ratio:.2} (need >= 5)"),
            ratio >= 5.0,
        )],
    );
}

#[test]
fn c08_boltzmann_oracle_four_cycle() {
    // In-place Metropolis on a 4-cycle at T = 2 with a = 0, H = 0 must
    // sample the exact Gibbs distribution over the 81 spin-1 states.
    let graph = Arc::new(
        NeighborGraph::build_custom(&[(0, 1), (1, 2), (2, 3), (3, 0)], 4).expect("cycle"),
    );
    let temperature = 2.0;
    let cfg = RunConfig {
        graph: graph.clone(),
        params: params(SpinSpace::Discrete { s: 1 }, 0.0, temperature),
        n_sweeps: 0,
        f_up: 0.25,
        f_dn: 0.25,
        seed: 314,
        mode: UpdateMode::InPlace,
    };

    // Exact enumeration.
    let energy = |spins: &[f64]| -> f64 {
        let edges = [(0usize, 1usize), (1, 2), (2, 3), (3, 0)];
        -edges
            .iter()
            .map(|&(i, j)| spins[i] * spins[j])
            .sum::<f64>()
    };
    let mut exact = vec![0.0f64; 81];
    let mut z = 0.0;
    for (code, slot) in exact.iter_mut().enumerate() {
        let mut c = code;
        let mut spins = [0.0f64; 4];
        for s in &mut spins {
            *s = (c % 3) as f64 - 1.0;
            c /= 3;
        }
        let w = (-energy(&spins) / temperature).exp();
        *slot = w;
        z += w;
    }
    for p in &mut exact {
        *p /= z;
    }

    let index = |spins: &[f64]| -> usize {
        spins
            .iter()
            .rev()
            .fold(0usize, |acc, &s| acc * 3 + (s + 1.0) as usize)
    };

    let mut state = init_state(&cfg);
    let mut rng = ChaCha12Rng::seed_from_u64(2718);
    for _ in 0..10_000 {
        metropolis_sweep_in_place(&mut state, &graph, &cfg.params, 0.0, &mut rng);
    }
    let samples = 1_000_000usize;
    let mut counts = vec![0u64; 81];
    for _ in 0..samples {
        metropolis_sweep_in_place(&mut state, &graph, &cfg.params, 0.0, &mut rng);
        counts[index(state.spins())] += 1;
    }
    let tv = 0.5
        * counts
            .iter()
            .zip(&exact)
            .map(|(&c, &p)| (c as f64 / samples as f64 - p).abs())
            .sum::<f64>();
    report(
        "c08 Boltzmann oracle",
        &[(
            format!("total-variation distance = {tv:.4} (need < 0.01) over 81 states"),
            tv < 0.01,
        )],
    );
}

fn reference_mf(a_scaled: bool) -> MeanFieldParams {
    MeanFieldParams {
        j1: 1.0,
        j2: 0.5,
        k12: 1.0,
        k21: -0.5,
        a: 5.0,
        temperature: 1.0,
        m1: 1,
        m2: 1,
        s1_0: 1.0,
        s2_0: -1.0,
        a_scaled,
        price_scale: 5.0,
        clearing_price: 3.0,
    }
}

fn mf_variant_checks(a_scaled: bool) -> Vec<(String, bool)> {
    let p = reference_mf(a_scaled);
    let tag = if a_scaled { "a/T" } else { "literal a" };
    let mut checks = Vec::new();

    let classify = |t: f64| classify_at_temperature(&p, t, 2000, 500, 1e-3);
    let expect = |t: f64, want: Regime| -> (String, bool) {
        match classify(t) {
            Ok(rep) => (
                format!("[{tag}] T={t}: {} (want {want})", rep.regime),
                rep.regime == want,
            ),
            Err(e) => (format!("[{tag}] T={t}: {e} (want {want})"), false),
        }
    };
    checks.push(expect(4.98, Regime::Ordered));
    checks.push(expect(6.78, Regime::Oscillating));
    checks.push(expect(10.82, Regime::Oscillating));
    checks.push(expect(12.62, Regime::Clearing));

    let mut clearing_p = p.clone();
    clearing_p.temperature = 12.62;
    match mf_run(&clearing_p, 2000) {
        Ok(traj) => {
            let last = traj.rows().last().copied().expect("rows");
            let ok = last.s1.abs() < 1e-3 && last.s2.abs() < 1e-3;
            checks.push((
                format!(
                    "[{tag}] |s| at t=2000, T=12.62: ({:.2e}, {:.2e}) < 1e-3",
                    last.s1.abs(),
                    last.s2.abs()
                ),
                ok,
            ));
        }
        Err(e) => checks.push((format!("[{tag}] trajectory failed: {e}"), false)),
    }

    match regime_boundaries(&p, 4.0, 13.0, 0.05) {
        Ok((tc1, tc2)) => {
            checks.push((
                format!("[{tag}] T_c1 = {tc1:.3} in [4.7, 5.3]"),
                (4.7..=5.3).contains(&tc1),
            ));
            checks.push((
                format!("[{tag}] T_c2 = {tc2:.3} in [11.6, 12.6]"),
                (11.6..=12.6).contains(&tc2),
            ));
        }
        Err(e) => checks.push((format!("[{tag}] regime_boundaries: {e}"), false)),
    }
    checks
}

#[test]
fn c09_mean_field_regimes() {
    // The update equations are tried exactly as written (price coupling
    // unscaled) and then with the a/T toggle; the criterion passes if
    // either variant reproduces the reference regime structure.
    let literal = mf_variant_checks(false);
    let literal_pass = literal.iter().all(|(_, ok)| *ok);
    let scaled = mf_variant_checks(true);
    let scaled_pass = scaled.iter().all(|(_, ok)| *ok);

    let verdict = if literal_pass {
        "literal-a variant PASSES"
    } else if scaled_pass {
        "a/T variant PASSES (literal failed)"
    } else {
        "NEITHER variant reproduces the reference regimes"
    };
    let mut checks: Vec<(String, bool)> = Vec::new();
    checks.extend(literal);
    checks.extend(scaled);
    checks.push((format!("variant verdict: {verdict}"), literal_pass || scaled_pass));
    report("c09 mean-field regimes", &checks);
}

/// Direct ratio-of-sums evaluation of the group response.
fn ratio_of_sums(u: f64, m: u32) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for s in -(m as i64)..=(m as i64) {
        let w = ((s as f64) * u).exp();
        num += s as f64 * w;
        den += w;
    }
    num / den
}

/// Spectral radius of the map's Jacobian at the origin.
fn origin_spectral_radius(p: &MeanFieldParams) -> f64 {
    let t = p.temperature;
    let a = if p.a_scaled { p.a / t } else { p.a };
    let b1 = (p.m1 * (p.m1 + 1)) as f64 / 3.0;
    let b2 = (p.m2 * (p.m2 + 1)) as f64 / 3.0;
    let m11 = b1 * (p.j1 / t - a);
    let m12 = b1 * (p.k12 / t + a);
    let m21 = b2 * (p.k21 / t - a);
    let m22 = b2 * (p.j2 / t + a);
    let tr = m11 + m22;
    let det = m11 * m22 - m12 * m21;
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (0.5 * (tr + s)).abs().max((0.5 * (tr - s)).abs())
    } else {
        det.sqrt()
    }
}

#[test]
fn c10_brillouin_suite() {
    let mut checks = Vec::new();

    // Oddness, boundedness, monotonicity, zero at zero.
    let mut worst_odd = 0.0f64;
    let mut monotone = true;
    let mut bounded = true;
    for m in 1..=3u32 {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let u = -10.0 + i as f64 * 0.05;
            let b = meanfield::brillouin(u, m);
            worst_odd = worst_odd.max((b + meanfield::brillouin(-u, m)).abs());
            bounded &= b.abs() < m as f64;
            if prev > f64::NEG_INFINITY {
                monotone &= b > prev;
            }
            prev = b;
        }
    }
    checks.push((format!("odd symmetry within {worst_odd:.2e} (need < 1e-12)"), worst_odd < 1e-12));
    checks.push(("strictly increasing on the grid".into(), monotone));
    checks.push(("|B(u)| < M everywhere on the grid".into(), bounded));
    let zero_ok = (1..=3).all(|m| meanfield::brillouin(0.0, m).abs() < 1e-12);
    checks.push(("B(0) = 0 within 1e-12".into(), zero_ok));

    // Ratio-of-sums equivalence on 100 random arguments.
    let mut stream = marketspin::rng::SplitMix64::new(90210);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u = stream.next_f64() * 12.0 - 6.0;
        let m = 1 + stream.next_below(3) as u32;
        worst = worst.max((ratio_of_sums(u, m) - meanfield::brillouin(u, m)).abs());
    }
    checks.push((
        format!("ratio-of-sums vs closed form within {worst:.2e} (need < 1e-10)"),
        worst < 1e-10,
    ));

    // Origin stability question: analytic Jacobian vs iterating the map
    // from a tiny perturbation, on 20 random parameter sets.
    let mut agreements = 0;
    let mut tested = 0;
    while tested < 20 {
        let p = MeanFieldParams {
            j1: stream.next_f64() * 4.0 - 2.0,
            j2: stream.next_f64() * 4.0 - 2.0,
            k12: stream.next_f64() * 4.0 - 2.0,
            k21: stream.next_f64() * 4.0 - 2.0,
            a: stream.next_f64() * 2.0,
            temperature: 0.4 + stream.next_f64() * 4.0,
            m1: 1 + stream.next_below(2) as u32,
            m2: 1 + stream.next_below(2) as u32,
            s1_0: 1e-6,
            s2_0: -1e-6,
            a_scaled: stream.next_below(2) == 0,
            price_scale: 1.0,
            clearing_price: 3.0,
        };
        let rho = origin_spectral_radius(&p);
        if (rho - 1.0).abs() < 0.05 {
            continue; // marginal cases are dominated by nonlinearities
        }
        tested += 1;
        let traj = mf_run(&p, 2000).expect("mf run");
        let last = traj.rows().last().expect("rows");
        let grew = last.s1.abs().max(last.s2.abs()) > 1e-3;
        let decayed = last.s1.abs().max(last.s2.abs()) < 1e-9;
        let verdict_stable = if grew {
            false
        } else if decayed {
            true
        } else {
            // Neither clearly grew nor vanished; compare magnitudes.
            last.s1.abs().max(last.s2.abs()) < 1e-6
        };
        if verdict_stable == (rho < 1.0) {
            agreements += 1;
        }
    }
    checks.push((
        format!("origin stability matches the Jacobian verdict on {agreements}/20 random sets"),
        agreements == 20,
    ));

    report("c10 Brillouin suite", &checks);
}

#[test]
fn c11_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_marketspin");
    let dir = tempfile::tempdir().expect("tempdir");
    let config_path = dir.path().join("exp.cfg");
    std::fs::write(
        &config_path,
        "model.spin = discrete\nmodel.s = 1\nmodel.j = 1\nmodel.a = 3\nlattice.l = 2\n\
         run.sweeps = 300\nrun.temperature = 6.0\nrun.f_up = 0.6\nrun.f_dn = 0.4\n\
         run.seed = 9\nschedule.0 = 50 100 0.2\nscan.t_min = 5.5\nscan.t_max = 6.5\nscan.t_step = 0.5\n",
    )
    .expect("write config");

    let run = |cmd: &str, out: &str| -> Vec<(String, Vec<u8>)> {
        let out_dir = dir.path().join(out);
        let status = std::process::Command::new(bin)
            .args([
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
                "--threads",
                "1",
                cmd,
            ])
            .status()
            .expect("spawn");
        assert!(status.success(), "{cmd} failed");
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out_dir)
            .expect("read out dir")
            .map(|e| {
                let e = e.expect("entry");
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).expect("read file"),
                )
            })
            .collect();
        files.sort();
        files
    };

    let mut checks = Vec::new();
    for cmd in ["run", "scan"] {
        let a = run(cmd, &format!("{cmd}_a"));
        let b = run(cmd, &format!("{cmd}_b"));
        let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
        checks.push((
            format!("`{cmd}` twice is byte-identical across {names:?}"),
            a == b,
        ));
    }
    report("c11 CLI determinism", &checks);
}
