//! `marketspin` command line: every experiment class as a subcommand,
//! CSV artifacts plus a reproducibility manifest per run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use marketspin::config::ExperimentConfig;
use marketspin::dynamics::{run_market, RunConfig, UpdateMode};
use marketspin::error::Error;
use marketspin::meanfield;
use marketspin::model::{GlobalCoupling, SpinSpace};
use marketspin::observables;
use marketspin::output::{self, Manifest, PersistenceRow, RegimeRow};

#[derive(Parser)]
#[command(name = "marketspin", version, about = "Spin-agent market simulator")]
struct Cli {
    /// Experiment config file (key = value lines; see README for the schema)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override run.seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSVs and the manifest
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Bound the number of worker threads for replicas and grid points
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Single market run; writes series.csv
    Run,
    /// Temperature scan with a critical-temperature estimate; writes scan.csv
    Scan,
    /// Boost pulse with a persistence verdict; writes series.csv and persistence.csv
    Pulse,
    /// Bisect the critical boost strength; writes persistence.csv
    HcSearch,
    /// Mean-field trajectory; writes mft.csv
    Mft,
    /// Mean-field regime scan with boundary estimates; writes mft_scan.csv
    MftScan,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("error: {}", one_line(&e.to_string()));
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) => {
            eprintln!("error: I/O failure: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            ExitCode::from(1)
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.lines().next().unwrap_or("unknown error").to_string()
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let threads = rayon::current_num_threads();
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("missing required flag --config <path>".into()))?;
    let text = std::fs::read_to_string(config_path)?;
    let cfg = ExperimentConfig::parse(&text)?;
    std::fs::create_dir_all(&cli.out)?;

    match cli.command {
        Command::Run => cmd_run(&cfg, cli, threads),
        Command::Scan => cmd_scan(&cfg, cli, threads),
        Command::Pulse => cmd_pulse(&cfg, cli, threads),
        Command::HcSearch => cmd_hc_search(&cfg, cli, threads),
        Command::Mft => cmd_mft(&cfg, cli, threads),
        Command::MftScan => cmd_mft_scan(&cfg, cli, threads),
    }
}

fn write(out_dir: &Path, name: &str, content: &str) -> Result<(), Error> {
    std::fs::write(out_dir.join(name), content)?;
    Ok(())
}

/// Every resolved value that feeds a market run, echoed into the manifest.
fn push_run_config(m: &mut Manifest, rc: &RunConfig, discard: Option<u64>) {
    match rc.params.spin_space {
        SpinSpace::Discrete { s } => {
            m.push("model.spin", "discrete");
            m.push("model.s", s.to_string());
        }
        SpinSpace::Continuous => m.push("model.spin", "continuous"),
    }
    m.push("model.j", rc.params.j.to_string());
    m.push("model.a", rc.params.a.to_string());
    m.push("model.clearing_price", rc.params.clearing_price.to_string());
    m.push(
        "model.feedback",
        match rc.params.coupling {
            GlobalCoupling::Contrarian => "contrarian",
            GlobalCoupling::Herding => "herding",
            GlobalCoupling::PriceOnly => "price_only",
        },
    );
    if let marketspin::lattice::GraphKind::Fcc { linear_size } = rc.graph.kind() {
        m.push("lattice.l", linear_size.to_string());
    }
    m.push("run.sweeps", rc.n_sweeps.to_string());
    if let Some(d) = discard {
        m.push("run.discard", d.to_string());
    }
    m.push("run.f_up", rc.f_up.to_string());
    m.push("run.f_dn", rc.f_dn.to_string());
    m.push(
        "run.mode",
        match rc.mode {
            UpdateMode::Snapshot => "snapshot",
            UpdateMode::InPlace => "in_place",
        },
    );
    for (i, seg) in rc.params.schedule.segments().iter().enumerate() {
        m.push(
            &format!("schedule.{i}"),
            format!("{} {} {}", seg.t_start, seg.t_end, seg.h),
        );
    }
}

fn push_mf_params(m: &mut Manifest, p: &meanfield::MeanFieldParams, with_temperature: bool) {
    m.push("mf.j1", p.j1.to_string());
    m.push("mf.j2", p.j2.to_string());
    m.push("mf.k12", p.k12.to_string());
    m.push("mf.k21", p.k21.to_string());
    m.push("mf.a", p.a.to_string());
    if with_temperature {
        m.push("mf.temperature", p.temperature.to_string());
    }
    m.push("mf.m1", p.m1.to_string());
    m.push("mf.m2", p.m2.to_string());
    m.push("mf.s1_0", p.s1_0.to_string());
    m.push("mf.s2_0", p.s2_0.to_string());
    m.push("mf.a_scaled", p.a_scaled.to_string());
    m.push("mf.price_scale", p.price_scale.to_string());
    m.push("mf.clearing_price", p.clearing_price.to_string());
}

fn cmd_run(cfg: &ExperimentConfig, cli: &Cli, threads: usize) -> Result<(), Error> {
    let rc = cfg.run_config(cli.seed, None)?;
    let series = run_market(&rc)?;
    write(&cli.out, "series.csv", &output::series_csv(&series))?;

    let mut m = Manifest::new("run", rc.seed, threads);
    m.push("run.temperature", rc.params.temperature.to_string());
    push_run_config(&mut m, &rc, None);
    m.push("result.rows", series.len().to_string());
    m.push_f64("result.final_price", series.rows().last().expect("rows").price);
    write(&cli.out, "manifest", &m.render())
}

fn cmd_scan(cfg: &ExperimentConfig, cli: &Cli, threads: usize) -> Result<(), Error> {
    let grid = cfg.scan_grid()?;
    let rc = cfg.run_config(cli.seed, Some(grid[0]))?;
    let sweeps = rc.n_sweeps;
    let discard = cfg.discard(sweeps)?;
    let measure = sweeps - discard;
    let stats = observables::temperature_scan(&rc, &grid, discard, measure)?;
    write(&cli.out, "scan.csv", &output::scan_csv(&stats))?;

    let mut m = Manifest::new("scan", rc.seed, threads);
    push_run_config(&mut m, &rc, Some(discard));
    m.push(
        "scan.t_list",
        grid.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    match observables::estimate_tc(&stats) {
        Ok((tc, unc)) => {
            m.push_f64("result.tc", tc);
            m.push_f64("result.tc_uncertainty", unc);
        }
        Err(e) => m.push("result.tc_error", one_line(&e.to_string())),
    }
    write(&cli.out, "manifest", &m.render())
}

fn cmd_pulse(cfg: &ExperimentConfig, cli: &Cli, threads: usize) -> Result<(), Error> {
    if cfg.get("schedule.0").is_some() {
        return Err(Error::Config(
            "schedule.* conflicts with the pulse command (the pulse defines the schedule)".into(),
        ));
    }
    let pulse = cfg.pulse_spec()?;
    let h = cfg.pulse_h()?;
    let mut rc = cfg.run_config(cli.seed, None)?;
    rc.params.schedule = marketspin::model::FieldSchedule::new(vec![
        marketspin::model::FieldSegment {
            t_start: pulse.t1,
            t_end: pulse.t2,
            h,
        },
    ])?;
    let series = run_market(&rc)?;
    let report = observables::persistence_score(&series, pulse.t1, pulse.t2, pulse.horizon, pulse.opts)?;
    write(&cli.out, "series.csv", &output::series_csv(&series))?;
    let row = PersistenceRow {
        h,
        temperature: rc.params.temperature,
        report,
    };
    write(&cli.out, "persistence.csv", &output::persistence_csv(&[row]))?;

    let mut m = Manifest::new("pulse", rc.seed, threads);
    m.push("run.temperature", rc.params.temperature.to_string());
    push_run_config(&mut m, &rc, None);
    m.push("pulse.t1", pulse.t1.to_string());
    m.push("pulse.t2", pulse.t2.to_string());
    m.push("pulse.h", h.to_string());
    m.push("pulse.horizon", pulse.horizon.to_string());
    m.push("pulse.retention", pulse.opts.retention_threshold.to_string());
    m.push("pulse.noise_mult", pulse.opts.noise_multiple.to_string());
    m.push("result.persistent", report.persistent.to_string());
    m.push_f64("result.baseline", report.baseline);
    m.push_f64("result.during", report.during);
    m.push_f64("result.after", report.after);
    m.push_f64("result.retention", report.retention.unwrap_or(f64::NAN));
    write(&cli.out, "manifest", &m.render())
}

fn cmd_hc_search(cfg: &ExperimentConfig, cli: &Cli, threads: usize) -> Result<(), Error> {
    let pulse = cfg.pulse_spec()?;
    let (h_lo, h_hi, n_seeds, tol) = cfg.hc_bracket()?;
    let rc = cfg.run_config(cli.seed, None)?;
    let search = observables::find_critical_h(&rc, &pulse, h_lo, h_hi, n_seeds, tol)?;

    let mut rows = Vec::new();
    for (h, reports) in &search.probes {
        for report in reports {
            rows.push(PersistenceRow {
                h: *h,
                temperature: rc.params.temperature,
                report: *report,
            });
        }
    }
    write(&cli.out, "persistence.csv", &output::persistence_csv(&rows))?;

    let mut m = Manifest::new("hc-search", rc.seed, threads);
    m.push("run.temperature", rc.params.temperature.to_string());
    push_run_config(&mut m, &rc, None);
    m.push("pulse.t1", pulse.t1.to_string());
    m.push("pulse.t2", pulse.t2.to_string());
    m.push("pulse.horizon", pulse.horizon.to_string());
    m.push("hc.h_lo", h_lo.to_string());
    m.push("hc.h_hi", h_hi.to_string());
    m.push("hc.seeds", n_seeds.to_string());
    m.push("hc.tol", tol.to_string());
    m.push_f64("result.hc_lo", search.bracket.0);
    m.push_f64("result.hc_hi", search.bracket.1);
    write(&cli.out, "manifest", &m.render())
}

fn cmd_mft(cfg: &ExperimentConfig, cli: &Cli, threads: usize) -> Result<(), Error> {
    let p = cfg.mf_params(None)?;
    let steps = cfg.mf_steps()?;
    let tail = cfg.mf_tail()?;
    let tol = cfg.mf_tol()?;
    let traj = meanfield::mf_run(&p, steps)?;
    write(&cli.out, "mft.csv", &output::mft_csv(&traj))?;

    let mut m = Manifest::new("mft", cli.seed.unwrap_or(0), threads);
    push_mf_params(&mut m, &p, true);
    m.push("mf.steps", steps.to_string());
    m.push("mf.tail", tail.to_string());
    m.push("mf.tol", tol.to_string());
    match meanfield::classify_regime(&traj, tail, tol) {
        Ok(report) => {
            m.push("result.regime", report.regime.to_string());
            m.push_f64("result.period", report.period.unwrap_or(f64::NAN));
            m.push_f64("result.amplitude", report.amplitude);
            m.push_f64("result.final_s1", report.final_state.0);
            m.push_f64("result.final_s2", report.final_state.1);
        }
        Err(e) => m.push("result.regime_error", one_line(&e.to_string())),
    }
    write(&cli.out, "manifest", &m.render())
}

fn cmd_mft_scan(cfg: &ExperimentConfig, cli: &Cli, threads: usize) -> Result<(), Error> {
    let grid = cfg.mf_grid()?;
    let p = cfg.mf_params(Some(grid[0]))?;
    let steps = cfg.mf_steps()?;
    let tail = cfg.mf_tail()?;
    let tol = cfg.mf_tol()?;
    let boundary_tol = cfg.mf_boundary_tol()?;

    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        match meanfield::classify_at_temperature(&p, t, steps, tail, tol) {
            Ok(report) => rows.push(RegimeRow {
                temperature: t,
                regime: report.regime.to_string(),
                period: report.period,
                amplitude: report.amplitude,
            }),
            Err(Error::TransientTail) => rows.push(RegimeRow {
                temperature: t,
                regime: "transient".into(),
                period: None,
                amplitude: f64::NAN,
            }),
            Err(e) => return Err(e),
        }
    }
    write(&cli.out, "mft_scan.csv", &output::regime_scan_csv(&rows))?;

    let mut m = Manifest::new("mft-scan", cli.seed.unwrap_or(0), threads);
    push_mf_params(&mut m, &p, false);
    m.push("mf.steps", steps.to_string());
    m.push("mf.tail", tail.to_string());
    m.push("mf.tol", tol.to_string());
    m.push("mf.boundary_tol", boundary_tol.to_string());
    m.push(
        "mf.t_list",
        grid.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    match meanfield::regime_boundaries(&p, grid[0], *grid.last().expect("grid"), boundary_tol) {
        Ok((tc1, tc2)) => {
            m.push_f64("result.tc1", tc1);
            m.push_f64("result.tc2", tc2);
        }
        Err(e) => m.push("result.boundary_error", one_line(&e.to_string())),
    }
    write(&cli.out, "manifest", &m.render())
}
