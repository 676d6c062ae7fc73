//! Command-line front end: load a TOML config, apply `--set` overrides, run
//! one scenario, write its CSVs into `--out`.
//!
//! Exit codes: 0 success, 2 config error, 3 infeasible scenario, 1 anything
//! else.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thzlink::atmosphere::AtmosphereError;
use thzlink::channel::{self, ChannelError};
use thzlink::config::{
    self, apply_overrides, AbsScenario, BackhaulScenario, ConfigError, KioskCScenario,
    KioskDScenario, PathLossScenario, RateScenario, ScenarioConfig, SimConfig, WindowsScenario,
};
use thzlink::link::{self, LinkError};
use thzlink::mobility::{alignment_trace, sample_trajectory, MobilityError};
use thzlink::scenarios::{self, ScenarioError, SweptParameter};
use thzlink::{best_coverage_index, report, Band, BeamConfig, LinkEnv};

#[derive(Parser)]
#[command(
    name = "thzlink",
    version,
    about = "Sub-terahertz outdoor link and coverage simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Path loss and absorption spectra over the scan grid at one distance
    Pathloss(RunArgs),
    /// Transmission windows staying under the scan loss threshold
    Windows(RunArgs),
    /// Achievable rate density across band centers
    Rate(RunArgs),
    /// Minimal repeater chain over a street corridor
    Backhaul(RunArgs),
    /// Single-user kiosk throughput versus shared beamwidth
    KioskC(RunArgs),
    /// Multi-user kiosk coverage and the optimal beamwidth
    KioskD(RunArgs),
    /// Aerial base station height and beamwidth optimization
    Abs(RunArgs),
    /// Parse and check a config file without running anything
    ValidateConfig(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Pathloss(a)
            | Command::Windows(a)
            | Command::Rate(a)
            | Command::Backhaul(a)
            | Command::KioskC(a)
            | Command::KioskD(a)
            | Command::Abs(a)
            | Command::ValidateConfig(a) => a,
        }
    }

    /// Scenario kind selected by the subcommand; None for validate-config.
    fn kind(&self) -> Option<&'static str> {
        match self {
            Command::Pathloss(_) => Some("pathloss"),
            Command::Windows(_) => Some("windows"),
            Command::Rate(_) => Some("rate"),
            Command::Backhaul(_) => Some("backhaul"),
            Command::KioskC(_) => Some("kiosk-c"),
            Command::KioskD(_) => Some("kiosk-d"),
            Command::Abs(_) => Some("abs"),
            Command::ValidateConfig(_) => None,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; defaults fill anything omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output CSVs, created if missing
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Master seed; wins over both the config file and --set
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Override one config key, e.g. --set scenario.distance_m=250
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match &e {
            ScenarioError::InfeasibleAtMinimumRange { .. } => 3,
            ScenarioError::Channel(ChannelError::NoFeasibleBand { .. }) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        Failure {
            code: if matches!(e, ChannelError::NoFeasibleBand { .. }) {
                3
            } else {
                1
            },
            message: e.to_string(),
        }
    }
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<AtmosphereError> for Failure {
    fn from(e: AtmosphereError) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<MobilityError> for Failure {
    fn from(e: MobilityError) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let args = cli.command.args();
    let mut tree = load_tree(args.config.as_deref())?;
    apply_overrides(&mut tree, &args.set)?;

    let Some(kind) = cli.command.kind() else {
        // validate-config: the file must carry its own scenario table.
        let mut cfg = SimConfig::from_value(toml::Value::Table(tree))?;
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        cfg.build_env()?;
        cfg.validate_scenario()?;
        return Ok(format!("config ok: scenario {}", cfg.scenario.kind()));
    };

    // The subcommand supplies the kind unless the config already names one.
    let scenario = tree
        .entry("scenario")
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match scenario.as_table_mut() {
        Some(table) => {
            table
                .entry("kind")
                .or_insert_with(|| toml::Value::String(kind.into()));
        }
        None => {
            return Err(ConfigError::Invalid {
                message: "scenario must be a table".into(),
            }
            .into())
        }
    }

    let mut cfg = SimConfig::from_value(toml::Value::Table(tree))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if cfg.scenario.kind() != kind {
        return Err(ConfigError::ScenarioMismatch {
            expected: kind.into(),
            found: cfg.scenario.kind().into(),
        }
        .into());
    }
    cfg.validate_scenario()?;
    let env = cfg.build_env()?;

    fs::create_dir_all(&args.out).map_err(|e| Failure {
        code: 1,
        message: format!("cannot create {}: {e}", args.out.display()),
    })?;

    match &cfg.scenario {
        ScenarioConfig::PathLoss(s) => run_pathloss(&env, s, &args.out),
        ScenarioConfig::Windows(s) => run_windows(&env, s, &args.out),
        ScenarioConfig::Rate(s) => run_rate(&env, s, &args.out),
        ScenarioConfig::Backhaul(s) => run_backhaul(&env, s, &args.out),
        ScenarioConfig::KioskC(s) => run_kiosk_c(&env, s, cfg.seed, &args.out),
        ScenarioConfig::KioskD(s) => run_kiosk_d(&env, s, cfg.seed, &args.out),
        ScenarioConfig::Abs(s) => run_abs(&env, s, cfg.seed, &args.out),
    }
}

fn load_tree(path: Option<&Path>) -> Result<toml::Table, Failure> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    text.parse::<toml::Table>().map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut io::BufWriter<fs::File>) -> io::Result<()>,
) -> Result<(), Failure> {
    let io_failure = |e: io::Error| Failure {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    };
    let mut w = io::BufWriter::new(fs::File::create(path).map_err(io_failure)?);
    write(&mut w)
        .and_then(|()| io::Write::flush(&mut w))
        .map_err(|e| Failure {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        })
}

fn run_pathloss(env: &LinkEnv, s: &PathLossScenario, out: &Path) -> Result<String, Failure> {
    let mut loss_rows = Vec::new();
    let mut k_rows = Vec::new();
    for f in env.scan.frequencies()? {
        let breakdown = channel::total_path_loss(&env.model, &env.atmosphere, f, s.distance_m)?;
        loss_rows.push((f, breakdown));
        k_rows.push((f, env.model.coefficient_at_reference(f)?));
    }
    write_file(&out.join("pathloss.csv"), |w| {
        report::write_pathloss_csv(w, &loss_rows)
    })?;
    write_file(&out.join("absorption_table.csv"), |w| {
        report::write_absorption_table_csv(w, &k_rows)
    })?;
    let (f_best, best) = loss_rows
        .iter()
        .min_by(|a, b| a.1.total_db.total_cmp(&b.1.total_db))
        .expect("scan grid is never empty");
    Ok(format!(
        "pathloss: {} grid points at {} m, minimum total loss {:.2} dB at {:.2} GHz; wrote pathloss.csv, absorption_table.csv",
        loss_rows.len(),
        s.distance_m,
        best.total_db,
        f_best / 1e9
    ))
}

fn run_windows(env: &LinkEnv, s: &WindowsScenario, out: &Path) -> Result<String, Failure> {
    let windows = channel::find_windows(&env.model, &env.atmosphere, s.distance_m, &env.scan)?;
    write_file(&out.join("windows.csv"), |w| {
        report::write_windows_csv(w, &windows)
    })?;
    Ok(format!(
        "windows: {} windows under {} dB at {} m, widest {:.2} GHz; wrote windows.csv",
        windows.len(),
        env.scan.loss_threshold_db,
        s.distance_m,
        channel::max_contiguous_bandwidth_hz(&windows) / 1e9
    ))
}

fn run_rate(env: &LinkEnv, s: &RateScenario, out: &Path) -> Result<String, Failure> {
    let centers = config::inclusive_grid(s.center_start_ghz, s.center_stop_ghz, s.center_step_ghz)?;
    let bandwidth_hz = s.bandwidth_ghz * 1e9;
    let mut rows = Vec::new();
    for center_ghz in centers {
        let band = Band {
            center_hz: center_ghz * 1e9,
            bandwidth_hz,
        };
        let cap = link::capacity_bps(
            &env.model,
            &env.atmosphere,
            &env.hardware,
            band,
            s.distance_m,
            env.subchannel_width_hz,
        )?;
        rows.push((band.center_hz, link::rate_density_gbps_per_ghz(cap, bandwidth_hz)?));
    }
    write_file(&out.join("rate.csv"), |w| report::write_rate_csv(w, &rows))?;
    let (f_best, peak) = rows
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("center grid is never empty");
    Ok(format!(
        "rate: {} band centers at {} m, peak {:.2} Gbps/GHz at {:.2} GHz; wrote rate.csv",
        rows.len(),
        s.distance_m,
        peak,
        f_best / 1e9
    ))
}

fn run_backhaul(env: &LinkEnv, s: &BackhaulScenario, out: &Path) -> Result<String, Failure> {
    let plan = scenarios::plan_backhaul(
        env,
        s.total_distance_m,
        s.required_rate_gbps * 1e9,
        s.required_bandwidth_ghz * 1e9,
    )?;
    write_file(&out.join("backhaul.csv"), |w| {
        report::write_backhaul_csv(w, s.total_distance_m, &plan)
    })?;
    Ok(format!(
        "backhaul: {} m needs {} repeaters, hops of {:.1} m carrying {:.2} Gbps in a {:.2} GHz band at {:.2} GHz; wrote backhaul.csv",
        s.total_distance_m,
        plan.repeater_count,
        plan.hop_distance_m,
        plan.per_hop_rate_bps / 1e9,
        plan.band.bandwidth_hz / 1e9,
        plan.band.center_hz / 1e9
    ))
}

fn run_kiosk_c(env: &LinkEnv, s: &KioskCScenario, seed: u64, out: &Path) -> Result<String, Failure> {
    let grid = s.delta_grid_rad()?;
    let class = config::mobility_class(&s.class)?;
    let seeds = s.trial_seeds(seed);
    let demand_bps = s.demand_gbps * 1e9;
    let curve = scenarios::kiosk_link_curve(
        env,
        &class,
        &grid,
        s.distance_m,
        s.bandwidth_ghz * 1e9,
        &seeds,
    )?;
    let rows: Vec<(f64, f64, usize)> = curve
        .iter()
        .map(|p| {
            let served = p.per_seed_bps.iter().filter(|&&r| r >= demand_bps).count();
            (p.delta_rad, p.mean_throughput_bps, served)
        })
        .collect();
    write_file(&out.join("kiosk.csv"), |w| report::write_kiosk_csv(w, &rows))?;
    let mut files = vec!["kiosk.csv"];
    if s.emit_trajectory {
        // Trace the first trial at the first grid point.
        let trajectory = sample_trajectory(&class, seeds[0]);
        let beam = BeamConfig::along_x(grid[0])?;
        let trace = alignment_trace(
            &trajectory,
            &beam,
            env.alignment.realign_latency_s,
            env.alignment.duration_s,
            env.alignment.timestep_s,
        )?;
        write_file(&out.join("trajectory.csv"), |w| {
            report::write_trajectory_csv(w, &trace)
        })?;
        files.push("trajectory.csv");
    }
    let (best_delta, best_mean, _) = rows
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("beamwidth grid is never empty");
    Ok(format!(
        "kiosk-c: class {} over {} trials, best mean throughput {:.2} Gbps at {:.1} deg; wrote {}",
        class.name,
        seeds.len(),
        best_mean / 1e9,
        best_delta.to_degrees(),
        files.join(", ")
    ))
}

fn run_kiosk_d(env: &LinkEnv, s: &KioskDScenario, seed: u64, out: &Path) -> Result<String, Failure> {
    let grid = s.delta_grid_rad()?;
    let users = s.user_field(seed)?;
    let sweep = scenarios::kiosk_beamwidth_sweep(
        env,
        &users,
        &grid,
        s.bandwidth_ghz * 1e9,
        s.demand_gbps * 1e9,
    )?;
    let rows: Vec<(f64, f64, usize)> = sweep
        .iter()
        .map(|r| {
            let SweptParameter::Beamwidth { delta_rad } = r.parameter else {
                unreachable!("kiosk sweep yields beamwidth cells");
            };
            (delta_rad, r.sum_rate_bps() / users.len() as f64, r.served_count)
        })
        .collect();
    write_file(&out.join("kiosk.csv"), |w| report::write_kiosk_csv(w, &rows))?;
    let i = best_coverage_index(&sweep).expect("validated grid is non-empty");
    Ok(format!(
        "kiosk-d: optimum delta {:.1} deg serves {}/{} users, mean rate {:.2} Gbps; wrote kiosk.csv",
        grid[i].to_degrees(),
        sweep[i].served_count,
        users.len(),
        rows[i].1 / 1e9
    ))
}

fn run_abs(env: &LinkEnv, s: &AbsScenario, seed: u64, out: &Path) -> Result<String, Failure> {
    let heights = s.height_grid_m()?;
    let deltas = s.delta_grid_rad()?;
    let users = s.user_field(seed)?;
    let sweep = scenarios::abs_sweep(
        env,
        &users,
        &heights,
        &deltas,
        s.bandwidth_ghz * 1e9,
        s.demand_gbps * 1e9,
    )?;
    write_file(&out.join("abs.csv"), |w| report::write_abs_csv(w, &sweep))?;
    let i = best_coverage_index(&sweep).expect("validated grids are non-empty");
    let SweptParameter::HeightAndBeamwidth { height_m, delta_rad } = sweep[i].parameter else {
        unreachable!("abs sweep yields height and beamwidth cells");
    };
    Ok(format!(
        "abs: optimum height {} m, delta {:.1} deg serves {}/{} users, sum rate {:.2} Gbps; wrote abs.csv",
        height_m,
        delta_rad.to_degrees(),
        sweep[i].served_count,
        users.len(),
        sweep[i].sum_rate_bps() / 1e9
    ))
}
