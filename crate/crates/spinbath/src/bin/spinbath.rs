use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinbath::decoherence::trajectory;
use spinbath::error::Error;
use spinbath::quantumness::quantumness_series;
use spinbath::sweep::{
    self, emit, fmt_value, parse_config, preset, preset_names, GridSpec, OutputFormat,
};
use spinbath::{BathParams, BellDiagonalState, PulseConfig, TimeGrid};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Qubit dephasing in a thermal Ising spin bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a single trajectory and write t, F, |F|, L (and Q with a state)
    Trajectory(TrajectoryArgs),
    /// Run a parameter sweep from a config file or a named preset
    Sweep(SweepArgs),
    /// Run the randomized oracle comparison suites
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct TrajectoryArgs {
    /// Bath size N (even)
    #[arg(long)]
    n_spins: usize,
    /// Transverse field h
    #[arg(long)]
    h: f64,
    /// Nearest-neighbour coupling J
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// Qubit-bath coupling
    #[arg(long)]
    epsilon: f64,
    /// Qubit level splitting
    #[arg(long, default_value_t = 0.0)]
    f: f64,
    /// Bath temperature (Boltzmann constant 1)
    #[arg(long)]
    temperature: f64,
    /// Initial state coefficients c1,c2,c3; adds a quantumness column
    #[arg(long, value_delimiter = ',', num_args = 3)]
    state: Option<Vec<f64>>,
    /// Pulse cycle time; enables the bang-bang pulse train
    #[arg(long)]
    pulse_period: Option<f64>,
    /// Time horizon (default 2N/J)
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points (default 20 per unit Jt)
    #[arg(long)]
    points: Option<usize>,
    /// Output file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (fig2a, fig2b, fig3a, fig3b, fig3c, fig5a, fig5b)
    #[arg(long)]
    preset: Option<String>,
    /// Output file
    #[arg(long)]
    out: PathBuf,
    /// Output format
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Override the grid horizon
    #[arg(long)]
    t_max: Option<f64>,
    /// Override the number of grid points
    #[arg(long)]
    points: Option<usize>,
    /// Override the extrema detection threshold
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    /// RNG seed for the randomized suites
    #[arg(long, default_value_t = 20260810)]
    seed: u64,
    /// Parameter sets per bath size in the decoherence suite
    #[arg(long, default_value_t = 20)]
    sets: usize,
    /// Random times per parameter set
    #[arg(long, default_value_t = 10)]
    times: usize,
    /// Random states in the quantumness suite
    #[arg(long, default_value_t = 100)]
    states: usize,
}

fn run_trajectory(args: TrajectoryArgs) -> Result<(), Error> {
    let params = BathParams::with_temperature(
        args.n_spins,
        args.h,
        args.j,
        args.epsilon,
        args.f,
        args.temperature,
    )?;
    let t_max = args.t_max.unwrap_or(2.0 * args.n_spins as f64 / args.j);
    let points = args.points.unwrap_or(((20.0 * t_max).round() as usize).max(2));
    let grid = TimeGrid::uniform(t_max, points)?;
    let pulses = match args.pulse_period {
        Some(p) => PulseConfig::with_period(p)?,
        None => PulseConfig::off(),
    };
    let state = match args.state.as_deref() {
        Some([c1, c2, c3]) => Some(BellDiagonalState::new(*c1, *c2, *c3)?),
        Some(_) => return Err(Error::Config("--state needs exactly c1,c2,c3".into())),
        None => None,
    };
    let traj = trajectory(&params, &grid, &pulses)?;
    let q = state.map(|s| quantumness_series(&s, traj.magnitude()));

    let mut out = String::from("t,re,im,magnitude,echo");
    if q.is_some() {
        out.push_str(",quantumness");
    }
    out.push('\n');
    for (i, &t) in traj.times().iter().enumerate() {
        let v = traj.values()[i];
        out.push_str(&format!(
            "{},{},{},{},{}",
            fmt_value(t),
            fmt_value(v.re),
            fmt_value(v.im),
            fmt_value(traj.magnitude()[i]),
            fmt_value(traj.loschmidt_echo()[i])
        ));
        if let Some(q) = &q {
            out.push_str(&format!(",{}", fmt_value(q[i])));
        }
        out.push('\n');
    }
    fs::write(&args.out, out)
        .map_err(|e| Error::Config(format!("cannot write '{}': {e}", args.out.display())))?;
    Ok(())
}

fn run_sweep_cmd(args: SweepArgs) -> Result<(), Error> {
    let text = match (&args.config, &args.preset) {
        (Some(path), None) => fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read '{}': {e}", path.display())))?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset '{name}'; available: {}",
                    preset_names().join(", ")
                ))
            })?
            .to_string(),
        _ => return Err(Error::Config("give exactly one of --config or --preset".into())),
    };
    let mut spec = parse_config(&text)?;
    if args.t_max.is_some() || args.points.is_some() {
        let (cur_t_max, cur_points) = match spec.grid {
            GridSpec::Explicit { t_max, points } => (Some(t_max), Some(points)),
            GridSpec::Auto => (None, None),
        };
        let t_max = args.t_max.or(cur_t_max).ok_or_else(|| {
            Error::Config("--points without --t-max needs an explicit [grid] in the config".into())
        })?;
        let points = args
            .points
            .or(cur_points)
            .unwrap_or(((20.0 * t_max).round() as usize).max(2));
        spec.grid = GridSpec::Explicit { t_max, points };
    }
    if let Some(threshold) = args.threshold {
        spec.threshold = threshold;
    }
    let format = OutputFormat::from_token(&args.format)
        .ok_or_else(|| Error::Config(format!("unknown format '{}'", args.format)))?;

    let table = match args.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| sweep::run_sweep(&spec))?
        }
        None => sweep::run_sweep(&spec)?,
    };
    emit(&table, &spec, format, &args.out, VERSION)
}

fn run_oracle_check(args: OracleArgs) -> Result<(), Error> {
    let dec = spinbath::oracle::decoherence_suite(args.seed, args.sets, args.times)?;
    println!("{dec}");
    let q = spinbath::oracle::quantumness_suite(args.seed, args.states)?;
    println!("{q}");
    if dec.passed() && q.passed() {
        Ok(())
    } else {
        Err(Error::Computation {
            t: f64::NAN,
            message: "oracle comparison exceeded tolerance".into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Trajectory(args) => run_trajectory(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::OracleCheck(args) => run_oracle_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
