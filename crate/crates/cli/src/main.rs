use std::path::PathBuf;
use std::process::ExitCode;

use catlab::{run, CliError, Command, ConfigError, RunConfig, StateLabel};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "catlab", version, about = "Figure-data sweeps for two-mode cat states")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Cmd,
}

/// Flags win over `CATLAB_WORKERS`, which wins over the config file.
#[derive(Args)]
struct Overrides {
    /// JSON run config; unset fields take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "n", global = true)]
    n_particles: Option<usize>,
    #[arg(long = "u", global = true, allow_negative_numbers = true)]
    u_int: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    t_hop: Option<f64>,
    #[arg(long, global = true)]
    state: Option<StateLabel>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta_inv: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    time_factor: Option<f64>,
    #[arg(long, global = true)]
    grid_theta: Option<usize>,
    #[arg(long, global = true)]
    grid_phi: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "CATLAB_WORKERS")]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// P(m) at the configured time.
    Distribution,
    /// Lambda and r against evolution time.
    TimeSweep,
    /// Both states across the temperature grid.
    TempSweep,
    /// F_q/(4N) over measurement axes.
    QfiMap,
    /// Quasi-probability on the (z, phi) cylinder.
    Wigner,
    /// Mean-field trajectories, separatrix and fixed points.
    Classical,
    /// Closed-form two-peak model against mixing angle.
    Catqubit,
    /// Everything above into one directory.
    AllFigures,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Distribution => Command::Distribution,
            Cmd::TimeSweep => Command::TimeSweep,
            Cmd::TempSweep => Command::TempSweep,
            Cmd::QfiMap => Command::QfiMap,
            Cmd::Wigner => Command::Wigner,
            Cmd::Classical => Command::Classical,
            Cmd::Catqubit => Command::CatQubit,
            Cmd::AllFigures => Command::AllFigures,
        }
    }
}

fn resolve(o: Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = o.$field { cfg.$field = v; }
        )*};
    }
    set!(n_particles, u_int, t_hop, state, beta_inv, time_factor, grid_theta, grid_phi, out);
    if o.workers.is_some() {
        cfg.workers = o.workers;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = Command::from(cli.command);
    let result = resolve(cli.overrides)
        .map_err(CliError::from)
        .and_then(|cfg| run(command, &cfg));
    match result {
        Ok(m) => {
            for name in m.outputs.keys() {
                println!("{}", m.config.out.join(name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("catlab {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
