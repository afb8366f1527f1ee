use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sqcav_cli::config::{Kind, ScenarioConfig};
use sqcav_cli::error::CliError;
use sqcav_cli::figures;
use sqcav_cli::run::{run_scenario, Overrides};

#[derive(Parser)]
#[command(
    name = "sqcav",
    version,
    about = "Two-atom squeezed-cavity simulations: scenario configs in, CSV tables out"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (TOML)
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Directory the CSV (and SVG) files are written into
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweep points
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also render the SVG named in outputs.plot
    #[arg(long)]
    plot: bool,
    /// Override the cavity truncation from the config
    #[arg(long)]
    nmax: Option<usize>,
    /// Override the integrator's relative tolerance
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue scan across an avoided crossing
    Spectrum(RunArgs),
    /// Closed-system dynamics (full or effective Hamiltonian)
    Dynamics(RunArgs),
    /// Open-system dynamics under a chosen dissipator
    Master(RunArgs),
    /// Repeat a scenario over a parameter grid
    Sweep(RunArgs),
    /// Lab-parameter run reported in MHz and microseconds
    PhysicalUnits(RunArgs),
    /// Run a bundled scenario by id
    Reproduce {
        /// Bundled scenario id (see list-figures)
        id: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List bundled scenario ids
    ListFigures,
}

fn expected_kinds(cmd: &Command) -> &'static [Kind] {
    match cmd {
        Command::Spectrum(_) => &[Kind::SpectrumScan],
        Command::Dynamics(_) => &[Kind::UnitaryDynamics, Kind::EffectiveDynamics],
        Command::Master(_) => &[Kind::MasterDynamics],
        Command::Sweep(_) => &[Kind::ParameterSweep],
        Command::PhysicalUnits(_) => &[Kind::PhysicalUnits],
        Command::Reproduce { .. } | Command::ListFigures => &[],
    }
}

fn overrides(common: &CommonArgs) -> Overrides {
    Overrides {
        n_max: common.nmax,
        tolerance: common.tolerance,
        jobs: common.jobs.max(1),
        plot: common.plot,
    }
}

fn run_and_report(cfg: &ScenarioConfig, common: &CommonArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&common.out)
        .map_err(|e| CliError::io(common.out.display().to_string(), e))?;
    let out = run_scenario(cfg, &overrides(common), &common.out)?;
    for line in &out.summary {
        println!("{line}");
    }
    println!("wrote {}", out.csv_path.display());
    if let Some(p) = &out.plot_path {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::ListFigures => {
            for id in figures::ids() {
                println!("{id}");
            }
            Ok(())
        }
        Command::Reproduce { id, common } => {
            let cfg = figures::bundled(id)?;
            run_and_report(&cfg, common)
        }
        cmd => {
            let args = match cmd {
                Command::Spectrum(a)
                | Command::Dynamics(a)
                | Command::Master(a)
                | Command::Sweep(a)
                | Command::PhysicalUnits(a) => a,
                Command::Reproduce { .. } | Command::ListFigures => unreachable!(),
            };
            let cfg = ScenarioConfig::load(&args.config)?;
            let allowed = expected_kinds(cmd);
            if !allowed.contains(&cfg.kind) {
                return Err(CliError::config(
                    "kind",
                    format!(
                        "config declares {}, not accepted by this subcommand",
                        cfg.kind.label()
                    ),
                ));
            }
            run_and_report(&cfg, &args.common)
        }
    }
}

fn main() -> ExitCode {
    // Die silently when the stdout reader goes away (e.g. `sqcav list-figures | head`)
    // instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    }
}
