use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use largespin_cli::config::SpinField;
use largespin_cli::output::render_prediction;
use largespin_cli::{list_scenarios, run_scenario, CliError, InitialState, RunConfig, Scenario};

/// Dissipative dynamics of a large spin in an ohmic bath. Units: T_c = 1.
#[derive(Parser)]
#[command(name = "largespin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write CSV, summary and plot script.
    Run(ConfigArgs),
    /// Print the scenario presets.
    List,
    /// Print rates, equilibria and the beat prediction without integrating.
    Predict(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// Spin size, e.g. 1/2, 2 or 2.5.
    #[arg(long)]
    spin: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    tc: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    omega_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    temperature: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    sample_every: Option<usize>,
    #[arg(long, value_enum)]
    initial_state: Option<InitialState>,
    /// Output path prefix.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl ConfigArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            scenario: self.scenario,
            spin: self.spin.map(SpinField::Text),
            epsilon: self.epsilon,
            tc: self.tc,
            alpha: self.alpha,
            omega_c: self.omega_c,
            temperature: self.temperature,
            t_end: self.t_end,
            dt: self.dt,
            sample_every: self.sample_every,
            initial_state: self.initial_state,
            output: self.output,
        };
        Ok(base.overridden_by(flags))
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::List => print!("{}", list_scenarios()),
        Command::Predict(args) => {
            let run = args.into_config()?.resolve()?;
            print!("{}", render_prediction(&run)?);
        }
        Command::Run(args) => {
            let config = args.into_config()?;
            let run = config.resolve()?;
            let results = run_scenario(&config)?;
            for r in &results {
                for w in &r.warnings {
                    eprintln!("warning: {w}");
                }
                println!("{}", run.csv_path(&r.job).display());
            }
            println!("{}", run.summary_path().display());
            println!("{}", run.plot_path().display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
