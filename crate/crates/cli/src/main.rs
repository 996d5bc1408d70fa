//! `coopcensor` command-line harness.

mod run;
mod scenario;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopcensor::Error;

use spec::{ExperimentSpec, Sweep, Task};

#[derive(Parser)]
#[command(name = "coopcensor", version, about = "Censoring thresholds for energy-limited sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact value and threshold tables on the energy lattice.
    SolveExact {
        #[command(flatten)]
        common: Common,
        /// Lattice cap per node, one value for all nodes or one per node.
        #[arg(long, value_delimiter = ',')]
        emax: Option<Vec<u64>>,
        /// Largest lattice the solver may allocate, in cells.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Asymptotic thresholds by the critical-node iteration.
    SolveAsymptotic {
        #[command(flatten)]
        common: Common,
        /// Energy per node (defaults to the scenario batteries).
        #[arg(long, value_delimiter = ',')]
        energy: Option<Vec<f64>>,
    },
    /// Monte Carlo runs of one scenario.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulations over a sweep of network size or transmission cost.
    Experiment {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Sweep values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Asymptotic thresholds and lifetimes of a 2-node network along a quarter circle.
    LifetimeSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e4)]
        radius: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Re-run the spec recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file, or a builder: line:n=..,battery=..,es=..,er=..,et=..;
    /// tree:n=..,seed=..,et_min=..,et_max=..; two-node; single:c0=..,c1=..,mean=..
    #[arg(long)]
    scenario: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    /// Strategies: ns, local, gct, gct:<refresh epochs>, fixed:<mu1>/<mu2>/...
    #[arg(long, value_delimiter = ',', default_value = "ns,local,gct")]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// One run on each of this many random trees (tree builder only).
    #[arg(long)]
    topologies: Option<usize>,
    #[arg(long)]
    max_epochs: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    /// Number of nodes.
    Size,
    /// Transmission cost E_T.
    Et,
    /// E_T / E_R at fixed E_R.
    Ratio,
}

fn base_spec(common: Common, task: Task) -> ExperimentSpec {
    ExperimentSpec {
        scenario: common.scenario,
        task,
        sweep: None,
        strategies: Vec::new(),
        n_runs: 0,
        base_seed: 0,
        topologies: None,
        emax: None,
        budget: None,
        energy: None,
        max_epochs: None,
        output: common.out,
    }
}

fn with_sim(spec: ExperimentSpec, sim: SimArgs) -> ExperimentSpec {
    ExperimentSpec {
        strategies: sim.strategies,
        n_runs: sim.runs,
        base_seed: sim.seed,
        topologies: sim.topologies,
        max_epochs: sim.max_epochs,
        ..spec
    }
}

fn integers(values: &[f64]) -> Result<Vec<u64>, Error> {
    values
        .iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as u64)
            } else {
                Err(Error::InvalidParameter(format!("sweep value {v} must be a non-negative integer")))
            }
        })
        .collect()
}

fn to_spec(command: Command) -> Result<ExperimentSpec, Error> {
    Ok(match command {
        Command::SolveExact { common, emax, budget } => ExperimentSpec {
            emax,
            budget,
            ..base_spec(common, Task::SolveExact)
        },
        Command::SolveAsymptotic { common, energy } => ExperimentSpec {
            energy,
            ..base_spec(common, Task::SolveAsymptotic)
        },
        Command::Simulate { common, sim } => with_sim(base_spec(common, Task::Simulate), sim),
        Command::Experiment { common, sim, axis, values } => {
            let sweep = match axis {
                Axis::Size => Sweep::Size { values: integers(&values)? },
                Axis::Et => Sweep::Et { values: integers(&values)? },
                Axis::Ratio => Sweep::Ratio { values },
            };
            ExperimentSpec {
                sweep: Some(sweep),
                ..with_sim(base_spec(common, Task::Sweep), sim)
            }
        }
        Command::LifetimeSweep { common, radius, steps } => ExperimentSpec {
            sweep: Some(Sweep::Phi { radius, steps }),
            ..base_spec(common, Task::Sweep)
        },
        Command::Rerun { manifest, out } => {
            let m = spec::load_manifest(&manifest)?;
            ExperimentSpec { output: out, ..m.spec }
        }
    })
}

/// Exit status per error class.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidScenario(_) | Error::InvalidParameter(_) => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::Degenerate(_) | Error::InvalidBracket { .. } | Error::NoConvergence { .. } => 5,
        Error::SliceOutOfRange(_) => 6,
        Error::Io(_) | Error::Json(_) => 7,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = to_spec(cli.command).and_then(|spec| run::execute(&spec).map(|lines| (spec, lines)));
    match result {
        Ok((spec, lines)) => {
            for l in lines {
                println!("{l}");
            }
            println!("wrote {}", spec.output.join(spec::MANIFEST).display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match &e {
                Error::BudgetExceeded { required, .. } => {
                    eprintln!("hint: pass --budget {required} or lower --emax");
                }
                Error::NoConvergence { trace, .. } => {
                    for line in trace.iter().rev().take(6).rev() {
                        eprintln!("  {line}");
                    }
                }
                _ => {}
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
