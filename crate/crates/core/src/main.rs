use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use kinopax::bench::{self, report, Scenario};
use kinopax::{plan, Error, Result};

#[derive(Parser)]
#[command(
    name = "kinopax",
    version,
    about = "Parallel kinodynamic motion planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write the trajectory and run statistics.
    Plan(PlanArgs),
    /// Run the scenario's trials and write per-trial rows, a summary and a cost plot.
    Bench(BenchArgs),
    /// List the bundled scenarios.
    List,
}

#[derive(Args)]
struct Budget {
    /// Bundled scenario name or path to a scenario JSON file.
    #[arg(long)]
    scenario: String,
    /// Worker threads per planning run.
    #[arg(long)]
    workers: Option<usize>,
    /// Wall-clock budget per run, overriding the scenario.
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Iteration budget per run, overriding the scenario.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// Propagation budget per run, overriding the scenario.
    #[arg(long)]
    max_propagations: Option<u64>,
    /// Single worker and no wall-clock budget, so output is reproducible.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    budget: Budget,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    budget: Budget,
    #[arg(long)]
    trials: Option<usize>,
    /// Trials run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn load(b: &Budget) -> Result<Scenario> {
    let mut s = Scenario::load(&b.scenario)?;
    let c = &mut s.config;
    if let Some(w) = b.workers {
        c.workers = w;
    }
    if let Some(ms) = b.time_limit_ms {
        c.t_max = Some(Duration::from_millis(ms));
    }
    if b.max_iterations.is_some() {
        c.max_iterations = b.max_iterations;
    }
    if b.max_propagations.is_some() {
        c.max_propagations = b.max_propagations;
    }
    if b.deterministic {
        c.workers = 1;
        c.t_max = None;
        if c.max_iterations.is_none() && c.max_propagations.is_none() {
            return Err(Error::Config(
                "--deterministic needs an iteration or propagation budget".into(),
            ));
        }
    }
    c.validate()?;
    Ok(s)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::Io {
        context: format!("writing {}", path.display()),
        source: e,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        context: format!("creating {}", dir.display()),
        source: e,
    })
}

fn run_plan(args: &PlanArgs) -> Result<()> {
    let mut scenario = load(&args.budget)?;
    if let Some(seed) = args.seed {
        scenario.config.seed = seed;
    }
    let outcome = plan(&scenario.problem, &scenario.config)?;
    create_dir(&args.out)?;
    match &outcome.trajectory {
        Some(traj) => {
            write(&args.out, "trajectory.csv", &report::trajectory_csv(traj))?;
            write(&args.out, "controls.csv", &report::controls_csv(traj))?;
            println!(
                "{}: solution cost {:.6} after {} iterations ({} nodes)",
                scenario.name, outcome.best.cost, outcome.stats.iterations, outcome.node_count
            );
        }
        None => println!(
            "{}: no solution after {} iterations ({} nodes)",
            scenario.name, outcome.stats.iterations, outcome.node_count
        ),
    }
    write(&args.out, "stats.csv", &report::stats_csv(&outcome))?;
    write(&args.out, "timing.csv", &report::timing_csv(&outcome))?;
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let mut scenario = load(&args.budget)?;
    if let Some(n) = args.trials {
        scenario.n_trials = n;
    }
    let (records, summary) = bench::run_trials(&scenario, args.jobs.max(1))?;
    create_dir(&args.out)?;
    bench::emit_csv(&records, &summary, &args.out.join("trials.csv"))?;
    bench::emit_cost_curve(&records, &scenario.name, &args.out.join("cost_curve.svg"))?;
    println!(
        "{}: {}/{} solved, median first cost {:.4} at {:.1} ms, median final cost {:.4}",
        summary.scenario,
        summary.n_success,
        summary.n_trials,
        summary.median_first_cost,
        summary.median_first_ms,
        summary.median_final_cost
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Bench(a) => run_bench(a),
        Command::List => {
            for name in bench::bundled_names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
