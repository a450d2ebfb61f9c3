//! Command-line front end: single runs, experiment grids, landmark export
//! and the oracle suite.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamp::determinize::determinize;
use lamp::harness::{emit_csv, emit_long, load_problem, run_grid, to_csv, ExperimentConfig, DEFAULT_RUNS};
use lamp::landmarks::{extract_landmarks, LandmarkGraph};
use lamp::model::Problem;
use lamp::oracles::{enumerate_goal_histories, plain_uct, validate_graph, value_iteration, Criterion};
use lamp::planner::{lamp, ExecutionStatus, LampConfig};

#[derive(Parser)]
#[command(name = "lamp", version, about = "Landmark-assisted Monte Carlo planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the planner once and print the executed actions.
    Plan(PlanArgs),
    /// Sweep an alpha x rollouts grid and write CSV statistics.
    Grid(GridArgs),
    /// Extract landmarks and print the graph in DOT format.
    Landmarks(ProblemArgs),
    /// Check the problem against the brute-force oracles.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// PPDDL or JSON file, `fixture:NAME`, `chain:B:D` or `triangle-tireworld:N`.
    #[arg(long)]
    problem: String,
    /// Separate PPDDL domain file for `--problem`.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value_t = 200)]
    budget: u32,
    #[arg(long, default_value_t = 20)]
    depth: u32,
    #[arg(long = "exploration-c", default_value_t = std::f64::consts::SQRT_2)]
    exploration_c: f64,
    #[arg(long, default_value_t = 1.0)]
    kg: f64,
    #[arg(long = "utility-decay", default_value_t = 10.0)]
    utility_decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Tuning {
    fn config(&self, alpha: f64, n_rollouts: u32) -> LampConfig {
        LampConfig {
            n_rollouts,
            budget: self.budget,
            depth: self.depth,
            alpha,
            exploration_c: self.exploration_c,
            k_g: self.kg,
            utility_decay: self.utility_decay,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    rollouts: u32,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', default_values_t = lamp::harness::DEFAULT_ALPHAS)]
    alpha: Vec<f64>,
    /// Comma-separated rollout counts.
    #[arg(long, value_delimiter = ',', default_values_t = lamp::harness::DEFAULT_ROLLOUTS)]
    rollouts: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: u32,
    /// Also write the gnuplot-style long format to this file.
    #[arg(long)]
    long: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Length bound for history enumeration.
    #[arg(long, default_value_t = 10)]
    horizon: usize,
    /// Seeds for the plain-UCT differential check.
    #[arg(long, default_value_t = 10)]
    runs: u32,
    #[arg(long, default_value_t = 30)]
    rollouts: u32,
    #[command(flatten)]
    tuning: Tuning,
}

enum Failure {
    Input(String),
    Planning(String),
}

impl Failure {
    fn input(e: impl ToString) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load(args: &ProblemArgs) -> Result<Problem, Failure> {
    load_problem(&args.problem, args.domain.as_deref()).map_err(Failure::input)
}

/// Extracted landmarks, or the goal-only graph if extraction fails.
fn landmarks_or_goal(p: &Problem) -> LandmarkGraph {
    extract_landmarks(&determinize(p)).unwrap_or_else(|e| {
        eprintln!("warning: {e}; planning without landmarks");
        LandmarkGraph::goal_only(p)
    })
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn plan(args: &PlanArgs) -> Result<(), Failure> {
    let cfg = args.tuning.config(args.alpha, args.rollouts);
    cfg.validate().map_err(Failure::input)?;
    let p = load(&args.problem)?;
    let g = landmarks_or_goal(&p);
    let out = lamp(&p, &g, &cfg).map_err(Failure::input)?;
    let mut text = String::new();
    let status = match out.status {
        ExecutionStatus::Success => "success",
        ExecutionStatus::DeadEnd => "dead-end",
        ExecutionStatus::BudgetExhausted => "budget-exhausted",
    };
    writeln!(text, "; status {status}").unwrap();
    writeln!(text, "; executed {} loop-cost {}", out.executed_cost(), out.cost).unwrap();
    for a in out.actions() {
        writeln!(text, "({})", p.action(*a).name).unwrap();
    }
    write_out(args.problem.out.as_deref(), &text)?;
    if out.is_success() {
        Ok(())
    } else {
        Err(Failure::Planning(format!("run ended with status {status}")))
    }
}

fn grid(args: &GridArgs) -> Result<(), Failure> {
    let cfg = ExperimentConfig {
        alphas: args.alpha.clone(),
        rollouts: args.rollouts.clone(),
        runs: args.runs,
        base_seed: args.tuning.seed,
        planner: args.tuning.config(0.0, 1),
    };
    cfg.validate().map_err(Failure::input)?;
    let p = load(&args.problem)?;
    let g = landmarks_or_goal(&p);
    let cells = run_grid(&p, &g, &cfg).map_err(Failure::input)?;
    match &args.problem.out {
        Some(path) => emit_csv(&cells, path).map_err(Failure::input)?,
        None => print!("{}", to_csv(&cells)),
    }
    if let Some(path) = &args.long {
        emit_long(&cells, path).map_err(Failure::input)?;
    }
    Ok(())
}

fn landmarks(args: &ProblemArgs) -> Result<(), Failure> {
    let p = load(args)?;
    let g = extract_landmarks(&determinize(&p)).map_err(|e| Failure::Planning(e.to_string()))?;
    write_out(args.out.as_deref(), &g.to_dot(&p))
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let base = args.tuning.config(0.0, args.rollouts);
    base.validate().map_err(Failure::input)?;
    let p = load(&args.problem)?;
    let mut report = String::new();
    let mut ok = true;

    match extract_landmarks(&determinize(&p)) {
        Ok(g) => match enumerate_goal_histories(&p, args.horizon) {
            Ok(hs) => {
                let r = validate_graph(&g, &hs);
                ok &= r.is_sound();
                writeln!(
                    report,
                    "landmarks: {} checked, {} orderings, {} bad landmarks, {} bad orderings over {} histories",
                    r.landmarks_checked,
                    r.orderings_checked,
                    r.bad_landmarks.len(),
                    r.bad_orderings.len(),
                    hs.len()
                )
                .unwrap();
            }
            Err(e) => writeln!(report, "landmarks: skipped ({e})").unwrap(),
        },
        Err(e) => writeln!(report, "landmarks: {e}").unwrap(),
    }

    match value_iteration(&p, Criterion::MaxGoalProb, &base) {
        Ok(v) => writeln!(report, "max goal probability: {:.6}", v.value(&p.init).unwrap_or(0.0)).unwrap(),
        Err(e) => writeln!(report, "max goal probability: skipped ({e})").unwrap(),
    }

    let g = LandmarkGraph::goal_only(&p);
    let diverged: Vec<u64> = (0..u64::from(args.runs))
        .map(|i| base.seed.wrapping_add(i))
        .filter(|&seed| {
            let cfg = LampConfig { seed, ..base.clone() };
            lamp(&p, &g, &cfg).ok().map(|o| o.history) != plain_uct(&p, &cfg).ok().map(|o| o.history)
        })
        .collect();
    ok &= diverged.is_empty();
    writeln!(report, "alpha=0 vs plain UCT: {} seeds, diverged {:?}", args.runs, diverged).unwrap();

    write_out(args.problem.out.as_deref(), &report)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Planning("oracle checks failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(a) => plan(a),
        Command::Grid(a) => grid(a),
        Command::Landmarks(a) => landmarks(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Planning(msg)) => {
            eprintln!("lamp: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("lamp: {msg}");
            ExitCode::from(2)
        }
    }
}
