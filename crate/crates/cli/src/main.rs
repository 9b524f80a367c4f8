use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deltaline_cli::{
    cmd_logistic, cmd_solve, cmd_table1, cmd_table2, cmd_table3, Algo, RunConfig,
    DEFAULT_C_LIST, DEFAULT_EPS_LIST, LOGISTIC_C_LIST, LOGISTIC_EPS_LIST,
};

#[derive(Debug, Parser)]
#[command(name = "deltaline", version, about = "Certified convex line search benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Target y-gap of the 1-d solvers.
    #[arg(long, global = true, default_value_t = 1e-10)]
    y_tol: f64,

    /// Quasi-exact gap fractions (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    c: Vec<f64>,

    /// Armijo slack values (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Vec<f64>,

    /// Backtracking decay factor.
    #[arg(long, global = true, default_value_t = 0.5)]
    tau: f64,

    /// Seed of the randomized loss.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Query budget of the randomized-loss runs.
    #[arg(long, global = true, default_value_t = 2000)]
    budget: usize,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the region after every solver iteration.
    #[arg(long, global = true)]
    trace: bool,

    /// Benchmark names (repeatable); see `deltaline list`.
    #[arg(long, global = true)]
    benchmark: Vec<String>,

    /// Solver for `solve`.
    #[arg(long, global = true, default_value = "delta-secant")]
    algo: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterations of bisection and Delta-Bisection.
    Table1,
    /// Queries of the four 1-d solvers.
    Table2,
    /// Gradient descent with quasi-exact and backtracking searches.
    Table3,
    /// Loss per query on the randomized softmax loss.
    Logistic,
    /// Solve one benchmark and print the certified region.
    Solve,
    /// List benchmark and algorithm names.
    List,
}

fn run(cli: Cli) -> anyhow::Result<String> {
    let (default_c, default_eps): (&[f64], &[f64]) = match cli.command {
        Command::Logistic => (&LOGISTIC_C_LIST, &LOGISTIC_EPS_LIST),
        _ => (&DEFAULT_C_LIST, &DEFAULT_EPS_LIST),
    };
    let pick = |given: Vec<f64>, default: &[f64]| {
        if given.is_empty() {
            default.to_vec()
        } else {
            given
        }
    };
    let config = RunConfig {
        benchmarks: cli.benchmark,
        y_tol: cli.y_tol,
        c_list: pick(cli.c, default_c),
        eps_list: pick(cli.eps, default_eps),
        tau: cli.tau,
        seed: cli.seed,
        budget: cli.budget,
        trace: cli.trace,
        algo: cli.algo.parse::<Algo>()?,
    };
    match cli.command {
        Command::Table1 => cmd_table1(&config),
        Command::Table2 => cmd_table2(&config),
        Command::Table3 => cmd_table3(&config),
        Command::Logistic => cmd_logistic(&config),
        Command::Solve => cmd_solve(&config),
        Command::List => {
            let mut out = String::from("benchmarks:\n");
            for name in deltaline_cli::benchmark_names() {
                out.push_str(&format!("  {name}\n"));
            }
            out.push_str("algorithms:\n");
            for a in Algo::ALL {
                out.push_str(&format!("  {}\n", a.name()));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.out.clone();
    let result = run(cli).and_then(|text| {
        let failed = text.lines().skip(1).any(|l| l.split(',').any(|f| f == "error"));
        match &out_path {
            Some(p) => std::fs::write(p, &text)?,
            None => print!("{text}"),
        }
        Ok(failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("deltaline: some rows failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("deltaline: {e:#}");
            ExitCode::FAILURE
        }
    }
}
