//! Benchmark tables and the one-shot solver behind the `deltaline` binary.
//!
//! Every `cmd_*` function returns its output as a string so the binary, the
//! tests and the acceptance suite share one code path. CSV output has a
//! header row, uses `.` as decimal separator and is byte-stable for a given
//! [`RunConfig`].

use std::fmt::Write as _;

use anyhow::{bail, Context};
use deltaline::descent::{gd, GdOptions, ObjectiveNd, StepRule};
use deltaline::linesearch::GrowRule;
use deltaline::objectives::{
    all_benchmarks, exp_cosh, lookup, quartic_2d, scaled_square, table_benchmarks, Benchmark1d,
    LogisticLossSpec,
};
use deltaline::solvers::{
    bisection, delta_bisection, delta_secant, golden_section, tangent_intersection_variant,
    SolveOptions, SolveReport,
};
use deltaline::DescentReport;

pub const DEFAULT_C_LIST: [f64; 8] = [100.0, 10.0, 4.0, 2.0, 1.0, 0.5, 0.1, 0.01];
pub const DEFAULT_EPS_LIST: [f64; 6] = [0.8, 0.5, 0.3, 0.1, 0.01, 0.001];
pub const LOGISTIC_C_LIST: [f64; 3] = [0.1, 1.0, 10.0];
pub const LOGISTIC_EPS_LIST: [f64; 3] = [0.8, 0.5, 0.1];

/// f-gap at which the descent benchmarks stop.
pub const DESCENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Bisection,
    DeltaBisection,
    DeltaSecant,
    GoldenSection,
    TangentIntersection,
}

impl Algo {
    pub const ALL: [Algo; 5] = [
        Algo::Bisection,
        Algo::DeltaBisection,
        Algo::DeltaSecant,
        Algo::GoldenSection,
        Algo::TangentIntersection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Bisection => "bisection",
            Algo::DeltaBisection => "delta-bisection",
            Algo::DeltaSecant => "delta-secant",
            Algo::GoldenSection => "golden-section",
            Algo::TangentIntersection => "tangent-intersection",
        }
    }

    pub fn uses_gradient(self) -> bool {
        matches!(
            self,
            Algo::Bisection | Algo::DeltaBisection | Algo::TangentIntersection
        )
    }

    pub fn run(self, bench: &Benchmark1d, opts: &SolveOptions) -> deltaline::Result<SolveReport> {
        let interval = bench.interval();
        match self {
            Algo::Bisection => bisection(&bench.objective(), interval, opts),
            Algo::DeltaBisection => delta_bisection(&bench.objective(), interval, opts),
            Algo::TangentIntersection => {
                tangent_intersection_variant(&bench.objective(), interval, opts)
            }
            Algo::DeltaSecant => delta_secant(&bench.value_objective(), interval, opts),
            Algo::GoldenSection => golden_section(&bench.value_objective(), interval, opts),
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .with_context(|| {
                let names: Vec<_> = Algo::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Restricts the 1-d tables to these benchmarks; empty means all rows.
    pub benchmarks: Vec<String>,
    pub y_tol: f64,
    pub c_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub tau: f64,
    pub seed: u64,
    pub budget: usize,
    pub trace: bool,
    pub algo: Algo,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            benchmarks: Vec::new(),
            y_tol: 1e-10,
            c_list: DEFAULT_C_LIST.to_vec(),
            eps_list: DEFAULT_EPS_LIST.to_vec(),
            tau: 0.5,
            seed: 0,
            budget: 2000,
            trace: false,
            algo: Algo::DeltaSecant,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.y_tol > 0.0) {
            bail!("y-tol must be positive, got {}", self.y_tol);
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            bail!("tau must lie in (0, 1), got {}", self.tau);
        }
        if self.c_list.is_empty() || self.c_list.iter().any(|&c| !(c > 0.0)) {
            bail!("c list must be nonempty and positive");
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            bail!("eps list must be nonempty with values in (0, 1)");
        }
        Ok(())
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            trace: self.trace,
            ..SolveOptions::new(self.y_tol)
        }
    }

    fn selected(&self) -> anyhow::Result<Vec<&'static Benchmark1d>> {
        if self.benchmarks.is_empty() {
            return Ok(table_benchmarks().iter().collect());
        }
        self.benchmarks
            .iter()
            .map(|n| lookup(n).map_err(anyhow::Error::from))
            .collect()
    }
}

/// A count, or the error that prevented it.
pub type Cell = Result<usize, String>;

fn cell_text(c: &Cell) -> String {
    match c {
        Ok(n) => n.to_string(),
        Err(_) => "error".to_owned(),
    }
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub name: &'static str,
    pub interval: (f64, f64),
    pub bisection: Cell,
    pub delta_bisection: Cell,
}

pub fn table1(config: &RunConfig) -> anyhow::Result<Vec<Table1Row>> {
    config.validate()?;
    let opts = config.solve_options();
    let iterations = |algo: Algo, b: &Benchmark1d| -> Cell {
        algo.run(b, &opts)
            .map(|r| r.iterations)
            .map_err(|e| e.to_string())
    };
    Ok(config
        .selected()?
        .into_iter()
        .map(|b| Table1Row {
            name: b.name,
            interval: b.interval,
            bisection: iterations(Algo::Bisection, b),
            delta_bisection: iterations(Algo::DeltaBisection, b),
        })
        .collect())
}

/// Iterations of bisection and Delta-Bisection, boundary queries excluded.
pub fn cmd_table1(config: &RunConfig) -> anyhow::Result<String> {
    let rows: Vec<Vec<String>> = table1(config)?
        .iter()
        .map(|r| {
            vec![
                r.name.to_owned(),
                r.interval.0.to_string(),
                r.interval.1.to_string(),
                cell_text(&r.bisection),
                cell_text(&r.delta_bisection),
            ]
        })
        .collect();
    csv_string(
        &["function", "x_left", "x_right", "bisection_iters", "delta_bisection_iters"],
        &rows,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Row {
    pub name: &'static str,
    pub interval: (f64, f64),
    pub bisection: Cell,
    pub delta_bisection: Cell,
    pub delta_secant: Cell,
    pub golden_section: Cell,
}

pub fn table2(config: &RunConfig) -> anyhow::Result<Vec<Table2Row>> {
    config.validate()?;
    let opts = config.solve_options();
    // Combined value+gradient queries count twice.
    let queries = |algo: Algo, b: &Benchmark1d| -> Cell {
        algo.run(b, &opts)
            .map(|r| r.total_queries())
            .map_err(|e| e.to_string())
    };
    Ok(config
        .selected()?
        .into_iter()
        .map(|b| Table2Row {
            name: b.name,
            interval: b.interval,
            bisection: queries(Algo::Bisection, b),
            delta_bisection: queries(Algo::DeltaBisection, b),
            delta_secant: queries(Algo::DeltaSecant, b),
            golden_section: queries(Algo::GoldenSection, b),
        })
        .collect())
}

/// Queries of all four solvers, boundary queries included.
pub fn cmd_table2(config: &RunConfig) -> anyhow::Result<String> {
    let rows: Vec<Vec<String>> = table2(config)?
        .iter()
        .map(|r| {
            vec![
                r.name.to_owned(),
                r.interval.0.to_string(),
                r.interval.1.to_string(),
                cell_text(&r.bisection),
                cell_text(&r.delta_bisection),
                cell_text(&r.delta_secant),
                cell_text(&r.golden_section),
            ]
        })
        .collect();
    csv_string(
        &[
            "function",
            "x_left",
            "x_right",
            "bisection_queries",
            "delta_bisection_queries",
            "delta_secant_queries",
            "gss_queries",
        ],
        &rows,
    )
}

/// One of the three descent benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentProblem {
    /// `3.95 x^2` from `x = 1000`.
    Quadratic,
    /// `e^(3x) + e^(-3x)` from `x = 100`.
    Cosh,
    /// `x^4 + y^4` from `(0.1, 15)`.
    Quartic,
}

impl DescentProblem {
    pub const ALL: [DescentProblem; 3] = [Self::Quadratic, Self::Cosh, Self::Quartic];

    pub fn objective(self) -> Box<dyn ObjectiveNd> {
        match self {
            Self::Quadratic => Box::new(scaled_square(3.95)),
            Self::Cosh => Box::new(exp_cosh(3.0)),
            Self::Quartic => Box::new(quartic_2d()),
        }
    }

    pub fn start(self) -> Vec<f64> {
        match self {
            Self::Quadratic => vec![1000.0],
            Self::Cosh => vec![100.0],
            Self::Quartic => vec![0.1, 15.0],
        }
    }
}

/// The step rule of a descent table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Search {
    QuasiExact(f64),
    Backtracking(f64),
    BoundedBacktracking(f64),
}

impl Search {
    pub fn rule(self, tau: f64) -> StepRule {
        let backtracking = |eps, unbounded| StepRule::Backtracking {
            tau,
            eps,
            unbounded,
            grow_rule: GrowRule::ImmediateAcceptance,
        };
        match self {
            Search::QuasiExact(c) => StepRule::quasi_exact(c),
            Search::Backtracking(eps) => backtracking(eps, true),
            Search::BoundedBacktracking(eps) => backtracking(eps, false),
        }
    }

    /// Options of the descent table runs: each search starts from a step of
    /// 1 and the run stops at an f-gap of [`DESCENT_TOL`].
    pub fn table_options(self, tau: f64) -> GdOptions {
        GdOptions::new(self.rule(tau))
            .warm_start(false)
            .tol(DESCENT_TOL)
            .max_iter(100_000)
    }
}

/// GD iterations as tabulated: the zero-based index of the last update.
pub fn table_iterations(report: &DescentReport) -> usize {
    report.steps().saturating_sub(1)
}

/// `(iterations, queries)` of one descent run.
pub fn descent_cell(problem: DescentProblem, search: Search, tau: f64) -> Result<(usize, usize), String> {
    let f = problem.objective();
    let report = gd(f.as_ref(), &problem.start(), &search.table_options(tau))
        .map_err(|e| e.to_string())?;
    if !report.converged {
        return Err("iteration cap reached".to_owned());
    }
    Ok((table_iterations(&report), report.queries()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table3Row {
    pub search: &'static str,
    pub param: f64,
    /// Per problem, in [`DescentProblem::ALL`] order.
    pub cells: Vec<Result<(usize, usize), String>>,
    /// Bounded backtracking on the quartic, for backtracking rows.
    pub bounded_quartic: Option<Result<(usize, usize), String>>,
}

pub fn table3(config: &RunConfig) -> anyhow::Result<Vec<Table3Row>> {
    config.validate()?;
    let tau = config.tau;
    let mut rows = Vec::new();
    let run_all = |s: Search| -> Vec<_> {
        DescentProblem::ALL
            .iter()
            .map(|&p| descent_cell(p, s, tau))
            .collect()
    };
    for &c in &config.c_list {
        rows.push(Table3Row {
            search: "quasi-exact",
            param: c,
            cells: run_all(Search::QuasiExact(c)),
            bounded_quartic: None,
        });
    }
    for &eps in &config.eps_list {
        rows.push(Table3Row {
            search: "backtracking",
            param: eps,
            cells: run_all(Search::Backtracking(eps)),
            bounded_quartic: Some(descent_cell(
                DescentProblem::Quartic,
                Search::BoundedBacktracking(eps),
                tau,
            )),
        });
    }
    Ok(rows)
}

/// GD iterations and queries per line search and problem.
pub fn cmd_table3(config: &RunConfig) -> anyhow::Result<String> {
    let pair = |c: &Result<(usize, usize), String>| -> [String; 2] {
        match c {
            Ok((i, q)) => [i.to_string(), q.to_string()],
            Err(_) => ["error".to_owned(), "error".to_owned()],
        }
    };
    let rows: Vec<Vec<String>> = table3(config)?
        .iter()
        .map(|r| {
            let mut row = vec![r.search.to_owned(), r.param.to_string()];
            for c in &r.cells {
                row.extend(pair(c));
            }
            match &r.bounded_quartic {
                Some(c) => row.extend(pair(c)),
                None => row.extend([String::new(), String::new()]),
            }
            row
        })
        .collect();
    csv_string(
        &[
            "search",
            "param",
            "quadratic_iters",
            "quadratic_queries",
            "cosh_iters",
            "cosh_queries",
            "quartic_iters",
            "quartic_queries",
            "quartic_bounded_iters",
            "quartic_bounded_queries",
        ],
        &rows,
    )
}

/// Loss curve of one search on the softmax loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub search: &'static str,
    pub param: f64,
    /// `(cumulative queries, loss)` after every update, starting at 0.
    pub points: Vec<(usize, f64)>,
    pub error: Option<String>,
}

impl LossCurve {
    pub fn final_loss(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |p| p.1)
    }
}

fn loss_curve(search: Search, config: &RunConfig) -> LossCurve {
    let spec = LogisticLossSpec {
        seed: config.seed,
        ..LogisticLossSpec::default()
    };
    let loss = spec.build();
    let opts = GdOptions::new(search.rule(config.tau))
        .budget(config.budget)
        .max_iter(config.budget);
    let (name, param) = match search {
        Search::QuasiExact(c) => ("quasi-exact", c),
        Search::Backtracking(e) => ("backtracking", e),
        Search::BoundedBacktracking(e) => ("bounded-backtracking", e),
    };
    match gd(&loss, &spec.start(), &opts) {
        Ok(report) => LossCurve {
            search: name,
            param,
            points: report
                .iterates
                .iter()
                .map(|it| (it.queries, it.value))
                .collect(),
            error: None,
        },
        Err(e) => LossCurve {
            search: name,
            param,
            points: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

pub fn logistic(config: &RunConfig) -> anyhow::Result<Vec<LossCurve>> {
    config.validate()?;
    let searches = config
        .c_list
        .iter()
        .map(|&c| Search::QuasiExact(c))
        .chain(config.eps_list.iter().map(|&e| Search::Backtracking(e)));
    Ok(searches.map(|s| loss_curve(s, config)).collect())
}

/// Loss against cumulative queries on the randomized softmax loss.
pub fn cmd_logistic(config: &RunConfig) -> anyhow::Result<String> {
    let mut rows = Vec::new();
    for curve in logistic(config)? {
        if let Some(e) = &curve.error {
            rows.push(vec![
                curve.search.to_owned(),
                curve.param.to_string(),
                "error".to_owned(),
                e.clone(),
            ]);
        }
        for (q, loss) in &curve.points {
            rows.push(vec![
                curve.search.to_owned(),
                curve.param.to_string(),
                q.to_string(),
                format!("{loss:e}"),
            ]);
        }
    }
    csv_string(&["search", "param", "queries", "loss"], &rows)
}

/// Runs one algorithm on one benchmark and describes the result.
pub fn cmd_solve(config: &RunConfig) -> anyhow::Result<String> {
    config.validate()?;
    let name = match config.benchmarks.as_slice() {
        [one] => one,
        [] => bail!("solve needs --benchmark"),
        _ => bail!("solve takes a single benchmark"),
    };
    let bench = lookup(name)?;
    let report = config
        .algo
        .run(bench, &config.solve_options())
        .with_context(|| format!("{} on {}", config.algo.name(), bench.name))?;
    let r = &report.region;
    let mut out = String::new();
    writeln!(out, "benchmark   {}", bench.name)?;
    writeln!(out, "interval    [{}, {}]", bench.interval.0, bench.interval.1)?;
    writeln!(out, "algorithm   {}", config.algo.name())?;
    writeln!(out, "best        x = {:e}, y = {:e}", report.best.x, report.best.y)?;
    writeln!(out, "x-gap       [{:e}, {:e}]", r.x_lo, r.x_hi)?;
    writeln!(out, "y-gap       [{:e}, {:e}] width {:e}", r.y_lo, r.y_hi, r.width_y())?;
    writeln!(out, "iterations  {}", report.iterations)?;
    writeln!(
        out,
        "queries     {} ({} values, {} gradients)",
        report.total_queries(),
        report.value_queries,
        report.gradient_queries
    )?;
    if config.trace {
        writeln!(out, "iter,query,x_lo,x_hi,y_lo,y_hi")?;
        for (i, step) in report.trace.iter().enumerate() {
            let r = step.region;
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e}",
                i + 1,
                step.query,
                r.x_lo,
                r.x_hi,
                r.y_lo,
                r.y_hi
            )?;
        }
    }
    Ok(out)
}

/// Names accepted by `--benchmark`.
pub fn benchmark_names() -> Vec<&'static str> {
    all_benchmarks().map(|b| b.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        assert!("newton".parse::<Algo>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.tau = 1.0;
        assert!(c.validate().is_err());
        let c = RunConfig {
            c_list: vec![],
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_benchmark_is_an_error() {
        let c = RunConfig {
            benchmarks: vec!["x^3".to_owned()],
            ..RunConfig::default()
        };
        let err = cmd_solve(&c).unwrap_err().to_string();
        assert!(err.contains("x^3"), "{err}");
        assert!(cmd_table1(&c).is_err());
    }
}
