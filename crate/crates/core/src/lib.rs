//! Certified one-dimensional convex minimization.
//!
//! Every solver maintains an optimality region: a box in `(x, y)` that is
//! guaranteed by convexity to contain the minimizer and the minimum value.
//! Its height bounds the suboptimality of the best query, so it doubles as a
//! stopping criterion. On top of the 1-d solvers sit a quasi-exact line
//! search, Armijo backtracking, and gradient descent / Frank-Wolfe drivers.

pub mod descent;
pub mod error;
pub mod geometry;
pub mod linesearch;
pub mod objective;
pub mod objectives;
pub mod region;
pub mod solvers;

pub use descent::{
    frank_wolfe, gd, gd_convergence_check, BoxSet, DescentReport, FnObjectiveNd, GdOptions,
    Iterate, LinearMinOracle, ObjectiveNd, Simplex, StepRule,
};
pub use error::{Error, Result};
pub use geometry::{intersect, secant, Line, Point};
pub use linesearch::{
    backtracking, quasi_exact, BacktrackParams, GrowRule, LineSearchOutcome, QuasiExactParams,
};
pub use objective::{Interval, Objective1d};
pub use objectives::{lookup, Benchmark1d, LogisticLoss, LogisticLossSpec};
pub use region::{region_from_points, region_from_tangents, PointSet, Region};
pub use solvers::{
    bisection, delta_bisection, delta_secant, golden_section, tangent_intersection_variant,
    SolveOptions, SolveReport,
};
