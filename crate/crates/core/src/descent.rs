//! Gradient descent with a pluggable step rule, and Frank-Wolfe with the
//! quasi-exact search on `[0, 1]`.
//!
//! Query accounting: every gradient evaluation counts one and every
//! evaluation of the ray profile `f~(a)` at `a > 0` counts one. The value at
//! the current iterate is the accepted value of the previous search and is
//! not queried again; the value at the start point is setup and not counted.

use crate::error::{Error, Result};
use crate::linesearch::{
    backtracking_from, quasi_exact_from, quasi_exact_unit, BacktrackParams, GrowRule,
    QuasiExactParams,
};
use crate::objective::Objective1d;

/// A differentiable function on `R^d` with optional known constants.
pub trait ObjectiveNd {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// `f(x*)`, when known.
    fn optimum_value(&self) -> Option<f64> {
        None
    }
    /// Strong convexity constant `m`.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }
    /// Smoothness constant `M`.
    fn smoothness(&self) -> Option<f64> {
        None
    }
}

type VecFn<'a, T> = Box<dyn Fn(&[f64]) -> T + Send + Sync + 'a>;

/// An [`ObjectiveNd`] from a pair of closures.
pub struct FnObjectiveNd<'a> {
    dim: usize,
    value: VecFn<'a, f64>,
    gradient: VecFn<'a, Vec<f64>>,
    optimum: Option<f64>,
    curvature: Option<(f64, f64)>,
}

impl<'a> FnObjectiveNd<'a> {
    pub fn new(
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'a,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'a,
    ) -> Self {
        Self {
            dim,
            value: Box::new(value),
            gradient: Box::new(gradient),
            optimum: None,
            curvature: None,
        }
    }

    pub fn with_optimum(mut self, f_star: f64) -> Self {
        self.optimum = Some(f_star);
        self
    }

    /// Sets `m` and `M`; panics unless `0 < m <= M`.
    pub fn with_curvature(mut self, m: f64, big_m: f64) -> Self {
        assert!(m > 0.0 && m <= big_m, "need 0 < m <= M, got {m}, {big_m}");
        self.curvature = Some((m, big_m));
        self
    }
}

impl std::fmt::Debug for FnObjectiveNd<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnObjectiveNd")
            .field("dim", &self.dim)
            .field("optimum", &self.optimum)
            .field("curvature", &self.curvature)
            .finish_non_exhaustive()
    }
}

impl ObjectiveNd for FnObjectiveNd<'_> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
    fn optimum_value(&self) -> Option<f64> {
        self.optimum
    }
    fn strong_convexity(&self) -> Option<f64> {
        self.curvature.map(|c| c.0)
    }
    fn smoothness(&self) -> Option<f64> {
        self.curvature.map(|c| c.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    QuasiExact {
        c: f64,
        /// Use the tangent at `a = 0` as a lower bound during the search.
        initial_gradient: bool,
    },
    Backtracking {
        tau: f64,
        eps: f64,
        unbounded: bool,
        grow_rule: GrowRule,
    },
    Fixed(f64),
}

impl StepRule {
    pub fn quasi_exact(c: f64) -> Self {
        Self::QuasiExact {
            c,
            initial_gradient: false,
        }
    }

    pub fn backtracking(eps: f64) -> Self {
        Self::Backtracking {
            tau: 0.5,
            eps,
            unbounded: true,
            grow_rule: GrowRule::ImmediateAcceptance,
        }
    }

    pub fn bounded_backtracking(eps: f64) -> Self {
        Self::Backtracking {
            tau: 0.5,
            eps,
            unbounded: false,
            grow_rule: GrowRule::ImmediateAcceptance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdOptions {
    pub rule: StepRule,
    /// Start each search from the previous step instead of 1.
    pub warm_start: bool,
    /// Stop once `f(x_k) - f* <= tol`; needs a known optimum.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Stop once this many queries have been spent.
    pub query_budget: Option<usize>,
}

impl GdOptions {
    pub fn new(rule: StepRule) -> Self {
        Self {
            rule,
            warm_start: true,
            tol: None,
            max_iter: 100_000,
            query_budget: None,
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn budget(mut self, queries: usize) -> Self {
        self.query_budget = Some(queries);
        self
    }

    pub fn warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }

    pub fn max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }
}

/// State at iterate `x_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iterate {
    pub k: usize,
    pub value: f64,
    /// `|grad f(x_k)|^2`; `NaN` when the run stopped before evaluating it.
    pub grad_norm_sq: f64,
    /// Step that produced `x_k`; 0 for the start point.
    pub alpha: f64,
    /// Queries spent up to and including the evaluation of `f(x_k)`.
    pub queries: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DescentReport {
    pub iterates: Vec<Iterate>,
    pub final_x: Vec<f64>,
    /// True when the f-gap tolerance was reached (or the gradient vanished).
    pub converged: bool,
}

impl DescentReport {
    /// Number of updates `x_k -> x_{k+1}` performed.
    pub fn steps(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn queries(&self) -> usize {
        self.iterates.last().map_or(0, |it| it.queries)
    }

    pub fn final_value(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |it| it.value)
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn check_dim(f: &dyn ObjectiveNd, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

fn axpy(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + a * di).collect()
}

/// Gradient descent `x_{k+1} = x_k - a_k grad f(x_k)`.
pub fn gd(f: &dyn ObjectiveNd, x0: &[f64], opts: &GdOptions) -> Result<DescentReport> {
    check_dim(f, x0)?;
    let f_star = match opts.tol {
        Some(_) => Some(f.optimum_value().ok_or(Error::MetadataRequired("optimum_value"))?),
        None => None,
    };
    let reached = |v: f64| matches!((opts.tol, f_star), (Some(t), Some(s)) if v - s <= t);

    let mut x = x0.to_vec();
    let mut value = f.value(&x);
    if !value.is_finite() {
        return Err(Error::ObjectiveNotFinite {
            x: f64::NAN,
            value,
        });
    }
    let mut queries = 0;
    let mut report = DescentReport::default();
    report.iterates.push(Iterate {
        k: 0,
        value,
        grad_norm_sq: f64::NAN,
        alpha: 0.0,
        queries,
    });
    let mut alpha_prev = 1.0;

    for k in 0..opts.max_iter {
        if reached(value) {
            report.converged = true;
            break;
        }
        if opts.query_budget.is_some_and(|b| queries >= b) {
            break;
        }
        let g = f.gradient(&x);
        queries += 1;
        let g2 = norm_sq(&g);
        report.iterates[k].grad_norm_sq = g2;
        if g2 == 0.0 {
            report.converged = true;
            break;
        }
        let start = if opts.warm_start { alpha_prev } else { 1.0 };
        let xk = x.clone();
        let ray = Objective1d::new(|a: f64| f.value(&axpy(&xk, -a, &g)));
        let wrap = |source: Error| Error::LineSearch {
            iteration: k,
            source: Box::new(source),
        };
        let (alpha, next_value) = match opts.rule {
            StepRule::QuasiExact {
                c,
                initial_gradient,
            } => {
                let params = QuasiExactParams {
                    c,
                    alpha_prev: start,
                };
                let out = quasi_exact_from(&ray, value, &params, initial_gradient.then_some(g2))
                    .map_err(wrap)?;
                (out.alpha, out.value)
            }
            StepRule::Backtracking {
                tau,
                eps,
                unbounded,
                grow_rule,
            } => {
                let params = BacktrackParams {
                    tau,
                    eps,
                    alpha_prev: start,
                    unbounded,
                    grow_rule,
                };
                let out = backtracking_from(&ray, value, g2, &params).map_err(wrap)?;
                (out.alpha, out.value)
            }
            StepRule::Fixed(a) => (a, ray.value(a).map_err(wrap)?),
        };
        queries += ray.value_queries();
        x = axpy(&xk, -alpha, &g);
        value = next_value;
        if alpha > 0.0 {
            alpha_prev = alpha;
        }
        report.iterates.push(Iterate {
            k: k + 1,
            value,
            grad_norm_sq: f64::NAN,
            alpha,
            queries,
        });
    }
    if !report.converged && reached(value) {
        report.converged = true;
    }
    report.final_x = x;
    Ok(report)
}

/// Outcome of [`gd_convergence_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCheck {
    /// Per-step contraction factor `1 - c/(c+1) m/M`.
    pub rate: f64,
    /// First iterate index violating the bound, if any.
    pub violation: Option<usize>,
}

impl ConvergenceCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `f(x_k) - f* <= (f(x_0) - f*) (1 - c/(c+1) m/M)^k` along a run.
pub fn gd_convergence_check(
    report: &DescentReport,
    f: &dyn ObjectiveNd,
    c: f64,
) -> Result<ConvergenceCheck> {
    let m = f
        .strong_convexity()
        .ok_or(Error::MetadataRequired("strong_convexity"))?;
    let big_m = f.smoothness().ok_or(Error::MetadataRequired("smoothness"))?;
    let f_star = f
        .optimum_value()
        .ok_or(Error::MetadataRequired("optimum_value"))?;
    let rate = 1.0 - c / (c + 1.0) * m / big_m;
    let Some(first) = report.iterates.first() else {
        return Ok(ConvergenceCheck {
            rate,
            violation: None,
        });
    };
    let gap0 = first.value - f_star;
    // Rounding in f near the optimum.
    let slack = 1e-12 * (1.0 + f_star.abs());
    let violation = report.iterates.iter().enumerate().position(|(k, it)| {
        it.value - f_star > gap0 * rate.powi(k as i32) * (1.0 + 1e-12) + slack
    });
    Ok(ConvergenceCheck { rate, violation })
}

/// Linear minimization over a convex feasible set.
pub trait LinearMinOracle {
    fn dim(&self) -> usize;
    /// A feasible point minimizing `<s, g>`.
    fn minimize(&self, g: &[f64]) -> Vec<f64>;
    fn contains(&self, x: &[f64], tol: f64) -> bool;
}

/// The box `prod_i [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxSet {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] <= hi[i])) {
            return Err(Error::InvalidInterval {
                lo: lo[i],
                hi: hi[i],
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }
}

impl LinearMinOracle for BoxSet {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn minimize(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .enumerate()
            .map(|(i, &gi)| if gi > 0.0 { self.lo[i] } else { self.hi[i] })
            .collect()
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &xi)| xi >= self.lo[i] - tol && xi <= self.hi[i] + tol)
    }
}

/// The probability simplex in `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simplex {
    pub dim: usize,
}

impl LinearMinOracle for Simplex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn minimize(&self, g: &[f64]) -> Vec<f64> {
        let best = g
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        let mut s = vec![0.0; self.dim];
        s[best] = 1.0;
        s
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim
            && x.iter().all(|&xi| xi >= -tol)
            && (x.iter().sum::<f64>() - 1.0).abs() <= tol
    }
}

/// Frank-Wolfe with a quasi-exact step on `[0, 1]`, first querying the
/// classic step `2/(k+2)`.
pub fn frank_wolfe(
    f: &dyn ObjectiveNd,
    lmo: &dyn LinearMinOracle,
    x0: &[f64],
    c: f64,
    max_k: usize,
) -> Result<DescentReport> {
    check_dim(f, x0)?;
    if lmo.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: lmo.dim(),
        });
    }
    if !lmo.contains(x0, 1e-12) {
        return Err(Error::InfeasibleStart);
    }
    let mut x = x0.to_vec();
    let mut value = f.value(&x);
    let mut queries = 0;
    let mut report = DescentReport::default();
    report.iterates.push(Iterate {
        k: 0,
        value,
        grad_norm_sq: f64::NAN,
        alpha: 0.0,
        queries,
    });
    for k in 0..max_k {
        let g = f.gradient(&x);
        queries += 1;
        report.iterates[k].grad_norm_sq = norm_sq(&g);
        let s = lmo.minimize(&g);
        let d: Vec<f64> = s.iter().zip(&x).map(|(si, xi)| si - xi).collect();
        if d.iter().all(|&di| di == 0.0) {
            report.converged = true;
            break;
        }
        let xk = x.clone();
        let ray = Objective1d::new(|a: f64| f.value(&convex_combination(&xk, &s, a)));
        let first = 2.0 / (k as f64 + 2.0);
        let out = quasi_exact_unit(&ray, value, c, first).map_err(|source| Error::LineSearch {
            iteration: k,
            source: Box::new(source),
        })?;
        queries += ray.value_queries();
        x = convex_combination(&xk, &s, out.alpha);
        value = out.value;
        report.iterates.push(Iterate {
            k: k + 1,
            value,
            grad_norm_sq: f64::NAN,
            alpha: out.alpha,
            queries,
        });
    }
    report.final_x = x;
    Ok(report)
}

/// `(1 - a) x + a s`, exact at both ends.
fn convex_combination(x: &[f64], s: &[f64], a: f64) -> Vec<f64> {
    if a == 1.0 {
        return s.to_vec();
    }
    x.iter()
        .zip(s)
        .map(|(xi, si)| xi + a * (si - xi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{diagonal_quadratic, exp_cosh, quartic_2d, scaled_square};

    #[test]
    fn fixed_step_on_quadratic() {
        let f = scaled_square(1.0);
        let r = gd(&f, &[1.0], &GdOptions::new(StepRule::Fixed(0.25)).max_iter(3)).unwrap();
        let xs: Vec<f64> = r.iterates.iter().map(|it| it.value).collect();
        assert_eq!(xs, vec![1.0, 0.25, 0.0625, 0.015625]);
        assert_eq!(r.final_x, vec![0.125]);
        // One gradient and one value per step.
        assert_eq!(r.queries(), 6);
    }

    #[test]
    fn tolerance_needs_optimum() {
        let f = FnObjectiveNd::new(1, |x| x[0] * x[0], |x| vec![2.0 * x[0]]);
        let err = gd(&f, &[1.0], &GdOptions::new(StepRule::Fixed(0.1)).tol(1e-3)).unwrap_err();
        assert_eq!(err, Error::MetadataRequired("optimum_value"));
    }

    #[test]
    fn dimension_is_checked() {
        let f = quartic_2d();
        assert!(matches!(
            gd(&f, &[1.0], &GdOptions::new(StepRule::Fixed(0.1))),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn descent_is_monotone_for_line_searches() {
        let rules = [
            StepRule::quasi_exact(1.0),
            StepRule::quasi_exact(0.1),
            StepRule::backtracking(0.3),
            StepRule::bounded_backtracking(0.3),
        ];
        for rule in rules {
            for warm in [false, true] {
                let objectives: Vec<(Box<dyn ObjectiveNd>, Vec<f64>)> = vec![
                    (Box::new(scaled_square(3.95)), vec![1000.0]),
                    (Box::new(exp_cosh(3.0)), vec![5.0]),
                    (Box::new(quartic_2d()), vec![0.1, 15.0]),
                    (Box::new(diagonal_quadratic(vec![1.0, 10.0])), vec![3.0, -2.0]),
                ];
                for (f, x0) in objectives {
                    let opts = GdOptions::new(rule).warm_start(warm).tol(1e-10).max_iter(300);
                    let r = gd(f.as_ref(), &x0, &opts).unwrap();
                    for w in r.iterates.windows(2) {
                        assert!(w[1].value <= w[0].value, "{rule:?}: {w:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn query_accounting() {
        let f = exp_cosh(3.0);
        let opts = GdOptions::new(StepRule::quasi_exact(1.0)).tol(1e-10);
        let r = gd(&f, &[3.0], &opts).unwrap();
        assert!(r.converged);
        // Every step costs one gradient plus at least one ray query.
        for w in r.iterates.windows(2) {
            assert!(w[1].queries >= w[0].queries + 2);
        }
    }

    #[test]
    fn convergence_check_on_quadratics() {
        for c in [0.5, 1.0, 2.0] {
            let f = scaled_square(3.95);
            let opts = GdOptions::new(StepRule::quasi_exact(c)).tol(1e-10);
            let r = gd(&f, &[1000.0], &opts).unwrap();
            let check = gd_convergence_check(&r, &f, c).unwrap();
            assert!(check.passed(), "c = {c}: {check:?}");

            let f = diagonal_quadratic(vec![1.0, 10.0]);
            let opts = GdOptions::new(StepRule::quasi_exact(c)).tol(1e-10);
            let r = gd(&f, &[10.0, 1.0], &opts).unwrap();
            let check = gd_convergence_check(&r, &f, c).unwrap();
            assert!(check.passed(), "c = {c}: {check:?}");
        }
    }

    #[test]
    fn convergence_rates() {
        let f = scaled_square(3.95);
        let r = DescentReport::default();
        assert_eq!(gd_convergence_check(&r, &f, 1.0).unwrap().rate, 0.5);
        let f = diagonal_quadratic(vec![1.0, 10.0]);
        assert_eq!(gd_convergence_check(&r, &f, 1.0).unwrap().rate, 1.0 - 1.0 / 20.0);
        let big = gd_convergence_check(&r, &f, 1e12).unwrap().rate;
        assert!((big - 0.9).abs() < 1e-11);
    }

    #[test]
    fn convergence_check_needs_metadata() {
        let f = exp_cosh(3.0);
        let r = DescentReport::default();
        assert_eq!(
            gd_convergence_check(&r, &f, 1.0).unwrap_err(),
            Error::MetadataRequired("strong_convexity")
        );
    }

    #[test]
    fn simplex_oracle_picks_smallest_component() {
        let s = Simplex { dim: 3 }.minimize(&[3.0, 1.0, 2.0]);
        assert_eq!(s, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn box_oracle_picks_corners() {
        let b = BoxSet::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(b.minimize(&[2.0, -0.5]), vec![-1.0, 2.0]);
        assert!(BoxSet::new(vec![1.0], vec![0.0]).is_err());
    }

    fn shifted_square(target: Vec<f64>) -> FnObjectiveNd<'static> {
        let t = target.clone();
        FnObjectiveNd::new(
            target.len(),
            move |x| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum(),
            move |x| x.iter().zip(&t).map(|(a, b)| 2.0 * (a - b)).collect(),
        )
        .with_optimum(0.0)
    }

    #[test]
    fn frank_wolfe_on_box() {
        let f = shifted_square(vec![0.3, -0.2, 0.7]);
        let b = BoxSet::cube(3, -1.0, 1.0).unwrap();
        let r = frank_wolfe(&f, &b, &[1.0, 1.0, 1.0], 1.0, 200).unwrap();
        assert!(r.final_value() <= 1e-6, "{}", r.final_value());
        assert!(b.contains(&r.final_x, 0.0));
    }

    #[test]
    fn frank_wolfe_beats_fixed_schedule() {
        let f = shifted_square(vec![0.2, 0.5, 0.3]);
        let simplex = Simplex { dim: 3 };
        let x0 = [1.0, 0.0, 0.0];
        let r = frank_wolfe(&f, &simplex, &x0, 1.0, 50).unwrap();
        assert!(simplex.contains(&r.final_x, 1e-12));
        // Replay the run: each accepted value is at most what the classic
        // step would give from the same iterate.
        let mut x = x0.to_vec();
        for (k, it) in r.iterates[1..].iter().enumerate() {
            let s = simplex.minimize(&f.gradient(&x));
            let classic = f.value(&convex_combination(&x, &s, 2.0 / (k as f64 + 2.0)));
            assert!(it.value <= classic, "k = {k}");
            x = convex_combination(&x, &s, it.alpha);
            assert!(simplex.contains(&x, 1e-12));
        }
    }

    #[test]
    fn frank_wolfe_rejects_infeasible_start() {
        let f = shifted_square(vec![0.0, 0.0]);
        let err = frank_wolfe(&f, &Simplex { dim: 2 }, &[0.7, 0.7], 1.0, 5).unwrap_err();
        assert_eq!(err, Error::InfeasibleStart);
    }
}
