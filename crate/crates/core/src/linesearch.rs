//! Step-size selection along a descent ray `f~(a) = f(x - a g)`.
//!
//! [`quasi_exact`] runs the secant core on `[0, a_right]` until the
//! certified gap is at most `1/c` of the improvement over `f~(0)`, growing
//! `a_right` by 4 while the best point sits on the right end.
//! [`backtracking`] is the usual Armijo search, optionally unbounded.

use crate::error::{Error, Result};
use crate::geometry::{Line, Point};
use crate::objective::Objective1d;
use crate::region::{PointSet, Region};
use crate::solvers::{delta_secant_core, CoreOptions, MAX_ITERATIONS};

/// Range growth factor of both searches.
pub const GROWTH: f64 = 4.0;

/// Number of range growths after which a search gives up. Quasi-exact
/// search only counts growths that lowered the best value, so a rounding
/// plateau after a tiny warm start does not exhaust the budget.
pub const MAX_GROWTHS: usize = 60;

/// Backtracking fails once the step drops below this.
pub const ALPHA_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiExactParams {
    pub c: f64,
    /// First right end of the search range.
    pub alpha_prev: f64,
}

impl QuasiExactParams {
    pub fn new(c: f64) -> Self {
        Self { c, alpha_prev: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c = {}", self.c)));
        }
        if !(self.alpha_prev > 0.0 && self.alpha_prev.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha_prev = {}",
                self.alpha_prev
            )));
        }
        Ok(())
    }
}

impl Default for QuasiExactParams {
    fn default() -> Self {
        Self::new(1.0)
    }
}

/// When an unbounded backtracking search enlarges its step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GrowRule {
    /// Grow by 4 whenever the step was accepted without shrinking.
    #[default]
    ImmediateAcceptance,
    /// Grow by 4 after exactly one shrink, as the textbook listing reads.
    SingleShrink,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackParams {
    pub tau: f64,
    pub eps: f64,
    pub alpha_prev: f64,
    pub unbounded: bool,
    pub grow_rule: GrowRule,
}

impl BacktrackParams {
    pub fn new(eps: f64) -> Self {
        Self {
            tau: 0.5,
            eps,
            alpha_prev: 1.0,
            unbounded: true,
            grow_rule: GrowRule::default(),
        }
    }

    pub fn bounded(mut self) -> Self {
        self.unbounded = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParameter(format!("tau = {}", self.tau)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {}", self.eps)));
        }
        if !(self.alpha_prev > 0.0 && self.alpha_prev.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha_prev = {}",
                self.alpha_prev
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    /// `f~(alpha)`.
    pub value: f64,
    /// Certified y-gap at termination; `NaN` for backtracking.
    pub gap: f64,
    /// Evaluations of `f~` made by this search.
    pub queries: usize,
    /// Final points of a quasi-exact search.
    pub points: Option<PointSet>,
}

fn quasi_exact_stop(c: f64, f0: f64) -> impl Fn(&PointSet, &Region) -> bool {
    move |points, region| {
        let low = points.low().expect("non-empty set").y;
        c * region.width_y() <= f0 - low
    }
}

fn gradient_line(f0: f64, gradient_norm_sq: Option<f64>) -> Option<Line> {
    gradient_norm_sq.map(|g| Line::new(-g, Point::new(0.0, f0)))
}

/// Quasi-exact search; queries `f~(0)` itself.
pub fn quasi_exact(
    ftilde: &Objective1d,
    params: &QuasiExactParams,
    gradient_norm_sq: Option<f64>,
) -> Result<LineSearchOutcome> {
    let before = ftilde.value_queries();
    let f0 = ftilde.value(0.0)?;
    let mut out = quasi_exact_from(ftilde, f0, params, gradient_norm_sq)?;
    out.queries = ftilde.value_queries() - before;
    Ok(out)
}

/// Quasi-exact search when `f~(0) = f0` is already known.
///
/// With `gradient_norm_sq = Some(G)` the line `a -> f0 - a G`, a lower bound
/// on `f~` by convexity, is added to every region computation.
pub fn quasi_exact_from(
    ftilde: &Objective1d,
    f0: f64,
    params: &QuasiExactParams,
    gradient_norm_sq: Option<f64>,
) -> Result<LineSearchOutcome> {
    params.validate()?;
    let before = ftilde.value_queries();
    let opts = CoreOptions {
        max_iter: MAX_ITERATIONS,
        lower_bound: gradient_line(f0, gradient_norm_sq),
        trace: false,
    };
    let mut points = PointSet::new([Point::new(0.0, f0)])?;
    let mut x_right = params.alpha_prev;
    let mut best = f0;
    let mut declines = 0;
    while x_right.is_finite() && declines <= MAX_GROWTHS {
        let y_right = ftilde.value(x_right)?;
        points.insert(Point::new(x_right, y_right))?;
        let core = delta_secant_core(ftilde, points, quasi_exact_stop(params.c, f0), &opts)?;
        let low = core.points.low().expect("non-empty set");
        // Without any improvement over f~(0) the range is still inside a
        // rounding plateau (ties and ulp noise), so keep growing.
        if low.x < x_right && low.y < y_right && low.y < f0 {
            return Ok(LineSearchOutcome {
                alpha: low.x,
                value: low.y,
                gap: core.region.width_y(),
                queries: ftilde.value_queries() - before,
                points: Some(core.points),
            });
        }
        if low.y < best {
            best = low.y;
            declines += 1;
        }
        points = core.points;
        x_right *= GROWTH;
    }
    Err(Error::NotEventuallyIncreasing)
}

/// Quasi-exact search restricted to `[0, 1]` whose first interior query is
/// `first`; used by Frank-Wolfe.
pub fn quasi_exact_unit(
    ftilde: &Objective1d,
    f0: f64,
    c: f64,
    first: f64,
) -> Result<LineSearchOutcome> {
    QuasiExactParams::new(c).validate()?;
    if !(first > 0.0 && first <= 1.0) {
        return Err(Error::InvalidParameter(format!("first query {first}")));
    }
    let before = ftilde.value_queries();
    let mut points = PointSet::new([Point::new(0.0, f0), Point::new(1.0, ftilde.value(1.0)?)])?;
    if first < 1.0 {
        points.insert(Point::new(first, ftilde.value(first)?))?;
    }
    let core = delta_secant_core(
        ftilde,
        points,
        quasi_exact_stop(c, f0),
        &CoreOptions::default(),
    )?;
    let low = core.points.low().expect("non-empty set");
    Ok(LineSearchOutcome {
        alpha: low.x,
        value: low.y,
        gap: core.region.width_y(),
        queries: ftilde.value_queries() - before,
        points: Some(core.points),
    })
}

/// Armijo backtracking from `alpha_prev`; queries `f~(0)` itself.
pub fn backtracking(
    ftilde: &Objective1d,
    gradient_norm_sq: f64,
    params: &BacktrackParams,
) -> Result<LineSearchOutcome> {
    let before = ftilde.value_queries();
    let f0 = ftilde.value(0.0)?;
    let mut out = backtracking_from(ftilde, f0, gradient_norm_sq, params)?;
    out.queries = ftilde.value_queries() - before;
    Ok(out)
}

/// Armijo backtracking when `f~(0) = f0` is already known.
///
/// A step is accepted when `f0 - f~(a) >= eps a G`. Values met during a
/// grow-then-shrink cycle are remembered rather than queried again.
pub fn backtracking_from(
    ftilde: &Objective1d,
    f0: f64,
    gradient_norm_sq: f64,
    params: &BacktrackParams,
) -> Result<LineSearchOutcome> {
    params.validate()?;
    if !(gradient_norm_sq >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gradient_norm_sq = {gradient_norm_sq}"
        )));
    }
    let before = ftilde.value_queries();
    let mut seen: Vec<(f64, f64)> = Vec::new();
    let mut eval = |a: f64| -> Result<f64> {
        if let Some(&(_, y)) = seen.iter().find(|(x, _)| *x == a) {
            return Ok(y);
        }
        let y = ftilde.value(a)?;
        seen.push((a, y));
        Ok(y)
    };
    let armijo = |a: f64, y: f64| f0 - y >= params.eps * a * gradient_norm_sq;

    let mut alpha = params.alpha_prev;
    let mut growths = 0;
    loop {
        let mut shrinks = 0;
        let mut value = eval(alpha)?;
        while !armijo(alpha, value) {
            alpha *= params.tau;
            if alpha < ALPHA_FLOOR {
                return Err(Error::ArmijoNeverSatisfied { floor: ALPHA_FLOOR });
            }
            value = eval(alpha)?;
            shrinks += 1;
        }
        let grow = params.unbounded
            && growths < MAX_GROWTHS
            && match params.grow_rule {
                GrowRule::ImmediateAcceptance => shrinks == 0,
                GrowRule::SingleShrink => shrinks == 1,
            };
        if !grow {
            return Ok(LineSearchOutcome {
                alpha,
                value,
                gap: f64::NAN,
                queries: ftilde.value_queries() - before,
                points: None,
            });
        }
        alpha *= GROWTH;
        growths += 1;
    }
}
