//! One-dimensional convex minimizers.
//!
//! Gradient-based: classic [`bisection`], [`delta_bisection`] (queries the
//! middle of the certified x-interval) and [`tangent_intersection_variant`]
//! (queries where the two tangents meet; kept to show how slow that is).
//! Value-only: [`golden_section`] and [`delta_secant`], both stopped by the
//! certified y-gap of their point set.
//!
//! Every solver stops once the y-gap of its region is at most `y_tol`, so the
//! returned best value is within `y_tol` of the optimum.

use crate::error::{Error, Result};
use crate::geometry::{Line, Point};
use crate::objective::{Interval, Objective1d};
use crate::region::{
    region_from_points, region_from_tangents, region_with_lower_bound, PointSet, Region, Tangent,
    TangentPair, TangentRegion,
};

/// Hard cap on solver iterations.
pub const MAX_ITERATIONS: usize = 10_000;

/// Fraction of the x-gap by which a query is pushed away from the best point
/// (or an already queried abscissa).
pub const REPULSION: f64 = 1.0 / 128.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub y_tol: f64,
    pub max_iter: usize,
    /// Record `(query, region)` after every iteration.
    pub trace: bool,
}

impl SolveOptions {
    pub fn new(y_tol: f64) -> Self {
        Self {
            y_tol,
            ..Self::default()
        }
    }

    pub fn traced(mut self) -> Self {
        self.trace = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.y_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("y_tol = {}", self.y_tol)));
        }
        Ok(())
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            y_tol: 1e-10,
            max_iter: MAX_ITERATIONS,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub query: f64,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub best: Point,
    pub region: Region,
    /// Iterations after the initial boundary queries.
    pub iterations: usize,
    pub value_queries: usize,
    pub gradient_queries: usize,
    pub trace: Vec<TraceStep>,
}

impl SolveReport {
    pub fn total_queries(&self) -> usize {
        self.value_queries + self.gradient_queries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QueryRule {
    IntervalMidpoint,
    GapMidpoint,
    TangentIntersection,
}

/// Gradient-sign bisection on `[lo, hi]`, stopped by the tangent y-gap.
pub fn bisection(f: &Objective1d, interval: Interval, opts: &SolveOptions) -> Result<SolveReport> {
    tangent_search(f, interval, opts, QueryRule::IntervalMidpoint)
}

/// Bisection on the certified x-gap instead of the bracketing interval.
pub fn delta_bisection(
    f: &Objective1d,
    interval: Interval,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    tangent_search(f, interval, opts, QueryRule::GapMidpoint)
}

/// Queries at the lowest point of the tangent region. Can be very slow.
pub fn tangent_intersection_variant(
    f: &Objective1d,
    interval: Interval,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    tangent_search(f, interval, opts, QueryRule::TangentIntersection)
}

fn tangent_search(
    f: &Objective1d,
    interval: Interval,
    opts: &SolveOptions,
    rule: QueryRule,
) -> Result<SolveReport> {
    opts.validate()?;
    let query = |x: f64| -> Result<Tangent> {
        let (y, g) = f.value_and_gradient(x)?;
        Ok(Tangent::new(Point::new(x, y), g))
    };
    let mut pair = TangentPair {
        left: query(interval.lo)?,
        right: query(interval.hi)?,
    };
    let mut trace = Vec::new();
    let report = |best: Point, region: Region, iterations: usize, trace: Vec<TraceStep>| {
        SolveReport {
            best,
            region,
            iterations,
            value_queries: f.value_queries(),
            gradient_queries: f.gradient_queries(),
            trace,
        }
    };

    let mut iterations = 0;
    loop {
        let region = match region_from_tangents(&pair) {
            TangentRegion::Boundary(p) => {
                return Ok(report(p, Region::point(p), iterations, trace));
            }
            TangentRegion::Interior(r) => r,
        };
        if region.width_y() <= opts.y_tol {
            return Ok(report(pair.low(), region, iterations, trace));
        }
        if iterations >= opts.max_iter {
            return Err(Error::IterationCapExceeded { cap: opts.max_iter });
        }
        let (x0, x1) = (pair.left.point.x, pair.right.point.x);
        let xq = match rule {
            QueryRule::IntervalMidpoint => 0.5 * (x0 + x1),
            QueryRule::GapMidpoint => region.mid_x(),
            QueryRule::TangentIntersection => {
                let hit = crate::geometry::intersect(&pair.left.line(), &pair.right.line());
                let inset = REPULSION * (x1 - x0);
                let x = if hit.degenerate { region.mid_x() } else { hit.point.x };
                // A vertical tangent puts the intersection on an end point.
                x.clamp(x0 + inset, x1 - inset)
            }
        };
        if !(xq > x0 && xq < x1) {
            return Err(Error::Stalled { x: xq });
        }
        let t = query(xq)?;
        iterations += 1;
        if t.slope == 0.0 {
            let region = Region::point(t.point);
            if opts.trace {
                trace.push(TraceStep { query: xq, region });
            }
            return Ok(report(t.point, region, iterations, trace));
        }
        if t.slope < 0.0 {
            pair.left = t;
        } else {
            pair.right = t;
        }
        if opts.trace {
            trace.push(TraceStep {
                query: xq,
                region: region_from_tangents(&pair).region(),
            });
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search, stopped by the five-point y-gap of all queries.
pub fn golden_section(
    f: &Objective1d,
    interval: Interval,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let mut points = PointSet::new([
        Point::new(interval.lo, f.value(interval.lo)?),
        Point::new(interval.hi, f.value(interval.hi)?),
    ])?;
    let mut trace = Vec::new();
    let (mut a, mut b) = (interval.lo, interval.hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f64::NAN;
    let mut fd = f64::NAN;
    let mut iterations = 0;

    loop {
        let region = region_from_points(&points)?;
        if region.width_y() <= opts.y_tol {
            return Ok(SolveReport {
                best: points.low().expect("non-empty"),
                region,
                iterations,
                value_queries: f.value_queries(),
                gradient_queries: f.gradient_queries(),
                trace,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::IterationCapExceeded { cap: opts.max_iter });
        }
        let xq = if fc.is_nan() {
            fc = f.value(c)?;
            c
        } else if fd.is_nan() {
            fd = f.value(d)?;
            d
        } else if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f.value(c)?;
            c
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f.value(d)?;
            d
        };
        let y = if xq == c { fc } else { fd };
        if !points.insert(Point::new(xq, y))? {
            return Err(Error::Stalled { x: xq });
        }
        iterations += 1;
        if opts.trace {
            trace.push(TraceStep {
                query: xq,
                region: region_from_points(&points)?,
            });
        }
    }
}

/// Options for [`delta_secant_core`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreOptions {
    pub max_iter: usize,
    /// Affine lower bound on the objective, valid over the whole point set.
    pub lower_bound: Option<Line>,
    pub trace: bool,
}

impl Default for CoreOptions {
    fn default() -> Self {
        Self {
            max_iter: MAX_ITERATIONS,
            lower_bound: None,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreOutcome {
    /// Five-point window around the best point, plus the extreme points.
    pub points: PointSet,
    pub region: Region,
    pub iterations: usize,
    pub trace: Vec<TraceStep>,
}

/// Repeatedly queries the middle of the certified x-gap until `stop_when`
/// accepts the current points and region.
///
/// The initial set must bracket the minimizer.
pub fn delta_secant_core<S>(
    f: &Objective1d,
    initial: PointSet,
    mut stop_when: S,
    opts: &CoreOptions,
) -> Result<CoreOutcome>
where
    S: FnMut(&PointSet, &Region) -> bool,
{
    let mut points = initial;
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let region = region_with_lower_bound(&points, opts.lower_bound.as_ref())?;
        if stop_when(&points, &region) {
            return Ok(CoreOutcome {
                points,
                region,
                iterations,
                trace,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::IterationCapExceeded { cap: opts.max_iter });
        }
        let xq = next_secant_query(&points, &region)?;
        let y = f.value(xq)?;
        points.insert(Point::new(xq, y))?;
        points.retain_window();
        iterations += 1;
        if opts.trace {
            trace.push(TraceStep {
                query: xq,
                region: region_with_lower_bound(&points, opts.lower_bound.as_ref())?,
            });
        }
    }
}

fn next_secant_query(points: &PointSet, region: &Region) -> Result<f64> {
    let width = region.width_x();
    let mid = region.mid_x();
    let x_low = points.low().expect("region implies a finite point").x;
    let shift = REPULSION * width;
    let mut xq = mid;
    // Querying next to the best point teaches little about the gap.
    if points.contains_x(mid) || (x_low - mid).abs() < shift {
        xq = mid + shift;
        if points.contains_x(xq) || !(xq > region.x_lo && xq < region.x_hi) {
            xq = mid - shift;
        }
    }
    if points.contains_x(xq) || !xq.is_finite() {
        return Err(Error::Stalled { x: xq });
    }
    Ok(xq)
}

/// Value-only search on `[lo, hi]` querying the middle of the x-gap.
pub fn delta_secant(
    f: &Objective1d,
    interval: Interval,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let initial = PointSet::new([
        Point::new(interval.lo, f.value(interval.lo)?),
        Point::new(interval.hi, f.value(interval.hi)?),
    ])?;
    let y_tol = opts.y_tol;
    let core = delta_secant_core(
        f,
        initial,
        |_, r| r.width_y() <= y_tol,
        &CoreOptions {
            max_iter: opts.max_iter,
            lower_bound: None,
            trace: opts.trace,
        },
    )?;
    Ok(SolveReport {
        best: core.points.low().expect("non-empty"),
        region: core.region,
        iterations: core.iterations,
        value_queries: f.value_queries(),
        gradient_queries: f.gradient_queries(),
        trace: core.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{appendix_benchmark, lookup};

    fn run(
        solver: fn(&Objective1d, Interval, &SolveOptions) -> Result<SolveReport>,
        name: &str,
        gradient: bool,
        opts: &SolveOptions,
    ) -> SolveReport {
        let b = lookup(name).unwrap();
        let f = if gradient {
            b.objective()
        } else {
            b.value_objective()
        };
        solver(&f, b.interval(), opts).unwrap()
    }

    fn widths(r: &SolveReport, initial: f64) -> Vec<f64> {
        std::iter::once(initial)
            .chain(r.trace.iter().map(|s| s.region.width_x()))
            .collect()
    }

    #[test]
    fn bisection_iterations() {
        let o = SolveOptions::default();
        assert_eq!(run(bisection, "x^2", true, &o).iterations, 20);
        assert_eq!(run(bisection, "-x", true, &o).iterations, 0);
        assert_eq!(run(bisection, "|x|", true, &o).iterations, 37);
    }

    #[test]
    fn delta_bisection_iterations() {
        let o = SolveOptions::default();
        assert_eq!(run(delta_bisection, "x^2", true, &o).iterations, 12);
        assert_eq!(run(delta_bisection, "|x|", true, &o).iterations, 1);
    }

    #[test]
    fn boundary_minimum_has_zero_gap() {
        let r = run(delta_bisection, "-x", true, &SolveOptions::default());
        assert_eq!(r.best, Point::new(7.0, -7.0));
        assert_eq!(r.region.width_x(), 0.0);
        assert_eq!(r.region.width_y(), 0.0);
    }

    #[test]
    fn zero_gradient_certifies_the_minimum() {
        // The first Delta-Bisection query of x^2 on [-2, 2] lands on 0.
        let f = Objective1d::with_gradient(|x| x * x, |x| 2.0 * x);
        let r = delta_bisection(&f, Interval::new(-2.0, 2.0).unwrap(), &SolveOptions::default())
            .unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.best, Point::new(0.0, 0.0));
        assert_eq!(r.region.width_y(), 0.0);
    }

    #[test]
    fn delta_bisection_halves_every_iteration_on_x4() {
        let r = run(delta_bisection, "x^4", true, &SolveOptions::default().traced());
        let w = widths(&r, 27.0);
        for t in 1..w.len() {
            assert!(w[t] <= 0.5 * w[t - 1], "t={t}: {} -> {}", w[t - 1], w[t]);
        }
    }

    #[test]
    fn delta_secant_queries() {
        let o = SolveOptions::default();
        // Queries include the two boundary evaluations.
        assert_eq!(run(delta_secant, "-x", false, &o).value_queries, 3);
        assert_eq!(run(delta_secant, "x^2", false, &o).value_queries, 26);
        assert_eq!(run(delta_secant, "|x|", false, &o).value_queries, 7);
    }

    #[test]
    fn golden_section_queries() {
        let o = SolveOptions::default();
        assert_eq!(run(golden_section, "x^2", false, &o).value_queries, 33);
        assert_eq!(run(golden_section, "sqrt(1+x^2)", false, &o).value_queries, 41);
    }

    #[test]
    fn golden_section_probes_sit_at_golden_ratios() {
        let r = run(golden_section, "x^4", false, &SolveOptions::default().traced());
        let q: Vec<f64> = r.trace.iter().map(|s| s.query).collect();
        let (lo, w) = (-20.0, 27.0);
        assert!((q[0] - (lo + (1.0 - INV_PHI) * w)).abs() < 1e-12);
        assert!((q[1] - (lo + INV_PHI * w)).abs() < 1e-12);
        // f(c) > f(d) keeps [c, hi], whose new upper probe is at the ratio again.
        let (c, w2) = (q[0], lo + w - q[0]);
        assert!((q[2] - (c + INV_PHI * w2)).abs() < 1e-12);
    }

    #[test]
    fn delta_secant_two_step_contraction_up_to_repulsion() {
        // Exact halving needs a vanishing repulsion; with REPULSION the shifted
        // query can leave the gap up to REPULSION wider than half.
        let r = run(delta_secant, "xlogx-x", false, &SolveOptions::default().traced());
        let w = widths(&r, 20.0 - 0.001);
        for t in 2..w.len() {
            assert!(
                w[t] <= (0.5 + REPULSION) * w[t - 2],
                "t={t}: {} -> {}",
                w[t - 2],
                w[t]
            );
        }
    }

    #[test]
    fn delta_secant_beats_golden_section_on_the_x_gap() {
        let o = SolveOptions::default().traced();
        let ds = run(delta_secant, "sqrt(1+x^2)", false, &o);
        assert!(ds.trace[3].region.width_x() < 2.0);
        let gss = run(golden_section, "sqrt(1+x^2)", false, &o);
        let first = gss
            .trace
            .iter()
            .position(|s| s.region.width_x() < 2.0)
            .unwrap();
        assert!(first + 1 >= 10, "GSS reached the same x-gap after {}", first + 1);
    }

    #[test]
    fn tangent_intersection_is_slow_on_the_appendix_function() {
        let b = appendix_benchmark();
        let o = SolveOptions::new(1e-3);
        let slow = tangent_intersection_variant(&b.objective(), b.interval(), &o).unwrap();
        let fast = delta_secant(&b.value_objective(), b.interval(), &o).unwrap();
        assert!(slow.iterations > 50, "{}", slow.iterations);
        assert!(fast.iterations < 15, "{}", fast.iterations);
    }

    #[test]
    fn tangent_intersection_matches_delta_bisection_on_symmetric_start() {
        let f = Objective1d::with_gradient(|x| x * x, |x| 2.0 * x);
        let iv = Interval::new(-3.0, 3.0).unwrap();
        let o = SolveOptions::default().traced();
        let a = tangent_intersection_variant(&f, iv, &o).unwrap();
        let b = delta_bisection(&f, iv, &o).unwrap();
        assert_eq!(a.trace[0].query, b.trace[0].query);
    }

    #[test]
    fn report_counters_match_objective() {
        let b = lookup("x^2").unwrap();
        let f = b.objective();
        let r = delta_bisection(&f, b.interval(), &SolveOptions::default()).unwrap();
        assert_eq!(r.value_queries, f.value_queries());
        assert_eq!(r.gradient_queries, f.gradient_queries());
        assert_eq!(r.total_queries(), 2 * (r.iterations + 2));
        assert_eq!(r.region.y_hi, r.best.y);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let b = lookup("x^2").unwrap();
        let o = SolveOptions {
            max_iter: 3,
            ..SolveOptions::default()
        };
        let err = delta_secant(&b.value_objective(), b.interval(), &o).unwrap_err();
        assert!(matches!(err, Error::IterationCapExceeded { cap: 3 }));
    }

    #[test]
    fn nan_objective_is_rejected() {
        let f = Objective1d::new(|x: f64| if x > 0.0 { f64::NAN } else { x * x });
        let err = delta_secant(&f, Interval::new(-1.0, 1.0).unwrap(), &SolveOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::ObjectiveNotFinite { .. }));
    }

    #[test]
    fn negative_tolerance_is_invalid() {
        let f = Objective1d::new(|x| x * x);
        let o = SolveOptions::new(-1.0);
        assert!(delta_secant(&f, Interval::new(-1.0, 1.0).unwrap(), &o).is_err());
    }
}
