//! Points, secant and tangent lines, and line-line intersection.
//!
//! Lines are always stored in anchored form `a (x - x0) + y0`; the intercept
//! form loses precision as soon as the anchor is far from the origin.
//!
//! A line whose slope or anchor value is not finite is *vertical*: it lies on
//! the abscissa of its anchor. Vertical lines arise from tangents at points
//! where the objective (or its derivative) is `+inf`.

use crate::error::{Error, Result};

/// A queried pair `(x, f(x))`.
///
/// `y == +inf` is allowed and marks a point outside the effective domain of
/// an extended-value convex function; such a point only bounds the abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// True when the point carries no value information (`y == +inf`).
    pub fn is_virtual(&self) -> bool {
        self.y == f64::INFINITY
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// An affine function anchored at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub anchor: Point,
}

impl Line {
    pub const fn new(slope: f64, anchor: Point) -> Self {
        Self { slope, anchor }
    }

    /// Tangent at `anchor` with the given (sub)derivative.
    pub const fn tangent(anchor: Point, slope: f64) -> Self {
        Self { slope, anchor }
    }

    pub const fn horizontal(y: f64) -> Self {
        Self {
            slope: 0.0,
            anchor: Point::new(0.0, y),
        }
    }

    pub fn is_vertical(&self) -> bool {
        !self.slope.is_finite() || !self.anchor.y.is_finite()
    }

    /// Affine evaluation; exact at the anchor.
    pub fn value_at(&self, x: f64) -> f64 {
        if x == self.anchor.x {
            self.anchor.y
        } else {
            self.slope * (x - self.anchor.x) + self.anchor.y
        }
    }
}

/// The line through `p1` and `p2`, anchored at `p1`.
pub fn secant(p1: Point, p2: Point) -> Result<Line> {
    if p1.x == p2.x {
        return Err(Error::VerticalSecant { x: p1.x });
    }
    Ok(Line::new((p1.y - p2.y) / (p1.x - p2.x), p1))
}

pub fn line_value(line: &Line, x: f64) -> f64 {
    line.value_at(x)
}

/// Result of intersecting two lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intersection {
    pub point: Point,
    /// `|l12(x) - l34(x)|` at the returned abscissa.
    pub residual: f64,
    /// Set when the lines are parallel (or numerically so): no finite
    /// intersection exists and callers must not use `point`.
    pub degenerate: bool,
}

impl Intersection {
    fn degenerate() -> Self {
        Self {
            point: Point::new(f64::NAN, f64::NEG_INFINITY),
            residual: f64::INFINITY,
            degenerate: true,
        }
    }
}

const REFINEMENT_STEPS: usize = 3;

/// Intersection of two lines by fixed-point refinement.
///
/// Starting from `x = l12.anchor.x`, the correction
/// `x <- x + (l12(x) - l34(x)) / (a34 - a12)` is applied three times. The
/// returned ordinate is the smaller of the two line values, so it never
/// overestimates the lower envelope.
pub fn intersect(l12: &Line, l34: &Line) -> Intersection {
    match (l12.is_vertical(), l34.is_vertical()) {
        (true, true) => return Intersection::degenerate(),
        (true, false) => return vertical_hit(l12.anchor.x, l34),
        (false, true) => return vertical_hit(l34.anchor.x, l12),
        (false, false) => {}
    }
    let denom = l34.slope - l12.slope;
    if denom == 0.0 || !denom.is_finite() {
        return Intersection::degenerate();
    }
    let mut x = l12.anchor.x;
    for _ in 0..REFINEMENT_STEPS {
        let next = x + (l12.value_at(x) - l34.value_at(x)) / denom;
        if !next.is_finite() {
            return Intersection::degenerate();
        }
        x = next;
    }
    let (v12, v34) = (l12.value_at(x), l34.value_at(x));
    Intersection {
        point: Point::new(x, v12.min(v34)),
        residual: (v12 - v34).abs(),
        degenerate: false,
    }
}

fn vertical_hit(x: f64, other: &Line) -> Intersection {
    Intersection {
        point: Point::new(x, other.value_at(x)),
        residual: 0.0,
        degenerate: false,
    }
}
