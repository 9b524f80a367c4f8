//! Certified optimality regions.
//!
//! A region bounds both the location `x*` of a minimizer and the optimal value
//! `f(x*)` using only convexity and the observations made so far. Two flavours
//! exist: one built from two tangents (value + derivative at two points), and
//! one built from function values alone, which only needs the five points
//! around the current best point.

use crate::error::{Error, Result};
use crate::geometry::{intersect, secant, Line, Point};

/// Relative slack tolerated when checking that a point lies below the chord
/// of its neighbours.
pub const CONVEXITY_TOLERANCE: f64 = 1e-9;

/// Axis-aligned bounds `[x_lo, x_hi] x [y_lo, y_hi]` on `(x*, f(x*))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_lo: f64,
    pub x_hi: f64,
    /// May be `-inf` when the observations do not bound the optimum from below.
    pub y_lo: f64,
    /// Always the best observed value.
    pub y_hi: f64,
}

impl Region {
    /// The degenerate region `{p}`.
    pub fn point(p: Point) -> Self {
        Self {
            x_lo: p.x,
            x_hi: p.x,
            y_lo: p.y,
            y_hi: p.y,
        }
    }

    pub fn width_x(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn width_y(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn mid_x(&self) -> f64 {
        0.5 * (self.x_lo + self.x_hi)
    }

    pub fn contains_x(&self, x: f64, slack: f64) -> bool {
        x >= self.x_lo - slack && x <= self.x_hi + slack
    }

    pub fn contains_y(&self, y: f64, slack: f64) -> bool {
        y >= self.y_lo - slack && y <= self.y_hi + slack
    }

    /// Componentwise interval inclusion, up to `slack`.
    pub fn is_within(&self, outer: &Region, slack: f64) -> bool {
        self.x_lo >= outer.x_lo - slack
            && self.x_hi <= outer.x_hi + slack
            && self.y_lo >= outer.y_lo - slack
            && self.y_hi <= outer.y_hi + slack
    }
}

/// A point together with a (sub)derivative at that point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent {
    pub point: Point,
    pub slope: f64,
}

impl Tangent {
    pub const fn new(point: Point, slope: f64) -> Self {
        Self { point, slope }
    }

    pub fn line(&self) -> Line {
        Line::tangent(self.point, self.slope)
    }
}

/// Two tangents bracketing the minimizer: `left.slope <= 0 <= right.slope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPair {
    pub left: Tangent,
    pub right: Tangent,
}

impl TangentPair {
    pub fn y_low(&self) -> f64 {
        self.left.point.y.min(self.right.point.y)
    }

    pub fn y_high(&self) -> f64 {
        self.left.point.y.max(self.right.point.y)
    }

    /// The lower of the two points; the left one on ties.
    pub fn low(&self) -> Point {
        if self.right.point.y < self.left.point.y {
            self.right.point
        } else {
            self.left.point
        }
    }
}

/// Outcome of [`region_from_tangents`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangentRegion {
    /// The usual two-triangle region between the tangents.
    Interior(Region),
    /// A derivative sign at one end already certifies that end as the
    /// minimizer.
    Boundary(Point),
}

impl TangentRegion {
    pub fn region(&self) -> Region {
        match self {
            TangentRegion::Interior(r) => *r,
            TangentRegion::Boundary(p) => Region::point(*p),
        }
    }
}

/// Region delimited by two tangents and the horizontal line at the best value.
pub fn region_from_tangents(pair: &TangentPair) -> TangentRegion {
    let (l, r) = (pair.left, pair.right);
    if l.slope > 0.0 {
        return TangentRegion::Boundary(l.point);
    }
    if r.slope < 0.0 {
        return TangentRegion::Boundary(r.point);
    }
    let y_hi = pair.y_low();

    // Where each tangent crosses the level y_hi. A virtual end (y = +inf)
    // only bounds the abscissa.
    let x_lo = if l.slope == 0.0 || l.point.y <= y_hi || l.point.is_virtual() {
        l.point.x
    } else {
        l.point.x + (l.point.y - y_hi) / -l.slope
    };
    let x_hi = if r.slope == 0.0 || r.point.y <= y_hi || r.point.is_virtual() {
        r.point.x
    } else {
        r.point.x - (r.point.y - y_hi) / r.slope
    };
    let x_lo = x_lo.clamp(l.point.x, r.point.x);
    let x_hi = x_hi.clamp(x_lo, r.point.x);

    let y_lo = if l.slope == 0.0 || r.slope == 0.0 {
        y_hi
    } else {
        let hit = intersect(&l.line(), &r.line());
        if hit.degenerate {
            f64::NEG_INFINITY
        } else {
            hit.point.y.min(y_hi)
        }
    };
    TangentRegion::Interior(Region {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
    })
}

/// Points sorted by strictly increasing abscissa.
///
/// `left_open` / `right_open` record that a window cut from a larger set had
/// fewer than two points on that side of the best point, i.e. that side is
/// padded with virtual points carrying no information.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    points: Vec<Point>,
    left_open: bool,
    right_open: bool,
}

impl PointSet {
    pub fn new<I>(points: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<Point>,
    {
        let mut set = Self::default();
        for p in points {
            let p = p.into();
            check_point(p)?;
            if let Err(i) = set.search(p.x) {
                set.points.insert(i, p);
            } else {
                let existing = set.points[set.search(p.x).unwrap()];
                if existing.y != p.y {
                    return Err(Error::InvalidParameter(format!(
                        "two values {} and {} at x = {}",
                        existing.y, p.y, p.x
                    )));
                }
            }
        }
        Ok(set)
    }

    fn search(&self, x: f64) -> std::result::Result<usize, usize> {
        self.points.binary_search_by(|p| p.x.total_cmp(&x))
    }

    /// Inserts `p`; returns `false` (leaving the set unchanged) when a point
    /// with the same abscissa is already present.
    pub fn insert(&mut self, p: Point) -> Result<bool> {
        check_point(p)?;
        match self.search(p.x) {
            Ok(_) => Ok(false),
            Err(i) => {
                self.points.insert(i, p);
                Ok(true)
            }
        }
    }

    pub fn contains_x(&self, x: f64) -> bool {
        self.search(x).is_ok()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<Point> {
        self.points.first().copied()
    }

    pub fn last(&self) -> Option<Point> {
        self.points.last().copied()
    }

    pub fn left_open(&self) -> bool {
        self.left_open
    }

    pub fn right_open(&self) -> bool {
        self.right_open
    }

    /// Index of the leftmost point with minimal (finite) value.
    pub fn low_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, p) in self.points.iter().enumerate() {
            if p.is_virtual() {
                continue;
            }
            match best {
                Some(b) if self.points[b].y <= p.y => {}
                _ => best = Some(i),
            }
        }
        best
    }

    pub fn low(&self) -> Option<Point> {
        self.low_index().map(|i| self.points[i])
    }

    /// Leftmost point with maximal value.
    pub fn high(&self) -> Option<Point> {
        self.points
            .iter()
            .copied()
            .reduce(|a, b| if b.y > a.y { b } else { a })
    }

    /// Drops every point outside the five-point window, except the extreme
    /// left and right points.
    pub fn retain_window(&mut self) {
        let Some(k) = self.low_index() else { return };
        let n = self.points.len();
        let (lo, hi) = (k.saturating_sub(2), (k + 2).min(n - 1));
        let keep: Vec<Point> = self
            .points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i == 0 || i == n - 1 || (lo..=hi).contains(&i))
            .map(|(_, p)| *p)
            .collect();
        self.points = keep;
    }

    /// Checks every consecutive triple of finite points against the chord
    /// through its outer members.
    pub fn check_convexity(&self) -> Result<()> {
        for w in self.points.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            if b.is_virtual() {
                if !a.is_virtual() && !c.is_virtual() {
                    return Err(Error::ConvexityViolated {
                        x: b.x,
                        excess: f64::INFINITY,
                    });
                }
                continue;
            }
            if a.is_virtual() || c.is_virtual() {
                continue;
            }
            let chord = secant(a, c)?.value_at(b.x);
            let excess = b.y - chord;
            if excess > CONVEXITY_TOLERANCE * (1.0 + b.y.abs().max(chord.abs())) {
                return Err(Error::ConvexityViolated { x: b.x, excess });
            }
        }
        Ok(())
    }
}

fn check_point(p: Point) -> Result<()> {
    if !p.x.is_finite() || p.y.is_nan() || p.y == f64::NEG_INFINITY {
        return Err(Error::ObjectiveNotFinite { x: p.x, value: p.y });
    }
    Ok(())
}

/// The at most five points centred on the best point of `set`.
pub fn five_point_window(set: &PointSet) -> PointSet {
    let Some(k) = set.low_index() else {
        return set.clone();
    };
    let n = set.len();
    let lo = k.saturating_sub(2);
    let hi = (k + 2).min(n - 1);
    PointSet {
        points: set.points[lo..=hi].to_vec(),
        left_open: k < 2,
        right_open: k + 2 >= n,
    }
}

/// Optimality region of a set of function evaluations.
pub fn region_from_points(set: &PointSet) -> Result<Region> {
    region_with_lower_bound(set, None)
}

/// Like [`region_from_points`], with an extra affine lower bound on `f` valid
/// over the whole set (for instance a known tangent at the left end).
pub fn region_with_lower_bound(set: &PointSet, lower_bound: Option<&Line>) -> Result<Region> {
    if set.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: set.len(),
        });
    }
    let k = set.low_index().ok_or(Error::InsufficientPoints {
        needed: 1,
        got: 0,
    })?;
    set.check_convexity()?;

    let pts = set.points();
    let n = pts.len();
    let at = |i: isize| -> Option<Point> {
        if i < 0 || i as usize >= n {
            None
        } else {
            Some(pts[i as usize])
        }
    };
    let finite = |i: isize| at(i).filter(|p| !p.is_virtual());
    let ki = k as isize;
    let low = pts[k];
    let y_hi = low.y;

    // Outer secants; each is only informative when both of its points carry
    // a value.
    let outer_left = match (finite(ki - 2), finite(ki - 1)) {
        (Some(a), Some(b)) => Some(secant(a, b)?),
        _ => None,
    };
    let outer_right = match (finite(ki + 1), finite(ki + 2)) {
        (Some(a), Some(b)) => Some(secant(a, b)?),
        _ => None,
    };
    // Secants through the best point and its neighbours.
    let inner_left = finite(ki - 1).map(|p| secant(p, low)).transpose()?;
    let inner_right = finite(ki + 1).map(|p| secant(low, p)).transpose()?;

    let mut x_lo = match at(ki - 1) {
        None => low.x,
        Some(prev) => match &outer_left {
            Some(line) if line.slope < 0.0 => {
                let p = finite(ki - 1).expect("outer secant implies finite neighbour");
                (p.x + (y_hi - p.y) / line.slope).clamp(prev.x, low.x)
            }
            _ => prev.x,
        },
    };
    let mut plateau = false;
    let x_hi = match at(ki + 1) {
        None => low.x,
        Some(next) => match &outer_right {
            Some(line) if line.slope > 0.0 => {
                let p = finite(ki + 1).expect("outer secant implies finite neighbour");
                (p.x + (y_hi - p.y) / line.slope).clamp(low.x, next.x)
            }
            Some(_) => {
                // Flat or descending outer secant. When it is flat at the
                // best level, f is constant over the window's right half.
                let far = at(ki + 2).expect("outer secant implies two points");
                if next.y == y_hi && far.y == y_hi {
                    plateau = true;
                    far.x
                } else {
                    next.x
                }
            }
            None => next.x,
        },
    };
    if let Some(lb) = lower_bound {
        // lb(x) <= f(x*) <= y_hi restricts x* to one side of lb's level crossing.
        if lb.slope < 0.0 {
            let cross = lb.anchor.x + (y_hi - lb.anchor.y) / lb.slope;
            if cross.is_finite() {
                x_lo = x_lo.max(cross).min(low.x);
            }
        }
    }

    if plateau {
        return Ok(Region {
            x_lo,
            x_hi,
            y_lo: y_hi,
            y_hi,
        });
    }

    let mut left_lines: Vec<Line> = outer_left.into_iter().chain(inner_right).collect();
    let mut right_lines: Vec<Line> = inner_left.into_iter().chain(outer_right).collect();
    if let Some(lb) = lower_bound {
        left_lines.push(*lb);
        right_lines.push(*lb);
    }
    let y_left = envelope_min(&left_lines, x_lo, low);
    let y_right = envelope_min(&right_lines, x_hi, low);
    Ok(Region {
        x_lo,
        x_hi,
        y_lo: y_left.min(y_right).min(y_hi),
        y_hi,
    })
}

/// Minimum over `x` between `edge` and `low.x` of the maximum of `lines`.
fn envelope_min(lines: &[Line], edge: f64, low: Point) -> f64 {
    if edge == low.x {
        return low.y;
    }
    if lines.is_empty() {
        return f64::NEG_INFINITY;
    }
    let (a, b) = if edge < low.x {
        (edge, low.x)
    } else {
        (low.x, edge)
    };
    let upper = |x: f64| {
        lines
            .iter()
            .map(|l| l.value_at(x))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = upper(a).min(upper(b));
    for (i, l1) in lines.iter().enumerate() {
        for l2 in &lines[i + 1..] {
            let hit = intersect(l1, l2);
            if hit.degenerate || hit.point.x < a || hit.point.x > b {
                continue;
            }
            let others = lines
                .iter()
                .filter(|l| !std::ptr::eq(*l, l1) && !std::ptr::eq(*l, l2))
                .map(|l| l.value_at(hit.point.x))
                .fold(f64::NEG_INFINITY, f64::max);
            best = best.min(hit.point.y.max(others));
        }
    }
    best
}
