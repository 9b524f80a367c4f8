//! Query-counting objective handles.

use std::cell::Cell;
use std::fmt;

use crate::error::{Error, Result};

type ScalarFn<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// A univariate objective with optional derivative, counting every query.
///
/// Values may be `+inf` (outside the effective domain); `NaN` and `-inf` are
/// rejected with [`Error::ObjectiveNotFinite`].
pub struct Objective1d<'a> {
    value: ScalarFn<'a>,
    gradient: Option<ScalarFn<'a>>,
    value_queries: Cell<usize>,
    gradient_queries: Cell<usize>,
}

impl<'a> Objective1d<'a> {
    pub fn new(value: impl Fn(f64) -> f64 + 'a) -> Self {
        Self {
            value: Box::new(value),
            gradient: None,
            value_queries: Cell::new(0),
            gradient_queries: Cell::new(0),
        }
    }

    pub fn with_gradient(
        value: impl Fn(f64) -> f64 + 'a,
        gradient: impl Fn(f64) -> f64 + 'a,
    ) -> Self {
        Self {
            gradient: Some(Box::new(gradient)),
            ..Self::new(value)
        }
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.value_queries.set(self.value_queries.get() + 1);
        let y = (self.value)(x);
        if y.is_nan() || y == f64::NEG_INFINITY {
            return Err(Error::ObjectiveNotFinite { x, value: y });
        }
        Ok(y)
    }

    pub fn gradient(&self, x: f64) -> Result<f64> {
        let g = self.gradient.as_ref().ok_or(Error::GradientUnavailable)?;
        self.gradient_queries.set(self.gradient_queries.get() + 1);
        let d = g(x);
        if d.is_nan() {
            return Err(Error::ObjectiveNotFinite { x, value: d });
        }
        Ok(d)
    }

    /// One combined query; increments both counters.
    pub fn value_and_gradient(&self, x: f64) -> Result<(f64, f64)> {
        let d = self.gradient(x)?;
        Ok((self.value(x)?, d))
    }

    pub fn value_queries(&self) -> usize {
        self.value_queries.get()
    }

    pub fn gradient_queries(&self) -> usize {
        self.gradient_queries.get()
    }

    /// Value plus gradient queries, i.e. a combined query counts as two.
    pub fn total_queries(&self) -> usize {
        self.value_queries() + self.gradient_queries()
    }
}

impl fmt::Debug for Objective1d<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective1d")
            .field("has_gradient", &self.has_gradient())
            .field("value_queries", &self.value_queries())
            .field("gradient_queries", &self.gradient_queries())
            .finish()
    }
}

/// A closed search interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counters_track_each_query() {
        let f = Objective1d::with_gradient(|x| x * x, |x| 2.0 * x);
        f.value(1.0).unwrap();
        f.gradient(1.0).unwrap();
        f.value_and_gradient(2.0).unwrap();
        assert_eq!(f.value_queries(), 2);
        assert_eq!(f.gradient_queries(), 2);
        assert_eq!(f.total_queries(), 4);
    }

    #[test]
    fn nan_and_negative_infinity_are_rejected() {
        let f = Objective1d::new(|x| if x < 0.0 { f64::NAN } else { f64::NEG_INFINITY });
        assert!(matches!(f.value(-1.0), Err(Error::ObjectiveNotFinite { .. })));
        assert!(matches!(f.value(1.0), Err(Error::ObjectiveNotFinite { .. })));
    }

    #[test]
    fn positive_infinity_is_a_valid_value() {
        let f = Objective1d::new(|x: f64| (1000.0 * x).exp());
        assert_eq!(f.value(1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn missing_gradient() {
        let f = Objective1d::new(|x| x);
        assert_eq!(f.gradient(0.0), Err(Error::GradientUnavailable));
        assert_eq!(f.gradient_queries(), 0);
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 1.0).is_err());
        assert_eq!(Interval::new(-20.0, 7.0).unwrap().width(), 27.0);
    }
}
