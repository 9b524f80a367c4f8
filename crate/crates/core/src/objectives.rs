//! Benchmark objectives: the 1-d convex test functions, the multivariate
//! descent benchmarks, and a randomized softmax-style loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descent::{FnObjectiveNd, ObjectiveNd};
use crate::error::{Error, Result};
use crate::objective::{Interval, Objective1d};

/// A registered 1-d convex benchmark with analytic derivative.
///
/// At kinks the derivative returned is the right derivative.
#[derive(Debug, Clone, Copy)]
pub struct Benchmark1d {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub df: fn(f64) -> f64,
    pub interval: (f64, f64),
    pub x_star: f64,
    pub f_star: f64,
    /// Abscissae where `f` is not differentiable.
    pub kinks: &'static [f64],
}

impl Benchmark1d {
    pub fn interval(&self) -> Interval {
        Interval::new(self.interval.0, self.interval.1).expect("registered intervals are valid")
    }

    pub fn objective(&self) -> Objective1d<'static> {
        Objective1d::with_gradient(self.f, self.df)
    }

    pub fn value_objective(&self) -> Objective1d<'static> {
        Objective1d::new(self.f)
    }
}

fn max_of(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0.max(b.0)
}

/// Right derivative of `max(a, b)` given `(value, derivative)` pairs.
fn dmax_of(a: (f64, f64), b: (f64, f64)) -> f64 {
    if a.0 > b.0 {
        a.1
    } else if b.0 > a.0 {
        b.1
    } else {
        a.1.max(b.1)
    }
}

fn neg_x(x: f64) -> f64 {
    -x
}
fn d_neg_x(_: f64) -> f64 {
    -1.0
}
fn abs(x: f64) -> f64 {
    x.abs()
}
fn d_abs(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}
fn max_neg_x_2x(x: f64) -> f64 {
    max_of((-x, -1.0), (2.0 * x, 2.0))
}
fn d_max_neg_x_2x(x: f64) -> f64 {
    dmax_of((-x, -1.0), (2.0 * x, 2.0))
}
fn abs_pow_1_1(x: f64) -> f64 {
    x.abs().powf(1.1)
}
fn d_abs_pow_1_1(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.1 * x.abs().powf(0.1) * x.signum()
    }
}
fn square(x: f64) -> f64 {
    x * x
}
fn d_square(x: f64) -> f64 {
    2.0 * x
}
fn soft_abs(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}
fn d_soft_abs(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}
fn x_log_x(x: f64) -> f64 {
    x * x.ln() - x
}
fn d_x_log_x(x: f64) -> f64 {
    x.ln()
}
fn max_sq_shift(x: f64) -> f64 {
    max_of((x * x, 2.0 * x), ((x - 3.0).powi(2), 2.0 * (x - 3.0)))
}
fn d_max_sq_shift(x: f64) -> f64 {
    dmax_of((x * x, 2.0 * x), ((x - 3.0).powi(2), 2.0 * (x - 3.0)))
}
fn max_sq_half(x: f64) -> f64 {
    max_of((x * x, 2.0 * x), ((x / 2.0 - 3.0).powi(2), x / 2.0 - 3.0))
}
fn d_max_sq_half(x: f64) -> f64 {
    dmax_of((x * x, 2.0 * x), ((x / 2.0 - 3.0).powi(2), x / 2.0 - 3.0))
}
fn quartic(x: f64) -> f64 {
    x.powi(4)
}
fn d_quartic(x: f64) -> f64 {
    4.0 * x.powi(3)
}
fn inv_sq_plus_sq(x: f64) -> f64 {
    1.0 / (x * x) + x * x
}
fn d_inv_sq_plus_sq(x: f64) -> f64 {
    -2.0 / x.powi(3) + 2.0 * x
}
fn flat_then_exp(x: f64) -> f64 {
    max_of((-x / 100.0, -0.01), ((10.0 * x).exp(), 10.0 * (10.0 * x).exp()))
}
fn d_flat_then_exp(x: f64) -> f64 {
    dmax_of((-x / 100.0, -0.01), ((10.0 * x).exp(), 10.0 * (10.0 * x).exp()))
}

const FLAT_THEN_EXP_ARGMIN: f64 = -0.524_960_285_240_159_6;

static TABLE: [Benchmark1d; 12] = [
    Benchmark1d {
        name: "-x",
        f: neg_x,
        df: d_neg_x,
        interval: (-20.0, 7.0),
        x_star: 7.0,
        f_star: -7.0,
        kinks: &[],
    },
    Benchmark1d {
        name: "|x|",
        f: abs,
        df: d_abs,
        interval: (-20.0, 7.0),
        x_star: 0.0,
        f_star: 0.0,
        kinks: &[0.0],
    },
    Benchmark1d {
        name: "max{-x,2x}",
        f: max_neg_x_2x,
        df: d_max_neg_x_2x,
        interval: (-20.0, 7.0),
        x_star: 0.0,
        f_star: 0.0,
        kinks: &[0.0],
    },
    Benchmark1d {
        name: "max{-x,2x}/wide",
        f: max_neg_x_2x,
        df: d_max_neg_x_2x,
        interval: (-0.01, 100.0),
        x_star: 0.0,
        f_star: 0.0,
        kinks: &[0.0],
    },
    Benchmark1d {
        name: "|x|^1.1",
        f: abs_pow_1_1,
        df: d_abs_pow_1_1,
        interval: (-20.0, 7.0),
        x_star: 0.0,
        f_star: 0.0,
        kinks: &[0.0],
    },
    Benchmark1d {
        name: "x^2",
        f: square,
        df: d_square,
        interval: (-20.0, 7.0),
        x_star: 0.0,
        f_star: 0.0,
        kinks: &[],
    },
    Benchmark1d {
        name: "sqrt(1+x^2)",
        f: soft_abs,
        df: d_soft_abs,
        interval: (-1000.0, 900.0),
        x_star: 0.0,
        f_star: 1.0,
        kinks: &[],
    },
    Benchmark1d {
        name: "xlogx-x",
        f: x_log_x,
        df: d_x_log_x,
        interval: (0.001, 20.0),
        x_star: 1.0,
        f_star: -1.0,
        kinks: &[],
    },
    Benchmark1d {
        name: "max{x^2,(x-3)^2}",
        f: max_sq_shift,
        df: d_max_sq_shift,
        interval: (-5.0, 55.0),
        x_star: 1.5,
        f_star: 2.25,
        kinks: &[1.5],
    },
    Benchmark1d {
        name: "max{x^2,(x/2-3)^2}",
        f: max_sq_half,
        df: d_max_sq_half,
        interval: (-5.0, 55.0),
        x_star: 2.0,
        f_star: 4.0,
        kinks: &[2.0],
    },
    Benchmark1d {
        name: "x^4",
        f: quartic,
        df: d_quartic,
        interval: (-20.0, 7.0),
        x_star: 0.0,
        f_star: 0.0,
        kinks: &[],
    },
    Benchmark1d {
        name: "1/x^2+x^2",
        f: inv_sq_plus_sq,
        df: d_inv_sq_plus_sq,
        interval: (0.001, 100.0),
        x_star: 1.0,
        f_star: 2.0,
        kinks: &[],
    },
];

static APPENDIX: Benchmark1d = Benchmark1d {
    name: "max{-x/100,e^(10x)}",
    f: flat_then_exp,
    df: d_flat_then_exp,
    interval: (-100.0, 100.0),
    x_star: FLAT_THEN_EXP_ARGMIN,
    f_star: -FLAT_THEN_EXP_ARGMIN / 100.0,
    kinks: &[FLAT_THEN_EXP_ARGMIN],
};

/// The twelve benchmark rows, in table order.
pub fn table_benchmarks() -> &'static [Benchmark1d] {
    &TABLE
}

/// The function on which querying at the tangent intersection stalls.
pub fn appendix_benchmark() -> &'static Benchmark1d {
    &APPENDIX
}

pub fn all_benchmarks() -> impl Iterator<Item = &'static Benchmark1d> {
    TABLE.iter().chain(std::iter::once(&APPENDIX))
}

pub fn lookup(name: &str) -> Result<&'static Benchmark1d> {
    all_benchmarks()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownBenchmark {
            name: name.to_owned(),
            available: all_benchmarks()
                .map(|b| b.name)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// `scale * x^2` in one dimension.
pub fn scaled_square(scale: f64) -> FnObjectiveNd<'static> {
    FnObjectiveNd::new(
        1,
        move |x| scale * x[0] * x[0],
        move |x| vec![2.0 * scale * x[0]],
    )
    .with_optimum(0.0)
    .with_curvature(2.0 * scale, 2.0 * scale)
}

/// `e^(kx) + e^(-kx)`, minimum 2 at 0.
pub fn exp_cosh(k: f64) -> FnObjectiveNd<'static> {
    FnObjectiveNd::new(
        1,
        move |x| (k * x[0]).exp() + (-k * x[0]).exp(),
        move |x| vec![k * ((k * x[0]).exp() - (-k * x[0]).exp())],
    )
    .with_optimum(2.0)
}

/// `x^4 + y^4`; the minimum at the origin is degenerate.
pub fn quartic_2d() -> FnObjectiveNd<'static> {
    FnObjectiveNd::new(
        2,
        |x| x[0].powi(4) + x[1].powi(4),
        |x| vec![4.0 * x[0].powi(3), 4.0 * x[1].powi(3)],
    )
    .with_optimum(0.0)
}

/// `0.5 * sum_i d_i x_i^2` with positive diagonal `d`.
pub fn diagonal_quadratic(diag: Vec<f64>) -> FnObjectiveNd<'static> {
    let m = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let big_m = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let g = diag.clone();
    FnObjectiveNd::new(
        diag.len(),
        move |x| 0.5 * x.iter().zip(&diag).map(|(xi, di)| di * xi * xi).sum::<f64>(),
        move |x| x.iter().zip(&g).map(|(xi, di)| di * xi).collect(),
    )
    .with_optimum(0.0)
    .with_curvature(m, big_m)
}

/// Parameters of the randomized softmax loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogisticLossSpec {
    pub terms: usize,
    pub dim: usize,
    pub seed: u64,
}

impl Default for LogisticLossSpec {
    fn default() -> Self {
        Self {
            terms: 10,
            dim: 100,
            seed: 0,
        }
    }
}

/// Inverse likelihood of `terms` softmax classifications:
/// `L(x) = prod_i sum_j exp(a_ij x_j) / exp(a_{i,n_i} x_{n_i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticLoss {
    /// Row-major `terms x dim` coefficients in `[-1, 1]`.
    pub coefficients: Vec<f64>,
    /// Target index of each term.
    pub labels: Vec<usize>,
    pub dim: usize,
}

const STREAM_COEFFICIENTS: u64 = 0;
const STREAM_LABELS: u64 = 1;
const STREAM_START: u64 = 2;

impl LogisticLossSpec {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Draws the loss. Coefficients, labels and the start point each come
    /// from their own ChaCha8 stream of `seed`.
    pub fn build(&self) -> LogisticLoss {
        let mut rng = self.rng(STREAM_COEFFICIENTS);
        let coefficients = (0..self.terms * self.dim)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect();
        let mut rng = self.rng(STREAM_LABELS);
        let labels = (0..self.terms).map(|_| rng.gen_range(0..self.dim)).collect();
        LogisticLoss {
            coefficients,
            labels,
            dim: self.dim,
        }
    }

    /// Uniform start point in `[-20, 20]^dim`.
    pub fn start(&self) -> Vec<f64> {
        let mut rng = self.rng(STREAM_START);
        (0..self.dim).map(|_| rng.gen_range(-20.0..=20.0)).collect()
    }
}

impl LogisticLoss {
    fn row(&self, i: usize) -> &[f64] {
        &self.coefficients[i * self.dim..(i + 1) * self.dim]
    }

    /// `log L(x)`, a sum of log-sum-exp terms.
    pub fn log_value(&self, x: &[f64]) -> f64 {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let row = self.row(i);
                log_sum_exp(row.iter().zip(x).map(|(a, xj)| a * xj)) - row[n] * x[n]
            })
            .sum()
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl ObjectiveNd for LogisticLoss {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.log_value(x).exp()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.dim];
        for (i, &n) in self.labels.iter().enumerate() {
            let row = self.row(i);
            let logits: Vec<f64> = row.iter().zip(x).map(|(a, xj)| a * xj).collect();
            let lse = log_sum_exp(logits.iter().copied());
            for (j, (g, &z)) in grad.iter_mut().zip(&logits).enumerate() {
                *g += (z - lse).exp() * row[j];
            }
            grad[n] -= row[n];
        }
        let value = self.value(x);
        grad.iter_mut().for_each(|g| *g *= value);
        grad
    }

    fn optimum_value(&self) -> Option<f64> {
        None
    }
}
