//! Summation-integral operators of Szász-Mirakjan-Kantorovich type.
//!
//! For degree `n` and base `a > 1` the operator is
//!
//! ```text
//! S*_{n,a}(f; x) = n * sum_k s_{n,k}(x) * integral_{k/n}^{(k+1)/n} f(u) du
//! s_{n,k}(x)     = a^(-x/c) (x ln a)^k / (c^k k!),        c = a^(1/n) - 1
//! ```
//!
//! The weights are exactly a Poisson mass with mean `lambda = x ln(a) / c`,
//! which is how they are evaluated here (in log space). The classical
//! Kantorovich operator `K_n` is the same construction with `lambda = n x`, and
//! the bivariate operator `Y*_{m,m,a}` is the tensor product of two copies of
//! `S*_{m,a}`.
//!
//! Infinite series are truncated to a window `[first_k, last_k]` of indices
//! whose omitted mass on both sides stays below the policy's tail epsilon. Each
//! cell integral uses a Gauss-Legendre rule scaled to the cell.

use crate::error::{Error, Result};
use crate::function::{BivariateFunction, ScalarFunction};
use crate::numeric::{base_increment, bernoulli_gap, ln_poisson_mass, unit_cell_rule};

/// Degree and base identifying one univariate operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    n: u64,
    a: f64,
    log_a: f64,
    increment: f64,
}

impl OperatorParams {
    pub fn new(n: u64, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "degree must be at least 1"));
        }
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::invalid("a", format!("base must be finite and > 1, got {a}")));
        }
        let log_a = a.ln();
        Ok(Self {
            n,
            a,
            log_a,
            increment: base_increment(log_a, n as f64),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn log_a(&self) -> f64 {
        self.log_a
    }

    /// `a^(1/n) - 1`.
    pub fn increment(&self) -> f64 {
        self.increment
    }

    /// `ln(a) / (n (a^(1/n) - 1)) - 1`, i.e. `lambda / (n x) - 1`.
    ///
    /// Negative, of order `-ln(a) / (2n)`.
    pub fn rate_gap(&self) -> f64 {
        bernoulli_gap(self.log_a / self.n as f64)
    }
}

/// Shared degree `m` and base `a` of the bivariate operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateParams {
    axis: OperatorParams,
}

impl BivariateParams {
    pub fn new(m: u64, a: f64) -> Result<Self> {
        Ok(Self {
            axis: OperatorParams::new(m, a)?,
        })
    }

    pub fn m(&self) -> u64 {
        self.axis.n
    }

    pub fn a(&self) -> f64 {
        self.axis.a
    }

    /// Parameters of either univariate factor.
    pub fn axis(&self) -> OperatorParams {
        self.axis
    }
}

/// When to stop summing the weight series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    tail_mass_epsilon: f64,
    hard_k_cap: Option<u64>,
}

impl TruncationPolicy {
    pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

    /// `hard_k_cap = None` selects the default cap `10 ceil(lambda) + 200`.
    pub fn new(tail_mass_epsilon: f64, hard_k_cap: Option<u64>) -> Result<Self> {
        if !(tail_mass_epsilon > 0.0 && tail_mass_epsilon < 1.0) {
            return Err(Error::invalid(
                "tail_mass_epsilon",
                format!("must lie in (0, 1), got {tail_mass_epsilon}"),
            ));
        }
        if hard_k_cap == Some(0) {
            return Err(Error::invalid("hard_k_cap", "must be at least 1"));
        }
        Ok(Self {
            tail_mass_epsilon,
            hard_k_cap,
        })
    }

    pub fn tail_mass_epsilon(&self) -> f64 {
        self.tail_mass_epsilon
    }

    pub fn cap_for(&self, lambda: f64) -> u64 {
        self.hard_k_cap
            .unwrap_or_else(|| 10 * lambda.ceil() as u64 + 200)
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_mass_epsilon: Self::DEFAULT_TAIL_EPSILON,
            hard_k_cap: None,
        }
    }
}

/// Gauss-Legendre rule applied on every cell `[k/n, (k+1)/n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points_per_cell: usize,
    cell: Vec<(f64, f64)>,
}

impl QuadratureRule {
    pub const DEFAULT_POINTS: usize = 5;

    pub fn new(points_per_cell: usize) -> Result<Self> {
        if points_per_cell == 0 {
            return Err(Error::invalid("points_per_cell", "must be at least 1"));
        }
        Ok(Self {
            points_per_cell,
            cell: unit_cell_rule(points_per_cell),
        })
    }

    pub fn points_per_cell(&self) -> usize {
        self.points_per_cell
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.points_per_cell - 1
    }

    /// `(offset, weight)` pairs on the unit cell; weights sum to 1.
    pub fn unit_cell(&self) -> &[(f64, f64)] {
        &self.cell
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(Self::DEFAULT_POINTS).expect("default rule")
    }
}

/// Poisson mean of the weight family at `x`: `x ln(a) / (a^(1/n) - 1)`.
pub fn mean_parameter(params: &OperatorParams, x: f64) -> f64 {
    x * params.log_a / params.increment
}

/// The weight `s_{n,k}(x)`.
pub fn weight(params: &OperatorParams, k: u64, x: f64) -> Result<f64> {
    check_point("x", x)?;
    let w = ln_poisson_mass(k, mean_parameter(params, x)).exp();
    if !w.is_finite() {
        return Err(Error::NonFiniteWeight { k, x });
    }
    Ok(w)
}

/// Largest Poisson mean accepted; the window would need more than ~10^8 terms.
pub const MAX_MEAN: f64 = 1e12;

/// Contiguous run of weights retained after truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightWindow {
    pub first_k: u64,
    pub weights: Vec<f64>,
    /// Total mass left out on both sides.
    pub omitted_mass: f64,
}

impl WeightWindow {
    pub fn last_k(&self) -> u64 {
        self.first_k + self.weights.len() as u64 - 1
    }

    /// Builds the window for a Poisson(`lambda`) weight family.
    ///
    /// Indices are scanned upward from 0. Leading terms are dropped while the
    /// mass accumulated so far stays within half the tail epsilon, and the scan
    /// stops once the mass still unsummed falls below the other half.
    pub fn for_mean(lambda: f64, trunc: &TruncationPolicy) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::NonFiniteWeight { k: 0, x: lambda });
        }
        if lambda == 0.0 {
            return Ok(Self {
                first_k: 0,
                weights: vec![1.0],
                omitted_mass: 0.0,
            });
        }
        let cap = trunc.cap_for(lambda);
        if lambda > MAX_MEAN {
            return Err(Error::TruncationFailure {
                k_cap: cap,
                remaining_mass: 1.0,
            });
        }
        let half = 0.5 * trunc.tail_mass_epsilon;
        // Below lambda - 40 sqrt(lambda) every mass underflows to exactly 0, and
        // the mass beyond lambda + 60 sqrt(lambda) is far below any epsilon, so
        // running past it means rounding keeps the target out of reach.
        let start = (lambda - 40.0 * lambda.sqrt()).floor().max(0.0) as u64;
        let cap = cap.min(start + (100.0 * lambda.sqrt()).ceil() as u64 + 500);
        let mut cumulative = 0.0;
        let mut skipped = 0.0;
        let mut first = None;
        let mut weights = Vec::new();
        let mut k = start.min(cap);
        loop {
            let w = ln_poisson_mass(k, lambda).exp();
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { k, x: lambda });
            }
            cumulative += w;
            if first.is_none() {
                if cumulative <= half && (k as f64) < lambda {
                    skipped = cumulative;
                } else {
                    first = Some(k);
                }
            }
            if first.is_some() {
                weights.push(w);
                let remaining = 1.0 - cumulative;
                if remaining < half {
                    return Ok(Self {
                        first_k: first.unwrap_or(k),
                        weights,
                        omitted_mass: skipped + remaining.max(0.0),
                    });
                }
            }
            if k >= cap {
                return Err(Error::TruncationFailure {
                    k_cap: cap,
                    remaining_mass: 1.0 - cumulative,
                });
            }
            k += 1;
        }
    }

    /// Flattens the window into `(node, weight * quadrature weight)` pairs for
    /// cells of width `1/n`.
    fn nodes(&self, n: f64, quad: &QuadratureRule) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.weights.len() * quad.points_per_cell);
        for (i, &w) in self.weights.iter().enumerate() {
            let k = (self.first_k + i as u64) as f64;
            for &(theta, q) in quad.unit_cell() {
                out.push(((k + theta) / n, w * q));
            }
        }
        out
    }
}

/// A truncated operator value with its truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approximation {
    pub value: f64,
    pub first_k: u64,
    pub last_k: u64,
    pub omitted_mass: f64,
    /// Right end of the cells actually integrated, `(last_k + 1) / n`.
    pub support_end: f64,
    /// `omitted_mass * B(support_end)` when the function declares a bound.
    pub error_budget: Option<f64>,
}

fn check_point(name: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid(name, format!("must be finite and >= 0, got {x}")));
    }
    Ok(())
}

fn summation_integral(
    n: u64,
    lambda: f64,
    f: &ScalarFunction,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<Approximation> {
    let window = WeightWindow::for_mean(lambda, trunc)?;
    let nf = n as f64;
    let mut value = 0.0;
    for (u, w) in window.nodes(nf, quad) {
        let fu = f.eval(u);
        if !fu.is_finite() {
            return Err(Error::NonFiniteFunction { node: u, value: fu });
        }
        value += w * fu;
    }
    let last_k = window.last_k();
    let support_end = (last_k + 1) as f64 / nf;
    Ok(Approximation {
        value,
        first_k: window.first_k,
        last_k,
        omitted_mass: window.omitted_mass,
        support_end,
        error_budget: f.bound_on(support_end).map(|b| window.omitted_mass * b),
    })
}

/// `S*_{n,a}(f; x)` with truncation details.
pub fn apply_detailed(
    params: &OperatorParams,
    f: &ScalarFunction,
    x: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<Approximation> {
    check_point("x", x)?;
    summation_integral(params.n, mean_parameter(params, x), f, trunc, quad)
}

/// `S*_{n,a}(f; x)`.
pub fn apply(
    params: &OperatorParams,
    f: &ScalarFunction,
    x: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<f64> {
    apply_detailed(params, f, x, trunc, quad).map(|r| r.value)
}

/// Classical Szász-Mirakjan-Kantorovich operator `K_n(f; x)` with details.
pub fn apply_kantorovich_detailed(
    n: u64,
    f: &ScalarFunction,
    x: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<Approximation> {
    if n == 0 {
        return Err(Error::invalid("n", "degree must be at least 1"));
    }
    check_point("x", x)?;
    summation_integral(n, n as f64 * x, f, trunc, quad)
}

/// Classical Szász-Mirakjan-Kantorovich operator `K_n(f; x)`.
pub fn apply_kantorovich(
    n: u64,
    f: &ScalarFunction,
    x: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<f64> {
    apply_kantorovich_detailed(n, f, x, trunc, quad).map(|r| r.value)
}

/// Bivariate value with per-axis truncation details.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateApproximation {
    pub value: f64,
    pub x_axis: (u64, u64),
    pub y_axis: (u64, u64),
    pub omitted_mass: f64,
    pub support_end: (f64, f64),
    pub error_budget: Option<f64>,
}

/// `Y*_{m,m,a}(f; x, y)` with truncation details.
pub fn apply_bivariate_detailed(
    params: &BivariateParams,
    f: &BivariateFunction,
    x: f64,
    y: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<BivariateApproximation> {
    check_point("x", x)?;
    check_point("y", y)?;
    let axis = params.axis();
    let wx = WeightWindow::for_mean(mean_parameter(&axis, x), trunc)?;
    let wy = WeightWindow::for_mean(mean_parameter(&axis, y), trunc)?;
    let m = axis.n() as f64;
    let nodes_x = wx.nodes(m, quad);
    let nodes_y = wy.nodes(m, quad);
    let mut value = 0.0;
    for &(u, wu) in &nodes_x {
        let mut inner = 0.0;
        for &(v, wv) in &nodes_y {
            let fuv = f.eval(u, v);
            if !fuv.is_finite() {
                return Err(Error::NonFiniteBivariate { u, v, value: fuv });
            }
            inner += wv * fuv;
        }
        value += wu * inner;
    }
    let omitted_mass = wx.omitted_mass + wy.omitted_mass;
    Ok(BivariateApproximation {
        value,
        x_axis: (wx.first_k, wx.last_k()),
        y_axis: (wy.first_k, wy.last_k()),
        omitted_mass,
        support_end: ((wx.last_k() + 1) as f64 / m, (wy.last_k() + 1) as f64 / m),
        error_budget: f.bound().map(|b| omitted_mass * b),
    })
}

/// `Y*_{m,m,a}(f; x, y)`.
pub fn apply_bivariate(
    params: &BivariateParams,
    f: &BivariateFunction,
    x: f64,
    y: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
) -> Result<f64> {
    apply_bivariate_detailed(params, f, x, y, trunc, quad).map(|r| r.value)
}
