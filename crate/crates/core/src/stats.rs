//! Finite-horizon evidence for statistical convergence.
//!
//! Natural density and statistical limits are asymptotic notions; everything
//! here works on exact exceedance counts at a finite set of horizons and reports
//! the resulting trace. A verdict is a statement about that trace, never a proof.

use crate::error::{Error, Result};
use crate::moments::central_moments;
use crate::operator::OperatorParams;

/// Count of set members in `1..=horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracePoint {
    pub horizon: u64,
    pub count: u64,
}

impl TracePoint {
    pub fn density(&self) -> f64 {
        self.count as f64 / self.horizon as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub horizon: u64,
    pub exceedance_count: u64,
    pub density: f64,
    /// Exceedance threshold, for reports built from a sequence.
    pub epsilon: Option<f64>,
    /// Counts at increasing horizons; the last entry is `horizon` itself.
    pub trace: Vec<TracePoint>,
}

/// `ceil(n / 2^j)` for `j = 0, 1, ...` down to 1, ascending and deduplicated.
pub fn halving_horizons(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut h = n;
    while h >= 1 {
        out.push(h);
        if h == 1 {
            break;
        }
        h = h.div_ceil(2);
    }
    out.reverse();
    out.dedup();
    out
}

fn validate_horizons(horizons: &[u64]) -> Result<Vec<u64>> {
    if horizons.is_empty() || horizons.contains(&0) {
        return Err(Error::invalid("horizon", "need at least one horizon, all >= 1"));
    }
    let mut sorted = horizons.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// Exact counts of `{k <= N : member(k)}` at every horizon, in one pass.
pub fn density_trace(member: impl Fn(u64) -> bool, horizons: &[u64]) -> Result<DensityReport> {
    let horizons = validate_horizons(horizons)?;
    let max = *horizons.last().expect("nonempty");
    let mut trace = Vec::with_capacity(horizons.len());
    let mut next = horizons.iter().peekable();
    let mut count = 0u64;
    for k in 1..=max {
        if member(k) {
            count += 1;
        }
        if next.peek() == Some(&&k) {
            trace.push(TracePoint { horizon: k, count });
            next.next();
        }
    }
    Ok(DensityReport {
        horizon: max,
        exceedance_count: count,
        density: count as f64 / max as f64,
        epsilon: None,
        trace,
    })
}

/// Density of a set at horizon `n`, traced at `ceil(n / 2^j)`.
pub fn natural_density(member: impl Fn(u64) -> bool, n: u64) -> Result<DensityReport> {
    if n == 0 {
        return Err(Error::invalid("N", "horizon must be at least 1"));
    }
    density_trace(member, &halving_horizons(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatLimitVerdict {
    pub candidate_limit: f64,
    pub reports: Vec<DensityReport>,
    pub verdict: Verdict,
}

/// Horizons, thresholds and verdict cut-off for the sequence checks.
#[derive(Debug, Clone, PartialEq)]
pub struct StatConfig {
    pub epsilons: Vec<f64>,
    pub horizons: Vec<u64>,
    pub verdict_threshold: f64,
}

impl Default for StatConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1.0, 0.1, 0.01],
            horizons: vec![1_000, 10_000, 100_000, 1_000_000],
            verdict_threshold: 0.01,
        }
    }
}

impl StatConfig {
    fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::invalid("epsilon", "need at least one epsilon, all > 0"));
        }
        validate_horizons(&self.horizons).map(|_| ())
    }
}

fn exceedance_reports(
    sequence: &impl Fn(u64) -> f64,
    limit: f64,
    config: &StatConfig,
) -> Result<Vec<DensityReport>> {
    config.validate()?;
    config
        .epsilons
        .iter()
        .map(|&eps| {
            let mut report =
                density_trace(|k| (sequence(k) - limit).abs() >= eps, &config.horizons)?;
            report.epsilon = Some(eps);
            Ok(report)
        })
        .collect()
}

/// Traces `{n <= N : |x_n - p| >= eps}` for every epsilon.
///
/// The verdict is consistent when, for every epsilon, the density at the
/// largest horizon is no larger than at the smallest and does not exceed
/// `verdict_threshold`.
pub fn stat_limit_check(
    sequence: impl Fn(u64) -> f64,
    limit: f64,
    config: &StatConfig,
) -> Result<StatLimitVerdict> {
    let reports = exceedance_reports(&sequence, limit, config)?;
    let consistent = reports.iter().all(|r| {
        let first = r.trace.first().expect("nonempty trace").density();
        let last = r.trace.last().expect("nonempty trace").density();
        last <= first && last <= config.verdict_threshold
    });
    Ok(StatLimitVerdict {
        candidate_limit: limit,
        reports,
        verdict: if consistent {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        },
    })
}

/// Scaled exceedance counts for one epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTrace {
    pub epsilon: f64,
    /// `(N, count / N^(1 - beta))`.
    pub points: Vec<(u64, f64)>,
    pub decreasing: bool,
    /// Last scaled value over the first one.
    pub decay_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEstimate {
    pub beta: f64,
    pub traces: Vec<ScaledTrace>,
}

/// Traces `|{n <= N : |x_n - p| >= eps}| / N^(1-beta)` over the horizons.
pub fn stat_degree_check(
    sequence: impl Fn(u64) -> f64,
    limit: f64,
    beta: f64,
    config: &StatConfig,
) -> Result<DegreeEstimate> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta", format!("must lie in (0, 1), got {beta}")));
    }
    let reports = exceedance_reports(&sequence, limit, config)?;
    let traces = reports
        .into_iter()
        .map(|r| {
            let points: Vec<(u64, f64)> = r
                .trace
                .iter()
                .map(|t| (t.horizon, t.count as f64 / (t.horizon as f64).powf(1.0 - beta)))
                .collect();
            let decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
            let first = points.first().expect("nonempty").1;
            let last = points.last().expect("nonempty").1;
            ScaledTrace {
                epsilon: r.epsilon.expect("sequence report"),
                decay_ratio: if first == 0.0 { 0.0 } else { last / first },
                decreasing,
                points,
            }
        })
        .collect();
    Ok(DegreeEstimate { beta, traces })
}

/// Unbounded, statistically null sequence: `sqrt(n)` on perfect squares, else 0.
pub fn counterexample_sequence(n: u64) -> f64 {
    let r = n.isqrt();
    if r * r == n {
        r as f64
    } else {
        0.0
    }
}

pub fn is_perfect_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

/// Norm used for the Korovkin test-function deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviationNorm {
    /// Sup over `[0, l]`.
    Sup,
    /// Sup of `|.| / (1 + x^2)` over `[0, x_max]`, with an analytic bound beyond.
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KorovkinDeviationRow {
    pub n: u64,
    pub a: f64,
    pub dev_e0: f64,
    pub dev_e1: f64,
    pub dev_e2: f64,
    /// Weighted mode only: bound on the weighted deviations of `e1` and `e2`
    /// for `x` beyond the grid.
    pub tail_bound: Option<(f64, f64)>,
}

/// `(|S*(e0) - 1|, |S*(e1) - x|, |S*(e2) - x^2|)` from the closed forms.
///
/// `S*(e2) - x^2 = c2 + 2 x c1`, which avoids subtracting nearly equal values.
pub fn test_function_deviations(params: &OperatorParams, x: f64) -> (f64, f64, f64) {
    let c = central_moments(params, x);
    (0.0, c.c1.abs(), (c.c2 + 2.0 * x * c.c1).abs())
}

/// Deviation rows over `params_list`, with sup taken on `{0, step, ..., end}`.
///
/// `end` is `l` in sup mode and `x_max` in weighted mode.
pub fn korovkin_deviations(
    params_list: &[OperatorParams],
    end: f64,
    grid_step: f64,
    norm: DeviationNorm,
) -> Result<Vec<KorovkinDeviationRow>> {
    if !(end > 0.0) {
        return Err(Error::invalid("l", "interval end must be > 0"));
    }
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid_step", "must be > 0"));
    }
    let steps = (end / grid_step + 1e-9).floor() as u64;
    Ok(params_list
        .iter()
        .map(|params| {
            let mut row = KorovkinDeviationRow {
                n: params.n(),
                a: params.a(),
                dev_e0: 0.0,
                dev_e1: 0.0,
                dev_e2: 0.0,
                tail_bound: None,
            };
            for i in 0..=steps {
                let x = (i as f64 * grid_step).min(end);
                let (d0, d1, d2) = test_function_deviations(params, x);
                let w = match norm {
                    DeviationNorm::Sup => 1.0,
                    DeviationNorm::Weighted => 1.0 / (1.0 + x * x),
                };
                row.dev_e0 = row.dev_e0.max(d0 * w);
                row.dev_e1 = row.dev_e1.max(d1 * w);
                row.dev_e2 = row.dev_e2.max(d2 * w);
            }
            if norm == DeviationNorm::Weighted {
                row.tail_bound = Some(weighted_tail_bound(params, end));
            }
            row
        })
        .collect())
}

/// Bounds on `sup_{x >= x_max}` of the weighted `e1` and `e2` deviations.
///
/// With `g` the rate gap, `S*(e1) - x = 1/(2n) + g x` and
/// `S*(e2) - x^2 = (g^2 + 2g) x^2 + 2(1 + g) x / n + 1/(3n^2)`; dividing by
/// `1 + x^2` and using that `x / (1 + x^2)` decreases for `x >= 1` gives the
/// bounds below (valid for `x_max >= 1`; smaller `x_max` uses `1/2`).
pub fn weighted_tail_bound(params: &OperatorParams, x_max: f64) -> (f64, f64) {
    let n = params.n() as f64;
    let g = params.rate_gap();
    let w = 1.0 / (1.0 + x_max * x_max);
    let ratio = if x_max >= 1.0 { x_max * w } else { 0.5 };
    let e1 = 0.5 / n * w + g.abs() * ratio;
    let e2 = (g * g + 2.0 * g).abs() + 2.0 * (1.0 + g).abs() / n * ratio + w / (3.0 * n * n);
    (e1, e2)
}
