//! Moduli of continuity on grids and pointwise certificates for the rate
//! estimates `2 w(f; sqrt(delta))`, `M delta^(alpha/2)`, the bivariate
//! `4 w(f; sqrt(delta), sqrt(delta'))` and `M delta^(alpha1/2) delta'^(alpha2/2)`.
//!
//! A grid modulus underestimates the true one. Each estimate therefore carries
//! a bound on that underestimate, and certificates pass when the margin
//! `bound - actual` is at least minus the resulting slack. The raw margin is
//! always reported.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::function::{BivariateFunction, ScalarFunction};
use crate::moments::{bivariate_deltas, delta};
use crate::operator::{
    apply_bivariate_detailed, apply_detailed, BivariateParams, OperatorParams, QuadratureRule,
    TruncationPolicy,
};

/// Where the grid-resolution error bound of a modulus comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridErrorSource {
    /// Derived from the function's declared Lipschitz hint.
    Hint,
    /// Derived from the largest difference quotient seen on the grid.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    /// `delta` (univariate) or `(delta1, delta2)` (bivariate).
    pub delta_arg: (f64, Option<f64>),
    pub value: f64,
    pub step: f64,
    /// `[0, T]` or `[0, T_u] x [0, T_v]`.
    pub domain_end: (f64, Option<f64>),
    /// Upper bound on `true modulus - value`.
    pub grid_error: f64,
    pub grid_error_source: GridErrorSource,
}

fn grid_len(end: f64, step: f64) -> usize {
    (end / step + 1e-9).floor() as usize + 1
}

fn window_len(delta: f64, step: f64) -> usize {
    (delta / step + 1e-9).floor() as usize
}

/// Max and min over every run `values[i..=i + span]` (clamped to the slice).
fn sliding_extrema(values: &[f64], span: usize) -> (Vec<f64>, Vec<f64>) {
    let count = values.len().saturating_sub(span).max(1);
    let mut maxima = Vec::with_capacity(count);
    let mut minima = Vec::with_capacity(count);
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let width = span + 1;
    for (j, &v) in values.iter().enumerate() {
        while hi.back().is_some_and(|&b| values[b] <= v) {
            hi.pop_back();
        }
        hi.push_back(j);
        while lo.back().is_some_and(|&b| values[b] >= v) {
            lo.pop_back();
        }
        lo.push_back(j);
        if j + 1 >= width {
            let start = j + 1 - width;
            while hi.front().is_some_and(|&f| f < start) {
                hi.pop_front();
            }
            while lo.front().is_some_and(|&f| f < start) {
                lo.pop_front();
            }
            maxima.push(values[*hi.front().expect("nonempty")]);
            minima.push(values[*lo.front().expect("nonempty")]);
        }
    }
    if maxima.is_empty() {
        maxima.push(values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        minima.push(values.iter().copied().fold(f64::INFINITY, f64::min));
    }
    (maxima, minima)
}

fn check_modulus_args(delta: f64, end: f64, step: f64) -> Result<()> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be > 0"));
    }
    if !(step > 0.0) || step > delta * (1.0 + 1e-12) {
        return Err(Error::invalid("h", format!("need 0 < h <= delta, got h={step}")));
    }
    if !(end > 0.0) || !end.is_finite() {
        return Err(Error::invalid("T", "domain end must be finite and > 0"));
    }
    Ok(())
}

/// Sup of `|f(u) - f(x)|` over grid pairs in `{0, h, 2h, ...} ∩ [0, T]` with
/// `|u - x| <= delta`.
pub fn modulus(f: &ScalarFunction, delta: f64, end: f64, step: f64) -> Result<ModulusEstimate> {
    check_modulus_args(delta, end, step)?;
    let nodes = grid_len(end, step);
    if nodes < 2 {
        return Err(Error::DegenerateGrid { nodes });
    }
    let values: Vec<f64> = (0..nodes).map(|i| f.eval(i as f64 * step)).collect();
    let (maxima, minima) = sliding_extrema(&values, window_len(delta, step));
    let value = maxima
        .iter()
        .zip(&minima)
        .map(|(hi, lo)| hi - lo)
        .fold(0.0, f64::max);

    // A pair (u, x) maps to grid nodes (u', x') with |u'-x'| <= delta,
    // 0 <= x - x' < h and 0 <= u - u' < 2h.
    let (grid_error, grid_error_source) = match f.lipschitz_hint() {
        Some(hint) => {
            let m = hint.constant_on(end);
            let alpha = hint.exponent();
            (m * ((2.0 * step).powf(alpha) + step.powf(alpha)), GridErrorSource::Hint)
        }
        None => {
            let slope = values
                .windows(2)
                .map(|w| (w[1] - w[0]).abs() / step)
                .fold(0.0, f64::max);
            (3.0 * slope * step, GridErrorSource::Estimated)
        }
    };
    Ok(ModulusEstimate {
        delta_arg: (delta, None),
        value,
        step,
        domain_end: (end, None),
        grid_error,
        grid_error_source,
    })
}

/// Sup of `|f(u,v) - f(x,y)|` over grid pairs of the box `[0, T_u] x [0, T_v]`
/// with `|u - x| <= delta1` and `|v - y| <= delta2`.
///
/// Equivalent to the largest oscillation over `delta1 x delta2` sub-boxes,
/// computed with separable sliding extrema.
pub fn modulus_bivariate(
    f: &BivariateFunction,
    delta1: f64,
    delta2: f64,
    end: (f64, f64),
    step: f64,
) -> Result<ModulusEstimate> {
    check_modulus_args(delta1.min(delta2), end.0.min(end.1), step)?;
    let (nu, nv) = (grid_len(end.0, step), grid_len(end.1, step));
    if nu < 2 || nv < 2 {
        return Err(Error::DegenerateGrid { nodes: nu.min(nv) });
    }
    let (wu, wv) = (window_len(delta1, step), window_len(delta2, step));
    let rows: Vec<Vec<f64>> = (0..nu)
        .map(|i| {
            let u = i as f64 * step;
            (0..nv).map(|j| f.eval(u, j as f64 * step)).collect()
        })
        .collect();

    let mut slope_u: f64 = 0.0;
    let mut slope_v: f64 = 0.0;
    for i in 0..nu {
        for j in 0..nv {
            if i + 1 < nu {
                slope_u = slope_u.max((rows[i + 1][j] - rows[i][j]).abs() / step);
            }
            if j + 1 < nv {
                slope_v = slope_v.max((rows[i][j + 1] - rows[i][j]).abs() / step);
            }
        }
    }

    let row_extrema: Vec<(Vec<f64>, Vec<f64>)> =
        rows.iter().map(|r| sliding_extrema(r, wv)).collect();
    let columns = row_extrema[0].0.len();
    let mut value: f64 = 0.0;
    for j in 0..columns {
        let col_max: Vec<f64> = row_extrema.iter().map(|(mx, _)| mx[j]).collect();
        let col_min: Vec<f64> = row_extrema.iter().map(|(_, mn)| mn[j]).collect();
        let (hi, _) = sliding_extrema(&col_max, wu);
        let (_, lo) = sliding_extrema(&col_min, wu);
        for (h, l) in hi.iter().zip(&lo) {
            value = value.max(h - l);
        }
    }
    Ok(ModulusEstimate {
        delta_arg: (delta1, Some(delta2)),
        value,
        step,
        domain_end: (end.0, Some(end.1)),
        grid_error: 3.0 * step * (slope_u + slope_v),
        grid_error_source: GridErrorSource::Estimated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    ModulusUnivariate,
    LipschitzUnivariate,
    ModulusBivariate,
    LipschitzBivariate,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::ModulusUnivariate => "modulus_univariate",
            BoundKind::LipschitzUnivariate => "lipschitz_univariate",
            BoundKind::ModulusBivariate => "modulus_bivariate",
            BoundKind::LipschitzBivariate => "lipschitz_bivariate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCertificate {
    pub x: f64,
    pub y: Option<f64>,
    pub actual_error: f64,
    pub bound_value: f64,
    /// `bound_value - actual_error`.
    pub margin: f64,
    /// Allowance for grid underestimation and truncated mass.
    pub slack: f64,
    pub bound_kind: BoundKind,
}

impl BoundCertificate {
    pub fn passed(&self) -> bool {
        self.margin >= -self.slack
    }
}

/// Tuning for the certificate routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Modulus domain end; defaults to the operator's truncation endpoint.
    pub domain_end: Option<f64>,
    /// Modulus grid step; defaults to `sqrt(delta) / 100` (univariate) or
    /// `min(sqrt(delta), sqrt(delta')) / 20` (bivariate).
    pub step: Option<f64>,
    /// Multiplier applied to the bound; 1 except for negative controls.
    pub bound_scale: f64,
    /// Grid nodes per axis for Lipschitz hint verification.
    pub hint_nodes: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            domain_end: None,
            step: None,
            bound_scale: 1.0,
            hint_nodes: 201,
        }
    }
}

fn rounding_slack(a: f64, b: f64) -> f64 {
    1e-14 * (a.abs() + b.abs())
}

/// `|S*(f;x) - f(x)| <= 2 w(f; sqrt(delta_{n,a}(x)))`.
pub fn certify_modulus_bound(
    params: &OperatorParams,
    f: &ScalarFunction,
    x: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
    options: &CertifyOptions,
) -> Result<BoundCertificate> {
    let approx = apply_detailed(params, f, x, trunc, quad)?;
    let fx = f.eval(x);
    let arg = delta(params, x).sqrt();
    let end = options.domain_end.unwrap_or(approx.support_end.max(x));
    let step = options.step.unwrap_or(arg / 100.0);
    let omega = modulus(f, arg, end, step)?;
    let actual_error = (approx.value - fx).abs();
    let bound_value = options.bound_scale * 2.0 * omega.value;
    Ok(BoundCertificate {
        x,
        y: None,
        actual_error,
        bound_value,
        margin: bound_value - actual_error,
        slack: 2.0 * omega.grid_error
            + approx.omitted_mass * fx.abs()
            + rounding_slack(approx.value, fx),
        bound_kind: BoundKind::ModulusUnivariate,
    })
}

/// `|S*(f;x) - f(x)| <= M delta_{n,a}(x)^(alpha/2)` for `f` in `Lip_M(alpha)`.
///
/// The hint is verified on the truncation range first.
pub fn certify_lipschitz_bound(
    params: &OperatorParams,
    f: &ScalarFunction,
    x: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
    options: &CertifyOptions,
) -> Result<BoundCertificate> {
    let hint = f
        .lipschitz_hint()
        .ok_or_else(|| Error::MissingLipschitzHint(f.name().to_string()))?
        .clone();
    let approx = apply_detailed(params, f, x, trunc, quad)?;
    let end = options.domain_end.unwrap_or(approx.support_end.max(x));
    f.verify_lipschitz(end, options.hint_nodes)?;
    let fx = f.eval(x);
    let actual_error = (approx.value - fx).abs();
    let bound_value = options.bound_scale
        * hint.constant_on(end)
        * delta(params, x).value().powf(0.5 * hint.exponent());
    Ok(BoundCertificate {
        x,
        y: None,
        actual_error,
        bound_value,
        margin: bound_value - actual_error,
        slack: approx.omitted_mass * fx.abs() + rounding_slack(approx.value, fx),
        bound_kind: BoundKind::LipschitzUnivariate,
    })
}

/// `|Y*(f;x,y) - f(x,y)| <= 4 w(f; sqrt(delta_{m,a}(x)), sqrt(delta'_{m,a}(y)))`.
#[allow(clippy::too_many_arguments)]
pub fn certify_bivariate_bound(
    params: &BivariateParams,
    f: &BivariateFunction,
    x: f64,
    y: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
    options: &CertifyOptions,
) -> Result<BoundCertificate> {
    let approx = apply_bivariate_detailed(params, f, x, y, trunc, quad)?;
    let fxy = f.eval(x, y);
    let (dx, dy) = bivariate_deltas(params, x, y);
    let (ax, ay) = (dx.sqrt(), dy.sqrt());
    let end = match options.domain_end {
        Some(t) => (t, t),
        None => (approx.support_end.0.max(x), approx.support_end.1.max(y)),
    };
    let step = options.step.unwrap_or(ax.min(ay) / 20.0);
    let omega = modulus_bivariate(f, ax, ay, end, step)?;
    let actual_error = (approx.value - fxy).abs();
    let bound_value = options.bound_scale * 4.0 * omega.value;
    Ok(BoundCertificate {
        x,
        y: Some(y),
        actual_error,
        bound_value,
        margin: bound_value - actual_error,
        slack: 4.0 * omega.grid_error
            + approx.omitted_mass * fxy.abs()
            + rounding_slack(approx.value, fxy),
        bound_kind: BoundKind::ModulusBivariate,
    })
}

/// `|Y*(f;x,y) - f(x,y)| <= M delta^(alpha1/2) delta'^(alpha2/2)` for the mixed
/// Lipschitz class. The hint is verified on the truncation box first.
#[allow(clippy::too_many_arguments)]
pub fn certify_bivariate_lipschitz(
    params: &BivariateParams,
    f: &BivariateFunction,
    x: f64,
    y: f64,
    trunc: &TruncationPolicy,
    quad: &QuadratureRule,
    options: &CertifyOptions,
) -> Result<BoundCertificate> {
    let hint = f
        .lipschitz_hint()
        .ok_or_else(|| Error::MissingLipschitzHint(f.name().to_string()))?;
    let approx = apply_bivariate_detailed(params, f, x, y, trunc, quad)?;
    let end = match options.domain_end {
        Some(t) => (t, t),
        None => (approx.support_end.0.max(x), approx.support_end.1.max(y)),
    };
    f.verify_lipschitz(end.0, end.1, options.hint_nodes.min(41))?;
    let fxy = f.eval(x, y);
    let (dx, dy) = bivariate_deltas(params, x, y);
    let actual_error = (approx.value - fxy).abs();
    let bound_value = options.bound_scale
        * hint.constant
        * dx.value().powf(0.5 * hint.alpha1)
        * dy.value().powf(0.5 * hint.alpha2);
    Ok(BoundCertificate {
        x,
        y: Some(y),
        actual_error,
        bound_value,
        margin: bound_value - actual_error,
        slack: approx.omitted_mass * fxy.abs() + rounding_slack(approx.value, fxy),
        bound_kind: BoundKind::LipschitzBivariate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::LipschitzHint;

    #[test]
    fn sliding_extrema_matches_brute_force() {
        let values: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 - 0.5 * i as f64).collect();
        for span in [0, 1, 3, 10, 49, 60] {
            let (mx, mn) = sliding_extrema(&values, span);
            for (i, (hi, lo)) in mx.iter().zip(&mn).enumerate() {
                let end = (i + span).min(values.len() - 1);
                let slice = &values[i..=end];
                assert_eq!(*hi, slice.iter().copied().fold(f64::MIN, f64::max));
                assert_eq!(*lo, slice.iter().copied().fold(f64::MAX, f64::min));
            }
        }
    }

    #[test]
    fn constant_function_has_zero_modulus() {
        let f = ScalarFunction::new("c", |_| 3.0);
        for d in [0.01, 0.3, 2.0] {
            assert_eq!(modulus(&f, d, 5.0, 0.01).unwrap().value, 0.0);
        }
    }

    #[test]
    fn identity_modulus_is_delta() {
        let f = ScalarFunction::new("id", |x| x);
        for h in [0.1, 0.05, 0.01, 0.003] {
            let m = modulus(&f, 0.3, 1.0, h).unwrap();
            assert!((m.value - 0.3).abs() < 1e-12, "h={h} value={}", m.value);
        }
    }

    #[test]
    fn modulus_argument_errors() {
        let f = ScalarFunction::new("id", |x| x);
        assert!(matches!(modulus(&f, 0.5, 0.4, 0.5), Err(Error::DegenerateGrid { nodes: 1 })));
        assert!(modulus(&f, 0.1, 1.0, 0.2).is_err());
        assert!(modulus(&f, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn cosine_modulus_close_to_dense_grid() {
        let f = ScalarFunction::new("cos", |x| (std::f64::consts::PI * x).cos())
            .with_lipschitz(LipschitzHint::global(std::f64::consts::PI, 1.0).unwrap());
        let coarse = modulus(&f, 0.1, 1.0, 1e-4).unwrap();
        let dense = modulus(&f, 0.1, 1.0, 1e-6).unwrap();
        assert!((dense.value - coarse.value).abs() <= std::f64::consts::PI * 1e-4);
        assert!(dense.value - coarse.value <= coarse.grid_error);
        // Largest oscillation of cos(pi x) over a window of width 0.1 is 2 sin(pi 0.05).
        let exact = 2.0 * (std::f64::consts::PI * 0.05).sin();
        assert!((dense.value - exact).abs() < 1e-9);
    }

    #[test]
    fn bivariate_modulus_of_sum() {
        let f = BivariateFunction::new("u+v", |u, v| u + v);
        let m = modulus_bivariate(&f, 0.2, 0.3, (1.0, 1.0), 0.05).unwrap();
        assert!((m.value - 0.5).abs() < 1e-12);
        let c = BivariateFunction::new("one", |_, _| 1.0);
        assert_eq!(modulus_bivariate(&c, 0.2, 0.3, (1.0, 1.0), 0.05).unwrap().value, 0.0);
    }
}
