//! Named test functions used by the CLI, the golden tables and the FFI.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::function::{BivariateFunction, LipschitzHint, MixedLipschitzHint, ScalarFunction};

pub const UNIVARIATE_NAMES: &[&str] = &[
    "exp-neg2x",
    "identity",
    "cubic-roots",
    "cube",
    "reciprocal",
    "cos-pi",
    "one",
    "abs-half",
];

pub const BIVARIATE_NAMES: &[&str] = &["bi-default", "bi-one", "bi-product", "bi-exp", "bi-sin-sum"];

fn hint(exponent: f64, constant: impl Fn(f64) -> f64 + Send + Sync + 'static) -> LipschitzHint {
    LipschitzHint::on_interval(exponent, constant).expect("catalog exponents are valid")
}

/// Univariate function by name.
pub fn univariate(name: &str) -> Result<ScalarFunction> {
    let f = match name {
        "exp-neg2x" => ScalarFunction::new(name, |x| (-2.0 * x).exp())
            .with_bound(|_| 1.0)
            .with_lipschitz(hint(1.0, |_| 2.0)),
        "identity" => ScalarFunction::new(name, |x| x)
            .with_bound(|t| t)
            .with_lipschitz(hint(1.0, |_| 1.0)),
        // |f'| = |3x^2 - 13x/6 + 3/8| <= 3 max(T, 1/2)^2 on [0, T].
        "cubic-roots" => ScalarFunction::new(name, |x| {
            (x - 0.5) * (x - 1.0 / 3.0) * (x - 0.25)
        })
        .with_bound(|t: f64| t.max(0.5).powi(3))
        .with_lipschitz(hint(1.0, |t: f64| 3.0 * t.max(0.5).powi(2))),
        "cube" => ScalarFunction::new(name, |x| x * x * x)
            .with_bound(|t: f64| t.powi(3))
            .with_lipschitz(hint(1.0, |t: f64| 3.0 * t * t)),
        "reciprocal" => ScalarFunction::new(name, |x| 1.0 / (1.0 + x))
            .with_bound(|_| 1.0)
            .with_lipschitz(hint(1.0, |_| 1.0)),
        "cos-pi" => ScalarFunction::new(name, |x| (PI * x).cos())
            .with_bound(|_| 1.0)
            .with_lipschitz(hint(1.0, |_| PI)),
        "one" => ScalarFunction::new(name, |_| 1.0)
            .with_bound(|_| 1.0)
            .with_lipschitz(hint(1.0, |_| 0.0)),
        "abs-half" => ScalarFunction::new(name, |x| (x - 0.5).abs())
            .with_bound(|t: f64| (t - 0.5).max(0.5))
            .with_lipschitz(hint(1.0, |_| 1.0)),
        _ => return Err(unknown(name, UNIVARIATE_NAMES)),
    };
    Ok(f)
}

/// Bivariate function by name.
pub fn bivariate(name: &str) -> Result<BivariateFunction> {
    let f = match name {
        "bi-default" => {
            BivariateFunction::new(name, |u, v| (1.0 + u) * (-v).exp() * (u + v).sin())
        }
        // The only members of the mixed Lipschitz class are constants.
        "bi-one" => BivariateFunction::new(name, |_, _| 1.0)
            .with_bound(1.0)
            .with_lipschitz(MixedLipschitzHint::new(0.0, 1.0, 1.0)?),
        "bi-product" => BivariateFunction::new(name, |u, v| u * v)
            .with_lipschitz(MixedLipschitzHint::new(1.0, 1.0, 1.0)?),
        "bi-exp" => BivariateFunction::new(name, |u, v| (-u - v).exp()).with_bound(1.0),
        "bi-sin-sum" => BivariateFunction::new(name, |u, v| (u + v).sin()).with_bound(1.0),
        _ => return Err(unknown(name, BIVARIATE_NAMES)),
    };
    Ok(f)
}

fn unknown(name: &str, known: &[&str]) -> Error {
    Error::Config(format!("unknown function '{name}', expected one of: {}", known.join(", ")))
}
