//! Evaluable test functions with optional growth and Lipschitz metadata.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Map1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Map2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Hölder/Lipschitz hint `|f(u) - f(x)| <= M |u - x|^alpha`.
///
/// The constant may depend on the interval `[0, T]` it is claimed on, which
/// lets polynomials carry a usable hint on every bounded range.
#[derive(Clone)]
pub struct LipschitzHint {
    exponent: f64,
    constant: Map1,
}

impl LipschitzHint {
    /// Hint valid on the whole half-line.
    pub fn global(constant: f64, exponent: f64) -> Result<Self> {
        Self::on_interval(exponent, move |_| constant)
    }

    /// Hint whose constant on `[0, T]` is `constant(T)`.
    pub fn on_interval(
        exponent: f64,
        constant: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1], got {exponent}")));
        }
        Ok(Self {
            exponent,
            constant: Arc::new(constant),
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Constant M valid on `[0, end]`.
    pub fn constant_on(&self, end: f64) -> f64 {
        (self.constant)(end)
    }
}

impl fmt::Debug for LipschitzHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LipschitzHint")
            .field("exponent", &self.exponent)
            .field("M(1)", &self.constant_on(1.0))
            .finish()
    }
}

/// Real function on `[0, inf)`.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    eval: Map1,
    bound: Option<Map1>,
    lipschitz: Option<LipschitzHint>,
}

impl ScalarFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            bound: None,
            lipschitz: None,
        }
    }

    /// Declares `B(T) >= sup |f|` on `[0, T]`.
    pub fn with_bound(mut self, bound: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.bound = Some(Arc::new(bound));
        self
    }

    pub fn with_lipschitz(mut self, hint: LipschitzHint) -> Self {
        self.lipschitz = Some(hint);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn bound_on(&self, end: f64) -> Option<f64> {
        self.bound.as_ref().map(|b| b(end))
    }

    pub fn lipschitz_hint(&self) -> Option<&LipschitzHint> {
        self.lipschitz.as_ref()
    }

    /// Linear combination `alpha f + beta g`; metadata is dropped.
    pub fn combine(alpha: f64, f: &ScalarFunction, beta: f64, g: &ScalarFunction) -> Self {
        let (f, g) = (f.eval.clone(), g.eval.clone());
        ScalarFunction::new("combination", move |x| alpha * f(x) + beta * g(x))
    }

    /// Checks the Lipschitz hint on all pairs of an equispaced grid of `[0, end]`.
    ///
    /// Returns the first violating pair as [`Error::LipschitzHintViolated`].
    pub fn verify_lipschitz(&self, end: f64, nodes: usize) -> Result<()> {
        let hint = self
            .lipschitz
            .as_ref()
            .ok_or_else(|| Error::MissingLipschitzHint(self.name.clone()))?;
        if nodes < 2 {
            return Err(Error::DegenerateGrid { nodes });
        }
        let m = hint.constant_on(end);
        let alpha = hint.exponent();
        let step = end / (nodes - 1) as f64;
        let grid: Vec<(f64, f64)> = (0..nodes)
            .map(|i| {
                let t = i as f64 * step;
                (t, self.eval(t))
            })
            .collect();
        for (i, &(x, fx)) in grid.iter().enumerate() {
            for &(u, fu) in &grid[i + 1..] {
                let observed = (fu - fx).abs();
                let allowed = m * (u - x).abs().powf(alpha);
                if observed > allowed * (1.0 + 1e-12) + 1e-15 {
                    return Err(Error::LipschitzHintViolated {
                        u,
                        x,
                        observed,
                        allowed,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("bound", &self.bound.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

/// Mixed hint `|f(u,v) - f(x,y)| <= M |u-x|^alpha1 |v-y|^alpha2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedLipschitzHint {
    pub constant: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl MixedLipschitzHint {
    pub fn new(constant: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(constant >= 0.0) {
            return Err(Error::invalid("M", "must be nonnegative"));
        }
        for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1], got {a}")));
            }
        }
        Ok(Self {
            constant,
            alpha1,
            alpha2,
        })
    }
}

/// Real function on the quadrant `[0, inf)^2`.
#[derive(Clone)]
pub struct BivariateFunction {
    name: String,
    eval: Map2,
    bound: Option<f64>,
    lipschitz: Option<MixedLipschitzHint>,
}

impl BivariateFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            bound: None,
            lipschitz: None,
        }
    }

    /// Separable product `g(u) h(v)`.
    pub fn product(g: &ScalarFunction, h: &ScalarFunction) -> Self {
        let (ge, he) = (g.eval.clone(), h.eval.clone());
        BivariateFunction::new(format!("{}*{}", g.name, h.name), move |u, v| ge(u) * he(v))
    }

    /// Declares a global bound on `|f|`.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn with_lipschitz(mut self, hint: MixedLipschitzHint) -> Self {
        self.lipschitz = Some(hint);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.eval)(u, v)
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn lipschitz_hint(&self) -> Option<MixedLipschitzHint> {
        self.lipschitz
    }

    /// Checks the mixed hint on all pairs of an equispaced grid of the box.
    pub fn verify_lipschitz(&self, end_u: f64, end_v: f64, nodes: usize) -> Result<()> {
        let hint = self
            .lipschitz
            .ok_or_else(|| Error::MissingLipschitzHint(self.name.clone()))?;
        if nodes < 2 {
            return Err(Error::DegenerateGrid { nodes });
        }
        let su = end_u / (nodes - 1) as f64;
        let sv = end_v / (nodes - 1) as f64;
        let pts: Vec<(f64, f64, f64)> = (0..nodes)
            .flat_map(|i| (0..nodes).map(move |j| (i as f64 * su, j as f64 * sv)))
            .map(|(u, v)| (u, v, self.eval(u, v)))
            .collect();
        for (i, &(x, y, fxy)) in pts.iter().enumerate() {
            for &(u, v, fuv) in &pts[i + 1..] {
                let observed = (fuv - fxy).abs();
                let allowed = hint.constant
                    * (u - x).abs().powf(hint.alpha1)
                    * (v - y).abs().powf(hint.alpha2);
                if observed > allowed * (1.0 + 1e-12) + 1e-15 {
                    return Err(Error::BivariateLipschitzHintViolated {
                        u,
                        v,
                        x,
                        y,
                        observed,
                        allowed,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BivariateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateFunction")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}
