//! Closed-form moments of the univariate and bivariate operators.
//!
//! With `lambda` the Poisson mean of the weights, the operator integrates `f`
//! against the law of `(K + theta) / n` where `K ~ Poisson(lambda)` and
//! `theta ~ U(0, 1)` are independent. All closed forms below follow from that
//! representation:
//!
//! * raw moments are polynomials in `lambda` with nonnegative coefficients and
//!   are evaluated as such;
//! * central moments are expanded around the drift `d = lambda/n - x`, which is
//!   computed without cancellation (see [`OperatorParams::rate_gap`]), so they
//!   keep full relative accuracy as `n` grows.
//!
//! [`expanded`] holds the fully multiplied-out forms written in terms of
//! `a^(1/n) - 1`, kept verbatim for cross-checking.

use crate::operator::{mean_parameter, BivariateParams, OperatorParams};

/// `S*(e_i; x)` for `i = 0..=3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentVector {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MomentVector {
    pub fn as_array(&self) -> [f64; 4] {
        [self.m0, self.m1, self.m2, self.m3]
    }
}

/// `S*((u - x)^i; x)` for `i = 1..=4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMomentVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl CentralMomentVector {
    pub fn as_array(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }
}

/// Mixed raw moments `Y*(e_ii; x, y)` and per-axis central moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateMomentTable {
    pub y00: f64,
    pub y11: f64,
    pub y22: f64,
    pub y33: f64,
    pub cx1: f64,
    pub cy1: f64,
    pub cx2: f64,
    pub cy2: f64,
}

/// Second central moment used as the scale of the rate estimates.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RateQuantity(f64);

impl RateQuantity {
    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn sqrt(&self) -> f64 {
        self.0.max(0.0).sqrt()
    }
}

pub fn raw_moments(params: &OperatorParams, x: f64) -> MomentVector {
    let n = params.n() as f64;
    let l = mean_parameter(params, x);
    MomentVector {
        m0: 1.0,
        m1: (1.0 + 2.0 * l) / (2.0 * n),
        m2: (1.0 + l * (6.0 + 3.0 * l)) / (3.0 * n * n),
        m3: (1.0 + l * (14.0 + l * (18.0 + 4.0 * l))) / (4.0 * n * n * n),
    }
}

const BINOMIAL: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

pub fn central_moments(params: &OperatorParams, x: f64) -> CentralMomentVector {
    let n = params.n() as f64;
    let lambda = mean_parameter(params, x);
    let drift = x * params.rate_gap();
    let h = 1.0 / n;

    // E[(drift + theta/n)^j]
    let mut shift = [0.0; 5];
    for (j, slot) in shift.iter_mut().enumerate() {
        *slot = (0..=j)
            .map(|l| {
                BINOMIAL[j][l] * drift.powi((j - l) as i32) * h.powi(l as i32) / (l + 1) as f64
            })
            .sum();
    }
    // Central moments of K ~ Poisson(lambda), scaled by n^-j.
    let poisson = [
        1.0,
        0.0,
        lambda * h * h,
        lambda * h * h * h,
        (3.0 * lambda * lambda + lambda) * h * h * h * h,
    ];
    let central = |i: usize| -> f64 {
        (0..=i)
            .map(|j| BINOMIAL[i][j] * poisson[j] * shift[i - j])
            .sum()
    };
    CentralMomentVector {
        c1: central(1),
        c2: central(2),
        c3: central(3),
        c4: central(4),
    }
}

/// `delta_{n,a}(x) = S*((u - x)^2; x)`.
pub fn delta(params: &OperatorParams, x: f64) -> RateQuantity {
    RateQuantity(central_moments(params, x).c2)
}

pub fn bivariate_moments(params: &BivariateParams, x: f64, y: f64) -> BivariateMomentTable {
    let axis = params.axis();
    let (mx, my) = (raw_moments(&axis, x), raw_moments(&axis, y));
    let (cx, cy) = (central_moments(&axis, x), central_moments(&axis, y));
    BivariateMomentTable {
        y00: mx.m0 * my.m0,
        y11: mx.m1 * my.m1,
        y22: mx.m2 * my.m2,
        y33: mx.m3 * my.m3,
        cx1: cx.c1,
        cy1: cy.c1,
        cx2: cx.c2,
        cy2: cy.c2,
    }
}

/// `(delta_{m,a}(x), delta'_{m,a}(y))` of the bivariate operator.
pub fn bivariate_deltas(params: &BivariateParams, x: f64, y: f64) -> (RateQuantity, RateQuantity) {
    let axis = params.axis();
    (delta(&axis, x), delta(&axis, y))
}

/// Multiplied-out closed forms in terms of `c = a^(1/n) - 1` and `L = ln a`.
///
/// These cancel badly for large `n` and are only meant for moderate degrees.
/// Two of them are known to be defective and are kept as written so the
/// defect stays measurable through [`discrepancies`]:
///
/// * the third central moment carries `-2 x^3 L^3 / (c^2 n^3)` where the exact
///   cubic term is `+x^3 L^3 / (c^3 n^3)`;
/// * the mixed moment `Y*(e_11)` is divided by `4 c m^2` instead of `4 c^2 m^2`.
pub mod expanded {
    use super::{CentralMomentVector, MomentVector};
    use crate::operator::{BivariateParams, OperatorParams};

    fn parts(params: &OperatorParams) -> (f64, f64, f64) {
        (params.n() as f64, params.increment(), params.log_a())
    }

    pub fn raw_moments(params: &OperatorParams, x: f64) -> MomentVector {
        let (n, c, l) = parts(params);
        let xl = x * l;
        MomentVector {
            m0: 1.0,
            m1: 1.0 / (2.0 * n) + xl / (c * n),
            m2: 1.0 / (3.0 * n * n) + 2.0 * xl / (c * n * n) + xl * xl / (c * c * n * n),
            m3: 1.0 / (4.0 * n.powi(3))
                + 3.5 * xl / (c * n.powi(3))
                + 4.5 * xl * xl / (c * c * n.powi(3))
                + xl.powi(3) / (c.powi(3) * n.powi(3)),
        }
    }

    pub fn central_moments(params: &OperatorParams, x: f64) -> CentralMomentVector {
        let (n, c, l) = parts(params);
        let nx = n * x;
        let c1 = -(-1.0 + 2.0 * nx) / (2.0 * n) + x * l / (n * c);
        let c2 = (1.0 - 3.0 * nx + 3.0 * nx * nx) / (3.0 * n * n)
            - 2.0 * c * (-1.0 + nx) * x * l / (c * c * n * n)
            + x * x * l * l / (c * c * n * n);
        let c3 = -(-1.0 + 4.0 * nx - 6.0 * nx * nx + 4.0 * nx.powi(3)) / (4.0 * n.powi(3))
            + x * (7.0 - 12.0 * nx + 6.0 * nx * nx) * l / (2.0 * c * n.powi(3))
            - (3.0 * x * x * (-3.0 + 2.0 * nx) * l * l + 4.0 * x.powi(3) * l.powi(3))
                / (2.0 * c * c * n.powi(3));
        let c4 = (c.powi(4)
            * (1.0 - 5.0 * nx + 10.0 * nx * nx - 10.0 * nx.powi(3) + 5.0 * nx.powi(4))
            - 10.0 * c.powi(3) * x * (-3.0 + 7.0 * nx - 6.0 * nx * nx + 2.0 * nx.powi(3)) * l
            + 15.0 * c * c * x * x * (5.0 - 6.0 * nx + 2.0 * nx * nx) * l * l
            - 20.0 * c * x.powi(3) * (-2.0 + nx) * l.powi(3)
            + 5.0 * x.powi(4) * l.powi(4))
            / (5.0 * c.powi(4) * n.powi(4));
        CentralMomentVector { c1, c2, c3, c4 }
    }

    /// `(y11, y22, y33)`; a bare `log` is read as `ln a`.
    pub fn bivariate_mixed(params: &BivariateParams, x: f64, y: f64) -> (f64, f64, f64) {
        let (m, c, l) = parts(&params.axis());
        let (xl, yl) = (x * l, y * l);
        let y11 = (c + 2.0 * xl) * (c + 2.0 * yl) / (4.0 * c * m * m);
        let q = |t: f64| c * c + 6.0 * c * t + 3.0 * t * t;
        let y22 = q(xl) * q(yl) / (9.0 * c.powi(4) * m.powi(4));
        let cube = |t: f64| c.powi(3) + 14.0 * c * c * t + 18.0 * c * t * t + 4.0 * t.powi(3);
        let y33 = cube(xl) * cube(yl) / (16.0 * c.powi(6) * m.powi(6));
        (y11, y22, y33)
    }
}

/// Disagreement between an expanded form and the stable closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub quantity: &'static str,
    pub expanded: f64,
    pub stable: f64,
    pub relative_difference: f64,
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Lists every expanded form that deviates from the stable form by more than
/// `tolerance` (relative) at `(params, x)`; bivariate entries use `(x, x)`.
pub fn discrepancies(params: &OperatorParams, x: f64, tolerance: f64) -> Vec<Discrepancy> {
    let raw = raw_moments(params, x);
    let raw_e = expanded::raw_moments(params, x);
    let cen = central_moments(params, x);
    let cen_e = expanded::central_moments(params, x);
    let bi = BivariateParams::new(params.n(), params.a()).expect("validated params");
    let table = bivariate_moments(&bi, x, x);
    let (y11, y22, y33) = expanded::bivariate_mixed(&bi, x, x);
    let pairs = [
        ("m1", raw_e.m1, raw.m1),
        ("m2", raw_e.m2, raw.m2),
        ("m3", raw_e.m3, raw.m3),
        ("c1", cen_e.c1, cen.c1),
        ("c2", cen_e.c2, cen.c2),
        ("c3", cen_e.c3, cen.c3),
        ("c4", cen_e.c4, cen.c4),
        ("y11", y11, table.y11),
        ("y22", y22, table.y22),
        ("y33", y33, table.y33),
    ];
    pairs
        .into_iter()
        .filter_map(|(quantity, expanded, stable)| {
            let relative_difference = relative_difference(expanded, stable);
            (relative_difference > tolerance).then_some(Discrepancy {
                quantity,
                expanded,
                stable,
                relative_difference,
            })
        })
        .collect()
}
