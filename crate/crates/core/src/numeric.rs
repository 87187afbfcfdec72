//! Stable scalar primitives shared by the operator and the closed forms.
//!
//! Every formula in this crate is driven by `c = a^(1/n) - 1`, which suffers
//! catastrophic cancellation when evaluated as `a.powf(1.0 / n) - 1.0` for
//! large `n`. It is computed here as `expm1(ln(a) / n)` instead, and the ratio
//! `(ln a / n) / c`, which tends to 1, is exposed through its deviation from 1
//! so that the central moments stay accurate up to `n = 10^6` and beyond.

use std::f64::consts::PI;

/// `a^(1/n) - 1`, evaluated without cancellation.
pub fn base_increment(log_a: f64, n: f64) -> f64 {
    (log_a / n).exp_m1()
}

/// `t / expm1(t) - 1`.
///
/// Uses the Bernoulli series `-t/2 + t^2/12 - t^4/720 + t^6/30240` near zero,
/// where the direct form loses all relative precision.
pub fn bernoulli_gap(t: f64) -> f64 {
    if t.abs() < 1e-2 {
        let t2 = t * t;
        -0.5 * t + t2 * (1.0 / 12.0 - t2 * (1.0 / 720.0 - t2 / 30240.0))
    } else {
        t / t.exp_m1() - 1.0
    }
}

// ln(k!) - ((k + 1/2) ln k - k + ln(2 pi)/2) for k = 1..=15.
const STIRLING_ERROR: [f64; 15] = [
    0.081_061_466_795_327_258,
    0.041_340_695_955_409_294,
    0.027_677_925_684_998_339,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_192,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_770,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_871,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_530,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

/// Error of Stirling's approximation to `ln(k!)`, for `k >= 1`.
pub fn stirling_error(k: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    debug_assert!(k >= 1);
    if k <= 15 {
        return STIRLING_ERROR[(k - 1) as usize];
    }
    let n = k as f64;
    let nn = n * n;
    if k > 500 {
        (S0 - S1 / nn) / n
    } else if k > 80 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if k > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/m) + m - x`, accurate when `x` is close to `m`.
pub fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let v2 = v * v;
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let mut j = 1;
        loop {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// Natural log of the Poisson mass `lambda^k e^-lambda / k!`.
///
/// Saddle-point form: no `k ln(lambda)` against `ln(k!)` cancellation, so the
/// result keeps full relative accuracy for `lambda` in the millions.
pub fn ln_poisson_mass(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -lambda;
    }
    let kf = k as f64;
    -stirling_error(k) - deviance(kf, lambda) - 0.5 * (2.0 * PI * kf).ln()
}

/// Gauss-Legendre nodes and weights mapped to the unit cell `[0, 1]`.
///
/// Offsets are in `(0, 1)` and the weights sum to 1, so a cell average of `f`
/// over `[k/n, (k+1)/n]` is `sum_j w_j f((k + theta_j)/n)`.
pub fn unit_cell_rule(points: usize) -> Vec<(f64, f64)> {
    use gauss_quad::legendre::GaussLegendre;
    let degree = std::num::NonZeroUsize::new(points.max(1)).expect("nonzero");
    let rule = GaussLegendre::new(degree);
    let mut pairs: Vec<(f64, f64)> = rule
        .nodes()
        .zip(rule.weights())
        .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}
