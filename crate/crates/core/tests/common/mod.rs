//! Brute-force reference evaluation, written without the library's numerics.
//!
//! Weights come from the plain Poisson recurrence `w_0 = e^-lambda`,
//! `w_{k+1} = w_k lambda / (k + 1)` with `lambda` built from `powf`; cell
//! averages of monomials are exact; other functions use composite Simpson.
#![allow(dead_code)]

/// Neumaier-compensated sum.
#[derive(Default)]
pub struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    pub fn add(&mut self, v: f64) {
        let t = self.total + v;
        if self.total.abs() >= v.abs() {
            self.carry += (self.total - t) + v;
        } else {
            self.carry += (v - t) + self.total;
        }
        self.total = t;
    }

    pub fn value(&self) -> f64 {
        self.total + self.carry
    }
}

pub fn lambda(n: u64, a: f64, x: f64) -> f64 {
    x * a.ln() / (a.powf(1.0 / n as f64) - 1.0)
}

/// All weights with non-negligible mass, starting at `k = 0`.
pub fn poisson_weights(lambda: f64) -> Vec<f64> {
    assert!(lambda < 700.0, "recurrence would underflow at k = 0");
    let last = (lambda + 60.0 * lambda.sqrt() + 60.0).ceil() as usize;
    let mut w = Vec::with_capacity(last + 1);
    let mut current = (-lambda).exp();
    for k in 0..=last {
        w.push(current);
        current *= lambda / (k + 1) as f64;
    }
    w
}

/// `n * int_{k/n}^{(k+1)/n} (u - shift)^i du`.
pub fn cell_power_average(n: u64, k: usize, i: u32, shift: f64) -> f64 {
    let nf = n as f64;
    let hi = (k + 1) as f64 / nf - shift;
    let lo = k as f64 / nf - shift;
    nf * (hi.powi(i as i32 + 1) - lo.powi(i as i32 + 1)) / (i + 1) as f64
}

/// `E[(U - shift)^i]` under the operator with Poisson mean `lambda`.
pub fn moment(n: u64, lambda: f64, i: u32, shift: f64) -> f64 {
    let mut s = Sum::default();
    for (k, w) in poisson_weights(lambda).into_iter().enumerate() {
        s.add(w * cell_power_average(n, k, i, shift));
    }
    s.value()
}

pub fn raw_moment(n: u64, a: f64, x: f64, i: u32) -> f64 {
    moment(n, lambda(n, a, x), i, 0.0)
}

pub fn central_moment(n: u64, a: f64, x: f64, i: u32) -> f64 {
    moment(n, lambda(n, a, x), i, x)
}

/// Composite Simpson average of `f` over `[lo, hi]`.
pub fn simpson_average(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / (2 * panels) as f64;
    let mut s = Sum::default();
    s.add(f(lo));
    s.add(f(hi));
    for j in 1..2 * panels {
        let c = if j % 2 == 1 { 4.0 } else { 2.0 };
        s.add(c * f(lo + j as f64 * h));
    }
    s.value() * h / 3.0 / (hi - lo)
}

fn summation_integral(n: u64, lambda: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let nf = n as f64;
    let mut s = Sum::default();
    for (k, w) in poisson_weights(lambda).into_iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        s.add(w * simpson_average(f, k as f64 / nf, (k + 1) as f64 / nf, 64));
    }
    s.value()
}

/// Reference `S*_{n,a}(f; x)`.
pub fn operator(n: u64, a: f64, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    summation_integral(n, lambda(n, a, x), f)
}

/// Reference Kantorovich operator `K_n(f; x)`.
pub fn kantorovich(n: u64, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    summation_integral(n, n as f64 * x, f)
}

/// `Y*_{m,m,a}((u^i)(v^j); x, y)` by an explicit double sum.
pub fn bivariate_monomial(m: u64, a: f64, x: f64, y: f64, i: u32, j: u32, shift: (f64, f64)) -> f64 {
    let wx = poisson_weights(lambda(m, a, x));
    let wy = poisson_weights(lambda(m, a, y));
    let mut s = Sum::default();
    for (k, &p) in wx.iter().enumerate() {
        let cu = cell_power_average(m, k, i, shift.0);
        for (l, &q) in wy.iter().enumerate() {
            s.add(p * q * cu * cell_power_average(m, l, j, shift.1));
        }
    }
    s.value()
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
