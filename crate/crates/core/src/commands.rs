//! Table-producing commands behind the `smk-lab` binary.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{
    certify_bivariate_bound, certify_bivariate_lipschitz, certify_lipschitz_bound,
    certify_modulus_bound, BoundCertificate, CertifyOptions,
};
use crate::catalog;
use crate::error::{Error, Result};
use crate::function::{BivariateFunction, ScalarFunction};
use crate::moments::{bivariate_moments, central_moments, discrepancies, expanded, raw_moments};
use crate::operator::{
    apply, apply_bivariate, apply_bivariate_detailed, apply_kantorovich, BivariateParams,
    OperatorParams, QuadratureRule, TruncationPolicy,
};
use crate::stats::{
    counterexample_sequence, is_perfect_square, korovkin_deviations, stat_degree_check,
    stat_limit_check, DeviationNorm, StatConfig,
};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Compare,
    Moments,
    Korovkin,
    Density,
    Certify,
    Bivariate,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Eval,
        Command::Compare,
        Command::Moments,
        Command::Korovkin,
        Command::Density,
        Command::Certify,
        Command::Bivariate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Compare => "compare",
            Command::Moments => "moments",
            Command::Korovkin => "korovkin",
            Command::Density => "density",
            Command::Certify => "certify",
            Command::Bivariate => "bivariate",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format '{s}', expected csv or json"))),
        }
    }
}

/// Evaluation grid `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let grid = Grid { start, stop, step };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || self.start < 0.0 {
            return Err(Error::Config(format!("grid start must be >= 0, got {}", self.start)));
        }
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::Config(format!("grid step must be > 0, got {}", self.step)));
        }
        if !self.stop.is_finite() || self.stop < self.start {
            return Err(Error::Config(format!(
                "grid stop {} lies before start {}",
                self.stop, self.start
            )));
        }
        if (self.stop - self.start) / self.step > 1e7 {
            return Err(Error::Config("grid has more than 10^7 points".into()));
        }
        Ok(())
    }

    /// Nodes `start + i * step`, the last one within `1e-9` steps of `stop`.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid '{s}' is not start:stop:step")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("grid '{s}': '{t}' is not a number")))
        };
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundChoice {
    Modulus,
    Lipschitz,
    BivariateModulus,
    BivariateLipschitz,
}

impl BoundChoice {
    pub fn is_bivariate(&self) -> bool {
        matches!(self, BoundChoice::BivariateModulus | BoundChoice::BivariateLipschitz)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundChoice::Modulus => "modulus",
            BoundChoice::Lipschitz => "lipschitz",
            BoundChoice::BivariateModulus => "bivariate-modulus",
            BoundChoice::BivariateLipschitz => "bivariate-lipschitz",
        }
    }
}

impl FromStr for BoundChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modulus" => Ok(BoundChoice::Modulus),
            "lipschitz" => Ok(BoundChoice::Lipschitz),
            "bivariate-modulus" => Ok(BoundChoice::BivariateModulus),
            "bivariate-lipschitz" => Ok(BoundChoice::BivariateLipschitz),
            _ => Err(Error::Config(format!("unknown bound '{s}'"))),
        }
    }
}

/// Built-in sequences for the density command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceChoice {
    /// `1/n`.
    Inverse,
    /// `(-1)^n`.
    Alternating,
    /// `sqrt(n)` on perfect squares, else 0.
    Counterexample,
    /// Indicator of the even numbers.
    Evens,
    /// Indicator of the perfect squares.
    Squares,
    /// `sup_{[0,l]} |(1 + u_n) S*_{n,a}(e1) - e1|` with `u_n` the counterexample.
    PerturbedE1,
}

impl SequenceChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            SequenceChoice::Inverse => "inverse",
            SequenceChoice::Alternating => "alternating",
            SequenceChoice::Counterexample => "counterexample",
            SequenceChoice::Evens => "evens",
            SequenceChoice::Squares => "squares",
            SequenceChoice::PerturbedE1 => "perturbed-e1",
        }
    }
}

impl FromStr for SequenceChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SequenceChoice::Inverse,
            SequenceChoice::Alternating,
            SequenceChoice::Counterexample,
            SequenceChoice::Evens,
            SequenceChoice::Squares,
            SequenceChoice::PerturbedE1,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown sequence '{s}'")))
    }
}

/// Parameters of one command run. Unset fields take per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub function: Option<String>,
    pub n: Vec<u64>,
    pub a: Option<f64>,
    pub m: Vec<u64>,
    pub grid: Option<Grid>,
    pub tail_eps: f64,
    pub quad_points: usize,
    pub format: OutputFormat,
    pub weighted: bool,
    pub epsilons: Vec<f64>,
    pub horizons: Vec<u64>,
    pub beta: Option<f64>,
    pub strict: bool,
    pub bound: Option<BoundChoice>,
    pub sequence: Option<SequenceChoice>,
    /// Multiplier on certificate bounds; only changed for negative controls.
    pub bound_scale: f64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            function: None,
            n: Vec::new(),
            a: None,
            m: Vec::new(),
            grid: None,
            tail_eps: TruncationPolicy::DEFAULT_TAIL_EPSILON,
            quad_points: QuadratureRule::DEFAULT_POINTS,
            format: OutputFormat::Csv,
            weighted: false,
            epsilons: Vec::new(),
            horizons: Vec::new(),
            beta: None,
            strict: false,
            bound: None,
            sequence: None,
            bound_scale: 1.0,
        }
    }

    /// Named configurations `f1`..`f8`.
    pub fn preset(name: &str) -> Result<Self> {
        let grid = |stop: f64, step: f64| Some(Grid { start: 0.0, stop, step });
        let uni = |command, f: &str, n: &[u64]| {
            let mut c = RunConfig::new(command);
            c.function = Some(f.into());
            c.n = n.to_vec();
            c.a = Some(1.5);
            c.grid = grid(2.0, 0.05);
            c
        };
        let bi = |m: &[u64]| {
            let mut c = RunConfig::new(Command::Bivariate);
            c.function = Some("bi-default".into());
            c.m = m.to_vec();
            c.a = Some(3.0);
            c.grid = grid(1.0, 0.1);
            c
        };
        Ok(match name {
            "f1" => uni(Command::Eval, "exp-neg2x", &[5, 10, 500, 1000]),
            "f2" => uni(Command::Eval, "identity", &[100, 500]),
            "f3" => uni(Command::Eval, "cubic-roots", &[15, 30, 500, 1000]),
            "f4" => uni(Command::Compare, "cube", &[10, 20]),
            "f5" => uni(Command::Compare, "reciprocal", &[4, 20]),
            "f6" => uni(Command::Compare, "cos-pi", &[5, 20]),
            "f7" => bi(&[5, 10, 20]),
            "f8" => bi(&[100, 500]),
            _ => return Err(Error::Config(format!("unknown preset '{name}', expected f1..f8"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if self.n.contains(&0) || self.m.contains(&0) {
            return Err(Error::Config("degrees n and m must be >= 1".into()));
        }
        if let Some(a) = self.a {
            if !(a > 1.0) || !a.is_finite() {
                return Err(Error::Config(format!("a must be finite and > 1, got {a}")));
            }
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return Err(Error::Config(format!("tail-eps must lie in (0, 1), got {}", self.tail_eps)));
        }
        if self.quad_points == 0 || self.quad_points > 64 {
            return Err(Error::Config("quad-points must lie in 1..=64".into()));
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::Config(format!("beta must lie in (0, 1), got {beta}")));
            }
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("every epsilon must be > 0".into()));
        }
        if self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be >= 1".into()));
        }
        if !(self.bound_scale > 0.0) {
            return Err(Error::Config("bound scale must be > 0".into()));
        }
        Ok(())
    }

    fn truncation(&self) -> Result<TruncationPolicy> {
        TruncationPolicy::new(self.tail_eps, None)
    }

    fn quadrature(&self) -> Result<QuadratureRule> {
        QuadratureRule::new(self.quad_points)
    }

    fn list_or(list: &[u64], default: &[u64]) -> Vec<u64> {
        if list.is_empty() {
            default.to_vec()
        } else {
            list.to_vec()
        }
    }

    fn grid_or(&self, stop: f64, step: f64) -> Grid {
        self.grid.unwrap_or(Grid { start: 0.0, stop, step })
    }

    fn scalar(&self, default: &str) -> Result<ScalarFunction> {
        catalog::univariate(self.function.as_deref().unwrap_or(default))
    }

    fn surface(&self, default: &str) -> Result<BivariateFunction> {
        catalog::bivariate(self.function.as_deref().unwrap_or(default))
    }

    fn common_meta(&self, table: &mut Table) {
        table
            .meta("command", self.command.as_str())
            .meta("tail_eps", format!("{:e}", self.tail_eps))
            .meta("quad_points", self.quad_points);
    }
}

/// A command's table plus the number of failed certificates (certify only).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub certificate_failures: usize,
}

impl Outcome {
    fn plain(table: Table) -> Self {
        Self {
            table,
            certificate_failures: 0,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Json => self.table.to_json(),
        }
    }
}

/// Validates `config` and runs its command.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    match config.command {
        Command::Eval => cmd_eval(config).map(Outcome::plain),
        Command::Compare => cmd_compare(config).map(Outcome::plain),
        Command::Moments => cmd_moments(config).map(Outcome::plain),
        Command::Korovkin => cmd_korovkin(config).map(Outcome::plain),
        Command::Density => cmd_density(config).map(Outcome::plain),
        Command::Certify => cmd_certify(config),
        Command::Bivariate => cmd_bivariate(config).map(Outcome::plain),
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Operator values on the grid, one column per degree.
pub fn cmd_eval(config: &RunConfig) -> Result<Table> {
    let f = config.scalar("exp-neg2x")?;
    let degrees = RunConfig::list_or(&config.n, &[5, 10]);
    let a = config.a.unwrap_or(1.5);
    let grid = config.grid_or(2.0, 0.05);
    let (trunc, quad) = (config.truncation()?, config.quadrature()?);
    let params: Vec<OperatorParams> =
        degrees.iter().map(|&n| OperatorParams::new(n, a)).collect::<Result<_>>()?;

    let mut columns = vec!["x".to_string(), "f".to_string()];
    columns.extend(degrees.iter().map(|n| format!("S_n{n}")));
    let mut table = Table::new("operator values", &[]);
    table.columns = columns;
    config.common_meta(&mut table);
    table
        .meta("fn", f.name())
        .meta("a", a)
        .meta("n", join(&degrees))
        .meta("grid", grid);

    let rows: Vec<Vec<f64>> = grid
        .points()
        .par_iter()
        .map(|&x| {
            let mut row = vec![x, f.eval(x)];
            for p in &params {
                row.push(apply(p, &f, x, &trunc, &quad)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    for (j, n) in degrees.iter().enumerate() {
        table.summarize(format!("max_abs_error_n{n}"), max_abs(rows.iter().map(|r| r[2 + j] - r[1])));
    }
    for row in rows {
        table.push(row.into_iter().map(Cell::Num).collect());
    }
    Ok(table)
}

/// Side-by-side values and errors of `S*_{n,a}` and the Kantorovich operator.
pub fn cmd_compare(config: &RunConfig) -> Result<Table> {
    let f = config.scalar("cube")?;
    let degrees = RunConfig::list_or(&config.n, &[10, 20]);
    let a = config.a.unwrap_or(1.5);
    let grid = config.grid_or(2.0, 0.05);
    let (trunc, quad) = (config.truncation()?, config.quadrature()?);

    let mut table = Table::new(
        "operator comparison",
        &["n", "x", "f", "S", "K", "err_S", "err_K"],
    );
    config.common_meta(&mut table);
    table
        .meta("fn", f.name())
        .meta("a", a)
        .meta("n", join(&degrees))
        .meta("grid", grid);

    let points = grid.points();
    for &n in &degrees {
        let params = OperatorParams::new(n, a)?;
        let rows: Vec<[f64; 5]> = points
            .par_iter()
            .map(|&x| {
                let fx = f.eval(x);
                let s = apply(&params, &f, x, &trunc, &quad)?;
                let k = apply_kantorovich(n, &f, x, &trunc, &quad)?;
                Ok([x, fx, s, k, 0.0])
            })
            .collect::<Result<_>>()?;
        let (mut err_s, mut err_k) = (0.0f64, 0.0f64);
        for [x, fx, s, k, _] in rows {
            err_s = err_s.max((s - fx).abs());
            err_k = err_k.max((k - fx).abs());
            table.push(vec![
                n.into(),
                x.into(),
                fx.into(),
                s.into(),
                k.into(),
                (s - fx).abs().into(),
                (k - fx).abs().into(),
            ]);
        }
        table
            .summarize(format!("max_err_S_n{n}"), err_s)
            .summarize(format!("max_err_K_n{n}"), err_k);
    }
    Ok(table)
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Closed-form moments next to series evaluation and the expanded forms.
pub fn cmd_moments(config: &RunConfig) -> Result<Table> {
    if !config.m.is_empty() {
        return cmd_bivariate_moments(config);
    }
    let degrees = RunConfig::list_or(&config.n, &[1, 3, 5, 20, 100]);
    let a = config.a.unwrap_or(1.5);
    let grid = config.grid_or(2.0, 0.1);
    let (trunc, quad) = (config.truncation()?, config.quadrature()?);
    let monomials: Vec<ScalarFunction> = (1..=3)
        .map(|i| ScalarFunction::new(format!("e{i}"), move |u| u.powi(i)))
        .collect();

    let mut table = Table::new(
        "moments",
        &[
            "n", "x", "m0", "m1", "m2", "m3", "m1_series", "m2_series", "m3_series",
            "max_rel_diff", "c1", "c2", "c3", "c4", "c3_expanded", "c4_expanded", "defects",
        ],
    );
    config.common_meta(&mut table);
    table.meta("a", a).meta("n", join(&degrees)).meta("grid", grid);

    let points = grid.points();
    let mut worst = 0.0f64;
    for &n in &degrees {
        let params = OperatorParams::new(n, a)?;
        let rows: Vec<(Vec<Cell>, f64)> = points
            .par_iter()
            .map(|&x| {
                let raw = raw_moments(&params, x);
                let cen = central_moments(&params, x);
                let exp = expanded::central_moments(&params, x);
                let series: Vec<f64> = monomials
                    .iter()
                    .map(|e| apply(&params, e, x, &trunc, &quad))
                    .collect::<Result<_>>()?;
                let rel = [raw.m1, raw.m2, raw.m3]
                    .iter()
                    .zip(&series)
                    .map(|(c, s)| relative_difference(*c, *s))
                    .fold(0.0, f64::max);
                let defects: Vec<&str> =
                    discrepancies(&params, x, 1e-9).iter().map(|d| d.quantity).collect();
                let row = vec![
                    n.into(),
                    x.into(),
                    raw.m0.into(),
                    raw.m1.into(),
                    raw.m2.into(),
                    raw.m3.into(),
                    series[0].into(),
                    series[1].into(),
                    series[2].into(),
                    rel.into(),
                    cen.c1.into(),
                    cen.c2.into(),
                    cen.c3.into(),
                    cen.c4.into(),
                    exp.c3.into(),
                    exp.c4.into(),
                    defects.join(";").into(),
                ];
                Ok((row, rel))
            })
            .collect::<Result<_>>()?;
        for (row, rel) in rows {
            worst = worst.max(rel);
            table.push(row);
        }
    }
    table.summarize("max_rel_diff", worst);
    Ok(table)
}

fn cmd_bivariate_moments(config: &RunConfig) -> Result<Table> {
    let a = config.a.unwrap_or(3.0);
    let grid = config.grid_or(1.0, 0.5);
    let (trunc, quad) = (config.truncation()?, config.quadrature()?);
    let product = BivariateFunction::new("uv", |u, v| u * v);

    let mut table = Table::new(
        "bivariate moments",
        &[
            "m", "x", "y", "y00", "y11", "y22", "y33", "y11_series", "y11_expanded",
            "rel_diff",
        ],
    );
    config.common_meta(&mut table);
    table.meta("a", a).meta("m", join(&config.m)).meta("grid", grid);

    let points = grid.points();
    let pairs: Vec<(f64, f64)> =
        points.iter().flat_map(|&x| points.iter().map(move |&y| (x, y))).collect();
    let mut worst = 0.0f64;
    for &m in &config.m {
        let params = BivariateParams::new(m, a)?;
        let rows: Vec<(Vec<Cell>, f64)> = pairs
            .par_iter()
            .map(|&(x, y)| {
                let t = bivariate_moments(&params, x, y);
                let series = apply_bivariate(&params, &product, x, y, &trunc, &quad)?;
                let (y11e, _, _) = expanded::bivariate_mixed(&params, x, y);
                let rel = relative_difference(t.y11, series);
                let row = vec![
                    m.into(),
                    x.into(),
                    y.into(),
                    t.y00.into(),
                    t.y11.into(),
                    t.y22.into(),
                    t.y33.into(),
                    series.into(),
                    y11e.into(),
                    rel.into(),
                ];
                Ok((row, rel))
            })
            .collect::<Result<_>>()?;
        for (row, rel) in rows {
            worst = worst.max(rel);
            table.push(row);
        }
    }
    table.summarize("max_rel_diff", worst);
    Ok(table)
}

/// Korovkin test-function deviations over a list of degrees.
pub fn cmd_korovkin(config: &RunConfig) -> Result<Table> {
    let degrees = RunConfig::list_or(&config.n, &[10, 100, 1_000, 10_000]);
    let a = config.a.unwrap_or(1.5);
    let (norm, grid) = if config.weighted {
        (DeviationNorm::Weighted, config.grid_or(100.0, 0.01))
    } else {
        (DeviationNorm::Sup, config.grid_or(1.0, 0.001))
    };
    if grid.start != 0.0 {
        return Err(Error::Config("korovkin grids start at 0".into()));
    }
    let params: Vec<OperatorParams> =
        degrees.iter().map(|&n| OperatorParams::new(n, a)).collect::<Result<_>>()?;
    let rows = korovkin_deviations(&params, grid.stop, grid.step, norm)?;

    let mut columns = vec!["n", "a", "dev_e0", "dev_e1", "dev_e2"];
    if config.weighted {
        columns.extend(["tail_e1", "tail_e2"]);
    }
    let mut table = Table::new("korovkin deviations", &columns);
    config.common_meta(&mut table);
    table
        .meta("a", a)
        .meta("norm", if config.weighted { "weighted" } else { "sup" })
        .meta(if config.weighted { "x_max" } else { "l" }, grid.stop)
        .meta("grid_step", grid.step);
    for r in rows {
        let mut row: Vec<Cell> =
            vec![r.n.into(), r.a.into(), r.dev_e0.into(), r.dev_e1.into(), r.dev_e2.into()];
        if let Some((t1, t2)) = r.tail_bound {
            row.push(t1.into());
            row.push(t2.into());
        }
        table.push(row);
    }
    Ok(table)
}

/// Value of a built-in sequence at index `k` together with its limit.
fn sequence_value(choice: SequenceChoice, params: &OperatorParams, l: f64, k: u64) -> f64 {
    match choice {
        SequenceChoice::Inverse => 1.0 / k as f64,
        SequenceChoice::Alternating => {
            if k % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }
        SequenceChoice::Counterexample => counterexample_sequence(k),
        SequenceChoice::Evens => f64::from(u8::from(k % 2 == 0)),
        SequenceChoice::Squares => f64::from(u8::from(is_perfect_square(k))),
        SequenceChoice::PerturbedE1 => {
            // (1 + u_k) S*(e1; x) - x is affine in x, so its sup on [0, l] sits at an end.
            let p = OperatorParams::new(k, params.a()).expect("k >= 1 and a validated");
            let scale = 1.0 + counterexample_sequence(k);
            let at_zero = scale / (2.0 * k as f64);
            let slope = scale * (1.0 + p.rate_gap()) - 1.0;
            at_zero.abs().max((at_zero + slope * l).abs())
        }
    }
}

/// Exceedance density traces of a sequence, optionally with degree-beta scaling.
pub fn cmd_density(config: &RunConfig) -> Result<Table> {
    let choice = config.sequence.unwrap_or(SequenceChoice::Counterexample);
    let a = config.a.unwrap_or(1.5);
    let params = OperatorParams::new(1, a)?;
    let l = config.grid.map_or(1.0, |g| g.stop);
    let mut stat = StatConfig::default();
    if !config.epsilons.is_empty() {
        stat.epsilons = config.epsilons.clone();
    }
    if !config.horizons.is_empty() {
        stat.horizons = config.horizons.clone();
    }
    let sequence = |k: u64| sequence_value(choice, &params, l, k);
    let verdict = stat_limit_check(sequence, 0.0, &stat)?;
    let degree = config
        .beta
        .map(|beta| stat_degree_check(sequence, 0.0, beta, &stat))
        .transpose()?;

    let mut columns = vec!["epsilon", "horizon", "count", "density"];
    if degree.is_some() {
        columns.push("scaled");
    }
    let mut table = Table::new("exceedance density", &columns);
    table
        .meta("command", config.command.as_str())
        .meta("sequence", choice.as_str())
        .meta("limit", 0)
        .meta("epsilons", join(&stat.epsilons))
        .meta("horizons", join(&stat.horizons))
        .meta("verdict_threshold", stat.verdict_threshold);
    if matches!(choice, SequenceChoice::PerturbedE1) {
        table.meta("a", a).meta("l", l);
    }
    if let Some(beta) = config.beta {
        table.meta("beta", beta);
    }
    for (i, report) in verdict.reports.iter().enumerate() {
        let eps = report.epsilon.expect("sequence report");
        for (j, point) in report.trace.iter().enumerate() {
            let mut row: Vec<Cell> = vec![
                eps.into(),
                point.horizon.into(),
                point.count.into(),
                point.density().into(),
            ];
            if let Some(d) = &degree {
                row.push(d.traces[i].points[j].1.into());
            }
            table.push(row);
        }
        if let Some(d) = &degree {
            table.summarize(
                format!("scaled_decreasing_eps{eps}"),
                d.traces[i].decreasing,
            );
        }
    }
    table.summarize("verdict", verdict.verdict.as_str());
    Ok(table)
}

/// One certificate per grid point (per pair of points for bivariate bounds).
pub fn cmd_certify(config: &RunConfig) -> Result<Outcome> {
    let bound = config.bound.unwrap_or(BoundChoice::Modulus);
    let (trunc, quad) = (config.truncation()?, config.quadrature()?);
    let options = CertifyOptions {
        bound_scale: config.bound_scale,
        ..CertifyOptions::default()
    };
    let mut table = Table::new(
        "bound certificates",
        &["n", "a", "x", "y", "actual_error", "bound", "margin", "slack", "passed"],
    );
    config.common_meta(&mut table);
    table.meta("bound", bound.as_str());
    if config.bound_scale != 1.0 {
        table.meta("bound_scale", config.bound_scale);
    }

    let mut certificates: Vec<(u64, f64, BoundCertificate)> = Vec::new();
    if bound.is_bivariate() {
        let f = config.surface("bi-default")?;
        let degrees = RunConfig::list_or(&config.m, &[5, 10]);
        let a = config.a.unwrap_or(3.0);
        let grid = config.grid_or(1.0, 0.1);
        table
            .meta("fn", f.name())
            .meta("m", join(&degrees))
            .meta("a", a)
            .meta("grid", grid);
        let points = grid.points();
        let pairs: Vec<(f64, f64)> =
            points.iter().flat_map(|&x| points.iter().map(move |&y| (x, y))).collect();
        for &m in &degrees {
            let params = BivariateParams::new(m, a)?;
            let certs: Vec<BoundCertificate> = pairs
                .par_iter()
                .map(|&(x, y)| match bound {
                    BoundChoice::BivariateModulus => {
                        certify_bivariate_bound(&params, &f, x, y, &trunc, &quad, &options)
                    }
                    _ => certify_bivariate_lipschitz(&params, &f, x, y, &trunc, &quad, &options),
                })
                .collect::<Result<_>>()?;
            certificates.extend(certs.into_iter().map(|c| (m, a, c)));
        }
    } else {
        let f = config.scalar("exp-neg2x")?;
        let degrees = RunConfig::list_or(&config.n, &[5, 10, 20, 100]);
        let a = config.a.unwrap_or(1.5);
        let grid = config.grid_or(1.0, 0.05);
        table
            .meta("fn", f.name())
            .meta("n", join(&degrees))
            .meta("a", a)
            .meta("grid", grid);
        let points = grid.points();
        for &n in &degrees {
            let params = OperatorParams::new(n, a)?;
            let certs: Vec<BoundCertificate> = points
                .par_iter()
                .map(|&x| match bound {
                    BoundChoice::Modulus => {
                        certify_modulus_bound(&params, &f, x, &trunc, &quad, &options)
                    }
                    _ => certify_lipschitz_bound(&params, &f, x, &trunc, &quad, &options),
                })
                .collect::<Result<_>>()?;
            certificates.extend(certs.into_iter().map(|c| (n, a, c)));
        }
    }

    let failures = certificates.iter().filter(|(_, _, c)| !c.passed()).count();
    for (n, a, c) in &certificates {
        table.push(vec![
            (*n).into(),
            (*a).into(),
            c.x.into(),
            c.y.map_or(Cell::Text(String::new()), Cell::Num),
            c.actual_error.into(),
            c.bound_value.into(),
            c.margin.into(),
            c.slack.into(),
            c.passed().into(),
        ]);
    }
    table
        .summarize("total", certificates.len() as u64)
        .summarize("passed", (certificates.len() - failures) as u64)
        .summarize("failed", failures as u64);
    Ok(Outcome {
        table,
        certificate_failures: failures,
    })
}

/// Bivariate operator values on a square grid, one block per degree.
pub fn cmd_bivariate(config: &RunConfig) -> Result<Table> {
    let f = config.surface("bi-default")?;
    let degrees = RunConfig::list_or(&config.m, &[5, 10, 20]);
    let a = config.a.unwrap_or(3.0);
    let grid = config.grid_or(1.0, 0.1);
    let (trunc, quad) = (config.truncation()?, config.quadrature()?);

    let mut table = Table::new("bivariate operator values", &["m", "x", "y", "f", "Y", "abs_error"]);
    config.common_meta(&mut table);
    table
        .meta("fn", f.name())
        .meta("a", a)
        .meta("m", join(&degrees))
        .meta("grid", grid);

    let points = grid.points();
    let pairs: Vec<(f64, f64)> =
        points.iter().flat_map(|&x| points.iter().map(move |&y| (x, y))).collect();
    for &m in &degrees {
        let params = BivariateParams::new(m, a)?;
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(x, y)| apply_bivariate_detailed(&params, &f, x, y, &trunc, &quad).map(|r| r.value))
            .collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for (&(x, y), value) in pairs.iter().zip(values) {
            let fxy = f.eval(x, y);
            let err = (value - fxy).abs();
            worst = worst.max(err);
            table.push(vec![m.into(), x.into(), y.into(), fxy.into(), value.into(), err.into()]);
        }
        table.summarize(format!("max_abs_error_m{m}"), worst);
    }
    Ok(table)
}

/// Process exit code for a failed run.
pub fn exit_code(error: &Error) -> i32 {
    if error.is_numerical() {
        3
    } else {
        2
    }
}
