//! Parameter sweeps over the chain and two-level-system pipelines,
//! finite-difference derivatives and extremum location.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concurrence::pair_concurrence;
use crate::correlators::pair_correlators;
use crate::error::{Error, Result};
use crate::free_fermion::{solve_chain, ChainSpec};
use crate::tls_boundary::{tls_concurrence, Branch, TlsModel};

pub const SCHEMA_VERSION: u32 = 1;

/// Boundary bond strength, fixed or proportional to λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaRule {
    Absolute(f64),
    TimesLambda(f64),
}

impl KappaRule {
    pub fn resolve(&self, lambda: f64) -> f64 {
        match *self {
            KappaRule::Absolute(k) => k,
            KappaRule::TimesLambda(c) => c * lambda,
        }
    }
}

impl fmt::Display for KappaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaRule::Absolute(k) => write!(f, "{k}"),
            KappaRule::TimesLambda(c) => write!(f, "{c}x"),
        }
    }
}

/// Accepts `0.5` or `20x` / `20xlambda` (case-insensitive).
impl FromStr for KappaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || Error::Input(format!("cannot parse kappa '{s}', expected v or <c>x"));
        let rule = if let Some(c) = t.strip_suffix("xlambda").or_else(|| t.strip_suffix('x')) {
            KappaRule::TimesLambda(c.trim().parse().map_err(|_| bad())?)
        } else {
            KappaRule::Absolute(t.parse().map_err(|_| bad())?)
        };
        let v = match rule {
            KappaRule::Absolute(v) | KappaRule::TimesLambda(v) => v,
        };
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(rule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    C,
    CStar,
    TotalOrder,
    Xx,
    Yy,
    Zz,
    Energy,
    SigmaX,
    Concurrence,
}

impl Observable {
    pub const CHAIN: [Observable; 6] = [
        Observable::C,
        Observable::CStar,
        Observable::TotalOrder,
        Observable::Xx,
        Observable::Yy,
        Observable::Zz,
    ];
    pub const TLS: [Observable; 3] = [
        Observable::Energy,
        Observable::SigmaX,
        Observable::Concurrence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Observable::C => "c",
            Observable::CStar => "c_star",
            Observable::TotalOrder => "total_order",
            Observable::Xx => "xx",
            Observable::Yy => "yy",
            Observable::Zz => "zz",
            Observable::Energy => "energy",
            Observable::SigmaX => "sigma_x",
            Observable::Concurrence => "concurrence",
        }
    }

    pub fn is_pair(&self) -> bool {
        Self::CHAIN.contains(self)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::CHAIN
            .iter()
            .chain(Self::TLS.iter())
            .find(|o| o.name() == s.trim())
            .copied()
            .ok_or_else(|| Error::Input(format!("unknown observable '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Chain {
        n_sites: usize,
        kappa: KappaRule,
    },
    Tls {
        delta: f64,
        omega_c: f64,
        c0: f64,
        c1: f64,
        c2: f64,
        kt_window: f64,
        kt_overlay: bool,
    },
}

impl ModelSpec {
    pub fn tls(delta: f64, omega_c: f64) -> Self {
        ModelSpec::Tls {
            delta,
            omega_c,
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            kt_window: 0.05,
            kt_overlay: false,
        }
    }

    fn tls_model(&self, alpha: f64) -> Option<TlsModel> {
        match *self {
            ModelSpec::Tls {
                delta,
                omega_c,
                c0,
                c1,
                c2,
                kt_window,
                kt_overlay,
            } => Some(TlsModel {
                delta,
                alpha,
                omega_c,
                c0,
                c1,
                c2,
                kt_window,
                kt_overlay,
            }),
            ModelSpec::Chain { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub model: ModelSpec,
    /// λ for the chain, α for the two-level system.
    pub grid: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub outputs: Vec<Observable>,
    pub derivative: bool,
    /// Richardson-refine derivatives with a half-step auxiliary scan.
    pub richardson: bool,
}

impl ScanSpec {
    pub fn chain(
        n_sites: usize,
        kappa: KappaRule,
        grid: Vec<f64>,
        pairs: Vec<(usize, usize)>,
    ) -> Self {
        Self {
            model: ModelSpec::Chain { n_sites, kappa },
            grid,
            pairs,
            outputs: vec![Observable::C],
            derivative: false,
            richardson: true,
        }
    }

    pub fn tls(delta: f64, omega_c: f64, grid: Vec<f64>) -> Self {
        Self {
            model: ModelSpec::tls(delta, omega_c),
            grid,
            pairs: Vec::new(),
            outputs: vec![Observable::Concurrence],
            derivative: false,
            richardson: true,
        }
    }

    pub fn with_outputs(mut self, outputs: &[Observable]) -> Self {
        self.outputs = outputs.to_vec();
        self
    }

    pub fn with_derivative(mut self, on: bool) -> Self {
        self.derivative = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Input("empty parameter grid".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("grid values must be finite".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("grid must be strictly increasing".into()));
        }
        let mut seen = Vec::new();
        for o in &self.outputs {
            if seen.contains(o) {
                return Err(Error::Input(format!("observable '{o}' requested twice")));
            }
            seen.push(*o);
        }
        match &self.model {
            ModelSpec::Chain { n_sites, kappa } => {
                if self.grid[0] < 0.0 {
                    return Err(Error::Input("λ grid must be non-negative".into()));
                }
                ChainSpec::new(*n_sites, self.grid[0], kappa.resolve(self.grid[0]))?;
                for &(i, j) in &self.pairs {
                    if i == 0 || i >= j || j > *n_sites {
                        return Err(Error::Input(format!(
                            "pair ({i}, {j}) invalid for N = {n_sites}"
                        )));
                    }
                }
                if let Some(o) = self.outputs.iter().find(|o| !o.is_pair()) {
                    return Err(Error::Input(format!(
                        "observable '{o}' does not apply to the chain"
                    )));
                }
            }
            ModelSpec::Tls { .. } => {
                if !self.pairs.is_empty() {
                    return Err(Error::Input(
                        "site pairs do not apply to the two-level system".into(),
                    ));
                }
                if let Some(o) = self.outputs.iter().find(|o| o.is_pair()) {
                    return Err(Error::Input(format!(
                        "observable '{o}' does not apply to the two-level system"
                    )));
                }
                self.model.tls_model(self.grid[0]).unwrap().validate()?;
            }
        }
        Ok(())
    }

    /// Column layout: one column per (observable, pair), observable-major.
    pub fn column_keys(&self) -> Vec<ColumnKey> {
        match self.model {
            ModelSpec::Chain { .. } => self
                .outputs
                .iter()
                .flat_map(|&o| {
                    self.pairs.iter().map(move |&p| ColumnKey {
                        observable: o,
                        pair: Some(p),
                        derivative: false,
                    })
                })
                .collect(),
            ModelSpec::Tls { .. } => self
                .outputs
                .iter()
                .map(|&o| ColumnKey {
                    observable: o,
                    pair: None,
                    derivative: false,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnKey {
    pub observable: Observable,
    pub pair: Option<(usize, usize)>,
    pub derivative: bool,
}

impl ColumnKey {
    /// `c@1-2`, `d_c@1-2`, `concurrence`, `d_concurrence`.
    pub fn label(&self) -> String {
        let prefix = if self.derivative { "d_" } else { "" };
        match self.pair {
            Some((i, j)) => format!("{prefix}{}@{i}-{j}", self.observable),
            None => format!("{prefix}{}", self.observable),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        let (derivative, rest) = match label.strip_prefix("d_") {
            Some(r) => (true, r),
            None => (false, label),
        };
        let (obs, pair) = match rest.split_once('@') {
            Some((o, p)) => {
                let (i, j) = p
                    .split_once('-')
                    .ok_or_else(|| Error::Input(format!("bad column label '{label}'")))?;
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Input(format!("bad column label '{label}'")))
                };
                (o, Some((parse(i)?, parse(j)?)))
            }
            None => (rest, None),
        };
        Ok(Self {
            observable: obs.parse()?,
            pair,
            derivative,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub key: ColumnKey,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    pub index: usize,
    pub param: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub n_sites: Option<usize>,
    pub kappa_rule: Option<KappaRule>,
    /// Two-level-system branch per grid point.
    pub branches: Vec<Option<Branch>>,
    /// Chain grid points where a Bogoliubov mode energy was clamped to zero.
    pub degenerate: Vec<bool>,
    pub errors: Vec<PointError>,
    pub seedless: bool,
    pub code_version: String,
    /// Seconds since the Unix epoch; excluded from the payload digest.
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub schema_version: u32,
    pub spec: ScanSpec,
    pub params: Vec<f64>,
    pub columns: Vec<Column>,
    pub metadata: ScanMetadata,
}

impl ScanSeries {
    pub fn column(&self, label: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.key.label() == label)
    }

    /// Finite values of a column; errors if the column is absent or has gaps.
    pub fn values(&self, label: &str) -> Result<Vec<f64>> {
        let col = self
            .column(label)
            .ok_or_else(|| Error::Input(format!("no column '{label}'")))?;
        col.values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    Error::Consistency(format!(
                        "column '{label}' has no value at {}",
                        self.params[k]
                    ))
                })
            })
            .collect()
    }
}

struct PointResult {
    values: Vec<Option<f64>>,
    branch: Option<Branch>,
    degenerate: bool,
}

fn eval_point(spec: &ScanSpec, keys: &[ColumnKey], x: f64) -> Result<PointResult> {
    match &spec.model {
        ModelSpec::Chain { n_sites, kappa } => {
            let sol = solve_chain(&ChainSpec::new(*n_sites, x, kappa.resolve(x))?)?;
            let mut per_pair = Vec::with_capacity(spec.pairs.len());
            for &(i, j) in &spec.pairs {
                let pc = pair_correlators(&sol.contractions, i, j)?;
                let (_, c) = pair_concurrence(&pc)?;
                per_pair.push((pc, c));
            }
            let values = keys
                .iter()
                .map(|k| {
                    let idx = spec.pairs.iter().position(|&p| Some(p) == k.pair).unwrap();
                    let (pc, c) = &per_pair[idx];
                    Some(match k.observable {
                        Observable::C => c.c,
                        Observable::CStar => c.c_star,
                        Observable::TotalOrder => c.total_order,
                        Observable::Xx => pc.xx,
                        Observable::Yy => pc.yy,
                        Observable::Zz => pc.zz,
                        _ => unreachable!("validated chain observable"),
                    })
                })
                .collect();
            Ok(PointResult {
                values,
                branch: None,
                degenerate: sol.modes.zero_modes > 0,
            })
        }
        ModelSpec::Tls { .. } => {
            let r = tls_concurrence(&spec.model.tls_model(x).unwrap())?;
            let values = keys
                .iter()
                .map(|k| {
                    Some(match k.observable {
                        Observable::Energy => r.energy,
                        Observable::SigmaX => r.sigma_x,
                        Observable::Concurrence => r.concurrence,
                        _ => unreachable!("validated two-level-system observable"),
                    })
                })
                .collect();
            Ok(PointResult {
                values,
                branch: Some(r.branch),
                degenerate: false,
            })
        }
    }
}

fn evaluate_grid(
    spec: &ScanSpec,
    grid: &[f64],
    workers: usize,
) -> Result<Vec<Result<PointResult>>> {
    let keys = spec.column_keys();
    let eval = |&x: &f64| eval_point(spec, &keys, x);
    if workers <= 1 {
        return Ok(grid.iter().map(eval).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Input(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| grid.par_iter().map(eval).collect()))
}

/// Evaluates the spec on its grid with `workers` threads (1 = serial).
///
/// Per-point failures leave gaps in the columns and are listed in the
/// metadata; the scan itself only fails on an invalid spec.
pub fn run_scan(spec: &ScanSpec, workers: usize) -> Result<ScanSeries> {
    spec.validate()?;
    let keys = spec.column_keys();
    let points = evaluate_grid(spec, &spec.grid, workers)?;

    let mut columns: Vec<Column> = keys
        .iter()
        .map(|&key| Column {
            key,
            values: Vec::with_capacity(spec.grid.len()),
        })
        .collect();
    let (n_sites, kappa_rule) = match spec.model {
        ModelSpec::Chain { n_sites, kappa } => (Some(n_sites), Some(kappa)),
        ModelSpec::Tls { .. } => (None, None),
    };
    let mut metadata = ScanMetadata {
        n_sites,
        kappa_rule,
        branches: Vec::new(),
        degenerate: Vec::new(),
        errors: Vec::new(),
        seedless: true,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: None,
    };
    for (index, (point, &param)) in points.into_iter().zip(&spec.grid).enumerate() {
        match point {
            Ok(p) => {
                for (col, v) in columns.iter_mut().zip(p.values) {
                    col.values.push(v.filter(|x| x.is_finite()));
                }
                metadata.branches.push(p.branch);
                metadata.degenerate.push(p.degenerate);
            }
            Err(e) => {
                for col in &mut columns {
                    col.values.push(None);
                }
                metadata.branches.push(None);
                metadata.degenerate.push(false);
                metadata.errors.push(PointError {
                    index,
                    param,
                    message: e.to_string(),
                });
            }
        }
    }
    let mut series = ScanSeries {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        params: spec.grid.clone(),
        columns,
        metadata,
    };
    if spec.derivative {
        let half = if spec.richardson {
            let mids = midpoints(&spec.grid)?;
            let aux = ScanSpec {
                grid: mids,
                derivative: false,
                ..spec.clone()
            };
            Some(run_scan(&aux, workers)?)
        } else {
            None
        };
        let derived = derivative_series(&series, half.as_ref())?;
        series.columns.extend(derived.columns);
    }
    Ok(series)
}

fn midpoints(grid: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 3 {
        return Err(Error::Input(format!(
            "derivative needs at least 3 grid points, got {}",
            grid.len()
        )));
    }
    Ok(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
}

fn is_uniform(grid: &[f64]) -> bool {
    let h = grid[1] - grid[0];
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0))
}

/// Three-point derivative on an arbitrary increasing grid: central in the
/// interior, second-order one-sided at the ends.
pub fn finite_difference(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(Error::Input(format!(
            "derivative needs at least 3 matching points, got {} and {}",
            n,
            y.len()
        )));
    }
    // Lagrange weights for the derivative at x[at] through x[k..k+3].
    let three = |k: usize, at: usize| {
        let (x0, x1, x2) = (x[k], x[k + 1], x[k + 2]);
        let t = x[at];
        let w0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
        let w1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
        let w2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
        w0 * y[k] + w1 * y[k + 1] + w2 * y[k + 2]
    };
    Ok((0..n)
        .map(|i| match i {
            0 => three(0, 0),
            _ if i == n - 1 => three(n - 3, n - 1),
            _ => three(i - 1, i),
        })
        .collect())
}

/// Derivative columns for every non-derivative column of `series`.
///
/// With `half` (the same spec evaluated on the grid midpoints) each point
/// also gets the half-step estimate and the two are Richardson-combined,
/// (4 D(h/2) − D(h))/3; this needs a uniform grid.
pub fn derivative_series(series: &ScanSeries, half: Option<&ScanSeries>) -> Result<ScanSeries> {
    let x = &series.params;
    if x.len() < 3 {
        return Err(Error::Input(format!(
            "derivative needs at least 3 grid points, got {}",
            x.len()
        )));
    }
    if let Some(h) = half {
        if !is_uniform(x) {
            return Err(Error::Input(
                "Richardson refinement needs a uniform grid".into(),
            ));
        }
        if h.params.len() != x.len() - 1 {
            return Err(Error::Input(
                "auxiliary scan is not on the grid midpoints".into(),
            ));
        }
    }
    let mut columns = Vec::new();
    for col in series.columns.iter().filter(|c| !c.key.derivative) {
        let key = ColumnKey {
            derivative: true,
            ..col.key
        };
        let values = if col.values.iter().any(|v| v.is_none()) {
            vec![None; x.len()]
        } else {
            let y: Vec<f64> = col.values.iter().map(|v| v.unwrap()).collect();
            let coarse = finite_difference(x, &y)?;
            match half.and_then(|h| h.columns.iter().find(|c| c.key == col.key)) {
                Some(mid) if mid.values.iter().all(|v| v.is_some()) => {
                    let m: Vec<f64> = mid.values.iter().map(|v| v.unwrap()).collect();
                    let fine = half_step_derivative(x, &y, &m);
                    coarse
                        .iter()
                        .zip(&fine)
                        .map(|(c, f)| Some((4.0 * f - c) / 3.0))
                        .collect()
                }
                _ => coarse.into_iter().map(Some).collect(),
            }
        };
        columns.push(Column { key, values });
    }
    Ok(ScanSeries {
        columns,
        ..series.clone()
    })
}

/// Same stencils as [`finite_difference`] at half the spacing, using the
/// midpoint values `m[k]` at (x[k] + x[k+1])/2.
fn half_step_derivative(x: &[f64], y: &[f64], m: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => (-3.0 * y[0] + 4.0 * m[0] - y[1]) / h,
            _ if i == n - 1 => (3.0 * y[n - 1] - 4.0 * m[n - 2] + y[n - 2]) / h,
            _ => (m[i] - m[i - 1]) / h,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub raw_param: f64,
    pub raw_value: f64,
    pub param: f64,
    pub value: f64,
    /// Grid-level extremum sits on the first or last point; no refinement.
    pub at_boundary: bool,
}

/// Extremum of a sampled curve, refined by the parabola through the extremal
/// sample and its two neighbours.
pub fn extremum_of(x: &[f64], y: &[f64], kind: ExtremumKind) -> Result<Extremum> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Input(
            "extremum needs matching, non-empty samples".into(),
        ));
    }
    let better = |a: f64, b: f64| match kind {
        ExtremumKind::Min => a < b,
        ExtremumKind::Max => a > b,
    };
    let mut k = 0;
    for i in 1..y.len() {
        if better(y[i], y[k]) {
            k = i;
        }
    }
    let raw = Extremum {
        raw_param: x[k],
        raw_value: y[k],
        param: x[k],
        value: y[k],
        at_boundary: k == 0 || k == y.len() - 1,
    };
    if raw.at_boundary {
        return Ok(raw);
    }
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a == 0.0 {
        return Ok(raw);
    }
    let b = d01 - a * (x0 + x1);
    let xv = -b / (2.0 * a);
    if !(xv >= x0 && xv <= x2) {
        return Ok(raw);
    }
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    Ok(Extremum {
        param: xv,
        value: yv,
        ..raw
    })
}

pub fn find_extremum(series: &ScanSeries, label: &str, kind: ExtremumKind) -> Result<Extremum> {
    extremum_of(&series.params, &series.values(label)?, kind)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// `v` or `a:b:points`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Input(format!("cannot parse grid '{s}', expected v or a:b:points"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [v] => Ok(vec![v.parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let a: f64 = a.parse().map_err(|_| bad())?;
            let b: f64 = b.parse().map_err(|_| bad())?;
            let n: usize = n.parse().map_err(|_| bad())?;
            if n < 2 || b <= a {
                return Err(Error::Input(format!(
                    "grid '{s}' needs b > a and at least 2 points"
                )));
            }
            Ok(linspace(a, b, n))
        }
        _ => Err(bad()),
    }
}

/// Default λ grid: 121 points on [0, 2.4].
pub fn default_lambda_grid() -> Vec<f64> {
    linspace(0.0, 2.4, 121)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(x: Vec<f64>, y: Vec<f64>) -> ScanSeries {
        let spec = ScanSpec::tls(1e-3, 1.0, x.clone());
        ScanSeries {
            schema_version: SCHEMA_VERSION,
            params: x,
            columns: vec![Column {
                key: ColumnKey {
                    observable: Observable::Concurrence,
                    pair: None,
                    derivative: false,
                },
                values: y.into_iter().map(Some).collect(),
            }],
            metadata: ScanMetadata {
                n_sites: None,
                kappa_rule: None,
                branches: Vec::new(),
                degenerate: Vec::new(),
                errors: Vec::new(),
                seedless: true,
                code_version: String::new(),
                timestamp: None,
            },
            spec,
        }
    }

    #[test]
    fn kappa_rules() {
        assert_eq!(
            "0.5".parse::<KappaRule>().unwrap(),
            KappaRule::Absolute(0.5)
        );
        assert_eq!(
            "20x".parse::<KappaRule>().unwrap(),
            KappaRule::TimesLambda(20.0)
        );
        assert_eq!(
            "1.5xLAMBDA".parse::<KappaRule>().unwrap(),
            KappaRule::TimesLambda(1.5)
        );
        assert!("x".parse::<KappaRule>().is_err());
        assert!("nan".parse::<KappaRule>().is_err());
        assert_eq!(KappaRule::TimesLambda(2.0).resolve(0.7), 1.4);
        let r = KappaRule::TimesLambda(1.5);
        assert_eq!(r.to_string().parse::<KappaRule>().unwrap(), r);
    }

    #[test]
    fn grids() {
        let g = parse_grid("0:2.4:121").unwrap();
        assert_eq!(g.len(), 121);
        assert_eq!(g[120], 2.4);
        assert!((g[50] - 1.0).abs() < 1e-15);
        assert_eq!(parse_grid("0.3").unwrap(), vec![0.3]);
        assert!(parse_grid("1:0:5").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:1").is_err());
    }

    #[test]
    fn column_labels_round_trip() {
        for label in ["c@1-2", "d_c_star@50-51", "concurrence", "d_sigma_x"] {
            assert_eq!(ColumnKey::parse(label).unwrap().label(), label);
        }
        assert!(ColumnKey::parse("c@1").is_err());
        assert!(ColumnKey::parse("bogus").is_err());
    }

    #[test]
    fn constant_derivative_is_zero() {
        let x = linspace(0.0, 1.0, 11);
        let s = synthetic(x, vec![3.0; 11]);
        let d = derivative_series(&s, None).unwrap();
        assert!(d.columns[0].values.iter().all(|v| v.unwrap().abs() < 1e-12));
    }

    #[test]
    fn quadratic_derivative_is_exact() {
        let x = linspace(0.0, 2.0, 21);
        let y: Vec<f64> = x.iter().map(|t| t * t).collect();
        let d = finite_difference(&x, &y).unwrap();
        for (t, v) in x.iter().zip(&d) {
            assert!((v - 2.0 * t).abs() < 1e-12);
        }
        let xs = vec![0.0, 0.1, 0.35, 0.4, 0.9];
        let ys: Vec<f64> = xs.iter().map(|t| t * t).collect();
        for (t, v) in xs.iter().zip(finite_difference(&xs, &ys).unwrap()) {
            assert!((v - 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn richardson_improves_cubic() {
        let x = linspace(0.0, 1.0, 11);
        let f = |t: f64| t.sin() * 3.0;
        let coarse = synthetic(x.clone(), x.iter().map(|&t| f(t)).collect());
        let mids: Vec<f64> = x.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let half = synthetic(mids.clone(), mids.iter().map(|&t| f(t)).collect());
        let plain = derivative_series(&coarse, None).unwrap();
        let refined = derivative_series(&coarse, Some(&half)).unwrap();
        let err = |s: &ScanSeries| {
            x.iter()
                .zip(&s.columns[0].values)
                .map(|(t, v)| (v.unwrap() - 3.0 * t.cos()).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(&refined) < err(&plain) / 10.0);
    }

    #[test]
    fn too_few_points() {
        let s = synthetic(vec![0.0, 1.0], vec![0.0, 1.0]);
        assert!(derivative_series(&s, None).is_err());
    }

    #[test]
    fn parabola_extremum() {
        let x = linspace(0.0, 2.4, 25);
        let y: Vec<f64> = x.iter().map(|t| (t - 1.1) * (t - 1.1)).collect();
        let e = extremum_of(&x, &y, ExtremumKind::Min).unwrap();
        assert!(!e.at_boundary);
        assert!((e.param - 1.1).abs() < 1e-6);
        assert!(e.value.abs() < 1e-12);
        let e = extremum_of(&x, &y, ExtremumKind::Max).unwrap();
        assert!(e.at_boundary);
        assert_eq!(e.param, 2.4);
    }

    #[test]
    fn spec_validation() {
        let g = linspace(0.0, 1.0, 5);
        assert!(
            ScanSpec::chain(10, KappaRule::Absolute(0.0), g.clone(), vec![(1, 2)])
                .validate()
                .is_ok()
        );
        assert!(
            ScanSpec::chain(10, KappaRule::Absolute(0.0), g.clone(), vec![(2, 2)])
                .validate()
                .is_err()
        );
        assert!(
            ScanSpec::chain(10, KappaRule::Absolute(0.0), g.clone(), vec![(1, 11)])
                .validate()
                .is_err()
        );
        assert!(
            ScanSpec::chain(10, KappaRule::Absolute(0.0), vec![0.5, 0.2], vec![])
                .validate()
                .is_err()
        );
        assert!(
            ScanSpec::chain(10, KappaRule::Absolute(0.0), g.clone(), vec![])
                .with_outputs(&[Observable::Energy])
                .validate()
                .is_err()
        );
        assert!(ScanSpec::tls(1e-3, 1.0, g.clone())
            .with_outputs(&[Observable::C])
            .validate()
            .is_err());
        assert!(ScanSpec::tls(2.0, 1.0, g).validate().is_err());
    }

    #[test]
    fn chain_scan_shape() {
        let spec = ScanSpec::chain(
            8,
            KappaRule::Absolute(0.0),
            linspace(0.0, 2.0, 5),
            vec![(1, 2), (2, 4)],
        )
        .with_outputs(&[Observable::C, Observable::Zz])
        .with_derivative(true);
        let s = run_scan(&spec, 1).unwrap();
        let labels: Vec<String> = s.columns.iter().map(|c| c.key.label()).collect();
        assert_eq!(
            labels,
            ["c@1-2", "c@2-4", "zz@1-2", "zz@2-4", "d_c@1-2", "d_c@2-4", "d_zz@1-2", "d_zz@2-4"]
        );
        assert!(s.columns.iter().all(|c| c.values.len() == 5));
        assert_eq!(s.values("c@1-2").unwrap()[0], 0.0);
        assert!(s.metadata.errors.is_empty());
    }

    #[test]
    fn parallel_matches_serial() {
        let spec = ScanSpec::chain(
            12,
            KappaRule::TimesLambda(1.5),
            linspace(0.0, 2.0, 9),
            vec![(1, 3)],
        )
        .with_outputs(&Observable::CHAIN)
        .with_derivative(true);
        assert_eq!(run_scan(&spec, 1).unwrap(), run_scan(&spec, 3).unwrap());
    }

    #[test]
    fn tls_scan_records_branches() {
        let spec =
            ScanSpec::tls(1e-3, 1.0, vec![0.0, 0.5, 0.75, 1.0, 1.5]).with_outputs(&Observable::TLS);
        let s = run_scan(&spec, 1).unwrap();
        assert_eq!(
            s.metadata.branches,
            [
                Some(Branch::Coherent),
                Some(Branch::Crossover),
                Some(Branch::Incoherent),
                Some(Branch::Localized),
                Some(Branch::Localized)
            ]
        );
        let c = s.values("concurrence").unwrap();
        assert!(c.windows(2).all(|w| w[1] <= w[0]));
    }
}
