//! Monte Carlo sweeps comparing the movable-antenna design with the
//! fixed-position baseline, and their CSV output.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bcd::{bcd_solve, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::scenario::{draw_scenario, Dims, Scenario};
use crate::seed;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MA_SECRECY_THREADS";

pub const CSV_HEADER: &str = "method,param,value,draw,rate_bits,iterations,wall_time_s";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Movable antennas: positions are optimized.
    Ma,
    /// Fixed-position half-wavelength array.
    Fpa,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ma => "MA",
            Method::Fpa => "FPA",
        }
    }

    pub fn config(self, base: &SolverConfig) -> SolverConfig {
        SolverConfig { optimize_positions: self == Method::Ma, ..*base }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ma" => Ok(Method::Ma),
            "fpa" => Ok(Method::Fpa),
            other => Err(Error::Argument(format!("unknown method `{other}` (expected ma or fpa)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweptParam {
    SnrDb,
    Antennas,
    Users,
    Eves,
    RegionSide,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::SnrDb => "snr_db",
            SweptParam::Antennas => "M",
            SweptParam::Users => "K",
            SweptParam::Eves => "J",
            SweptParam::RegionSide => "A",
        }
    }
}

impl FromStr for SweptParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "snr_db" | "snr" => Ok(SweptParam::SnrDb),
            "M" | "m" | "antennas" => Ok(SweptParam::Antennas),
            "K" | "k" | "users" => Ok(SweptParam::Users),
            "J" | "j" | "eves" => Ok(SweptParam::Eves),
            "A" | "a" | "region_side" => Ok(SweptParam::RegionSide),
            other => Err(Error::Argument(format!("unknown sweep parameter `{other}` (expected snr_db, M, K, J or A)"))),
        }
    }
}

/// The scenario settings that are not swept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseScenario {
    pub dims: Dims,
    pub snr_db: f64,
    pub region_side: f64,
}

impl Default for BaseScenario {
    fn default() -> Self {
        Self { dims: Dims { users: 6, eves: 4, antennas: 6 }, snr_db: 10.0, region_side: 3.0 }
    }
}

impl BaseScenario {
    pub fn with(&self, param: SweptParam, value: f64) -> Result<Self> {
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e6 {
                Ok(v as usize)
            } else {
                Err(Error::Argument(format!("{} must be a non-negative integer, got {v}", param.name())))
            }
        };
        let mut out = *self;
        match param {
            SweptParam::SnrDb => out.snr_db = value,
            SweptParam::Antennas => out.dims.antennas = count(value)?,
            SweptParam::Users => out.dims.users = count(value)?,
            SweptParam::Eves => out.dims.eves = count(value)?,
            SweptParam::RegionSide => out.region_side = value,
        }
        Ok(out)
    }

    pub fn draw(&self, seed: u64) -> Result<Scenario> {
        draw_scenario(self.dims, self.snr_db, self.region_side, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweptParam,
    pub values: Vec<f64>,
    pub base: BaseScenario,
    pub num_draws: usize,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    pub solver: SolverConfig,
    /// Write measured wall time; otherwise the column is 0 so output is
    /// byte-reproducible.
    pub record_time: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Argument("sweep needs at least one value".into()));
        }
        if self.num_draws == 0 {
            return Err(Error::Argument("sweep needs at least one draw".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Argument("sweep needs at least one method".into()));
        }
        self.solver.validate()
    }
}

/// Seed of draw `draw` at sweep value `value_index`. Independent of the
/// enabled methods and of evaluation order.
pub fn draw_seed(master: u64, value_index: usize, draw: usize) -> u64 {
    seed::mix(master, &[value_index as u64, draw as u64])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: Method,
    pub value: f64,
    pub draw: usize,
    pub rate_bits: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param: SweptParam,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Mean rate of `method` at sweep value `value`, skipping error rows.
    pub fn mean_rate(&self, method: Method, value: f64) -> Option<f64> {
        let rates: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.value == value && r.error.is_none())
            .map(|r| r.rate_bits)
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.method.name(),
                self.param.name(),
                fmt_g12(r.value),
                r.draw,
                fmt_g12(r.rate_bits),
                r.iterations,
                fmt_g12(r.wall_time_s)
            );
        }
        out
    }
}

fn solve_row(method: Method, scenario: &Result<Scenario>, spec: &SweepSpec) -> (Result<SolveReport>, Method) {
    let report = match scenario {
        Ok(s) => bcd_solve(s, &method.config(&spec.solver)),
        Err(e) => Err(Error::Argument(e.to_string())),
    };
    (report, method)
}

/// Runs every (value, draw) pair, solving the same scenario with each method.
/// Failed solves become rows with `error` set; the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> =
        (0..spec.values.len()).flat_map(|v| (0..spec.num_draws).map(move |d| (v, d))).collect();
    let rows: Vec<Vec<SweepRow>> = jobs
        .par_iter()
        .map(|&(vi, draw)| {
            let value = spec.values[vi];
            let scenario =
                spec.base.with(spec.param, value).and_then(|b| b.draw(draw_seed(spec.master_seed, vi, draw)));
            spec.methods
                .iter()
                .map(|&m| {
                    let (report, method) = solve_row(m, &scenario, spec);
                    match report {
                        Ok(r) => SweepRow {
                            method,
                            value,
                            draw,
                            rate_bits: r.sum_rate(),
                            iterations: r.iterations,
                            wall_time_s: if spec.record_time { r.wall_time } else { 0.0 },
                            error: None,
                        },
                        Err(e) => SweepRow {
                            method,
                            value,
                            draw,
                            rate_bits: f64::NAN,
                            iterations: 0,
                            wall_time_s: 0.0,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        })
        .collect();
    Ok(SweepResult { param: spec.param, rows: rows.into_iter().flatten().collect() })
}

/// Per-iteration trajectory of one solve, for convergence plots.
pub fn convergence_csv(traces: &[(Method, SolveReport)]) -> String {
    let mut out = String::from("method,iteration,rate_bits,surrogate_nats\n");
    for (method, r) in traces {
        let _ = writeln!(out, "{},0,{},{}", method.name(), fmt_g12(r.initial_objective), fmt_g12(r.initial_surrogate));
        for (i, (rate, f)) in r.objective_trajectory.iter().zip(&r.surrogate_trajectory).enumerate() {
            let _ = writeln!(out, "{},{},{},{}", method.name(), i + 1, fmt_g12(*rate), fmt_g12(*f));
        }
    }
    out
}

/// Formats like C's `%.12g`.
pub fn fmt_g12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    const PREC: i32 = 12;
    let sci = format!("{:.*e}", (PREC - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..PREC).contains(&exp) {
        let m = strip_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (PREC - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Caps the global rayon pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize =
            v.parse().map_err(|_| Error::Argument(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Argument(format!("{THREADS_ENV} must be positive")));
        }
        // a second call fails harmlessly once the pool exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
