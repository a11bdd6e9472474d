//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bcd::{bcd_solve, SolverConfig};
use crate::error::{Error, Result};
use crate::harness::{self, BaseScenario, Method, SweepSpec, SweptParam};
use crate::placement::PlacementConfig;
use crate::scenario::{Dims, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ma-secrecy", version, about = "Sum secrecy rate optimization with movable antennas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and write the report as JSON.
    Solve(SolveArgs),
    /// Monte Carlo sweep over one scenario parameter, written as CSV.
    Sweep(SweepArgs),
    /// Per-iteration rate trajectory of the MA and FPA solvers.
    Convergence(ConvergenceArgs),
    /// Run quick numerical invariant checks.
    Selftest,
}

#[derive(Args, Debug, Clone)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 6)]
    users: usize,
    #[arg(long, default_value_t = 4)]
    eves: usize,
    #[arg(long, default_value_t = 6)]
    antennas: usize,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Side length of the square movement region, in wavelengths.
    #[arg(long, default_value_t = 3.0)]
    region: f64,
}

impl ScenarioArgs {
    fn base(&self) -> BaseScenario {
        BaseScenario {
            dims: Dims { users: self.users, eves: self.eves, antennas: self.antennas },
            snr_db: self.snr_db,
            region_side: self.region,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Grid points per coordinate in the placement search.
    #[arg(long, default_value_t = 1000)]
    grid_points: usize,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            max_outer_iters: self.max_iters,
            rel_tol: self.tol,
            placement: PlacementConfig { grid_points: self.grid_points, ..PlacementConfig::default() },
            ..SolverConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Scenario JSON; drawn from `--seed` and the dimension flags if omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solve the fixed-position baseline instead.
    #[arg(long)]
    fpa: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the drawn scenario here.
    #[arg(long)]
    save_scenario: Option<PathBuf>,
    #[arg(long)]
    record_time: bool,
    #[command(flatten)]
    scenario_args: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// One of snr_db, M, K, J, A.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "ma,fpa")]
    methods: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    record_time: bool,
    #[command(flatten)]
    scenario_args: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    users: usize,
    #[arg(long, default_value_t = 6)]
    eves: usize,
    #[arg(long, default_value_t = 6)]
    antennas: usize,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 3.0)]
    region: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = harness::configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Convergence(a) => convergence(a),
        Command::Selftest => selftest(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Argument(_) | Error::Parse(_) | Error::Validation(_) | Error::Config(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<i32> {
    let scenario = match &a.scenario {
        Some(path) => Scenario::from_json(&fs::read_to_string(path)?)?,
        None => a.scenario_args.base().draw(a.seed)?,
    };
    if let Some(path) = &a.save_scenario {
        fs::write(path, scenario.to_json()?)?;
    }
    let method = if a.fpa { Method::Fpa } else { Method::Ma };
    let mut report = bcd_solve(&scenario, &method.config(&a.solver.config()))?;
    if !a.record_time {
        report.wall_time = 0.0;
    }
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(a.out.as_ref(), &json)?;
    eprintln!(
        "{}: sum secrecy rate {} bits after {} iterations{}",
        method.name(),
        harness::fmt_g12(report.sum_rate()),
        report.iterations,
        if report.converged { "" } else { " (not converged)" }
    );
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs) -> Result<i32> {
    let param: SweptParam = a.param.parse()?;
    let methods = a.methods.iter().map(|m| m.parse()).collect::<Result<Vec<Method>>>()?;
    let spec = SweepSpec {
        param,
        values: a.values,
        base: a.scenario_args.base(),
        num_draws: a.draws,
        master_seed: a.seed,
        methods,
        solver: a.solver.config(),
        record_time: a.record_time,
    };
    let result = harness::run_sweep(&spec)?;
    emit(a.out.as_ref(), &result.to_csv())?;
    for v in &spec.values {
        for &m in &spec.methods {
            if let Some(mean) = result.mean_rate(m, *v) {
                eprintln!(
                    "{}={} {}: mean {} bits",
                    param.name(),
                    harness::fmt_g12(*v),
                    m.name(),
                    harness::fmt_g12(mean)
                );
            }
        }
    }
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("error: {failed} solve(s) failed");
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn convergence(a: ConvergenceArgs) -> Result<i32> {
    let base = BaseScenario {
        dims: Dims { users: a.users, eves: a.eves, antennas: a.antennas },
        snr_db: a.snr_db,
        region_side: a.region,
    };
    let scenario = base.draw(a.seed)?;
    let cfg = a.solver.config();
    let mut traces = Vec::new();
    for m in [Method::Ma, Method::Fpa] {
        traces.push((m, bcd_solve(&scenario, &m.config(&cfg))?));
    }
    emit(a.out.as_ref(), &harness::convergence_csv(&traces))?;
    Ok(EXIT_OK)
}

fn selftest() -> Result<i32> {
    let checks = crate::selftest::run();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_FAILURE })
}
