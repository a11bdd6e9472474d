//! Outer block coordinate ascent and the fixed-position baseline.
//!
//! One outer iteration updates, in order: the beamformer (QCQP), the antenna
//! positions (element-wise search, skipped for the baseline), the activation
//! weights, and the auxiliary variables. Each block maximizes the surrogate
//! exactly or keeps the incumbent, so the surrogate never decreases.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::fp::{self, AuxState};
use crate::placement::{algorithm1_sweep, GridSpec, GridTables, PlacementConfig, PlacementContext, PlacementState};
use crate::qcqp;
use crate::rates::{rate_breakdown, Beamformer, RateBreakdown};
use crate::scenario::{AntennaLayout, Scenario};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_outer_iters: usize,
    pub rel_tol: f64,
    pub placement: PlacementConfig,
    /// `false` runs the fixed-position (FPA) baseline.
    pub optimize_positions: bool,
    /// How the movable-antenna solve is started (ignored for the baseline).
    pub start: StartMode,
}

/// Starting strategy of the movable-antenna solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartMode {
    /// MRT beamformer on the baseline array, positions optimized from the
    /// first iteration.
    Cold,
    /// Iterate with positions fixed until converged (the baseline solve),
    /// then enable position updates.
    Warm,
    /// Run both and keep the better final sum secrecy rate. The warm branch
    /// contains the baseline's solution, so the result never falls below it.
    Best,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 100,
            rel_tol: 1e-4,
            placement: PlacementConfig::default(),
            optimize_positions: true,
            start: StartMode::Best,
        }
    }
}

impl SolverConfig {
    pub fn fpa() -> Self {
        Self { optimize_positions: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters == 0 {
            return Err(Error::Config("max_outer_iters must be at least 1".into()));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::Config("rel_tol must be positive".into()));
        }
        if self.placement.max_sweeps == 0 || self.placement.rel_tol.is_nan() || self.placement.rel_tol <= 0.0 {
            return Err(Error::Config("placement needs max_sweeps ≥ 1 and rel_tol > 0".into()));
        }
        Ok(())
    }
}

/// Which block produced a surrogate value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    Init,
    Beamformer,
    Positions,
    Activation,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Sum secrecy rate (bits) at the end of each outer iteration.
    pub objective_trajectory: Vec<f64>,
    /// Surrogate value (nats) at the end of each outer iteration.
    pub surrogate_trajectory: Vec<f64>,
    /// Surrogate value after every block update, starting from the initial point.
    pub block_trace: Vec<(Block, f64)>,
    pub initial_objective: f64,
    pub initial_surrogate: f64,
    /// Rates of the best iterate (by sum secrecy rate).
    pub final_rates: RateBreakdown,
    pub final_layout: AntennaLayout,
    pub final_beamformer: Beamformer,
    /// Outer iteration of the best iterate; 0 is the initial point.
    pub best_iteration: usize,
    /// Iterations spent with positions fixed before placement was enabled.
    pub warm_start_iterations: usize,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn sum_rate(&self) -> f64 {
        self.final_rates.sum_secrecy_rate
    }
}

/// Centered uniform linear array along x with half-wavelength spacing.
pub fn fpa_layout(scenario: &Scenario) -> Result<AntennaLayout> {
    let m = scenario.num_antennas;
    let lambda = scenario.wavelength;
    let span = (m as f64 - 1.0) * lambda / 2.0;
    if span > scenario.region_side + 1e-12 {
        return Err(Error::Config(format!(
            "a {m}-element half-wavelength array spans {span}, wider than the region side {}",
            scenario.region_side
        )));
    }
    let layout =
        AntennaLayout::new((0..m).map(|i| [i as f64 * lambda / 2.0 - (m as f64 - 1.0) * lambda / 4.0, 0.0]).collect());
    layout
        .validate(scenario.region_side, scenario.min_spacing)
        .map_err(|e| Error::Config(format!("baseline array is infeasible: {e}")))?;
    Ok(layout)
}

/// Maximal-ratio transmission with an equal power split over users whose
/// channel is non-zero.
pub fn mrt_init(scenario: &Scenario, layout: &AntennaLayout) -> Beamformer {
    let channels = ChannelSet::new(scenario, layout);
    mrt_from_channels(scenario, &channels)
}

fn mrt_from_channels(scenario: &Scenario, channels: &ChannelSet) -> Beamformer {
    let norms: Vec<f64> = channels.users.iter().map(|h| h.norm_sqr().sqrt()).collect();
    let active = norms.iter().filter(|&&n| n > 0.0).count();
    let mut w = Beamformer::zeros(scenario.num_antennas, scenario.num_users);
    if active == 0 {
        return w;
    }
    let amp = (scenario.power_budget / active as f64).sqrt();
    for (k, (h, &n)) in channels.users.iter().zip(&norms).enumerate() {
        if n > 0.0 {
            w.columns[k] = h.as_slice().iter().map(|z| z * C64::from(amp / n)).collect();
        }
    }
    w
}

/// Runs the joint beamforming / placement ascent (or the fixed-position
/// baseline when `config.optimize_positions` is false).
pub fn bcd_solve(scenario: &Scenario, config: &SolverConfig) -> Result<SolveReport> {
    scenario.validate()?;
    config.validate()?;
    if !config.optimize_positions {
        return solve_from(scenario, config, false);
    }
    match config.start {
        StartMode::Cold => solve_from(scenario, config, false),
        StartMode::Warm => solve_from(scenario, config, true),
        StartMode::Best => {
            let cold = solve_from(scenario, config, false)?;
            let mut warm = solve_from(scenario, config, true)?;
            let mut best = if cold.sum_rate() > warm.sum_rate() { cold.clone() } else { warm.clone() };
            warm.wall_time += cold.wall_time;
            best.wall_time = warm.wall_time;
            Ok(best)
        }
    }
}

fn solve_from(scenario: &Scenario, config: &SolverConfig, warm_start: bool) -> Result<SolveReport> {
    let start = Instant::now();
    let g = fp::leakage_bound_g(scenario);
    let layout = fpa_layout(scenario)?;

    let tables = if config.optimize_positions {
        let grid = GridSpec::new(config.placement.grid_points, scenario.region_side)?;
        Some(GridTables::new(scenario, grid))
    } else {
        None
    };

    let mut w = mrt_init(scenario, &layout);
    let mut state = PlacementState::new(scenario, layout, &w);
    let mut aux = fp::optimal_aux(&w, &state.channels, scenario, g, vec![true; scenario.num_users])?;

    let surrogate =
        |w: &Beamformer, st: &PlacementState, aux: &AuxState| fp::surrogate_terms(w, &st.channels, aux, scenario, g);

    let init_terms = surrogate(&w, &state, &aux)?;
    let init_rates = rate_breakdown(&w, &state.channels, scenario);
    let mut report = SolveReport {
        objective_trajectory: Vec::new(),
        surrogate_trajectory: Vec::new(),
        block_trace: vec![(Block::Init, init_terms.objective)],
        initial_objective: init_rates.sum_secrecy_rate,
        initial_surrogate: init_terms.objective,
        final_rates: init_rates,
        final_layout: state.layout.clone(),
        final_beamformer: w.clone(),
        best_iteration: 0,
        warm_start_iterations: 0,
        iterations: 0,
        converged: false,
        wall_time: 0.0,
    };

    let mut prev = init_terms;
    let mut moving = config.optimize_positions && !warm_start;
    for iter in 1..=config.max_outer_iters {
        // beamformer
        let forms = qcqp::assemble_forms(&state.channels, &aux, g, scenario);
        w = qcqp::update_beamformer(&forms, scenario.power_budget)?.beamformer;
        let after_w = surrogate(&w, &state, &aux)?;
        report.block_trace.push((Block::Beamformer, after_w.objective));

        // positions
        if let (true, Some(tables)) = (moving, &tables) {
            state = PlacementState::new(scenario, state.layout, &w);
            let ctx = PlacementContext { scenario, w: &w, aux: &aux, g, tables };
            algorithm1_sweep(&mut state, &ctx, &config.placement, after_w.rate_equivalent());
            let after_t = surrogate(&w, &state, &aux)?;
            report.block_trace.push((Block::Positions, after_t.objective));
        }

        // activation weights, evaluated with the current auxiliaries
        let terms = surrogate(&w, &state, &aux)?;
        aux.b = fp::update_b(&terms.g1, &terms.f2);
        let after_b = surrogate(&w, &state, &aux)?;
        report.block_trace.push((Block::Activation, after_b.objective));

        // auxiliaries
        aux = fp::optimal_aux(&w, &state.channels, scenario, g, aux.b.clone())?;
        let after_aux = surrogate(&w, &state, &aux)?;
        report.block_trace.push((Block::Auxiliary, after_aux.objective));

        let rates = rate_breakdown(&w, &state.channels, scenario);
        report.objective_trajectory.push(rates.sum_secrecy_rate);
        report.surrogate_trajectory.push(after_aux.objective);
        report.iterations = iter;
        if rates.sum_secrecy_rate > report.final_rates.sum_secrecy_rate {
            report.final_rates = rates;
            report.final_layout = state.layout.clone();
            report.final_beamformer = w.clone();
            report.best_iteration = iter;
        }

        let increase = after_aux.objective - prev.objective;
        let rel = increase / prev.objective.abs().max(1e-12);
        prev = after_aux;
        if rel < config.rel_tol {
            if tables.is_some() && !moving {
                moving = true;
                report.warm_start_iterations = iter;
                continue;
            }
            report.converged = true;
            break;
        }
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}
