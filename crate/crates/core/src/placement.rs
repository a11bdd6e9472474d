//! Antenna placement by element-wise grid search.
//!
//! With the beamformer, activation weights and auxiliary variables fixed,
//! each coordinate `t_m^x` / `t_m^y` is updated in turn by maximizing the
//! position-dependent part of the surrogate over a uniform grid of the
//! region side. Sums over the other antennas (`A_{i,k}^m`, `B_{k,j}^m`) are
//! kept incrementally so a candidate costs `O(K(K+J) + paths)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::channel::{field_response, ChannelSet};
use crate::error::{Error, Result};
use crate::fp::AuxState;
use crate::rates::Beamformer;
use crate::scenario::{AntennaLayout, ReceiverChannel, Scenario, LAYOUT_TOL};
use crate::C64;

/// Uniform grid `{−A/2, −A/2 + A/(Q−1), …, A/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub num_points: usize,
    pub region_side: f64,
}

impl GridSpec {
    pub fn new(num_points: usize, region_side: f64) -> Result<Self> {
        if num_points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {num_points}")));
        }
        if !(region_side > 0.0 && region_side.is_finite()) {
            return Err(Error::Config("grid region side must be positive".into()));
        }
        Ok(Self { num_points, region_side })
    }

    pub fn point(&self, i: usize) -> f64 {
        let half = self.region_side / 2.0;
        if i + 1 == self.num_points {
            half
        } else {
            -half + i as f64 * self.region_side / (self.num_points - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.num_points).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// Settings of the element-wise search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementConfig {
    pub grid_points: usize,
    pub max_sweeps: usize,
    pub rel_tol: f64,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self { grid_points: 1000, max_sweeps: 20, rel_tol: 1e-4 }
    }
}

fn spaced(a: [f64; 2], b: [f64; 2], min_spacing: f64) -> bool {
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let floor = (min_spacing - LAYOUT_TOL).max(0.0);
    d2 >= floor * floor
}

fn candidate_ok(m: usize, axis: Axis, value: f64, layout: &AntennaLayout, min_spacing: f64) -> bool {
    let mut t = layout.positions[m];
    t[axis.index()] = value;
    layout.positions.iter().enumerate().all(|(i, &other)| i == m || spaced(t, other, min_spacing))
}

/// Grid values that keep antenna `m` at least `min_spacing` from every other
/// antenna, followed by the incumbent coordinate.
pub fn feasible_set(m: usize, axis: Axis, layout: &AntennaLayout, grid: &GridSpec, min_spacing: f64) -> Vec<f64> {
    let mut out: Vec<f64> =
        grid.points().into_iter().filter(|&v| candidate_ok(m, axis, v, layout, min_spacing)).collect();
    out.push(layout.positions[m][axis.index()]);
    out
}

/// Other-antenna partial sums for antenna `m`:
/// `A_{i,k} = Σ_{m'≠m} [w_iᴴ]_{m'} h_k(t_{m'})` (row-major `i * K + k`) and
/// `B_{k,j} = Σ_{m'≠m} [w_kᴴ]_{m'} g_j(t_{m'})` (row-major `k * J + j`).
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSums {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub num_users: usize,
    pub num_eves: usize,
}

impl PartialSums {
    /// Direct evaluation, summing over every antenna except `m`.
    pub fn from_scratch(m: usize, w: &Beamformer, channels: &ChannelSet) -> Self {
        let k_users = w.num_users();
        let j_eves = channels.eves.len();
        let n = w.num_antennas();
        let mut a = vec![C64::new(0.0, 0.0); k_users * k_users];
        let mut b = vec![C64::new(0.0, 0.0); k_users * j_eves];
        for mp in (0..n).filter(|&mp| mp != m) {
            for i in 0..k_users {
                let wc = w.columns[i][mp].conj();
                for k in 0..k_users {
                    a[i * k_users + k] += wc * channels.users[k][mp];
                }
                for j in 0..j_eves {
                    b[i * j_eves + j] += wc * channels.eves[j][mp];
                }
            }
        }
        Self { a, b, num_users: k_users, num_eves: j_eves }
    }
}

/// Full sums `w_iᴴ h_k` and `w_kᴴ g_j`, maintained across antenna moves.
#[derive(Clone, Debug, PartialEq)]
struct FullSums {
    user: Vec<C64>,
    eve: Vec<C64>,
}

impl FullSums {
    fn new(w: &Beamformer, channels: &ChannelSet) -> Self {
        let k_users = w.num_users();
        let j_eves = channels.eves.len();
        let mut user = Vec::with_capacity(k_users * k_users);
        let mut eve = Vec::with_capacity(k_users * j_eves);
        for col in &w.columns {
            for h in &channels.users {
                user.push(h.inner(col).conj());
            }
            for g in &channels.eves {
                eve.push(g.inner(col).conj());
            }
        }
        Self { user, eve }
    }

    fn excluding(&self, m: usize, w: &Beamformer, channels: &ChannelSet) -> PartialSums {
        let k_users = w.num_users();
        let j_eves = channels.eves.len();
        let mut a = self.user.clone();
        let mut b = self.eve.clone();
        for i in 0..k_users {
            let wc = w.columns[i][m].conj();
            for k in 0..k_users {
                a[i * k_users + k] -= wc * channels.users[k][m];
            }
            for j in 0..j_eves {
                b[i * j_eves + j] -= wc * channels.eves[j][m];
            }
        }
        PartialSums { a, b, num_users: k_users, num_eves: j_eves }
    }
}

/// Candidate-independent coefficients of the coordinate objective.
struct Weights {
    /// `b_k (1 + α_k)`
    user: Vec<f64>,
    eta: Vec<C64>,
    /// `b_k (1 + β_k) / (1 + g)`
    eve: Vec<f64>,
    inv_eve_noise: Vec<f64>,
}

impl Weights {
    fn new(aux: &AuxState, g: f64, scenario: &Scenario) -> Self {
        let k_users = aux.b.len();
        Self {
            user: (0..k_users).map(|k| aux.weight(k) * (1.0 + aux.alpha[k])).collect(),
            eta: aux.eta.clone(),
            eve: (0..k_users).map(|k| aux.weight(k) * (1.0 + aux.beta[k]) / (1.0 + g)).collect(),
            inv_eve_noise: scenario.eve_channels.iter().map(|c| 1.0 / c.noise_power).collect(),
        }
    }
}

/// Position-dependent part of the surrogate when antenna `m` responds with
/// `h_resp[k]` / `g_resp[j]` and the other antennas are summarized by `partial`.
fn objective_from_responses(
    wconj: &[C64],
    partial: &PartialSums,
    weights: &Weights,
    h_resp: &[C64],
    g_resp: &[C64],
) -> f64 {
    let k_users = partial.num_users;
    let j_eves = partial.num_eves;
    let mut total = 0.0;
    for k in 0..k_users {
        let cu = weights.user[k];
        if cu != 0.0 {
            let eta = weights.eta[k];
            let hk = h_resp[k];
            let own = partial.a[k * k_users + k] + wconj[k] * hk;
            let mut rx = 0.0;
            for i in 0..k_users {
                rx += (partial.a[i * k_users + k] + wconj[i] * hk).norm_sqr();
            }
            total += cu * (2.0 * (eta * own).re - eta.norm_sqr() * rx);
        }
        let ce = weights.eve[k];
        if ce != 0.0 {
            let mut leak = 0.0;
            for j in 0..j_eves {
                leak += (partial.b[k * j_eves + j] + wconj[k] * g_resp[j]).norm_sqr() * weights.inv_eve_noise[j];
            }
            total -= ce * leak;
        }
    }
    total
}

/// Evaluates the coordinate objective for one candidate value directly from
/// the field-response model:
///
/// `Σ_k b_k [(1+α_k)(2ℜ{η_k w_kᴴh_k} − |η_k|² Σ_i |w_iᴴh_k|²) − (1+β_k)/(1+g) γ̂_k]`
///
/// with antenna `m`'s `axis` coordinate set to `candidate`.
#[allow(clippy::too_many_arguments)]
pub fn coordinate_objective(
    m: usize,
    axis: Axis,
    candidate: f64,
    layout: &AntennaLayout,
    partial: &PartialSums,
    aux: &AuxState,
    w: &Beamformer,
    scenario: &Scenario,
    g: f64,
) -> f64 {
    let mut t = layout.positions[m];
    t[axis.index()] = candidate;
    let lambda = scenario.wavelength;
    let h: Vec<C64> = scenario.user_channels.iter().map(|rc| field_response(rc, t, lambda)).collect();
    let ge: Vec<C64> = scenario.eve_channels.iter().map(|rc| field_response(rc, t, lambda)).collect();
    let wconj: Vec<C64> = w.columns.iter().map(|c| c[m].conj()).collect();
    objective_from_responses(&wconj, partial, &Weights::new(aux, g, scenario), &h, &ge)
}

/// Per-path phase factors `exp(−j 2π/λ · q · ρ_ℓ[axis])` over the grid.
#[derive(Clone, Debug)]
pub struct GridTables {
    grid: GridSpec,
    points: Vec<f64>,
    /// `[axis][receiver][path] -> Vec over grid`; receivers are users then eves.
    phases: [Vec<Vec<Vec<C64>>>; 2],
}

impl GridTables {
    pub fn new(scenario: &Scenario, grid: GridSpec) -> Self {
        let points = grid.points();
        let k = TAU / scenario.wavelength;
        let receivers: Vec<&ReceiverChannel> = scenario.user_channels.iter().chain(&scenario.eve_channels).collect();
        let table = |axis: usize| {
            receivers
                .iter()
                .map(|rc| {
                    rc.paths
                        .iter()
                        .map(|p| points.iter().map(|&q| C64::from_polar(1.0, -k * q * p.direction[axis])).collect())
                        .collect()
                })
                .collect()
        };
        Self { grid, phases: [table(0), table(1)], points }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

/// Mutable placement state: layout, channel cache and maintained sums.
#[derive(Clone, Debug)]
pub struct PlacementState {
    pub layout: AntennaLayout,
    pub channels: ChannelSet,
    sums: FullSums,
}

impl PlacementState {
    pub fn new(scenario: &Scenario, layout: AntennaLayout, w: &Beamformer) -> Self {
        let channels = ChannelSet::new(scenario, &layout);
        let sums = FullSums::new(w, &channels);
        Self { layout, channels, sums }
    }

    /// Partial sums for antenna `m` from the maintained totals.
    pub fn partial(&self, m: usize, w: &Beamformer) -> PartialSums {
        self.sums.excluding(m, w, &self.channels)
    }

    /// Largest deviation between maintained sums and a fresh rebuild.
    pub fn sums_drift(&self, w: &Beamformer) -> f64 {
        let fresh = FullSums::new(w, &self.channels);
        self.sums
            .user
            .iter()
            .zip(&fresh.user)
            .chain(self.sums.eve.iter().zip(&fresh.eve))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn rebuild(&mut self, w: &Beamformer) {
        self.sums = FullSums::new(w, &self.channels);
    }

    fn move_antenna(&mut self, scenario: &Scenario, w: &Beamformer, m: usize, t: [f64; 2]) {
        let k_users = w.num_users();
        let j_eves = self.channels.eves.len();
        let old_h: Vec<C64> = self.channels.users.iter().map(|h| h[m]).collect();
        let old_g: Vec<C64> = self.channels.eves.iter().map(|g| g[m]).collect();
        self.layout.positions[m] = t;
        self.channels.move_antenna(scenario, m, t);
        for i in 0..k_users {
            let wc = w.columns[i][m].conj();
            for k in 0..k_users {
                self.sums.user[i * k_users + k] += wc * (self.channels.users[k][m] - old_h[k]);
            }
            for j in 0..j_eves {
                self.sums.eve[i * j_eves + j] += wc * (self.channels.eves[j][m] - old_g[j]);
            }
        }
    }
}

/// Fixed inputs of one placement block.
pub struct PlacementContext<'a> {
    pub scenario: &'a Scenario,
    pub w: &'a Beamformer,
    pub aux: &'a AuxState,
    pub g: f64,
    pub tables: &'a GridTables,
}

/// Result of one coordinate update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateUpdate {
    pub value: f64,
    pub moved: bool,
    /// Increase of the surrogate (never negative).
    pub gain: f64,
}

/// Moves `t_m^axis` to the best feasible candidate. The incumbent is always a
/// candidate; it is kept unless some grid point is strictly better, and among
/// equal grid points the smaller coordinate wins.
pub fn update_coordinate(
    m: usize,
    axis: Axis,
    state: &mut PlacementState,
    ctx: &PlacementContext<'_>,
) -> CoordinateUpdate {
    let scenario = ctx.scenario;
    let k_users = scenario.num_users;
    let partial = state.partial(m, ctx.w);
    let weights = Weights::new(ctx.aux, ctx.g, scenario);
    let wconj: Vec<C64> = ctx.w.columns.iter().map(|c| c[m].conj()).collect();

    let inc_h: Vec<C64> = state.channels.users.iter().map(|h| h[m]).collect();
    let inc_g: Vec<C64> = state.channels.eves.iter().map(|g| g[m]).collect();
    let incumbent = state.layout.positions[m][axis.index()];
    let f_inc = objective_from_responses(&wconj, &partial, &weights, &inc_h, &inc_g);

    // coefficient of each path with the other coordinate folded in
    let other = state.layout.positions[m][1 - axis.index()];
    let kk = TAU / scenario.wavelength;
    let receivers: Vec<&ReceiverChannel> = scenario.user_channels.iter().chain(&scenario.eve_channels).collect();
    let coeffs: Vec<Vec<C64>> = receivers
        .iter()
        .map(|rc| {
            rc.paths
                .iter()
                .map(|p| p.gain * C64::from_polar(1.0, -kk * other * p.direction[1 - axis.index()]))
                .collect()
        })
        .collect();
    let table = &ctx.tables.phases[axis.index()];

    let mut resp = vec![C64::new(0.0, 0.0); receivers.len()];
    let mut best: Option<(usize, f64)> = None;
    for (q, &value) in ctx.tables.points.iter().enumerate() {
        if !candidate_ok(m, axis, value, &state.layout, scenario.min_spacing) {
            continue;
        }
        for (r, out) in resp.iter_mut().enumerate() {
            *out = coeffs[r].iter().zip(&table[r]).map(|(c, ph)| c * ph[q]).sum();
        }
        let f = objective_from_responses(&wconj, &partial, &weights, &resp[..k_users], &resp[k_users..]);
        if best.is_none_or(|(_, fb)| f > fb) {
            best = Some((q, f));
        }
    }

    let tie = 1e-12 * (1.0 + f_inc.abs());
    match best {
        Some((q, f)) if f > f_inc + tie => {
            let value = ctx.tables.points[q];
            let mut t = state.layout.positions[m];
            t[axis.index()] = value;
            state.move_antenna(scenario, ctx.w, m, t);
            CoordinateUpdate { value, moved: true, gain: f - f_inc }
        }
        _ => CoordinateUpdate { value: incumbent, moved: false, gain: 0.0 },
    }
}

/// Outcome of the element-wise search.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub sweeps: usize,
    /// Surrogate increase of each sweep.
    pub sweep_gains: Vec<f64>,
    /// Surrogate increase of every individual coordinate update.
    pub coordinate_gains: Vec<f64>,
}

/// Repeats `m = 1..M` updates (x then y) until a sweep's relative surrogate
/// increase falls below `config.rel_tol` or `config.max_sweeps` is reached.
/// `reference` is the magnitude used to normalize increases.
pub fn algorithm1_sweep(
    state: &mut PlacementState,
    ctx: &PlacementContext<'_>,
    config: &PlacementConfig,
    reference: f64,
) -> SweepOutcome {
    let mut outcome = SweepOutcome { sweeps: 0, sweep_gains: Vec::new(), coordinate_gains: Vec::new() };
    let mut scale = reference.abs();
    for _ in 0..config.max_sweeps.max(1) {
        state.rebuild(ctx.w);
        let mut gain = 0.0;
        for m in 0..ctx.scenario.num_antennas {
            for axis in [Axis::X, Axis::Y] {
                let up = update_coordinate(m, axis, state, ctx);
                outcome.coordinate_gains.push(up.gain);
                gain += up.gain;
            }
        }
        outcome.sweeps += 1;
        outcome.sweep_gains.push(gain);
        let rel = gain / scale.max(1e-12);
        scale += gain;
        if rel < config.rel_tol {
            break;
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = GridSpec::new(7, 3.0).unwrap();
        let p = g.points();
        assert_eq!(p[0], -1.5);
        assert_eq!(p[6], 1.5);
        for w in p.windows(2) {
            assert!((w[1] - w[0] - 0.5).abs() < 1e-15);
        }
        assert!(GridSpec::new(1, 3.0).is_err());
    }

    #[test]
    fn feasible_set_geometry() {
        let layout = AntennaLayout::new(vec![[0.7, 0.0], [0.0, 0.0]]);
        let grid = GridSpec::new(3, 1.0).unwrap();
        let set = feasible_set(0, Axis::X, &layout, &grid, 0.5);
        assert_eq!(set, vec![-0.5, 0.5, 0.7]);
    }

    #[test]
    fn feasible_set_without_spacing_is_full_grid() {
        let layout = AntennaLayout::new(vec![[0.7, 0.0], [0.0, 0.0]]);
        let grid = GridSpec::new(3, 1.0).unwrap();
        let set = feasible_set(0, Axis::X, &layout, &grid, 0.0);
        assert_eq!(set, vec![-0.5, 0.0, 0.5, 0.7]);
    }

    #[test]
    fn feasible_set_falls_back_to_incumbent() {
        let layout = AntennaLayout::new(vec![[0.0, 0.3], [0.0, 0.0]]);
        let grid = GridSpec::new(3, 1.0).unwrap();
        let set = feasible_set(0, Axis::X, &layout, &grid, 2.0);
        assert_eq!(set, vec![0.0]);
    }
}
