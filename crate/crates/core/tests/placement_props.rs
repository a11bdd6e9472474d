mod common;

use ma_secrecy::channel::ChannelSet;
use ma_secrecy::fp::{leakage_bound_g, optimal_aux, surrogate_objective};
use ma_secrecy::placement::{
    algorithm1_sweep, feasible_set, update_coordinate, Axis, GridSpec, GridTables, PartialSums, PlacementContext,
    PlacementState,
};
use ma_secrecy::selftest::{random_beamformer, random_layout};
use ma_secrecy::{AntennaLayout, AuxState, Beamformer, PlacementConfig, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    s: Scenario,
    w: Beamformer,
    aux: AuxState,
    g: f64,
    layout: AntennaLayout,
}

fn setup(users: usize, eves: usize, antennas: usize, seed: u64) -> Setup {
    let s = common::scenario(users, eves, antennas, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layout = random_layout(&mut rng, &s);
    let w = random_beamformer(&mut rng, &s);
    let g = leakage_bound_g(&s);
    let b = (0..users).map(|_| rng.random_bool(0.8)).collect();
    let aux = optimal_aux(&w, &ChannelSet::new(&s, &layout), &s, g, b).unwrap();
    Setup { s, w, aux, g, layout }
}

fn surrogate(st: &Setup, layout: &AntennaLayout) -> f64 {
    surrogate_objective(&st.w, layout, &st.aux, &st.s).unwrap().objective
}

#[test]
fn coordinate_update_is_brute_force_argmax() {
    for seed in 0..20 {
        let st = setup(3, 2, 3, seed);
        let grid = GridSpec::new(101, st.s.region_side).unwrap();
        let tables = GridTables::new(&st.s, grid);
        let ctx = PlacementContext { scenario: &st.s, w: &st.w, aux: &st.aux, g: st.g, tables: &tables };
        let mut state = PlacementState::new(&st.s, st.layout.clone(), &st.w);
        for m in 0..3 {
            for axis in [Axis::X, Axis::Y] {
                let before = state.layout.clone();
                let candidates = feasible_set(m, axis, &before, &grid, st.s.min_spacing);
                let best = candidates
                    .iter()
                    .map(|&v| {
                        let mut l = before.clone();
                        l.positions[m][match axis {
                            Axis::X => 0,
                            Axis::Y => 1,
                        }] = v;
                        surrogate(&st, &l)
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                let f_before = surrogate(&st, &before);
                let up = update_coordinate(m, axis, &mut state, &ctx);
                let f_after = surrogate(&st, &state.layout);
                let tol = 1e-9 * (1.0 + best.abs());
                assert!((f_after - best).abs() <= tol, "seed {seed} m {m}: {f_after} vs brute force {best}");
                assert!(f_after >= f_before - tol);
                assert!((f_after - f_before - up.gain).abs() <= tol);
                state.layout.validate(st.s.region_side, st.s.min_spacing).unwrap();
            }
        }
    }
}

#[test]
fn partial_sums_match_direct_evaluation() {
    let st = setup(3, 2, 4, 9);
    let state = PlacementState::new(&st.s, st.layout.clone(), &st.w);
    let ch = ChannelSet::new(&st.s, &st.layout);
    for m in 0..4 {
        let inc = state.partial(m, &st.w);
        let direct = PartialSums::from_scratch(m, &st.w, &ch);
        for (a, b) in inc.a.iter().zip(&direct.a).chain(inc.b.iter().zip(&direct.b)) {
            assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn sweeps_are_monotone_feasible_and_consistent() {
    for seed in 0..10 {
        let st = setup(4, 3, 5, 100 + seed);
        let grid = GridSpec::new(400, st.s.region_side).unwrap();
        let tables = GridTables::new(&st.s, grid);
        let ctx = PlacementContext { scenario: &st.s, w: &st.w, aux: &st.aux, g: st.g, tables: &tables };
        let mut state = PlacementState::new(&st.s, st.layout.clone(), &st.w);
        let before = surrogate(&st, &state.layout);
        let cfg = PlacementConfig { grid_points: 400, ..PlacementConfig::default() };
        let out = algorithm1_sweep(&mut state, &ctx, &cfg, before);
        assert!(out.coordinate_gains.iter().all(|&g| g >= 0.0));
        assert!(state.sums_drift(&st.w) <= 1e-10, "drift {}", state.sums_drift(&st.w));
        state.layout.validate(st.s.region_side, st.s.min_spacing).unwrap();
        let after = surrogate(&st, &state.layout);
        let total: f64 = out.coordinate_gains.iter().sum();
        assert!(after >= before);
        assert!((after - before - total).abs() <= 1e-9 * (1.0 + after.abs()));
        for (a, b) in state.channels.users.iter().zip(&ChannelSet::new(&st.s, &state.layout).users) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert!((x - y).norm() <= 1e-10);
            }
        }
    }
}

#[test]
fn single_antenna_matches_dense_scan() {
    for seed in 0..20 {
        let st = setup(2, 2, 1, 200 + seed);
        let grid = GridSpec::new(1000, st.s.region_side).unwrap();
        let tables = GridTables::new(&st.s, grid);
        let ctx = PlacementContext { scenario: &st.s, w: &st.w, aux: &st.aux, g: st.g, tables: &tables };
        let mut state = PlacementState::new(&st.s, st.layout.clone(), &st.w);
        update_coordinate(0, Axis::X, &mut state, &ctx);
        let y = st.layout.positions[0][1];
        let mut best = surrogate(&st, &st.layout);
        for x in grid.points() {
            best = best.max(surrogate(&st, &AntennaLayout::new(vec![[x, y]])));
        }
        let got = surrogate(&st, &state.layout);
        assert!((got - best).abs() <= 1e-9 * (1.0 + best.abs()), "seed {seed}: {got} vs {best}");
    }
}
