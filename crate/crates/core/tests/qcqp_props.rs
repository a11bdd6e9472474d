mod common;

use ma_secrecy::channel::ChannelSet;
use ma_secrecy::fp::{leakage_bound_g, optimal_aux, surrogate_terms};
use ma_secrecy::qcqp::{assemble_forms, hermitian_eig, update_beamformer, DualProblem, QuadraticForm};
use ma_secrecy::selftest::{random_beamformer, random_layout};
use ma_secrecy::{AuxState, Beamformer, Scenario, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    s: Scenario,
    ch: ChannelSet,
    aux: AuxState,
    g: f64,
    forms: Vec<QuadraticForm>,
}

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, j, m) = (rng.random_range(1..=4), rng.random_range(0..=4), rng.random_range(1..=6));
    let s = common::scenario(k, j, m, seed);
    let layout = random_layout(&mut rng, &s);
    let w0 = random_beamformer(&mut rng, &s);
    let ch = ChannelSet::new(&s, &layout);
    let g = leakage_bound_g(&s);
    let b = (0..k).map(|_| rng.random_bool(0.8)).collect();
    let aux = optimal_aux(&w0, &ch, &s, g, b).unwrap();
    let forms = assemble_forms(&ch, &aux, g, &s);
    Instance { s, ch, aux, g, forms }
}

fn surrogate(inst: &Instance, w: &Beamformer) -> f64 {
    surrogate_terms(w, &inst.ch, &inst.aux, &inst.s, inst.g).unwrap().objective
}

#[test]
fn kkt_stationarity_and_power() {
    for seed in 0..200 {
        let inst = instance(seed);
        let sol = update_beamformer(&inst.forms, inst.s.power_budget).unwrap();
        for (f, col) in inst.forms.iter().zip(&sol.beamformer.columns) {
            let w = DVector::from_column_slice(col);
            let r = &f.quad * &w + &w * C64::from(sol.lambda) - &f.linear;
            assert!(r.norm() <= 1e-8 * (1.0 + f.linear.norm()), "seed {seed}: residual {}", r.norm());
        }
        let p = sol.beamformer.power();
        assert!(p <= inst.s.power_budget * (1.0 + 1e-9));
        if sol.lambda > 0.0 {
            assert!((p - inst.s.power_budget).abs() <= 1e-8 * inst.s.power_budget);
        }
    }
}

#[test]
fn matches_projected_gradient() {
    for seed in 0..30 {
        let inst = instance(1000 + seed);
        let sol = update_beamformer(&inst.forms, inst.s.power_budget).unwrap();
        let ours = common::form_value(&inst.forms, &sol.beamformer.columns);
        let (_, oracle) = common::projected_gradient(&inst.forms, inst.s.power_budget, 20_000);
        assert!(ours >= oracle - 1e-6 * oracle.abs().max(1e-12), "seed {seed}: {ours} < {oracle}");
        assert!((ours - oracle).abs() <= 1e-6 * oracle.abs().max(1e-12), "seed {seed}: {ours} vs {oracle}");
    }
}

#[test]
fn dual_power_is_strictly_decreasing() {
    for seed in 0..50 {
        let inst = instance(2000 + seed);
        let dual = DualProblem::new(&inst.forms).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let lambda = 1e-4 * 1.1f64.powi(i);
            let p = dual.power(lambda);
            if p == 0.0 {
                break;
            }
            assert!(p < last, "seed {seed}: power not decreasing at λ = {lambda}");
            last = p;
        }
    }
}

#[test]
fn diagonal_forms_match_grid_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        let a: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
        let budget = rng.random_range(0.01..1.0) * a.iter().zip(&d).map(|(x, y)| x.norm_sqr() / (y * y)).sum::<f64>();
        let forms = vec![QuadraticForm {
            quad: DMatrix::from_diagonal(&DVector::from_iterator(n, d.iter().map(|&x| C64::from(x)))),
            linear: DVector::from_column_slice(&a),
        }];
        let power = |l: f64| a.iter().zip(&d).map(|(x, y)| x.norm_sqr() / ((y + l) * (y + l))).sum::<f64>();
        // bracket the root on a dense grid
        let grid: Vec<f64> = (0..=200_000).map(|i| i as f64 * 1e-4).collect();
        let idx = grid.iter().position(|&l| power(l) <= budget).expect("root inside grid");
        let (lo, hi) = (grid[idx - 1], grid[idx]);
        let sol = update_beamformer(&forms, budget).unwrap();
        assert!(sol.lambda >= lo - 1e-12 && sol.lambda <= hi + 1e-12, "{} not in [{lo}, {hi}]", sol.lambda);
        assert!((power(sol.lambda) - budget).abs() <= 1e-10 * budget);
    }
}

#[test]
fn random_psd_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let r = rng.random_range(1..=n);
        let b = DMatrix::from_fn(n, r, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = &b * b.adjoint();
        let eig = hermitian_eig(&a).unwrap();
        let lam = DMatrix::from_diagonal(&DVector::from_iterator(n, eig.values.iter().map(|&v| C64::from(v))));
        let resid = (&a * &eig.vectors - &eig.vectors * lam).norm();
        assert!(resid <= 1e-10 * (1.0 + a.norm()), "residual {resid}");
        let ortho = (eig.vectors.adjoint() * &eig.vectors - DMatrix::identity(n, n)).norm();
        assert!(ortho <= 1e-10);
        assert!(eig.values.iter().all(|&v| v >= 0.0));
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // F(W) and the quadratic objective differ by a W-independent constant
    #[test]
    fn forms_reproduce_the_surrogate(seed in any::<u64>()) {
        let inst = instance(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = Beamformer::zeros(inst.s.num_antennas, inst.s.num_users);
        let offset = surrogate(&inst, &zero) - common::form_value(&inst.forms, &zero.columns);
        for _ in 0..10 {
            let w = random_beamformer(&mut rng, &inst.s);
            let diff = surrogate(&inst, &w) - common::form_value(&inst.forms, &w.columns);
            prop_assert!((diff - offset).abs() <= 1e-9 * (1.0 + offset.abs()));
        }
    }

    #[test]
    fn update_never_decreases_surrogate(seed in any::<u64>()) {
        let inst = instance(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sol = update_beamformer(&inst.forms, inst.s.power_budget).unwrap();
        let after = surrogate(&inst, &sol.beamformer);
        for _ in 0..10 {
            let w = random_beamformer(&mut rng, &inst.s);
            prop_assert!(after >= surrogate(&inst, &w) - 1e-9 * (1.0 + after.abs()));
        }
    }
}
