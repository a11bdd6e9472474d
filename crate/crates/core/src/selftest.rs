//! Quick numerical invariant checks, run by `ma-secrecy selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bcd::{bcd_solve, Block, SolverConfig};
use crate::channel::ChannelSet;
use crate::fp;
use crate::harness::fmt_g12;
use crate::placement::PlacementConfig;
use crate::qcqp;
use crate::rates::{rate_breakdown, Beamformer};
use crate::scenario::{draw_scenario, AntennaLayout, Dims, Scenario};
use crate::C64;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Uniformly random layout respecting the spacing constraint (rejection sampling).
pub fn random_layout(rng: &mut impl Rng, scenario: &Scenario) -> AntennaLayout {
    let half = scenario.region_side / 2.0;
    let mut positions: Vec<[f64; 2]> = Vec::with_capacity(scenario.num_antennas);
    while positions.len() < scenario.num_antennas {
        let t = [rng.random_range(-half..=half), rng.random_range(-half..=half)];
        let ok =
            positions.iter().all(|p| ((p[0] - t[0]).powi(2) + (p[1] - t[1]).powi(2)).sqrt() >= scenario.min_spacing);
        if ok {
            positions.push(t);
        }
    }
    AntennaLayout::new(positions)
}

/// Random beamformer with total power uniform in `[0, p]`.
pub fn random_beamformer(rng: &mut impl Rng, scenario: &Scenario) -> Beamformer {
    let mut w = Beamformer {
        columns: (0..scenario.num_users)
            .map(|_| {
                (0..scenario.num_antennas)
                    .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            })
            .collect(),
    };
    let target = scenario.power_budget * rng.random_range(0.0..=1.0);
    let scale = (target / w.power()).sqrt();
    w = w.scaled(C64::from(scale));
    w
}

fn fp_chain(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let s = draw_scenario(Dims { users: 4, eves: 2, antennas: 4 }, 10.0, 3.0, 100 + i).unwrap();
        let g = fp::leakage_bound_g(&s);
        let layout = random_layout(rng, &s);
        let w = random_beamformer(rng, &s);
        let ch = ChannelSet::new(&s, &layout);
        let rates = rate_breakdown(&w, &ch, &s);
        let b: Vec<bool> = rates.per_user_sinr.iter().zip(&rates.per_message_eve_snr).map(|(a, e)| a > e).collect();
        let aux = fp::optimal_aux(&w, &ch, &s, g, b.clone()).unwrap();
        let terms = fp::surrogate_terms(&w, &ch, &aux, &s, g).unwrap();
        let direct: f64 = (0..s.num_users)
            .filter(|&k| b[k])
            .map(|k| rates.per_user_sinr[k].ln_1p() - rates.per_message_eve_snr[k].ln_1p())
            .sum();
        worst = worst.max((terms.rate_equivalent() - direct).abs() / (1.0 + direct.abs()));
    }
    Check { name: "fp-chain identity", passed: worst <= 1e-9, detail: format!("max rel err {}", fmt_g12(worst)) }
}

fn leakage_bound(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50 {
        let s = draw_scenario(Dims { users: 3, eves: 3, antennas: 4 }, 20.0, 3.0, 200 + i).unwrap();
        let g = fp::leakage_bound_g(&s);
        let w = random_beamformer(rng, &s);
        let ch = ChannelSet::new(&s, &random_layout(rng, &s));
        for e in rate_breakdown(&w, &ch, &s).per_message_eve_snr {
            worst = worst.max(e - g);
        }
    }
    Check { name: "leakage bound", passed: worst <= 1e-12, detail: format!("max γ̂ − g {}", fmt_g12(worst)) }
}

fn kkt(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let s = draw_scenario(Dims { users: 3, eves: 2, antennas: 4 }, 10.0, 3.0, 300 + i).unwrap();
        let g = fp::leakage_bound_g(&s);
        let w0 = random_beamformer(rng, &s);
        let ch = ChannelSet::new(&s, &random_layout(rng, &s));
        let aux = fp::optimal_aux(&w0, &ch, &s, g, vec![true; 3]).unwrap();
        let forms = qcqp::assemble_forms(&ch, &aux, g, &s);
        let sol = qcqp::update_beamformer(&forms, s.power_budget).unwrap();
        for (f, col) in forms.iter().zip(&sol.beamformer.columns) {
            let wv = nalgebra::DVector::from_column_slice(col);
            let r = &f.quad * &wv + &wv * C64::from(sol.lambda) - &f.linear;
            worst = worst.max(r.norm() / (1.0 + f.linear.norm()));
        }
    }
    Check { name: "qcqp stationarity", passed: worst <= 1e-8, detail: format!("max residual {}", fmt_g12(worst)) }
}

fn monotone() -> Check {
    let s = draw_scenario(Dims { users: 3, eves: 2, antennas: 3 }, 10.0, 3.0, 400).unwrap();
    let cfg = SolverConfig {
        max_outer_iters: 15,
        placement: PlacementConfig { grid_points: 200, ..PlacementConfig::default() },
        ..SolverConfig::default()
    };
    let r = bcd_solve(&s, &cfg).unwrap();
    let worst = r.block_trace.windows(2).map(|w| w[0].1 - w[1].1).fold(f64::NEG_INFINITY, f64::max);
    let started = r.block_trace.first().map(|b| b.0) == Some(Block::Init);
    Check {
        name: "monotone ascent",
        passed: started && worst <= 1e-9,
        detail: format!("largest block decrease {}", fmt_g12(worst.max(0.0))),
    }
}

pub fn run() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    vec![fp_chain(&mut rng), leakage_bound(&mut rng), kkt(&mut rng), monotone()]
}
