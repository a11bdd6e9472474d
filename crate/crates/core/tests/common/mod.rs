//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

use ma_secrecy::qcqp::QuadraticForm;
use ma_secrecy::scenario::{draw_scenario, Dims, ReceiverChannel};
use ma_secrecy::{AntennaLayout, Beamformer, Scenario, C64};

pub fn scenario(users: usize, eves: usize, antennas: usize, seed: u64) -> Scenario {
    draw_scenario(Dims { users, eves, antennas }, 10.0, 3.0, seed).unwrap()
}

/// Field response from the angles, without the cached direction vector.
pub fn response(rc: &ReceiverChannel, t: [f64; 2], lambda: f64) -> C64 {
    rc.paths
        .iter()
        .map(|p| {
            let proj = t[0] * p.elevation.sin() * p.azimuth.cos() + t[1] * p.elevation.cos();
            p.gain * C64::from_polar(1.0, -2.0 * PI / lambda * proj)
        })
        .sum()
}

pub fn vector(rc: &ReceiverChannel, layout: &AntennaLayout, lambda: f64) -> Vec<C64> {
    layout.positions.iter().map(|&t| response(rc, t, lambda)).collect()
}

/// `xᴴ y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub struct Rates {
    pub sinr: Vec<f64>,
    pub eve: Vec<f64>,
    pub sum_bits: f64,
}

/// Rates by direct summation over receivers and messages.
pub fn rates(s: &Scenario, layout: &AntennaLayout, w: &Beamformer) -> Rates {
    let h: Vec<Vec<C64>> = s.user_channels.iter().map(|rc| vector(rc, layout, s.wavelength)).collect();
    let g: Vec<Vec<C64>> = s.eve_channels.iter().map(|rc| vector(rc, layout, s.wavelength)).collect();
    let mut sinr = Vec::new();
    let mut eve = Vec::new();
    let mut sum_bits = 0.0;
    for k in 0..s.num_users {
        let mut interference = s.user_channels[k].noise_power;
        for i in 0..s.num_users {
            if i != k {
                interference += dot(&h[k], &w.columns[i]).norm_sqr();
            }
        }
        let gamma = dot(&h[k], &w.columns[k]).norm_sqr() / interference;
        let mut leak = 0.0;
        for j in 0..s.num_eves {
            leak += dot(&g[j], &w.columns[k]).norm_sqr() / s.eve_channels[j].noise_power;
        }
        sum_bits += ((1.0 + gamma).log2() - (1.0 + leak).log2()).max(0.0);
        sinr.push(gamma);
        eve.push(leak);
    }
    Rates { sinr, eve, sum_bits }
}

/// Value of `Σ_k 2ℜ{a_kᴴ w_k} − w_kᴴ A_k w_k`.
pub fn form_value(forms: &[QuadraticForm], cols: &[Vec<C64>]) -> f64 {
    forms
        .iter()
        .zip(cols)
        .map(|(f, w)| {
            let n = w.len();
            let mut quad = C64::new(0.0, 0.0);
            for r in 0..n {
                for c in 0..n {
                    quad += w[r].conj() * f.quad[(r, c)] * w[c];
                }
            }
            2.0 * dot(f.linear.as_slice(), w).re - quad.re
        })
        .sum()
}

/// Accelerated projected gradient ascent on the power ball.
pub fn projected_gradient(forms: &[QuadraticForm], budget: f64, iters: usize) -> (Vec<Vec<C64>>, f64) {
    let n = forms[0].linear.len();
    // Lipschitz constant of the gradient: 2 max_k ‖A_k‖_F
    let lip =
        forms.iter().map(|f| 2.0 * f.quad.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(1e-300, f64::max);
    let step = 1.0 / lip;
    let project = |cols: &mut Vec<Vec<C64>>| {
        let p: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
        if p > budget {
            let s = (budget / p).sqrt();
            cols.iter_mut().flatten().for_each(|z| *z *= s);
        }
    };
    let grad = |cols: &[Vec<C64>]| -> Vec<Vec<C64>> {
        forms
            .iter()
            .zip(cols)
            .map(|(f, w)| {
                (0..n)
                    .map(|r| {
                        let aw: C64 = (0..n).map(|c| f.quad[(r, c)] * w[c]).sum();
                        (f.linear[r] - aw) * 2.0
                    })
                    .collect()
            })
            .collect()
    };
    let mut x = vec![vec![C64::new(0.0, 0.0); n]; forms.len()];
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut best = (x.clone(), form_value(forms, &x));
    for _ in 0..iters {
        let gy = grad(&y);
        let mut next: Vec<Vec<C64>> =
            y.iter().zip(&gy).map(|(yc, gc)| yc.iter().zip(gc).map(|(a, b)| a + b * step).collect()).collect();
        project(&mut next);
        let v = form_value(forms, &next);
        if v > best.1 {
            best = (next.clone(), v);
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let mom = (t - 1.0) / t_next;
        y = next.iter().zip(&x).map(|(a, b)| a.iter().zip(b).map(|(p, q)| p + (p - q) * mom).collect()).collect();
        x = next;
        t = t_next;
    }
    best
}
