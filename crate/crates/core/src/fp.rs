//! Fractional-programming surrogate of the sum secrecy rate.
//!
//! The non-smooth `[·]⁺` is replaced by activation weights `b_k`, the
//! eavesdropper term is rewritten through the scenario constant `g` (which
//! upper-bounds every `γ̂_k`), and the ratios are decoupled with the
//! auxiliary variables `α`, `β` (Lagrangian dual transform) and `η`
//! (quadratic transform). Every block then has a closed-form maximizer.
//!
//! All quantities here are in nats. At the auxiliary optimum the surrogate
//! evaluates to `Σ_k b_k [ln(1+γ_k) − ln(1+γ̂_k) + ln(1+g)]`; the last term is
//! reported separately as [`SurrogateTerms::constant_offset`].

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSet, ChannelVector};
use crate::error::{Error, Result};
use crate::rates::{check_shapes, Beamformer};
use crate::scenario::{AntennaLayout, Scenario};
use crate::C64;

/// Slack on `γ̂_k ≤ g`, relative to `1 + g`.
pub const LEAKAGE_TOL: f64 = 1e-9;

/// Auxiliary variables of the surrogate plus the activation weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxState {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub eta: Vec<C64>,
    pub b: Vec<bool>,
}

impl AuxState {
    pub fn zeros(num_users: usize) -> Self {
        Self {
            alpha: vec![0.0; num_users],
            beta: vec![0.0; num_users],
            eta: vec![C64::new(0.0, 0.0); num_users],
            b: vec![true; num_users],
        }
    }

    pub fn weight(&self, k: usize) -> f64 {
        if self.b[k] {
            1.0
        } else {
            0.0
        }
    }
}

/// Per-user pieces of the surrogate and their weighted total.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateTerms {
    pub g_bound: f64,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub g1: Vec<f64>,
    pub g1_hat: Vec<f64>,
    /// `F = Σ_k b_k (g1_k + f2_k)`.
    pub objective: f64,
    /// `Σ_k b_k ln(1+g)`, the part of `F` that does not depend on `(W, T)`
    /// at the auxiliary optimum.
    pub constant_offset: f64,
}

impl SurrogateTerms {
    /// `F − Σ_k b_k ln(1+g)`; equals `Σ_k b_k [ln(1+γ_k) − ln(1+γ̂_k)]` when
    /// the auxiliary variables are at their optimum.
    pub fn rate_equivalent(&self) -> f64 {
        self.objective - self.constant_offset
    }
}

/// `g = Σ_j p M (L̂_j + 1) / σ̂_j² · Σ_ℓ |β̂_{j,ℓ}|²`.
pub fn leakage_bound_g(scenario: &Scenario) -> f64 {
    let pm = scenario.power_budget * scenario.num_antennas as f64;
    scenario.eve_channels.iter().map(|rc| pm * rc.paths.len() as f64 / rc.noise_power * rc.gain_energy()).sum()
}

/// `b_k = 1{g1_k + f2_k > 0}`; ties resolve to 0.
pub fn update_b(g1: &[f64], f2: &[f64]) -> Vec<bool> {
    g1.iter().zip(f2).map(|(a, b)| a + b > 0.0).collect()
}

/// `α_k = γ_k`.
pub fn update_alpha(sinr: &[f64]) -> Vec<f64> {
    sinr.to_vec()
}

/// `β_k = (g − γ̂_k) / (1 + γ̂_k)`.
pub fn update_beta(eve_snr: &[f64], g: f64) -> Result<Vec<f64>> {
    eve_snr
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            check_leakage(k, e, g)?;
            Ok(((g - e) / (1.0 + e)).max(0.0))
        })
        .collect()
}

fn check_leakage(k: usize, eve: f64, g: f64) -> Result<()> {
    if eve > g + LEAKAGE_TOL * (1.0 + g) {
        return Err(Error::Invariant(format!("eavesdropper SNR {eve} of message {k} exceeds the leakage bound {g}")));
    }
    Ok(())
}

/// `η_k = h_kᴴ w_k / (Σ_i |h_kᴴ w_i|² + σ_k²)`.
pub fn update_eta(w: &Beamformer, h: &[ChannelVector], noise: &[f64]) -> Vec<C64> {
    (0..w.num_users())
        .map(|k| {
            let link = user_link(k, w, &h[k], noise[k]);
            link.signal / link.total
        })
        .collect()
}

/// `h_kᴴ w_k` and `Σ_i |h_kᴴ w_i|² + σ_k²` for one user.
#[derive(Clone, Copy, Debug)]
pub(crate) struct UserLink {
    pub signal: C64,
    pub total: f64,
}

pub(crate) fn user_link(k: usize, w: &Beamformer, hk: &ChannelVector, noise: f64) -> UserLink {
    let mut total = noise;
    let mut signal = C64::new(0.0, 0.0);
    for (i, col) in w.columns.iter().enumerate() {
        let z = hk.inner(col);
        total += z.norm_sqr();
        if i == k {
            signal = z;
        }
    }
    UserLink { signal, total }
}

/// Per-user SINR and eavesdropper SNR for precomputed channels.
pub(crate) fn link_metrics(
    w: &Beamformer,
    channels: &ChannelSet,
    scenario: &Scenario,
) -> (Vec<UserLink>, Vec<f64>, Vec<f64>) {
    let eve_noise = scenario.eve_noise();
    let links: Vec<UserLink> = (0..w.num_users())
        .map(|k| user_link(k, w, &channels.users[k], scenario.user_channels[k].noise_power))
        .collect();
    let sinr = links
        .iter()
        .map(|l| {
            let s = l.signal.norm_sqr();
            s / (l.total - s)
        })
        .collect();
    let eve = (0..w.num_users()).map(|k| crate::rates::eve_snr(k, w, &channels.eves, &eve_noise)).collect();
    (links, sinr, eve)
}

/// Closed-form maximizers `(α⋆, β⋆, η⋆)` at `(W, T)`, keeping the given `b`.
pub fn optimal_aux(
    w: &Beamformer,
    channels: &ChannelSet,
    scenario: &Scenario,
    g: f64,
    b: Vec<bool>,
) -> Result<AuxState> {
    let (links, sinr, eve) = link_metrics(w, channels, scenario);
    Ok(AuxState {
        alpha: update_alpha(&sinr),
        beta: update_beta(&eve, g)?,
        eta: links.iter().map(|l| l.signal / l.total).collect(),
        b,
    })
}

/// Surrogate for precomputed channels.
pub fn surrogate_terms(
    w: &Beamformer,
    channels: &ChannelSet,
    aux: &AuxState,
    scenario: &Scenario,
    g: f64,
) -> Result<SurrogateTerms> {
    let (links, _, eve) = link_metrics(w, channels, scenario);
    let k_users = w.num_users();
    let mut terms = SurrogateTerms {
        g_bound: g,
        f1: Vec::with_capacity(k_users),
        f2: Vec::with_capacity(k_users),
        g1: Vec::with_capacity(k_users),
        g1_hat: Vec::with_capacity(k_users),
        objective: 0.0,
        constant_offset: 0.0,
    };
    let log1g = g.ln_1p();
    for k in 0..k_users {
        check_leakage(k, eve[k], g)?;
        let (alpha, beta, eta) = (aux.alpha[k], aux.beta[k], aux.eta[k]);
        let link = links[k];
        let f1 = alpha.ln_1p() - alpha + (1.0 + alpha) * link.signal.norm_sqr() / link.total;
        let f2 = beta.ln_1p() - beta + (1.0 + beta) * (g - eve[k]) / (1.0 + g);
        let g1_hat = 2.0 * (eta.conj() * link.signal).re - eta.norm_sqr() * link.total;
        let g1 = alpha.ln_1p() - alpha + (1.0 + alpha) * g1_hat;
        let bk = aux.weight(k);
        terms.objective += bk * (g1 + f2);
        terms.constant_offset += bk * log1g;
        terms.f1.push(f1);
        terms.f2.push(f2);
        terms.g1.push(g1);
        terms.g1_hat.push(g1_hat);
    }
    Ok(terms)
}

/// Evaluates the surrogate `F(W, T, b, α, β, η)`.
pub fn surrogate_objective(
    w: &Beamformer,
    layout: &AntennaLayout,
    aux: &AuxState,
    scenario: &Scenario,
) -> Result<SurrogateTerms> {
    check_shapes(w, layout, scenario)?;
    let channels = ChannelSet::new(scenario, layout);
    surrogate_terms(w, &channels, aux, scenario, leakage_bound_g(scenario))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{PathComponent, ReceiverChannel};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tiny(p: f64, m: usize, eves: usize) -> Scenario {
        let rc = ReceiverChannel::new(vec![PathComponent::new(c(1.0, 0.0), 0.0, 0.0)], 1.0).unwrap();
        Scenario {
            num_users: 1,
            num_eves: eves,
            num_antennas: m,
            wavelength: 1.0,
            region_side: 3.0,
            min_spacing: 0.5,
            power_budget: p,
            user_channels: vec![rc.clone()],
            eve_channels: vec![rc; eves],
        }
    }

    #[test]
    fn g_direct_formula() {
        assert!((leakage_bound_g(&tiny(1.0, 2, 1)) - 2.0).abs() < 1e-15);
        assert_eq!(leakage_bound_g(&tiny(1.0, 2, 0)), 0.0);
    }

    #[test]
    fn b_rule() {
        assert_eq!(update_b(&[2.0], &[-1.0]), vec![true]);
        assert_eq!(update_b(&[-2.0], &[1.0]), vec![false]);
        assert_eq!(update_b(&[1.0], &[-1.0]), vec![false]);
    }

    #[test]
    fn alpha_rule() {
        assert_eq!(update_alpha(&[0.0, 3.5]), vec![0.0, 3.5]);
    }

    #[test]
    fn beta_rule() {
        assert_eq!(update_beta(&[0.0], 2.0).unwrap(), vec![2.0]);
        assert_eq!(update_beta(&[2.0], 2.0).unwrap(), vec![0.0]);
        assert_eq!(update_beta(&[1.0], 3.0).unwrap(), vec![1.0]);
        assert!(matches!(update_beta(&[3.1], 3.0), Err(Error::Invariant(_))));
    }

    #[test]
    fn eta_rule() {
        let w = Beamformer { columns: vec![vec![c(1.0, 0.0), c(0.0, 0.0)]] };
        let h = [ChannelVector(vec![c(1.0, 0.0), c(0.0, 0.0)])];
        let eta = update_eta(&w, &h, &[1.0]);
        assert!((eta[0] - c(0.5, 0.0)).norm() < 1e-15);
        let eta = update_eta(&Beamformer::zeros(2, 1), &h, &[1.0]);
        assert_eq!(eta[0], c(0.0, 0.0));
    }
}
