//! SINRs, eavesdropper SNRs and secrecy rates.
//!
//! Rates at this interface are in bits per channel use.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSet, ChannelVector};
use crate::error::{Error, Result};
use crate::scenario::{AntennaLayout, Scenario};
use crate::C64;

/// Relative slack on the trace power budget.
pub const POWER_TOL: f64 = 1e-9;

/// Precoding matrix stored column-wise: `columns[k]` is user k's M-vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beamformer {
    pub columns: Vec<Vec<C64>>,
}

impl Beamformer {
    pub fn zeros(num_antennas: usize, num_users: usize) -> Self {
        Self { columns: vec![vec![C64::new(0.0, 0.0); num_antennas]; num_users] }
    }

    pub fn num_users(&self) -> usize {
        self.columns.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// `tr(W Wᴴ)`.
    pub fn power(&self) -> f64 {
        self.columns.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { columns: self.columns.iter().map(|col| col.iter().map(|z| z * c).collect()).collect() }
    }

    pub fn check_feasible(&self, budget: f64) -> Result<()> {
        let power = self.power();
        if !power.is_finite() || power > budget * (1.0 + POWER_TOL) {
            return Err(Error::Infeasible { power, budget });
        }
        Ok(())
    }
}

/// Per-user and total rates for one operating point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub per_user_sinr: Vec<f64>,
    pub per_message_eve_snr: Vec<f64>,
    pub per_user_secrecy_rate: Vec<f64>,
    pub sum_secrecy_rate: f64,
}

/// SINR of user `k`: `|h_kᴴ w_k|² / (σ_k² + Σ_{k'≠k} |h_kᴴ w_k'|²)`.
pub fn sinr_user(k: usize, w: &Beamformer, h: &[ChannelVector], noise: &[f64]) -> f64 {
    let hk = &h[k];
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (i, col) in w.columns.iter().enumerate() {
        let p = hk.inner(col).norm_sqr();
        if i == k {
            signal = p;
        } else {
            interference += p;
        }
    }
    signal / (noise[k] + interference)
}

/// Aggregated SNR of the cooperating eavesdroppers on message `k`:
/// `Σ_j |g_jᴴ w_k|² / σ̂_j²`.
pub fn eve_snr(k: usize, w: &Beamformer, g: &[ChannelVector], noise: &[f64]) -> f64 {
    g.iter().zip(noise).map(|(gj, s2)| gj.inner(&w.columns[k]).norm_sqr() / s2).sum()
}

/// `max{log₂(1+γ) − log₂(1+γ̂), 0}`.
pub fn secrecy_rate(sinr: f64, eve: f64) -> f64 {
    ((1.0 + sinr).log2() - (1.0 + eve).log2()).max(0.0)
}

/// Rates for precomputed channels.
pub fn rate_breakdown(w: &Beamformer, channels: &ChannelSet, scenario: &Scenario) -> RateBreakdown {
    let user_noise = scenario.user_noise();
    let eve_noise = scenario.eve_noise();
    let k_users = w.num_users();
    let sinr: Vec<f64> = (0..k_users).map(|k| sinr_user(k, w, &channels.users, &user_noise)).collect();
    let eve: Vec<f64> = (0..k_users).map(|k| eve_snr(k, w, &channels.eves, &eve_noise)).collect();
    let per_user: Vec<f64> = sinr.iter().zip(&eve).map(|(&a, &b)| secrecy_rate(a, b)).collect();
    let sum = per_user.iter().sum();
    RateBreakdown {
        per_user_sinr: sinr,
        per_message_eve_snr: eve,
        per_user_secrecy_rate: per_user,
        sum_secrecy_rate: sum,
    }
}

/// The reported objective: sum secrecy rate of `(w, layout)`.
pub fn sum_secrecy_rate(w: &Beamformer, layout: &AntennaLayout, scenario: &Scenario) -> Result<RateBreakdown> {
    check_shapes(w, layout, scenario)?;
    w.check_feasible(scenario.power_budget)?;
    let channels = ChannelSet::new(scenario, layout);
    Ok(rate_breakdown(w, &channels, scenario))
}

pub(crate) fn check_shapes(w: &Beamformer, layout: &AntennaLayout, scenario: &Scenario) -> Result<()> {
    if w.num_users() != scenario.num_users || w.columns.iter().any(|c| c.len() != scenario.num_antennas) {
        return Err(Error::Argument(format!("beamformer must be {}x{}", scenario.num_antennas, scenario.num_users)));
    }
    if layout.len() != scenario.num_antennas {
        return Err(Error::Argument(format!(
            "layout has {} antennas, scenario has {}",
            layout.len(),
            scenario.num_antennas
        )));
    }
    Ok(())
}
