//! Field-response channel evaluation.

use std::f64::consts::TAU;

use crate::scenario::{AntennaLayout, ReceiverChannel, Scenario};
use crate::C64;

/// Response of one receiver at a single transmit position:
/// `Σ_ℓ gain_ℓ · exp(-j 2π/λ ⟨t, ρ_ℓ⟩)`.
pub fn field_response(rc: &ReceiverChannel, t: [f64; 2], wavelength: f64) -> C64 {
    let k = TAU / wavelength;
    rc.paths
        .iter()
        .map(|p| {
            let phase = k * (t[0] * p.direction[0] + t[1] * p.direction[1]);
            p.gain * C64::from_polar(1.0, -phase)
        })
        .sum()
}

/// The M-vector of responses of one receiver at every antenna of `layout`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelVector(pub Vec<C64>);

impl ChannelVector {
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `selfᴴ w`.
    pub fn inner(&self, w: &[C64]) -> C64 {
        debug_assert_eq!(self.0.len(), w.len());
        self.0.iter().zip(w).map(|(h, w)| h.conj() * w).sum()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }
}

impl std::ops::Index<usize> for ChannelVector {
    type Output = C64;
    fn index(&self, m: usize) -> &C64 {
        &self.0[m]
    }
}

pub fn channel_vector(rc: &ReceiverChannel, layout: &AntennaLayout, wavelength: f64) -> ChannelVector {
    ChannelVector(layout.positions.iter().map(|&t| field_response(rc, t, wavelength)).collect())
}

/// Channel vectors of every user and eavesdropper for one layout.
///
/// Moving a single antenna only touches entry `m` of each vector, which
/// [`ChannelSet::move_antenna`] exploits.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    pub users: Vec<ChannelVector>,
    pub eves: Vec<ChannelVector>,
}

impl ChannelSet {
    pub fn new(scenario: &Scenario, layout: &AntennaLayout) -> Self {
        let lambda = scenario.wavelength;
        Self {
            users: scenario.user_channels.iter().map(|rc| channel_vector(rc, layout, lambda)).collect(),
            eves: scenario.eve_channels.iter().map(|rc| channel_vector(rc, layout, lambda)).collect(),
        }
    }

    /// Re-evaluates entry `m` of every vector for a new position of antenna `m`.
    pub fn move_antenna(&mut self, scenario: &Scenario, m: usize, t: [f64; 2]) {
        let lambda = scenario.wavelength;
        for (h, rc) in self.users.iter_mut().zip(&scenario.user_channels) {
            h.0[m] = field_response(rc, t, lambda);
        }
        for (g, rc) in self.eves.iter_mut().zip(&scenario.eve_channels) {
            g.0[m] = field_response(rc, t, lambda);
        }
    }
}
