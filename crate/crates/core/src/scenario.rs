//! Problem instances: receivers, multipath descriptions, budgets and the
//! antenna layout, plus random instance generation and JSON I/O.
//!
//! All lengths are expressed in units of the carrier wavelength unless a
//! scenario says otherwise; the channel model only ever uses `t / wavelength`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::C64;

/// Tolerance for layout feasibility checks.
pub const LAYOUT_TOL: f64 = 1e-12;

/// Number of NLoS paths per receiver in random draws.
pub const DRAW_NLOS_PATHS: usize = 3;
/// Variance of the complex Gaussian NLoS gains in random draws.
pub const DRAW_NLOS_VARIANCE: f64 = 0.1;

const USER_STREAM: u64 = 0;
const EVE_STREAM: u64 = 1;

/// One plane-wave component of a receiver's channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath")]
pub struct PathComponent {
    pub gain: C64,
    pub elevation: f64,
    pub azimuth: f64,
    /// `[sin(elevation) cos(azimuth), cos(elevation)]`, derived from the angles.
    pub direction: [f64; 2],
}

#[derive(Deserialize)]
struct RawPath {
    gain: C64,
    elevation: f64,
    azimuth: f64,
    #[serde(default)]
    direction: Option<[f64; 2]>,
}

impl TryFrom<RawPath> for PathComponent {
    type Error = String;

    fn try_from(raw: RawPath) -> std::result::Result<Self, String> {
        if !(raw.gain.re.is_finite() && raw.gain.im.is_finite() && raw.elevation.is_finite() && raw.azimuth.is_finite())
        {
            return Err("path gain and angles must be finite".into());
        }
        let path = PathComponent::new(raw.gain, raw.elevation, raw.azimuth);
        if let Some(d) = raw.direction {
            if (d[0] - path.direction[0]).abs() > 1e-9 || (d[1] - path.direction[1]).abs() > 1e-9 {
                return Err(format!(
                    "direction {d:?} is inconsistent with elevation/azimuth (expected {:?})",
                    path.direction
                ));
            }
        }
        Ok(path)
    }
}

impl PathComponent {
    pub fn new(gain: C64, elevation: f64, azimuth: f64) -> Self {
        Self { gain, elevation, azimuth, direction: direction_from_angles(elevation, azimuth) }
    }
}

pub fn direction_from_angles(elevation: f64, azimuth: f64) -> [f64; 2] {
    [elevation.sin() * azimuth.cos(), elevation.cos()]
}

/// Multipath description of one single-antenna receiver. Index 0 of `paths`
/// is the line-of-sight term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReceiverChannel {
    pub paths: Vec<PathComponent>,
    pub noise_power: f64,
}

impl ReceiverChannel {
    pub fn new(paths: Vec<PathComponent>, noise_power: f64) -> Result<Self> {
        let rc = Self { paths, noise_power };
        rc.validate("receiver")?;
        Ok(rc)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.paths.is_empty() {
            return Err(Error::Validation(format!("{what}: paths must be non-empty")));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::Validation(format!("{what}: noise_power must be positive")));
        }
        Ok(())
    }

    /// Σ_ℓ |gain_ℓ|².
    pub fn gain_energy(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }

    fn draw(rng: &mut ChaCha8Rng, nlos: usize) -> Self {
        let mut paths = Vec::with_capacity(nlos + 1);
        for l in 0..=nlos {
            let variance = if l == 0 { 1.0 } else { DRAW_NLOS_VARIANCE };
            let gain = complex_gaussian(rng, variance);
            let elevation = rng.random_range(0.0..=PI);
            let azimuth = rng.random_range(0.0..=PI);
            paths.push(PathComponent::new(gain, elevation, azimuth));
        }
        Self { paths, noise_power: 1.0 }
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(s * re, s * im)
}

/// A full problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub num_users: usize,
    pub num_eves: usize,
    pub num_antennas: usize,
    pub wavelength: f64,
    pub region_side: f64,
    pub min_spacing: f64,
    pub power_budget: f64,
    pub user_channels: Vec<ReceiverChannel>,
    pub eve_channels: Vec<ReceiverChannel>,
}

/// Dimensions of a random draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub users: usize,
    pub eves: usize,
    pub antennas: usize,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 {
            return Err(Error::Validation("num_users must be positive".into()));
        }
        if self.num_antennas == 0 {
            return Err(Error::Validation("num_antennas must be positive".into()));
        }
        if self.user_channels.len() != self.num_users {
            return Err(Error::Validation(format!(
                "user_channels has {} entries, num_users is {}",
                self.user_channels.len(),
                self.num_users
            )));
        }
        if self.eve_channels.len() != self.num_eves {
            return Err(Error::Validation(format!(
                "eve_channels has {} entries, num_eves is {}",
                self.eve_channels.len(),
                self.num_eves
            )));
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.wavelength) {
            return Err(Error::Validation("wavelength must be positive".into()));
        }
        if !positive(self.region_side) {
            return Err(Error::Validation("region_side must be positive".into()));
        }
        if !(self.min_spacing >= 0.0 && self.min_spacing.is_finite()) {
            return Err(Error::Validation("min_spacing must be non-negative".into()));
        }
        if !positive(self.power_budget) {
            return Err(Error::Validation("power_budget must be positive".into()));
        }
        for (k, rc) in self.user_channels.iter().enumerate() {
            rc.validate(&format!("user_channels[{k}]"))?;
        }
        for (j, rc) in self.eve_channels.iter().enumerate() {
            rc.validate(&format!("eve_channels[{j}]"))?;
        }
        Ok(())
    }

    pub fn user_noise(&self) -> Vec<f64> {
        self.user_channels.iter().map(|c| c.noise_power).collect()
    }

    pub fn eve_noise(&self) -> Vec<f64> {
        self.eve_channels.iter().map(|c| c.noise_power).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}

/// Draws a random instance.
///
/// Each receiver has one LoS path with `CN(0, 1)` gain and three NLoS paths
/// with `CN(0, 0.1)` gains; elevations and azimuths are uniform on `[0, π]`.
/// Noise powers are 1, so the transmit SNR maps to `p = 10^(snr_db / 10)`.
/// The wavelength is 1 and the minimum spacing is half a wavelength.
///
/// Every receiver uses its own ChaCha8 stream keyed by `(seed, kind, index)`,
/// so changing the number of eavesdroppers leaves user channels untouched.
pub fn draw_scenario(dims: Dims, snr_db: f64, region_side: f64, seed: u64) -> Result<Scenario> {
    if dims.users == 0 || dims.antennas == 0 {
        return Err(Error::Argument(format!("users and antennas must be positive (got {dims:?})")));
    }
    if !snr_db.is_finite() {
        return Err(Error::Argument("snr_db must be finite".into()));
    }
    if !(region_side > 0.0 && region_side.is_finite()) {
        return Err(Error::Argument("region side must be positive".into()));
    }
    let stream = |kind: u64, idx: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, &[kind, idx as u64]));
        ReceiverChannel::draw(&mut rng, DRAW_NLOS_PATHS)
    };
    Ok(Scenario {
        num_users: dims.users,
        num_eves: dims.eves,
        num_antennas: dims.antennas,
        wavelength: 1.0,
        region_side,
        min_spacing: 0.5,
        power_budget: 10f64.powf(snr_db / 10.0),
        user_channels: (0..dims.users).map(|k| stream(USER_STREAM, k)).collect(),
        eve_channels: (0..dims.eves).map(|j| stream(EVE_STREAM, j)).collect(),
    })
}

/// Antenna positions inside the square region `[-A/2, A/2]²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntennaLayout {
    pub positions: Vec<[f64; 2]>,
}

impl AntennaLayout {
    pub fn new(positions: Vec<[f64; 2]>) -> Self {
        Self { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                best = best.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        best
    }

    /// Checks the box and spacing constraints.
    pub fn validate(&self, region_side: f64, min_spacing: f64) -> Result<()> {
        let half = region_side / 2.0;
        for (m, t) in self.positions.iter().enumerate() {
            if t.iter().any(|c| !c.is_finite() || c.abs() > half + LAYOUT_TOL) {
                return Err(Error::Validation(format!("antenna {m} at {t:?} lies outside [-{half}, {half}]²")));
            }
        }
        if self.positions.len() > 1 && self.min_pairwise_distance() < min_spacing - LAYOUT_TOL {
            return Err(Error::Validation(format!(
                "minimum pairwise distance {} is below {min_spacing}",
                self.min_pairwise_distance()
            )));
        }
        Ok(())
    }
}
