//! Joint digital beamforming and movable-antenna (MA) placement for
//! maximizing the multiuser sum secrecy rate against cooperating
//! eavesdroppers.
//!
//! The crate is organized bottom-up:
//!
//! - [`scenario`]: problem instances, random draws, JSON I/O.
//! - [`channel`]: field-response channel evaluation at antenna positions.
//! - [`rates`]: SINR, eavesdropper SNR and secrecy rates.
//! - [`fp`]: fractional-programming surrogate and its closed-form updates.
//! - [`qcqp`]: the beamformer subproblem (KKT + dual bisection).
//! - [`placement`]: element-wise grid search over antenna coordinates.
//! - [`bcd`]: the outer block coordinate ascent loop and the FPA baseline.
//! - [`harness`]: Monte Carlo sweeps and CSV emission.

pub mod bcd;
pub mod channel;
pub mod cli;
pub mod error;
pub mod fp;
pub mod harness;
pub mod placement;
pub mod qcqp;
pub mod rates;
pub mod scenario;
pub mod seed;
pub mod selftest;

pub use bcd::{bcd_solve, fpa_layout, mrt_init, SolveReport, SolverConfig, StartMode};
pub use error::{Error, Result};
pub use fp::{AuxState, SurrogateTerms};
pub use placement::{GridSpec, PlacementConfig};

pub use rates::{Beamformer, RateBreakdown};
pub use scenario::{AntennaLayout, PathComponent, ReceiverChannel, Scenario};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
