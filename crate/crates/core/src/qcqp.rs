//! Beamformer subproblem.
//!
//! For fixed positions, activation weights and auxiliary variables the
//! surrogate is, up to a constant, `−Σ_k (w_kᴴ A_k w_k − 2ℜ{w_kᴴ a_k})`,
//! a convex QCQP with the single constraint `tr(W Wᴴ) ≤ p`. Stationarity
//! gives `w_k = (A_k + λI)⁻¹ a_k`; the shared multiplier `λ` is either 0
//! or the root of the strictly decreasing power function
//! `P(λ) = Σ_k Σ_m |[U_kᴴ a_k]_m|² / (Λ_{k,m} + λ)²`, found by bisection.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::fp::AuxState;
use crate::rates::Beamformer;
use crate::scenario::Scenario;
use crate::C64;

const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest are treated as zero.
const ZERO_EIG_REL: f64 = 1e-10;
/// Null-space component of `a_k` that forces an active power constraint.
const NULL_COMPONENT_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;
const MAX_DOUBLINGS: usize = 2100;
/// Required relative power residual when the constraint is active.
pub const POWER_RESIDUAL_TOL: f64 = 1e-10;

/// One user's quadratic term `A_k` and linear term `a_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub quad: DMatrix<C64>,
    pub linear: DVector<C64>,
}

/// Builds the per-user forms:
///
/// `A_k = Σ_i b_i (1+α_i) |η_i|² h_i h_iᴴ + b_k (1+β_k)/(1+g) Σ_j g_j g_jᴴ / σ̂_j²`,
/// `a_k = b_k (1+α_k) η_k h_k`.
pub fn assemble_forms(channels: &ChannelSet, aux: &AuxState, g: f64, scenario: &Scenario) -> Vec<QuadraticForm> {
    let m = scenario.num_antennas;
    let to_vec = |v: &[C64]| DVector::from_column_slice(v);

    let mut shared = DMatrix::<C64>::zeros(m, m);
    for (i, h) in channels.users.iter().enumerate() {
        let wgt = aux.weight(i) * (1.0 + aux.alpha[i]) * aux.eta[i].norm_sqr();
        if wgt != 0.0 {
            let hv = to_vec(h.as_slice());
            shared += (&hv * hv.adjoint()) * C64::from(wgt);
        }
    }
    let mut leakage = DMatrix::<C64>::zeros(m, m);
    for (gj, rc) in channels.eves.iter().zip(&scenario.eve_channels) {
        let gv = to_vec(gj.as_slice());
        leakage += (&gv * gv.adjoint()) * C64::from(1.0 / rc.noise_power);
    }

    (0..scenario.num_users)
        .map(|k| {
            let bk = aux.weight(k);
            let mut quad = shared.clone();
            let eve_wgt = bk * (1.0 + aux.beta[k]) / (1.0 + g);
            if eve_wgt != 0.0 {
                quad += &leakage * C64::from(eve_wgt);
            }
            let linear = to_vec(channels.users[k].as_slice()) * (aux.eta[k] * (bk * (1.0 + aux.alpha[k])));
            QuadraticForm { quad, linear }
        })
        .collect()
}

/// `A = U diag(values) Uᴴ` with ascending, non-negative eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub vectors: DMatrix<C64>,
    pub values: Vec<f64>,
}

pub fn hermitian_eig(a: &DMatrix<C64>) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::Argument(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    let scale = 1.0 + a.norm();
    let skew = (a - a.adjoint()).norm();
    if skew > HERMITIAN_TOL * scale {
        return Err(Error::Argument(format!("matrix is not Hermitian (‖A − Aᴴ‖ = {skew:e})")));
    }
    let sym = (a + a.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEig { vectors, values })
}

/// One user's form expressed in its eigenbasis.
#[derive(Clone, Debug)]
struct Projected {
    eig: HermitianEig,
    /// `Uᴴ a_k`.
    coeffs: Vec<C64>,
    /// Eigenvalues after zeroing those below the relative threshold.
    values: Vec<f64>,
    /// `a_k` has a significant component along a zero eigenvalue.
    unbounded: bool,
}

/// The dual problem of the beamformer QCQP.
#[derive(Clone, Debug)]
pub struct DualProblem {
    users: Vec<Projected>,
}

impl DualProblem {
    pub fn new(forms: &[QuadraticForm]) -> Result<Self> {
        let users = forms
            .iter()
            .map(|f| {
                let eig = hermitian_eig(&f.quad)?;
                let coeffs: Vec<C64> = (eig.vectors.adjoint() * &f.linear).iter().copied().collect();
                let top = eig.values.last().copied().unwrap_or(0.0);
                let values: Vec<f64> =
                    eig.values.iter().map(|&v| if v <= ZERO_EIG_REL * top { 0.0 } else { v }).collect();
                let tol = NULL_COMPONENT_TOL * f.linear.norm().max(1.0);
                let unbounded = values.iter().zip(&coeffs).any(|(&v, c)| v == 0.0 && c.norm() > tol);
                Ok(Projected { eig, coeffs, values, unbounded })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { users })
    }

    /// `P(λ)`. At `λ = 0` components on zero eigenvalues are dropped (the
    /// pseudo-inverse solution), unless they make the problem unbounded.
    pub fn power(&self, lambda: f64) -> f64 {
        let mut total = 0.0;
        for u in &self.users {
            if lambda == 0.0 && u.unbounded {
                return f64::INFINITY;
            }
            for (&v, c) in u.values.iter().zip(&u.coeffs) {
                let d = v + lambda;
                if d > 0.0 {
                    total += c.norm_sqr() / (d * d);
                }
            }
        }
        total
    }

    /// Smallest `λ ≥ 0` with `P(λ) ≤ p`.
    pub fn solve(&self, budget: f64) -> Result<f64> {
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(Error::Argument(format!("power budget must be positive, got {budget}")));
        }
        if self.power(0.0) <= budget {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut doublings = 0;
        while self.power(hi) > budget {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS || !hi.is_finite() {
                return Err(Error::Solver("could not bracket the dual variable".into()));
            }
        }
        for _ in 0..MAX_BISECTIONS {
            let p_hi = self.power(hi);
            if budget - p_hi <= 1e-14 * budget || hi - lo <= 1e-12 * 1e-3 * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.power(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let residual = (self.power(hi) - budget).abs() / budget;
        if residual > POWER_RESIDUAL_TOL {
            return Err(Error::Solver(format!("dual bisection stalled with relative power residual {residual:e}")));
        }
        Ok(hi)
    }

    /// `w_k = U_k (Λ_k + λI)⁺ U_kᴴ a_k`.
    pub fn beamformer(&self, lambda: f64) -> Beamformer {
        let columns = self
            .users
            .iter()
            .map(|u| {
                let n = u.values.len();
                let scaled = DVector::from_fn(n, |m, _| {
                    let d = u.values[m] + lambda;
                    if d > 0.0 {
                        u.coeffs[m] / d
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                (&u.eig.vectors * scaled).iter().copied().collect()
            })
            .collect();
        Beamformer { columns }
    }
}

/// The optimal dual variable for `forms` under budget `p`.
pub fn solve_dual(forms: &[QuadraticForm], budget: f64) -> Result<f64> {
    DualProblem::new(forms)?.solve(budget)
}

/// Optimal beamformer and its dual variable.
#[derive(Clone, Debug)]
pub struct QcqpSolution {
    pub beamformer: Beamformer,
    pub lambda: f64,
}

pub fn update_beamformer(forms: &[QuadraticForm], budget: f64) -> Result<QcqpSolution> {
    let dual = DualProblem::new(forms)?;
    let lambda = dual.solve(budget)?;
    Ok(QcqpSolution { beamformer: dual.beamformer(lambda), lambda })
}

/// QCQP objective `Σ_k (w_kᴴ A_k w_k − 2ℜ{w_kᴴ a_k})` (to be minimized).
pub fn qcqp_objective(forms: &[QuadraticForm], w: &Beamformer) -> f64 {
    forms
        .iter()
        .zip(&w.columns)
        .map(|(f, col)| {
            let wv = DVector::from_column_slice(col);
            let quad = (wv.adjoint() * &f.quad * &wv)[(0, 0)].re;
            let lin = (wv.adjoint() * &f.linear)[(0, 0)].re;
            quad - 2.0 * lin
        })
        .sum()
}
