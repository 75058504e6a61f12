//! Classical Ruijsenaars-Schneider and Calogero-Moser particle systems.
//!
//! States carry velocities as the primary data because both Lax matrices
//! are written in velocities; momenta are computed on demand.

mod dynamics;
mod poly;

pub use dynamics::{integrate, integrate_with, lax_residual, lax_window, IntegratorOptions, Trajectory};
pub use poly::{
    cauchy_det, cauchy_det_direct, char_poly, cm_char_poly_closed, newton_residual, power_sums,
    rs_char_poly_closed, rs_char_poly_eps_sum, PolyCoeffs,
};

use crate::chain::GENERAL_POSITION_TOL;
use crate::{linalg, CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxKind {
    Rs,
    Cm,
}

/// Coordinates and velocities of `N` particles, plus the RS deformation
/// parameter when the state belongs to the RS system.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    pub x: Vec<C64>,
    pub v: Vec<C64>,
    pub eta: Option<C64>,
}

impl ClassicalState {
    pub fn rs(x: Vec<C64>, v: Vec<C64>, eta: C64) -> Result<Self> {
        let s = Self { x, v, eta: Some(eta) };
        s.validate()?;
        Ok(s)
    }

    pub fn cm(x: Vec<C64>, v: Vec<C64>) -> Result<Self> {
        let s = Self { x, v, eta: None };
        s.validate()?;
        Ok(s)
    }

    /// RS state from canonical momenta.
    pub fn rs_from_momenta(x: Vec<C64>, p: &[C64], eta: C64) -> Result<Self> {
        let v = velocity_from_momentum(&x, p, eta)?;
        Self::rs(x, v, eta)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    fn validate(&self) -> Result<()> {
        if self.x.len() != self.v.len() {
            return Err(Error::LengthMismatch { expected: self.x.len(), found: self.v.len() });
        }
        if self.x.is_empty() {
            return Err(Error::TooFewSites { sites: 0, min: 1 });
        }
        if let Some(eta) = self.eta {
            if eta.norm() == 0.0 {
                return Err(Error::ZeroEta);
            }
        }
        if let Some((i, j)) = singular_pair(&self.x, self.eta, GENERAL_POSITION_TOL) {
            return Err(singular_error(&self.x, self.eta, i, j));
        }
        Ok(())
    }

    /// Smallest distance to the singular set: `|x_i - x_j|`, and for RS
    /// also `|x_i - x_j -+ eta|`. Returns the distance and the pair.
    pub fn singular_distance(&self) -> (f64, (usize, usize)) {
        let mut best = (f64::INFINITY, (0, 0));
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = self.x[i] - self.x[j];
                let mut dist = d.norm();
                if let Some(eta) = self.eta {
                    dist = dist.min((d - eta).norm());
                }
                if dist < best.0 {
                    best = (dist, (i + 1, j + 1));
                }
            }
        }
        best
    }
}

fn singular_pair(x: &[C64], eta: Option<C64>, tol: f64) -> Option<(usize, usize)> {
    let scale = x.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    for i in 0..x.len() {
        for j in 0..x.len() {
            if i == j {
                continue;
            }
            let d = x[i] - x[j];
            if d.norm() <= tol * scale {
                return Some((i + 1, j + 1));
            }
            if let Some(eta) = eta {
                if (d - eta).norm() <= tol * scale {
                    return Some((i + 1, j + 1));
                }
            }
        }
    }
    None
}

fn singular_error(x: &[C64], _eta: Option<C64>, i: usize, j: usize) -> Error {
    if (x[i - 1] - x[j - 1]).norm() <= GENERAL_POSITION_TOL * x.iter().fold(1.0f64, |m, z| m.max(z.norm())) {
        Error::CoincidentPoints { i: i.min(j), j: i.max(j) }
    } else {
        Error::ShiftCollision { i, j }
    }
}

pub(crate) fn check_rs_configuration(x: &[C64], eta: C64) -> Result<()> {
    if eta.norm() == 0.0 {
        return Err(Error::ZeroEta);
    }
    match singular_pair(x, Some(eta), GENERAL_POSITION_TOL) {
        Some((i, j)) => Err(singular_error(x, Some(eta), i, j)),
        None => Ok(()),
    }
}

pub(crate) fn check_cm_configuration(x: &[C64]) -> Result<()> {
    match singular_pair(x, None, GENERAL_POSITION_TOL) {
        Some((i, j)) => Err(Error::CoincidentPoints { i: i.min(j), j: i.max(j) }),
        None => Ok(()),
    }
}

/// A Lax matrix together with the state it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix {
    pub kind: LaxKind,
    pub entries: CMatrix,
    pub source: ClassicalState,
}

fn require_eta(s: &ClassicalState) -> Result<C64> {
    s.eta.ok_or_else(|| Error::InvalidArgument("RS construction needs eta".into()))
}

/// `Y_ij = eta v_i / (x_i - x_j - eta)`; the diagonal is `-v_i`.
pub fn rs_lax(s: &ClassicalState) -> Result<LaxMatrix> {
    let eta = require_eta(s)?;
    check_rs_configuration(&s.x, eta)?;
    let n = s.n();
    let entries = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -s.v[i]
        } else {
            eta * s.v[i] / (s.x[i] - s.x[j] - eta)
        }
    });
    Ok(LaxMatrix { kind: LaxKind::Rs, entries, source: s.clone() })
}

/// `Y_ii = -v_i`, `Y_ij = -1 / (x_i - x_j)`.
pub fn cm_lax(s: &ClassicalState) -> Result<LaxMatrix> {
    check_cm_configuration(&s.x)?;
    let n = s.n();
    let entries = CMatrix::from_fn(n, n, |i, j| if i == j { -s.v[i] } else { -(s.x[i] - s.x[j]).inv() });
    Ok(LaxMatrix { kind: LaxKind::Cm, entries, source: s.clone() })
}

pub fn lax(kind: LaxKind, s: &ClassicalState) -> Result<LaxMatrix> {
    match kind {
        LaxKind::Rs => rs_lax(s),
        LaxKind::Cm => cm_lax(s),
    }
}

/// Cauchy matrix `C_ij = eta / (x_i - x_j - eta)`.
pub fn cauchy_matrix(x: &[C64], eta: C64) -> Result<CMatrix> {
    check_rs_configuration(x, eta)?;
    let n = x.len();
    Ok(CMatrix::from_fn(n, n, |i, j| eta / (x[i] - x[j] - eta)))
}

/// `max |Y - diag(v) C|`.
pub fn cauchy_factorization_residual(s: &ClassicalState) -> Result<f64> {
    let eta = require_eta(s)?;
    let y = rs_lax(s)?;
    let c = cauchy_matrix(&s.x, eta)?;
    let vd = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.v.clone()));
    Ok(linalg::max_abs_diff(&y.entries, &(vd * c)))
}

/// `max |[X, Y] - eta Y - eta diag(v) E|` with `E` the all-ones matrix.
pub fn commutation_residual(s: &ClassicalState) -> Result<f64> {
    let eta = require_eta(s)?;
    let y = rs_lax(s)?.entries;
    let n = s.n();
    let xm = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.x.clone()));
    let vd = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.v.clone()));
    let e = CMatrix::from_element(n, n, C64::new(1.0, 0.0));
    let r = linalg::commutator(&xm, &y) - &y * eta - vd * e * eta;
    Ok(linalg::max_norm(&r))
}

/// Second Lax matrix `B` of the RS system, `dY/dt = [B, Y]`.
pub fn rs_b_matrix(s: &ClassicalState) -> Result<CMatrix> {
    let eta = require_eta(s)?;
    check_rs_configuration(&s.x, eta)?;
    let n = s.n();
    let (x, v) = (&s.x, &s.v);
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let mut d = C64::new(0.0, 0.0);
            for k in 0..n {
                if k != i {
                    d += v[k] / (x[i] - x[k]);
                }
                d -= v[k] / (x[i] - x[k] + eta);
            }
            d
        } else {
            v[i] / (x[i] - x[j])
        }
    }))
}

/// Second Lax matrix of the CM system: `B_ij = 1/(x_i - x_j)^2` off the
/// diagonal and `B_ii = -sum_{k != i} 1/(x_i - x_k)^2`.
pub fn cm_b_matrix(s: &ClassicalState) -> Result<CMatrix> {
    check_cm_configuration(&s.x)?;
    let n = s.n();
    let x = &s.x;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -(0..n).filter(|&k| k != i).map(|k| (x[i] - x[k]).powi(-2)).sum::<C64>()
        } else {
            (x[i] - x[j]).powi(-2)
        }
    }))
}

pub fn b_matrix(kind: LaxKind, s: &ClassicalState) -> Result<CMatrix> {
    match kind {
        LaxKind::Rs => rs_b_matrix(s),
        LaxKind::Cm => cm_b_matrix(s),
    }
}

fn trace_power(y: &CMatrix, k: usize) -> C64 {
    let n = y.nrows();
    let mut acc = CMatrix::identity(n, n);
    for _ in 0..k {
        acc = &acc * y;
    }
    acc.trace()
}

/// `H_k^RS = eta^-1 tr Y^k`.
pub fn rs_integrals(s: &ClassicalState, k: usize) -> Result<C64> {
    let eta = require_eta(s)?;
    let y = rs_lax(s)?;
    Ok(trace_power(&y.entries, k) / eta)
}

/// `H_k^CM = tr Y^k / k`, `k >= 1`.
pub fn cm_integrals(s: &ClassicalState, k: usize) -> Result<C64> {
    if k == 0 {
        return Err(Error::InvalidArgument("CM integrals start at k = 1".into()));
    }
    let y = cm_lax(s)?;
    Ok(trace_power(&y.entries, k) / k as f64)
}

fn rs_dressing(x: &[C64], eta: C64, i: usize) -> C64 {
    (0..x.len()).filter(|&k| k != i).map(|k| (x[i] - x[k] + eta) / (x[i] - x[k])).product()
}

/// `H_1^RS` evaluated directly from coordinates and momenta.
pub fn rs_hamiltonian(x: &[C64], p: &[C64], eta: C64) -> Result<C64> {
    check_rs_configuration(x, eta)?;
    if p.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: p.len() });
    }
    let sum: C64 = (0..x.len()).map(|i| (-eta * p[i]).exp() * rs_dressing(x, eta, i)).sum();
    Ok(sum / eta)
}

/// `v_i = -exp(-eta p_i) prod_{k != i} (x_i - x_k + eta) / (x_i - x_k)`.
pub fn velocity_from_momentum(x: &[C64], p: &[C64], eta: C64) -> Result<Vec<C64>> {
    check_rs_configuration(x, eta)?;
    if p.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: p.len() });
    }
    Ok((0..x.len()).map(|i| -(-eta * p[i]).exp() * rs_dressing(x, eta, i)).collect())
}

/// Momenta recovered from velocities on the principal branch of the
/// logarithm. Any `p_i + 2 pi i k / eta` maps to the same velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumRecovery {
    pub p: Vec<C64>,
    /// Branch ambiguity `2 pi i / eta` of every component.
    pub branch_period: C64,
}

pub fn momentum_from_velocity(x: &[C64], v: &[C64], eta: C64) -> Result<MomentumRecovery> {
    check_rs_configuration(x, eta)?;
    if v.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: v.len() });
    }
    let mut p = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let d = rs_dressing(x, eta, i);
        if v[i].norm() == 0.0 || d.norm() == 0.0 {
            return Err(Error::ZeroVelocity { i: i + 1 });
        }
        p.push(-(-v[i] / d).ln() / eta);
    }
    let branch_period = C64::new(0.0, 2.0 * std::f64::consts::PI) / eta;
    Ok(MomentumRecovery { p, branch_period })
}

/// RS velocities `-1 + eta v_cm`, for which `Y^RS = I + eta Y^CM + O(eta^2)`.
pub fn rs_velocities_near_cm(v_cm: &[C64], eta: C64) -> Vec<C64> {
    v_cm.iter().map(|v| C64::new(-1.0, 0.0) + eta * v).collect()
}
