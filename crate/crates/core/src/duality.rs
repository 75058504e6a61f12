//! The quantum-classical correspondence as executable checks.
//!
//! Forward direction: a joint eigenvalue tuple `(H_1..H_N)` of the chain,
//! substituted as velocities `xdot = -H` into the RS Lax matrix, yields the
//! characteristic polynomial `(lambda - w1)^(N-M) (lambda - w2)^M`. Inverse
//! direction: the same statement read as `N` polynomial equations for the
//! `H_i`, solved by multi-start Newton iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{self, ChainParams, GaudinParams};
use crate::classical::{self, ClassicalState, PolyCoeffs};
use crate::spectra::{self, JointSpectrumRecord};
use crate::{linalg, CMatrix, Error, Result, C64};

pub const DUALITY_TOL: f64 = 1e-7;
pub const INVERSE_RESIDUAL_TOL: f64 = 1e-9;
pub const DEDUP_TOL: f64 = 1e-6;
pub const MATCH_TOL: f64 = 1e-6;

fn check_sector(n: usize, m: usize) -> Result<()> {
    if m > n {
        return Err(Error::SectorOutOfRange { m, n });
    }
    Ok(())
}

/// `C_n`, the coefficient of `z^n` in `(1 + z w1)^(N-M) (1 + z w2)^M`, for
/// `n = 1..N`.
pub fn target_coefficients(n: usize, m: usize, w1: C64, w2: C64) -> Result<Vec<C64>> {
    check_sector(n, m)?;
    Ok((1..=n)
        .map(|k| {
            (0..=k)
                .map(|j| w1.powu(j as u32) * w2.powu((k - j) as u32) * (linalg::binomial(n - m, j) * linalg::binomial(m, k - j)))
                .sum()
        })
        .collect())
}

/// `(lambda - w1)^(N-M) (lambda - w2)^M`.
pub fn target_polynomial(n: usize, m: usize, w1: C64, w2: C64) -> Result<PolyCoeffs> {
    let c = target_coefficients(n, m, w1, w2)?;
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    coeffs.extend(c.into_iter().enumerate().map(|(k, v)| if k % 2 == 0 { -v } else { v }));
    Ok(PolyCoeffs { coeffs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub m: usize,
    /// Coefficientwise max distance, one per record.
    pub distances: Vec<f64>,
    /// Pass threshold, already scaled by `max(1, |target|)`.
    pub tolerance: f64,
    pub passed: Vec<bool>,
    pub max_distance: f64,
}

impl DualityReport {
    fn from_distances(m: usize, distances: Vec<f64>, tolerance: f64) -> Self {
        let passed = distances.iter().map(|d| *d < tolerance).collect();
        let max_distance = distances.iter().cloned().fold(0.0, f64::max);
        Self { m, distances, tolerance, passed, max_distance }
    }

    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|&p| p)
    }
}

fn check_records(n: usize, m: usize, records: &[JointSpectrumRecord]) -> Result<()> {
    check_sector(n, m)?;
    for r in records {
        if r.m != m {
            return Err(Error::ParamsMismatch(format!("record from sector {} checked as sector {m}", r.m)));
        }
        if r.h.len() != n {
            return Err(Error::ParamsMismatch(format!("record has {} values for N={n}", r.h.len())));
        }
    }
    Ok(())
}

pub fn verify_duality(p: &ChainParams, m: usize, records: &[JointSpectrumRecord]) -> Result<DualityReport> {
    verify_duality_with(p, m, records, DUALITY_TOL)
}

pub fn verify_duality_with(p: &ChainParams, m: usize, records: &[JointSpectrumRecord], tol: f64) -> Result<DualityReport> {
    check_records(p.n(), m, records)?;
    let (w1, w2) = p.twist();
    let target = target_polynomial(p.n(), m, w1, w2)?;
    let scale = linalg::max_abs(&target.coeffs).max(1.0);
    let distances = records
        .iter()
        .map(|r| Ok(classical::rs_char_poly_closed(p.x(), &r.h, p.eta())?.max_abs_diff(&target)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualityReport::from_distances(m, distances, tol * scale))
}

pub fn verify_gaudin_duality(gp: &GaudinParams, m: usize, records: &[JointSpectrumRecord]) -> Result<DualityReport> {
    verify_gaudin_duality_with(gp, m, records, DUALITY_TOL)
}

pub fn verify_gaudin_duality_with(gp: &GaudinParams, m: usize, records: &[JointSpectrumRecord], tol: f64) -> Result<DualityReport> {
    check_records(gp.n(), m, records)?;
    let (o1, o2) = gp.omega();
    let target = target_polynomial(gp.n(), m, o1, o2)?;
    let scale = linalg::max_abs(&target.coeffs).max(1.0);
    let distances = records
        .iter()
        .map(|r| Ok(classical::cm_char_poly_closed(gp.x(), &r.h)?.max_abs_diff(&target)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualityReport::from_distances(m, distances, tol * scale))
}

/// Joint eigenvalues of the all-up state: `H_i = w1 prod_{j != i} (1 + eta / (x_i - x_j))`.
pub fn vacuum_eigenvalues(p: &ChainParams) -> Vec<C64> {
    let (w1, _) = p.twist();
    let x = p.x();
    (0..x.len())
        .map(|i| w1 * (0..x.len()).filter(|&j| j != i).map(|j| 1.0 + p.eta() / (x[i] - x[j])).product::<C64>())
        .collect()
}

/// The left-hand sides of the inverse system together with their Jacobian.
struct InverseSystem {
    n: usize,
    /// Product of pair factors inside each subset, indexed by bitmask.
    weight: Vec<C64>,
    target: Vec<C64>,
    scale: f64,
}

impl InverseSystem {
    fn new(p: &ChainParams, m: usize) -> Result<Self> {
        let n = p.n();
        if n > 20 {
            return Err(Error::TooManySites { sites: n, max: 20 });
        }
        let (w1, w2) = p.twist();
        let target = target_coefficients(n, m, w1, w2)?;
        let x = p.x();
        let eta2 = p.eta() * p.eta();
        let mut weight = vec![C64::new(1.0, 0.0); 1 << n];
        for mask in 1usize..(1 << n) {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let rest = mask & !(1 << top);
            let mut w = weight[rest];
            for i in 0..top {
                if rest >> i & 1 == 1 {
                    let d = x[i] - x[top];
                    w /= 1.0 - eta2 / (d * d);
                }
            }
            weight[mask] = w;
        }
        let scale = linalg::max_abs(&target).max(1.0);
        Ok(Self { n, weight, target, scale })
    }

    /// Values `lhs_k(H) - C_k` and the Jacobian `d lhs_k / d H_j`.
    fn eval(&self, h: &[C64]) -> (Vec<C64>, CMatrix) {
        let n = self.n;
        let zero = C64::new(0.0, 0.0);
        let mut f = vec![zero; n];
        let mut jac = CMatrix::zeros(n, n);
        for mask in 1usize..(1 << n) {
            let k = mask.count_ones() as usize;
            let w = self.weight[mask];
            let mut prod = w;
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    prod *= h[i];
                }
            }
            f[k - 1] += prod;
            for j in 0..n {
                if mask >> j & 1 == 1 {
                    let mut d = w;
                    for i in 0..n {
                        if i != j && mask >> i & 1 == 1 {
                            d *= h[i];
                        }
                    }
                    jac[(k - 1, j)] += d;
                }
            }
        }
        for k in 0..n {
            f[k] -= self.target[k];
        }
        (f, jac)
    }

    fn residual(&self, h: &[C64]) -> f64 {
        linalg::max_abs(&self.eval(h).0) / self.scale
    }

    /// Damped Newton from `h0`; `None` if the iteration stalls or diverges.
    fn newton(&self, mut h: Vec<C64>) -> Option<(Vec<C64>, f64)> {
        let n = self.n;
        let (mut f, mut jac) = self.eval(&h);
        let mut res = linalg::max_abs(&f) / self.scale;
        let mut polish = 0;
        for _ in 0..200 {
            if res < INVERSE_RESIDUAL_TOL * 1e-3 || (res < INVERSE_RESIDUAL_TOL && polish >= 3) {
                break;
            }
            if res < INVERSE_RESIDUAL_TOL {
                polish += 1;
            }
            let rhs = CMatrix::from_fn(n, 1, |i, _| -f[i]);
            let step = linalg::solve(&jac, &rhs)?;
            if !linalg::is_finite(&step) {
                return None;
            }
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<C64> = (0..n).map(|i| h[i] + step[(i, 0)] * alpha).collect();
                let (tf, tj) = self.eval(&trial);
                let tres = linalg::max_abs(&tf) / self.scale;
                if tres.is_finite() && (tres < res || tres < INVERSE_RESIDUAL_TOL * 1e-3) {
                    h = trial;
                    f = tf;
                    jac = tj;
                    res = tres;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (res < INVERSE_RESIDUAL_TOL).then_some((h, res))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSolution {
    pub h: Vec<C64>,
    /// Residual of the system, relative to `max(1, |C|)`.
    pub residual: f64,
    pub matched: bool,
    /// Index of the matching quantum record.
    pub record: Option<usize>,
    /// Number of starts that converged to this solution.
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct InverseOptions {
    pub starts: usize,
    pub seed: u64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { starts: 200, seed: 0x1e55_0001 }
    }
}

#[derive(Debug, Clone)]
pub struct InverseOutcome {
    pub solutions: Vec<InverseSolution>,
    pub converged_starts: usize,
    pub failed_starts: usize,
}

impl InverseOutcome {
    pub fn matched_count(&self) -> usize {
        self.solutions.iter().filter(|s| s.matched).count()
    }
}

fn min_gap(p: &ChainParams) -> f64 {
    let x = p.x();
    let mut gap = f64::INFINITY;
    for i in 0..x.len() {
        for j in 0..i {
            gap = gap.min((x[i] - x[j]).norm());
        }
    }
    gap
}

fn random_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, t)
}

/// Solves the inverse system from `opts.starts` starting points against the
/// given quantum records. Every solution is reported; those that coincide
/// with a record are flagged as matched.
pub fn solve_inverse_with(
    p: &ChainParams,
    m: usize,
    records: &[JointSpectrumRecord],
    opts: &InverseOptions,
) -> Result<InverseOutcome> {
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    check_records(p.n(), m, records)?;
    let sys = InverseSystem::new(p, m)?;
    let n = p.n();
    let (w1, w2) = p.twist();
    let gap = min_gap(p);
    let radius = w1.norm().max(w2.norm()).max(1e-3) * (1.0 + if gap.is_finite() { p.eta().norm() / gap } else { 0.0 });
    let seeded = if records.is_empty() { 0 } else { opts.starts / 2 };

    let results: Vec<Option<(Vec<C64>, f64)>> = (0..opts.starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let start: Vec<C64> = if k < seeded {
                let rec = &records[k % records.len()];
                let noise = 0.05 * radius * (1 + k / records.len()) as f64 / (1 + seeded / records.len()) as f64;
                rec.h.iter().map(|z| z + random_in_disk(&mut rng, noise)).collect()
            } else {
                (0..n).map(|_| random_in_disk(&mut rng, radius)).collect()
            };
            sys.newton(start)
        })
        .collect();

    let converged_starts = results.iter().filter(|r| r.is_some()).count();
    let failed_starts = opts.starts - converged_starts;
    if converged_starts == 0 {
        return Err(Error::NoConvergence { starts: opts.starts });
    }

    let mut solutions: Vec<InverseSolution> = Vec::new();
    for (h, residual) in results.into_iter().flatten() {
        if let Some(s) = solutions.iter_mut().find(|s| linalg::max_abs_diff_slice(&s.h, &h) < DEDUP_TOL) {
            s.multiplicity += 1;
            if residual < s.residual {
                s.h = h;
                s.residual = residual;
            }
            continue;
        }
        solutions.push(InverseSolution { h, residual, matched: false, record: None, multiplicity: 1 });
    }
    for s in &mut solutions {
        s.residual = sys.residual(&s.h);
        s.record = records.iter().position(|r| linalg::max_abs_diff_slice(&r.h, &s.h) < MATCH_TOL);
        s.matched = s.record.is_some();
    }
    solutions.sort_by(|a, b| spectra::compare_tuples(&a.h, &b.h));
    Ok(InverseOutcome { solutions, converged_starts, failed_starts })
}

/// As [`solve_inverse_with`], with the quantum records computed by exact
/// diagonalization of sector `m`.
pub fn solve_inverse(p: &ChainParams, m: usize, starts: usize) -> Result<InverseOutcome> {
    let records = spectra::joint_spectrum(p, m)?;
    solve_inverse_with(p, m, &records, &InverseOptions { starts, ..Default::default() })
}

/// Residual of the inverse system at an arbitrary tuple.
pub fn inverse_residual(p: &ChainParams, m: usize, h: &[C64]) -> Result<f64> {
    if h.len() != p.n() {
        return Err(Error::LengthMismatch { expected: p.n(), found: h.len() });
    }
    Ok(InverseSystem::new(p, m)?.residual(h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub eta: f64,
    /// `max_i |(H_i(eta) - I)/eta - H_i^G|`.
    pub hamiltonian_error: f64,
    /// `|(Y^RS - I)/eta - Y^CM|`.
    pub lax_error: f64,
    /// `|eta H_1^RS - N - eta H_1^CM|`.
    pub energy_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTable {
    pub rows: Vec<LimitRow>,
    /// Least-squares slopes of `log error` against `log eta`.
    pub hamiltonian_slope: f64,
    pub lax_slope: f64,
    pub energy_slope: f64,
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(_, y)| **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Convergence of the chain to the Gaudin model and of RS to CM as
/// `eta -> 0`, with twist `exp(eta omega)` and RS velocities
/// `-1 + eta v_cm`. The energy column compares `H_1^RS`, written in the
/// momenta `p_i = v_cm_i - sum_{k != i} 1/(x_i - x_k)`, with `N/eta + H_1^CM`.
pub fn limit_checks(gp: &GaudinParams, v_cm: &[C64], etas: &[f64]) -> Result<LimitTable> {
    let n = gp.n();
    if v_cm.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: v_cm.len() });
    }
    if etas.is_empty() {
        return Err(Error::InvalidArgument("empty eta sequence".into()));
    }
    for (k, &e) in etas.iter().enumerate() {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::InvalidArgument(format!("eta values must be positive, got {e}")));
        }
        if k > 0 && e >= etas[k - 1] {
            return Err(Error::InvalidArgument("eta sequence must be strictly decreasing".into()));
        }
    }
    let x = gp.x().to_vec();
    let gaudin = chain::gaudin_hamiltonians(gp);
    let cm_state = ClassicalState::cm(x.clone(), v_cm.to_vec())?;
    let y_cm = classical::cm_lax(&cm_state)?.entries;
    let h1_cm = y_cm.trace();
    let p: Vec<C64> = (0..n)
        .map(|i| v_cm[i] - (0..n).filter(|&k| k != i).map(|k| (x[i] - x[k]).inv()).sum::<C64>())
        .collect();

    let mut rows = Vec::with_capacity(etas.len());
    for &e in etas {
        let eta = C64::new(e, 0.0);
        let cp = chain::chain_from_gaudin(gp, eta)?;
        let hs = chain::ordered_product_hamiltonians(&cp);
        let id = CMatrix::identity(1 << n, 1 << n);
        let hamiltonian_error = hs
            .iter()
            .zip(&gaudin)
            .map(|(h, g)| linalg::max_abs_diff(&((h.matrix() - &id) / eta), g.matrix()))
            .fold(0.0, f64::max);

        let rs_state = ClassicalState::rs(x.clone(), classical::rs_velocities_near_cm(v_cm, eta), eta)?;
        let y_rs = classical::rs_lax(&rs_state)?.entries;
        let lax_error = linalg::max_abs_diff(&((y_rs - CMatrix::identity(n, n)) / eta), &y_cm);

        let h1_rs = classical::rs_hamiltonian(&x, &p, eta)?;
        let energy_error = (eta * h1_rs - n as f64 - eta * h1_cm).norm();
        rows.push(LimitRow { eta: e, hamiltonian_error, lax_error, energy_error });
    }
    let col = |f: fn(&LimitRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    Ok(LimitTable {
        hamiltonian_slope: loglog_slope(etas, &col(|r| r.hamiltonian_error)),
        lax_slope: loglog_slope(etas, &col(|r| r.lax_error)),
        energy_slope: loglog_slope(etas, &col(|r| r.energy_error)),
        rows,
    })
}
