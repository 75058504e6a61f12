//! Integrable structure of the inhomogeneous XXX chain with diagonal twist.
//!
//! The quantum L-operator at site `j` acts on `V_0 (x) V_j`, with the
//! auxiliary space `V_0` stored as the most significant qubit:
//!
//! ```text
//! L_j(x) = (x - x_j) 1 (x) I + eta P_{0j}
//! ```
//!
//! and the transfer matrix is `T(x) = tr_0 [g L_1(x) ... L_N(x)]`.

use crate::tensorspace::{self, site_bit, spin, InvariantBasis, QuantumOperator, SectorBasis};
use crate::{linalg, CMatrix, Error, Result, C64};

/// Separations below this (relative to the coordinate scale) count as
/// coincident when validating parameters.
pub const GENERAL_POSITION_TOL: f64 = 1e-10;

/// Relative tolerance for the mutual check between the ordered-product and
/// residue constructions of the non-local Hamiltonians.
pub const HAMILTONIAN_CROSSCHECK_TOL: f64 = 1e-8;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Model definition of the twisted inhomogeneous chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    eta: C64,
    w1: C64,
    w2: C64,
    x: Vec<C64>,
}

impl ChainParams {
    pub fn new(eta: C64, twist: (C64, C64), x: Vec<C64>) -> Result<Self> {
        Self::with_max_sites(eta, twist, x, tensorspace::DEFAULT_MAX_SITES)
    }

    pub fn with_max_sites(eta: C64, twist: (C64, C64), x: Vec<C64>, max: usize) -> Result<Self> {
        tensorspace::check_sites_with_limit(x.len(), max)?;
        if eta.norm() == 0.0 {
            return Err(Error::ZeroEta);
        }
        let all = [eta, twist.0, twist.1];
        if all.iter().chain(&x).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        check_distinct(&x)?;
        let scale = x.iter().fold(eta.norm(), |m, z| m.max(z.norm())).max(1.0);
        for i in 0..x.len() {
            for j in 0..x.len() {
                if i != j && (x[i] - x[j] - eta).norm() <= GENERAL_POSITION_TOL * scale {
                    return Err(Error::ShiftCollision { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(Self { eta, w1: twist.0, w2: twist.1, x })
    }

    /// Real-valued convenience constructor.
    pub fn real(eta: f64, twist: (f64, f64), x: &[f64]) -> Result<Self> {
        Self::new(
            C64::new(eta, 0.0),
            (C64::new(twist.0, 0.0), C64::new(twist.1, 0.0)),
            x.iter().map(|&v| C64::new(v, 0.0)).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
    pub fn eta(&self) -> C64 {
        self.eta
    }
    pub fn twist(&self) -> (C64, C64) {
        (self.w1, self.w2)
    }
    pub fn x(&self) -> &[C64] {
        &self.x
    }

    /// Same chain with the inhomogeneities relabelled: site `k` of the new
    /// chain carries `x[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), found: perm.len() });
        }
        let x = perm.iter().map(|&k| self.x[k]).collect();
        Self::new(self.eta, (self.w1, self.w2), x)
    }
}

pub(crate) fn check_distinct(x: &[C64]) -> Result<()> {
    let scale = x.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if (x[i] - x[j]).norm() <= GENERAL_POSITION_TOL * scale {
                return Err(Error::CoincidentPoints { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

/// Gaudin model data: twist `h = diag(omega1, omega2)` and marked points.
#[derive(Debug, Clone, PartialEq)]
pub struct GaudinParams {
    omega1: C64,
    omega2: C64,
    x: Vec<C64>,
}

impl GaudinParams {
    pub fn new(omega: (C64, C64), x: Vec<C64>) -> Result<Self> {
        tensorspace::check_sites(x.len())?;
        check_distinct(&x)?;
        Ok(Self { omega1: omega.0, omega2: omega.1, x })
    }

    pub fn real(omega: (f64, f64), x: &[f64]) -> Result<Self> {
        Self::new(
            (C64::new(omega.0, 0.0), C64::new(omega.1, 0.0)),
            x.iter().map(|&v| C64::new(v, 0.0)).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
    pub fn omega(&self) -> (C64, C64) {
        (self.omega1, self.omega2)
    }
    pub fn x(&self) -> &[C64] {
        &self.x
    }
}

fn check_site(p: &ChainParams, j: usize) -> Result<()> {
    if j < 1 || j > p.n() {
        return Err(Error::SiteOutOfRange { site: j, sites: p.n() });
    }
    Ok(())
}

/// `L_j(x - x_j)` on `V_0 (x) (C^2)^N`, auxiliary space first.
pub fn lax_operator(p: &ChainParams, j: usize, x: C64) -> Result<QuantumOperator> {
    check_site(p, j)?;
    let n = p.n();
    let total = n + 1;
    let perm = tensorspace::permutation(1, j + 1, total)?;
    let dim = 1usize << total;
    let m = CMatrix::identity(dim, dim) * (x - p.x[j - 1]) + perm.into_matrix() * p.eta;
    Ok(QuantumOperator::new(total, m)?)
}

/// Two-site operator `op` (4x4, first index = site `a`) embedded at sites
/// `a`, `b` of an `n`-qubit register.
pub fn embed_pair(op: &CMatrix, a: usize, b: usize, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let (ma, mb) = (1usize << (n - a), 1usize << (n - b));
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let cin = 2 * site_bit(col, a, n) + site_bit(col, b, n);
        let base = col & !ma & !mb;
        for rin in 0..4 {
            let v = op[(rin, cin)];
            if v != zero() {
                let row = base | if rin & 2 != 0 { ma } else { 0 } | if rin & 1 != 0 { mb } else { 0 };
                out[(row, col)] = v;
            }
        }
    }
    out
}

fn swap4() -> CMatrix {
    let mut p = CMatrix::zeros(4, 4);
    p[(0, 0)] = one();
    p[(1, 2)] = one();
    p[(2, 1)] = one();
    p[(3, 3)] = one();
    p
}

/// `R(x) = eta 1 (x) 1 + x P` on two auxiliary copies of `C^2`.
pub fn r_matrix(eta: C64, x: C64) -> CMatrix {
    CMatrix::identity(4, 4) * eta + swap4() * x
}

/// The L-operator of a single site written on `V_0 (x) V_j` (4x4).
pub fn local_lax(eta: C64, x: C64) -> CMatrix {
    CMatrix::identity(4, 4) * x + swap4() * eta
}

/// Yang-Baxter residuals on `(C^2)^3`, maximum of two forms:
///
/// * braid form for `R` itself,
///   `R12(u-v) R23(u) R12(v) = R23(v) R12(u) R23(u-v)`;
/// * difference form for `P R` (which is the L-operator),
///   `S12(u-v) S13(u) S23(v) = S23(v) S13(u) S12(u-v)`.
pub fn yang_baxter_residual(eta: C64, u: C64, v: C64) -> f64 {
    let r = |a: usize, b: usize, z: C64| embed_pair(&r_matrix(eta, z), a, b, 3);
    let braid_l = r(1, 2, u - v) * r(2, 3, u) * r(1, 2, v);
    let braid_r = r(2, 3, v) * r(1, 2, u) * r(2, 3, u - v);
    let s = |a: usize, b: usize, z: C64| embed_pair(&local_lax(eta, z), a, b, 3);
    let diff_l = s(1, 2, u - v) * s(1, 3, u) * s(2, 3, v);
    let diff_r = s(2, 3, v) * s(1, 3, u) * s(1, 2, u - v);
    linalg::max_abs_diff(&braid_l, &braid_r).max(linalg::max_abs_diff(&diff_l, &diff_r))
}

/// `max |(g (x) g) R(x) - R(x) (g (x) g)|` for diagonal `g`.
pub fn gl2_invariance_residual(eta: C64, x: C64, g: (C64, C64)) -> f64 {
    let mut gg = CMatrix::zeros(4, 4);
    let d = [g.0, g.1];
    for a in 0..2 {
        for b in 0..2 {
            gg[(2 * a + b, 2 * a + b)] = d[a] * d[b];
        }
    }
    let r = r_matrix(eta, x);
    linalg::max_abs_diff(&(&gg * &r), &(&r * &gg))
}

/// RLL residual for an arbitrary single-site L-operator on `V_0 (x) V_j`.
///
/// Works on `V_0 (x) V_0' (x) V_j`; the other chain sites only contribute
/// identity factors, which leave the max-norm unchanged.
pub fn rll_residual_with<F>(eta: C64, x: C64, xp: C64, lax: F) -> f64
where
    F: Fn(C64) -> CMatrix,
{
    let r = embed_pair(&r_matrix(eta, x - xp), 1, 2, 3);
    let la = |z: C64| embed_pair(&lax(z), 1, 3, 3);
    let lb = |z: C64| embed_pair(&lax(z), 2, 3, 3);
    let lhs = &r * la(x) * lb(xp);
    let rhs = la(xp) * lb(x) * &r;
    linalg::max_abs_diff(&lhs, &rhs)
}

/// `R(x-x') L_j(x-x_j) (x) L_j(x'-x_j) - L_j(x'-x_j) (x) L_j(x-x_j) R(x-x')`.
pub fn check_rll(p: &ChainParams, j: usize, x: C64, xp: C64) -> Result<f64> {
    check_site(p, j)?;
    let xj = p.x[j - 1];
    let eta = p.eta;
    Ok(rll_residual_with(eta, x - xj, xp - xj, |z| local_lax(eta, z)))
}

/// Right-multiplication of `a` by the embedded elementary matrix
/// `E_{b c}` at site `k`.
fn right_mul_elementary(a: &CMatrix, b: usize, c: usize, k: usize, n: usize) -> CMatrix {
    let dim = a.nrows();
    let mask = 1usize << (n - k);
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        if site_bit(col, k, n) != c {
            continue;
        }
        let src = if b == c { col } else { col ^ mask };
        out.set_column(col, &a.column(src));
    }
    out
}

/// `T(x) = tr_0 [g L_1(x - x_1) ... L_N(x - x_N)]`.
pub fn transfer_matrix(p: &ChainParams, x: C64) -> QuantumOperator {
    let n = p.n();
    let dim = 1usize << n;
    let id = CMatrix::identity(dim, dim);
    let z = CMatrix::zeros(dim, dim);
    // monodromy blocks in the auxiliary space
    let mut m = [[&id * p.w1, z.clone()], [z.clone(), &id * p.w2]];
    for k in 1..=n {
        let s = x - p.x[k - 1];
        let mut next = [[z.clone(), z.clone()], [z.clone(), z.clone()]];
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = &m[a][b] * s;
                for c in 0..2 {
                    // block (c, b) of eta P_{0k} is eta E_{bc} at site k
                    acc += right_mul_elementary(&m[a][c], b, c, k, n) * p.eta;
                }
                next[a][b] = acc;
            }
        }
        m = next;
    }
    let [[m00, _], [_, m11]] = m;
    QuantumOperator::from_parts(n, m00 + m11)
}

/// Operator coefficients of `T(x) = sum_k J_k x^k`, `k = 0..=N`.
#[derive(Debug, Clone)]
pub struct TransferCoefficients {
    pub coeffs: Vec<QuantumOperator>,
    pub nodes: Vec<C64>,
}

impl TransferCoefficients {
    pub fn leading(&self) -> &QuantumOperator {
        self.coeffs.last().expect("degree >= 1")
    }
}

/// Real Chebyshev points scaled to the spread of the inhomogeneities.
pub fn interpolation_nodes(p: &ChainParams) -> Vec<C64> {
    let k = p.n() + 1;
    let (lo, hi) = p
        .x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
    let center = 0.5 * (lo + hi);
    let radius = (0.5 * (hi - lo)).max(1.0);
    (0..k)
        .map(|i| {
            let t = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * k) as f64).cos();
            C64::new(center + radius * t, 0.0)
        })
        .collect()
}

pub fn transfer_coefficients(p: &ChainParams) -> Result<TransferCoefficients> {
    transfer_coefficients_at(p, &interpolation_nodes(p))
}

pub fn transfer_coefficients_at(p: &ChainParams, nodes: &[C64]) -> Result<TransferCoefficients> {
    if nodes.len() != p.n() + 1 {
        return Err(Error::LengthMismatch { expected: p.n() + 1, found: nodes.len() });
    }
    let samples: Vec<CMatrix> = nodes.iter().map(|&x| transfer_matrix(p, x).into_matrix()).collect();
    let coeffs = linalg::interpolate_monomial(nodes, &samples)?
        .into_iter()
        .map(|m| QuantumOperator::from_parts(p.n(), m))
        .collect();
    Ok(TransferCoefficients { coeffs, nodes: nodes.to_vec() })
}

/// `sum_i g^(i)`.
pub fn twist_sum(p: &ChainParams) -> QuantumOperator {
    let basis = InvariantBasis::full(p.n());
    let mut acc = CMatrix::zeros(basis.len(), basis.len());
    for i in 1..=p.n() {
        acc += basis.local_diagonal(p.w1, p.w2, i);
    }
    QuantumOperator::from_parts(p.n(), acc)
}

/// Expected `J_{N-1}`: `eta sum_i g^(i) - tr(g) (sum_k x_k) I`. The second
/// term vanishes when the inhomogeneities sum to zero.
pub fn expected_subleading(p: &ChainParams) -> QuantumOperator {
    let dim = 1usize << p.n();
    let sx: C64 = p.x.iter().sum();
    let m = twist_sum(p).into_matrix() * p.eta - CMatrix::identity(dim, dim) * ((p.w1 + p.w2) * sx);
    QuantumOperator::from_parts(p.n(), m)
}

fn ordered_product_hamiltonian(p: &ChainParams, basis: &InvariantBasis, i: usize) -> CMatrix {
    let n = p.n();
    let xi = p.x[i - 1];
    let mut h = basis.local_diagonal(p.w1, p.w2, i);
    // left factors j = i+1..N in this order: build from the innermost out
    for j in (i + 1..=n).rev() {
        basis.left_mul_one_plus_perm(&mut h, i, j, p.eta / (xi - p.x[j - 1]));
    }
    for j in 1..i {
        basis.right_mul_one_plus_perm(&mut h, i, j, p.eta / (xi - p.x[j - 1]));
    }
    h
}

/// Non-local Hamiltonians restricted to a magnon sector (ordered-product
/// construction only).
pub fn nonlocal_hamiltonians_in_sector(p: &ChainParams, sector: &SectorBasis) -> Result<Vec<CMatrix>> {
    if sector.n() != p.n() {
        return Err(Error::ParamsMismatch(format!("sector for N={} used with N={}", sector.n(), p.n())));
    }
    let basis = InvariantBasis::sector(sector);
    Ok((1..=p.n()).map(|i| ordered_product_hamiltonian(p, &basis, i)).collect())
}

/// Non-local Hamiltonians from the ordered product
/// `H_i = prod_{j>i} (I + eta P_ij / (x_i - x_j)) g^(i) prod_{j<i} (...)`.
pub fn ordered_product_hamiltonians(p: &ChainParams) -> Vec<QuantumOperator> {
    let basis = InvariantBasis::full(p.n());
    (1..=p.n())
        .map(|i| QuantumOperator::from_parts(p.n(), ordered_product_hamiltonian(p, &basis, i)))
        .collect()
}

/// Non-local Hamiltonians as residues of `T(x) / prod_j (x - x_j)` at
/// `x = x_i`, divided by `eta`.
pub fn residue_hamiltonians(p: &ChainParams) -> Vec<QuantumOperator> {
    let n = p.n();
    (0..n)
        .map(|i| {
            let xi = p.x[i];
            let denom: C64 = (0..n).filter(|&k| k != i).map(|k| xi - p.x[k]).product();
            let t = transfer_matrix(p, xi).into_matrix();
            QuantumOperator::from_parts(n, t / (denom * p.eta))
        })
        .collect()
}

/// Non-local Hamiltonians, built both ways. A disagreement beyond
/// [`HAMILTONIAN_CROSSCHECK_TOL`] (relative) is an error.
pub fn nonlocal_hamiltonians(p: &ChainParams) -> Result<Vec<QuantumOperator>> {
    let ordered = ordered_product_hamiltonians(p);
    let residue = residue_hamiltonians(p);
    for (i, (a, b)) in ordered.iter().zip(&residue).enumerate() {
        let dev = linalg::max_abs_diff(a.matrix(), b.matrix());
        let scale = linalg::max_norm(a.matrix()).max(1.0);
        if !(dev <= HAMILTONIAN_CROSSCHECK_TOL * scale) {
            return Err(Error::HamiltonianMismatch { site: i + 1, deviation: dev });
        }
    }
    Ok(ordered)
}

fn gaudin_hamiltonian(gp: &GaudinParams, basis: &InvariantBasis, i: usize) -> CMatrix {
    let mut h = basis.local_diagonal(gp.omega1, gp.omega2, i);
    for j in 1..=gp.n() {
        if j != i {
            h += basis.permutation(i, j) / (gp.x[i - 1] - gp.x[j - 1]);
        }
    }
    h
}

/// `H_i^G = h^(i) + sum_{j != i} P_ij / (x_i - x_j)`.
pub fn gaudin_hamiltonians(gp: &GaudinParams) -> Vec<QuantumOperator> {
    let basis = InvariantBasis::full(gp.n());
    (1..=gp.n())
        .map(|i| QuantumOperator::from_parts(gp.n(), gaudin_hamiltonian(gp, &basis, i)))
        .collect()
}

pub fn gaudin_hamiltonians_in_sector(gp: &GaudinParams, sector: &SectorBasis) -> Result<Vec<CMatrix>> {
    if sector.n() != gp.n() {
        return Err(Error::ParamsMismatch(format!("sector for N={} used with N={}", sector.n(), gp.n())));
    }
    let basis = InvariantBasis::sector(sector);
    Ok((1..=gp.n()).map(|i| gaudin_hamiltonian(gp, &basis, i)).collect())
}

/// Chain parameters whose twist is `exp(eta h)`, the parametrisation under
/// which the chain Hamiltonians tend to `I + eta H^G`.
pub fn chain_from_gaudin(gp: &GaudinParams, eta: C64) -> Result<ChainParams> {
    ChainParams::new(eta, ((eta * gp.omega1).exp(), (eta * gp.omega2).exp()), gp.x.clone())
}

/// Spin-operator form of the `N = 2` Hamiltonians, written out term by term.
pub fn two_site_hamiltonians_explicit(p: &ChainParams) -> Result<[QuantumOperator; 2]> {
    if p.n() != 2 {
        return Err(Error::LengthMismatch { expected: 2, found: p.n() });
    }
    let e = |l: tensorspace::Local, j: usize| tensorspace::embed_local(&l, j, 2).map(|o| o.into_matrix());
    let (w1, w2) = p.twist();
    let x12 = p.x[0] - p.x[1];
    let t1 = e(spin::s1(), 1)? * e(spin::s1(), 2)? + e(spin::s_minus(), 1)? * e(spin::s_plus(), 2)?;
    let t2 = e(spin::s2(), 1)? * e(spin::s2(), 2)? + e(spin::s_plus(), 1)? * e(spin::s_minus(), 2)?;
    let h1 = e(spin::s1(), 1)? * w1 + e(spin::s2(), 1)? * w2 + &t1 * (p.eta * w1 / x12) + &t2 * (p.eta * w2 / x12);
    let h2 = e(spin::s1(), 2)? * w1 + e(spin::s2(), 2)? * w2 - t1 * (p.eta * w1 / x12) - t2 * (p.eta * w2 / x12);
    Ok([QuantumOperator::from_parts(2, h1), QuantumOperator::from_parts(2, h2)])
}
