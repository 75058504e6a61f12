//! Exact diagonalization and joint spectra of commuting Hamiltonians.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{self, ChainParams, GaudinParams};
use crate::tensorspace::{self, SectorBasis};
use crate::{linalg, CMatrix, Error, Result, C64};

/// Eigenvalues and right eigenvectors (columns, unit norm) of a square
/// matrix, with per-pair relative residuals `|A v - l v| / (|A| |v|)`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    pub residuals: Vec<f64>,
}

const SCHUR_MAX_ITER: usize = 100_000;

/// Complex Schur factorization followed by triangular back-substitution.
pub fn eigendecompose(a: &CMatrix) -> Result<Eigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::LengthMismatch { expected: n, found: a.ncols() });
    }
    if !linalg::is_finite(a) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: CMatrix::zeros(0, 0), residuals: vec![] });
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::EigenNoConvergence { dim: n })?;
    let (q, t) = schur.unpack();
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let tnorm = linalg::max_norm(&t).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;

    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= C64::new(nrm, 0.0);
        }
    }
    let anorm = linalg::max_norm(a).max(f64::MIN_POSITIVE);
    let residuals = (0..n)
        .map(|k| {
            let v = vectors.column(k);
            let r = a * v - v * values[k];
            r.norm() / anorm
        })
        .collect();
    Ok(Eigen { values, vectors, residuals })
}

/// One simultaneous eigenstate in a magnon sector.
#[derive(Debug, Clone)]
pub struct JointSpectrumRecord {
    pub m: usize,
    /// Eigenvalues `(H_1, ..., H_N)`.
    pub h: Vec<C64>,
    /// Eigenvector in sector coordinates (see [`SectorBasis`]).
    pub vec: Vec<C64>,
    /// `max_i |H_i v - h_i v| / |v|`.
    pub residual: f64,
}

impl JointSpectrumRecord {
    pub fn sum(&self) -> C64 {
        self.h.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    pub seed: u64,
    pub max_attempts: usize,
    /// Relative gap below which the random combination counts as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { seed: 0x5eed_2014, max_attempts: 5, degeneracy_tol: 1e-7 }
    }
}

pub const RECORD_RESIDUAL_TOL: f64 = 1e-8;
const SORT_FUZZ: f64 = 1e-9;

fn fuzzy_cmp(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= SORT_FUZZ {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Lexicographic order on `(Re H_1, Im H_1, Re H_2, ...)` with a small fuzz.
pub fn compare_tuples(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = fuzzy_cmp(x.re, y.re).then(fuzzy_cmp(x.im, y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Joint eigenvectors of commuting matrices from one generic random
/// combination, eigenvalues read off by Rayleigh quotients.
pub fn joint_eigensystem(blocks: &[CMatrix], m: usize, opts: &SpectrumOptions) -> Result<Vec<JointSpectrumRecord>> {
    let dim = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((m as u64) << 32));
    for _ in 0..opts.max_attempts.max(1) {
        let mut comb = CMatrix::zeros(dim, dim);
        for b in blocks {
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            comb += b * c;
        }
        let eig = eigendecompose(&comb)?;
        let scale = linalg::max_abs(&eig.values).max(f64::MIN_POSITIVE);
        let mut min_gap = f64::INFINITY;
        for i in 0..dim {
            for j in 0..i {
                min_gap = min_gap.min((eig.values[i] - eig.values[j]).norm());
            }
        }
        if dim > 1 && min_gap < opts.degeneracy_tol * scale {
            continue;
        }
        let mut records: Vec<JointSpectrumRecord> = (0..dim)
            .map(|k| {
                let v: DVector<C64> = eig.vectors.column(k).into_owned();
                let vv = v.dotc(&v);
                let mut residual: f64 = 0.0;
                let h = blocks
                    .iter()
                    .map(|b| {
                        let bv = b * &v;
                        let val = v.dotc(&bv) / vv;
                        residual = residual.max((bv - &v * val).norm() / vv.re.sqrt());
                        val
                    })
                    .collect();
                JointSpectrumRecord { m, h, vec: v.iter().copied().collect(), residual }
            })
            .collect();
        records.sort_by(|a, b| compare_tuples(&a.h, &b.h));
        return Ok(records);
    }
    Err(Error::DegenerateCombination { attempts: opts.max_attempts.max(1) })
}

pub fn joint_spectrum(p: &ChainParams, m: usize) -> Result<Vec<JointSpectrumRecord>> {
    joint_spectrum_with(p, m, &SpectrumOptions::default())
}

pub fn joint_spectrum_with(p: &ChainParams, m: usize, opts: &SpectrumOptions) -> Result<Vec<JointSpectrumRecord>> {
    let sector = tensorspace::sector_basis(p.n(), m)?;
    let blocks = chain::nonlocal_hamiltonians_in_sector(p, &sector)?;
    joint_eigensystem(&blocks, m, opts)
}

/// Deviation of `sum_i H_i` from the eigenvalue `(N-M) w1 + M w2` of the
/// summed twist on `V(M)`.
pub fn sum_rule_residual(p: &ChainParams, record: &JointSpectrumRecord) -> f64 {
    let (w1, w2) = p.twist();
    let expected = w1 * (p.n() - record.m) as f64 + w2 * record.m as f64;
    (record.sum() - expected).norm()
}

pub fn gaudin_joint_spectrum(gp: &GaudinParams, m: usize) -> Result<Vec<JointSpectrumRecord>> {
    gaudin_joint_spectrum_with(gp, m, &SpectrumOptions::default())
}

pub fn gaudin_joint_spectrum_with(
    gp: &GaudinParams,
    m: usize,
    opts: &SpectrumOptions,
) -> Result<Vec<JointSpectrumRecord>> {
    let sector = tensorspace::sector_basis(gp.n(), m)?;
    let blocks = chain::gaudin_hamiltonians_in_sector(gp, &sector)?;
    joint_eigensystem(&blocks, m, opts)
}

/// `|sum_records sum_i H_i^G - tr_{V(M)} sum_i H_i^G|`.
pub fn gaudin_trace_residual(gp: &GaudinParams, m: usize, records: &[JointSpectrumRecord]) -> Result<f64> {
    let sector = tensorspace::sector_basis(gp.n(), m)?;
    let blocks = chain::gaudin_hamiltonians_in_sector(gp, &sector)?;
    let trace: C64 = blocks.iter().map(|b| b.trace()).sum();
    let total: C64 = records.iter().map(|r| r.sum()).sum();
    Ok((trace - total).norm())
}

/// Energy level of the periodic XXX Hamiltonian together with its sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxxLevel {
    pub energy: f64,
    pub m: usize,
}

/// Full spectrum of the Heisenberg Hamiltonian, sector by sector.
pub fn xxx_spectrum(n: usize) -> Result<Vec<XxxLevel>> {
    let h = tensorspace::heisenberg_hamiltonian(n)?;
    let mut levels = Vec::with_capacity(1 << n);
    for m in 0..=n {
        let sector: SectorBasis = tensorspace::sector_basis(n, m)?;
        let block = tensorspace::restrict(&h, &sector);
        let real = DMatrix::from_fn(block.nrows(), block.ncols(), |r, c| block[(r, c)].re);
        let eig = SymmetricEigen::new(real);
        let mut energies: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        energies.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        levels.extend(energies.into_iter().map(|energy| XxxLevel { energy, m }));
    }
    Ok(levels)
}
