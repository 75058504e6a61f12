//! Small dense helpers shared by the physics modules.

use nalgebra::DMatrix;

use crate::{CMatrix, Error, Result, C64};

pub fn max_norm(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_norm(&commutator(a, b))
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Determinant through LU with partial pivoting.
pub fn det(a: &CMatrix) -> C64 {
    if a.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    a.clone().lu().determinant()
}

pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    a.clone().lu().solve(b)
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff_slice(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Elementary symmetric functions `e_0..e_n` of the given values.
pub fn elementary_symmetric(values: &[C64]) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); values.len() + 1];
    e[0] = C64::new(1.0, 0.0);
    for (k, &v) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let prev = e[j - 1];
            e[j] += prev * v;
        }
    }
    e
}

/// Coefficients (highest degree first) of `prod_k (lambda - r_k)`.
pub fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    elementary_symmetric(roots)
        .into_iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { e } else { -e })
        .collect()
}

/// Product of two polynomials stored highest degree first.
pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Long division `a = q * b + r` for polynomials stored highest degree first.
/// `b` must have a nonzero leading coefficient.
pub fn poly_divmod(a: &[C64], b: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let zero = C64::new(0.0, 0.0);
    if a.len() < b.len() {
        return (vec![zero], a.to_vec());
    }
    let mut rem = a.to_vec();
    let qlen = a.len() - b.len() + 1;
    let mut q = vec![zero; qlen];
    for i in 0..qlen {
        let c = rem[i] / b[0];
        q[i] = c;
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= c * bj;
        }
    }
    let r = rem[qlen..].to_vec();
    (q, r)
}

/// Horner evaluation of a polynomial stored highest degree first.
pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Monomial coefficients `c_0..c_d` (lowest degree first) of the polynomial
/// of degree `d = nodes.len() - 1` whose values at `nodes` are given as
/// matrices. Works entrywise on matrix-valued samples.
pub fn interpolate_monomial(nodes: &[C64], samples: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let k = nodes.len();
    for i in 0..k {
        for j in 0..i {
            if (nodes[i] - nodes[j]).norm() == 0.0 {
                return Err(Error::RepeatedNodes);
            }
        }
    }
    // Work in the affinely rescaled variable t = (x - c) / r so that the
    // Vandermonde system stays well conditioned, then expand back.
    let c = nodes.iter().sum::<C64>() / k as f64;
    let r = nodes.iter().fold(0.0f64, |m, z| m.max((z - c).norm())).max(1e-300);
    let vander = DMatrix::from_fn(k, k, |i, j| ((nodes[i] - c) / r).powu(j as u32));
    let inv = vander.try_inverse().ok_or(Error::RepeatedNodes)?;
    let (rows, cols) = samples[0].shape();
    let zero = CMatrix::zeros(rows, cols);
    let t_coeffs: Vec<CMatrix> = (0..k)
        .map(|a| {
            let mut acc = zero.clone();
            for (m, s) in samples.iter().enumerate() {
                acc += s * inv[(a, m)];
            }
            acc
        })
        .collect();
    // sum_a b_a ((x - c)/r)^a = sum_a b_a r^-a sum_j binom(a, j) x^j (-c)^(a-j)
    let mut out = vec![zero; k];
    for (a, b) in t_coeffs.iter().enumerate() {
        let scale = C64::new(r, 0.0).powi(-(a as i32));
        for j in 0..=a {
            let w = scale * binomial(a, j) * (-c).powu((a - j) as u32);
            out[j] += b * w;
        }
    }
    Ok(out)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
