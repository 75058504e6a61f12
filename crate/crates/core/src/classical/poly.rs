use super::{cauchy_matrix, check_cm_configuration, check_rs_configuration};
use crate::{linalg, CMatrix, Error, Result, C64};

/// Characteristic polynomial `sum_n c_n lambda^(N-n)` with `c_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    pub coeffs: Vec<C64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        match coeffs.first() {
            Some(c0) if *c0 == C64::new(1.0, 0.0) => Ok(Self { coeffs }),
            Some(_) => Err(Error::InvalidArgument("leading coefficient must be 1".into())),
            None => Err(Error::InvalidArgument("empty coefficient list".into())),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, lambda: C64) -> C64 {
        linalg::poly_eval(&self.coeffs, lambda)
    }

    pub fn max_abs_diff(&self, other: &PolyCoeffs) -> f64 {
        if self.coeffs.len() != other.coeffs.len() {
            return f64::INFINITY;
        }
        linalg::max_abs_diff_slice(&self.coeffs, &other.coeffs)
    }

    /// Coefficientwise distance scaled by the largest coefficient of either side.
    pub fn relative_diff(&self, other: &PolyCoeffs) -> f64 {
        let scale = linalg::max_abs(&self.coeffs).max(linalg::max_abs(&other.coeffs)).max(1.0);
        self.max_abs_diff(other) / scale
    }
}

/// `det(lambda I - A)` by the Faddeev-LeVerrier trace recursion.
pub fn char_poly(a: &CMatrix) -> PolyCoeffs {
    let n = a.nrows();
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    let id = CMatrix::identity(n, n);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &id * coeffs[k - 1];
        let am = a * &m;
        coeffs.push(-am.trace() / k as f64);
    }
    PolyCoeffs { coeffs }
}

fn pair_factors(x: &[C64], eta: C64) -> Vec<Vec<C64>> {
    let n = x.len();
    let one = C64::new(1.0, 0.0);
    let eta2 = eta * eta;
    let mut f = vec![vec![one; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = x[i] - x[j];
                f[i][j] = (one - eta2 / (d * d)).inv();
            }
        }
    }
    f
}

/// `(-1)^n prod_{i<j} (1 - eta^2 / (x_i - x_j)^2)^-1`.
pub fn cauchy_det(x: &[C64], eta: C64) -> Result<C64> {
    check_rs_configuration(x, eta)?;
    let f = pair_factors(x, eta);
    let mut d = if x.len() % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            d *= f[i][j];
        }
    }
    Ok(d)
}

/// Determinant of the Cauchy matrix by LU.
pub fn cauchy_det_direct(x: &[C64], eta: C64) -> Result<C64> {
    Ok(linalg::det(&cauchy_matrix(x, eta)?))
}

fn check_lengths(x: &[C64], h: &[C64]) -> Result<()> {
    if x.len() != h.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: h.len() });
    }
    Ok(())
}

/// Closed form of `det(lambda - Y^RS)` at velocities `-H`: each `J_n` is a
/// sum over `n`-subsets of `prod H_i` dressed by the pair factors inside the
/// subset.
pub fn rs_char_poly_closed(x: &[C64], h: &[C64], eta: C64) -> Result<PolyCoeffs> {
    check_lengths(x, h)?;
    check_rs_configuration(x, eta)?;
    let n = x.len();
    let f = pair_factors(x, eta);
    let mut sums = vec![C64::new(0.0, 0.0); n + 1];
    let mut chosen = Vec::with_capacity(n);

    fn walk(
        start: usize,
        weight: C64,
        chosen: &mut Vec<usize>,
        h: &[C64],
        f: &[Vec<C64>],
        sums: &mut [C64],
    ) {
        sums[chosen.len()] += weight;
        for k in start..h.len() {
            let mut w = weight * h[k];
            for &i in chosen.iter() {
                w *= f[i][k];
            }
            chosen.push(k);
            walk(k + 1, w, chosen, h, f, sums);
            chosen.pop();
        }
    }
    walk(0, C64::new(1.0, 0.0), &mut chosen, h, &f, &mut sums);

    let coeffs = sums.into_iter().enumerate().map(|(k, s)| if k % 2 == 0 { s } else { -s }).collect();
    Ok(PolyCoeffs { coeffs })
}

/// Same polynomial written as a sum over all `eps in {0,1}^N`.
pub fn rs_char_poly_eps_sum(x: &[C64], h: &[C64], eta: C64) -> Result<PolyCoeffs> {
    check_lengths(x, h)?;
    check_rs_configuration(x, eta)?;
    let n = x.len();
    let f = pair_factors(x, eta);
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    for mask in 0u64..(1u64 << n) {
        let on = |i: usize| mask >> i & 1 == 1;
        let mut term = C64::new(1.0, 0.0);
        for i in 0..n {
            if on(i) {
                term *= -h[i];
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                if on(j) && on(k) {
                    term *= f[j][k];
                }
            }
        }
        coeffs[mask.count_ones() as usize] += term;
    }
    Ok(PolyCoeffs { coeffs })
}

/// `exp(sum_{i<j} d_i d_j / (x_i - x_j)^2) prod_k (lambda - y_k)` at `y = HG`,
/// expanded as a sum over sets of disjoint pairs.
pub fn cm_char_poly_closed(x: &[C64], hg: &[C64]) -> Result<PolyCoeffs> {
    check_lengths(x, hg)?;
    check_cm_configuration(x)?;
    let n = x.len();
    let zero = C64::new(0.0, 0.0);
    // memo[mask] holds the polynomial for the index set `mask`, lowest degree first
    let mut memo: Vec<Option<Vec<C64>>> = vec![None; 1 << n];

    fn expand(mask: usize, x: &[C64], hg: &[C64], memo: &mut [Option<Vec<C64>>]) -> Vec<C64> {
        if let Some(p) = &memo[mask] {
            return p.clone();
        }
        let zero = C64::new(0.0, 0.0);
        let size = mask.count_ones() as usize;
        let mut out = vec![zero; size + 1];
        if mask == 0 {
            out[0] = C64::new(1.0, 0.0);
        } else {
            let a = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << a);
            // a unpaired: (lambda - y_a) * rest
            let r = expand(rest, x, hg, memo);
            for (d, c) in r.iter().enumerate() {
                out[d + 1] += c;
                out[d] -= hg[a] * c;
            }
            // a paired with b
            for b in a + 1..x.len() {
                if rest >> b & 1 == 1 {
                    let w = (x[a] - x[b]).powi(-2);
                    let r = expand(rest & !(1 << b), x, hg, memo);
                    for (d, c) in r.iter().enumerate() {
                        out[d] += w * c;
                    }
                }
            }
        }
        memo[mask] = Some(out.clone());
        out
    }

    let low_first = expand((1 << n) - 1, x, hg, &mut memo);
    let mut coeffs: Vec<C64> = low_first.into_iter().rev().collect();
    coeffs.resize(n + 1, zero);
    Ok(PolyCoeffs { coeffs })
}

/// Power traces `tr A^0 .. tr A^N`.
pub fn power_sums(a: &CMatrix) -> Vec<C64> {
    let n = a.nrows();
    let mut acc = CMatrix::identity(n, n);
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        out.push(acc.trace());
        acc = &acc * a;
    }
    out
}

/// `|sum_k J_{N-k} p_k|` for coefficients `J` and power traces `p_0..p_N`.
pub fn newton_residual(poly: &PolyCoeffs, p: &[C64]) -> Result<f64> {
    let n = poly.degree();
    if p.len() != n + 1 {
        return Err(Error::LengthMismatch { expected: n + 1, found: p.len() });
    }
    let s: C64 = (0..=n).map(|k| poly.coeffs[n - k] * p[k]).sum();
    Ok(s.norm())
}

#[cfg(test)]
mod tests {
    use super::super::{cm_lax, rs_lax, ClassicalState};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }
    fn cv(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x)).collect()
    }

    #[test]
    fn char_poly_small() {
        let id = CMatrix::identity(2, 2);
        assert_eq!(char_poly(&id).coeffs, cv(&[1.0, -2.0, 1.0]));
        let sx = CMatrix::from_row_slice(2, 2, &cv(&[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(char_poly(&sx).coeffs, cv(&[1.0, 0.0, -1.0]));
        assert_eq!(char_poly(&CMatrix::zeros(0, 0)).coeffs, cv(&[1.0]));
    }

    #[test]
    fn cauchy_det_examples() {
        assert_eq!(cauchy_det(&cv(&[0.7]), c(0.3)).unwrap(), c(-1.0));
        let d = cauchy_det(&cv(&[0.0, 2.0]), c(1.0)).unwrap();
        assert!((d - c(4.0 / 3.0)).norm() < 1e-15);
        let d2 = cauchy_det_direct(&cv(&[0.0, 2.0]), c(1.0)).unwrap();
        assert!((d2 - c(4.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn rs_closed_hand_example() {
        let p = rs_char_poly_closed(&cv(&[0.0, 2.0]), &cv(&[1.0, 3.0]), c(1.0)).unwrap();
        assert!(linalg::max_abs_diff_slice(&p.coeffs, &cv(&[1.0, -4.0, 4.0])) < 1e-14);
        let s = ClassicalState::rs(cv(&[0.0, 2.0]), cv(&[-1.0, -3.0]), c(1.0)).unwrap();
        assert!(char_poly(&rs_lax(&s).unwrap().entries).max_abs_diff(&p) < 1e-14);
    }

    #[test]
    fn cm_closed_small() {
        let x = cv(&[0.3, -0.9]);
        let h = cv(&[1.1, 0.4]);
        let p = cm_char_poly_closed(&x, &h).unwrap();
        let w = 1.0 / (1.2f64 * 1.2);
        let expected = cv(&[1.0, -1.5, 0.44 + w]);
        assert!(linalg::max_abs_diff_slice(&p.coeffs, &expected) < 1e-14);
        let p1 = cm_char_poly_closed(&cv(&[2.0]), &cv(&[0.5])).unwrap();
        assert_eq!(p1.coeffs, cv(&[1.0, -0.5]));
    }

    #[test]
    fn cm_closed_matches_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let x: Vec<C64> = (0..n).map(|k| C64::new(k as f64 + rng.random_range(0.0..0.5), rng.random_range(-0.5..0.5))).collect();
            let h: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let closed = cm_char_poly_closed(&x, &h).unwrap();
            let v: Vec<C64> = h.iter().map(|z| -z).collect();
            let y = cm_lax(&ClassicalState::cm(x, v).unwrap()).unwrap().entries;
            assert!(char_poly(&y).relative_diff(&closed) < 1e-11, "n = {n}");
        }
    }

    #[test]
    fn leverrier_against_roots() {
        let roots = [C64::new(1.0, 2.0), c(-0.5), C64::new(0.0, -1.0), c(3.0)];
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&roots));
        let expected = linalg::poly_from_roots(&roots);
        assert!(linalg::max_abs_diff_slice(&char_poly(&a).coeffs, &expected) < 1e-13);
    }

    #[test]
    fn newton_identity_on_diagonal() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&cv(&[2.0, -1.0, 0.5])));
        let p = power_sums(&a);
        assert!(newton_residual(&char_poly(&a), &p).unwrap() < 1e-14);
        assert!(newton_residual(&char_poly(&a), &p[..2]).is_err());
    }

    #[test]
    fn poly_coeffs_leading_one() {
        assert!(PolyCoeffs::new(cv(&[2.0, 1.0])).is_err());
        assert!(PolyCoeffs::new(vec![]).is_err());
        assert_eq!(PolyCoeffs::new(cv(&[1.0, 1.0])).unwrap().degree(), 1);
    }
}
