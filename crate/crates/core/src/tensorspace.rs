//! Operators on the spin-1/2 chain state space `(C^2)^N`.
//!
//! Basis convention: computational basis ordered by binary index, bit value
//! 0 is spin up, site 1 is the most significant bit. So for `N = 2` the basis
//! is `|++>, |+->, |-+>, |-->`.

use nalgebra::Matrix2;

use crate::{linalg, CMatrix, Error, Result, C64};

/// Largest chain handled by dense constructors unless a caller opts in to a
/// bigger limit through [`check_sites_with_limit`].
pub const DEFAULT_MAX_SITES: usize = 12;

pub type Local = Matrix2<C64>;

/// Dense operator on `(C^2)^sites`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOperator {
    sites: usize,
    matrix: CMatrix,
}

impl QuantumOperator {
    pub fn new(sites: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::LengthMismatch { expected: dim, found: matrix.nrows() });
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        Ok(Self { sites, matrix })
    }

    pub(crate) fn from_parts(sites: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << sites);
        Self { sites, matrix }
    }

    pub fn identity(sites: usize) -> Self {
        let dim = 1 << sites;
        Self { sites, matrix: CMatrix::identity(dim, dim) }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Image of the computational basis state `index`, as a column.
    pub fn apply_to_basis(&self, index: usize) -> Vec<C64> {
        self.matrix.column(index).iter().copied().collect()
    }
}

/// Single-site spin matrices.
pub mod spin {
    use super::Local;
    use crate::C64;

    fn m(a: [[f64; 2]; 2]) -> Local {
        Local::new(
            C64::new(a[0][0], 0.0),
            C64::new(a[0][1], 0.0),
            C64::new(a[1][0], 0.0),
            C64::new(a[1][1], 0.0),
        )
    }

    pub fn identity() -> Local {
        m([[1.0, 0.0], [0.0, 1.0]])
    }
    pub fn sx() -> Local {
        m([[0.0, 0.5], [0.5, 0.0]])
    }
    pub fn sy() -> Local {
        Local::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, -0.5),
            C64::new(0.0, 0.5),
            C64::new(0.0, 0.0),
        )
    }
    pub fn sz() -> Local {
        m([[0.5, 0.0], [0.0, -0.5]])
    }
    /// Raising operator `s_x + i s_y`.
    pub fn s_plus() -> Local {
        m([[0.0, 1.0], [0.0, 0.0]])
    }
    /// Lowering operator `s_x - i s_y`.
    pub fn s_minus() -> Local {
        m([[0.0, 0.0], [1.0, 0.0]])
    }
    /// Projector on spin up.
    pub fn s1() -> Local {
        m([[1.0, 0.0], [0.0, 0.0]])
    }
    /// Projector on spin down.
    pub fn s2() -> Local {
        m([[0.0, 0.0], [0.0, 1.0]])
    }
    pub fn diag(a: C64, b: C64) -> Local {
        Local::new(a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), b)
    }
}

pub fn check_sites(n: usize) -> Result<()> {
    check_sites_with_limit(n, DEFAULT_MAX_SITES)
}

pub fn check_sites_with_limit(n: usize, max: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::TooFewSites { sites: n, min: 1 });
    }
    if n > max {
        return Err(Error::TooManySites { sites: n, max });
    }
    Ok(())
}

fn check_site(j: usize, n: usize) -> Result<()> {
    if j < 1 || j > n {
        return Err(Error::SiteOutOfRange { site: j, sites: n });
    }
    Ok(())
}

/// Bit of `index` belonging to site `j` (1-based, site 1 most significant).
#[inline]
pub fn site_bit(index: usize, j: usize, n: usize) -> usize {
    (index >> (n - j)) & 1
}

#[inline]
pub(crate) fn swap_sites(index: usize, i: usize, j: usize, n: usize) -> usize {
    let (bi, bj) = (site_bit(index, i, n), site_bit(index, j, n));
    if bi == bj {
        index
    } else {
        index ^ (1 << (n - i)) ^ (1 << (n - j))
    }
}

/// `1^(j-1) (x) local (x) 1^(N-j)`.
pub fn embed_local(local: &Local, j: usize, n: usize) -> Result<QuantumOperator> {
    check_sites(n)?;
    check_site(j, n)?;
    let dim = 1usize << n;
    let mask = 1usize << (n - j);
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let b = site_bit(col, j, n);
        for a in 0..2 {
            let v = local[(a, b)];
            if v != C64::new(0.0, 0.0) {
                let row = if a == b { col } else { col ^ mask };
                out[(row, col)] = v;
            }
        }
    }
    Ok(QuantumOperator::from_parts(n, out))
}

/// Permutation of the tensor factors at sites `i` and `j`.
pub fn permutation(i: usize, j: usize, n: usize) -> Result<QuantumOperator> {
    check_sites(n)?;
    check_site(i, n)?;
    check_site(j, n)?;
    if i == j {
        return Err(Error::SameSite(i));
    }
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        out[(swap_sites(col, i, j, n), col)] = C64::new(1.0, 0.0);
    }
    Ok(QuantumOperator::from_parts(n, out))
}

/// Operator counting down spins, `sum_j s_2^(j)`.
pub fn magnon_number(n: usize) -> Result<QuantumOperator> {
    check_sites(n)?;
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        out[(k, k)] = C64::new(k.count_ones() as f64, 0.0);
    }
    Ok(QuantumOperator::from_parts(n, out))
}

/// Basis of the magnon sector `V(M)`: computational states with `M` down
/// spins, in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n: usize,
    m: usize,
    indices: Vec<usize>,
}

impl SectorBasis {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
    pub fn len(&self) -> usize {
        self.indices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
    /// Position of a computational index inside the sector.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }
}

pub fn sector_basis(n: usize, m: usize) -> Result<SectorBasis> {
    check_sites(n)?;
    if m > n {
        return Err(Error::SectorOutOfRange { m, n });
    }
    let indices = (0..1usize << n).filter(|k| k.count_ones() as usize == m).collect();
    Ok(SectorBasis { n, m, indices })
}

/// Block of `op` on a magnon sector. Only meaningful for operators that
/// commute with [`magnon_number`].
pub fn restrict(op: &QuantumOperator, basis: &SectorBasis) -> CMatrix {
    let idx = basis.indices();
    CMatrix::from_fn(idx.len(), idx.len(), |r, c| op.matrix[(idx[r], idx[c])])
}

/// Embeds a sector vector back into the full space.
pub fn lift(basis: &SectorBasis, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 1 << basis.n];
    for (k, &i) in basis.indices.iter().enumerate() {
        out[i] = v[k];
    }
    out
}

/// Periodic XXX Hamiltonian `sum_j P_{j,j+1} - N I` with `N+1 = 1`.
pub fn heisenberg_hamiltonian(n: usize) -> Result<QuantumOperator> {
    if n < 2 {
        return Err(Error::TooFewSites { sites: n, min: 2 });
    }
    check_sites(n)?;
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for j in 1..=n {
        let k = if j == n { 1 } else { j + 1 };
        for col in 0..dim {
            out[(swap_sites(col, j, k, n), col)] += C64::new(1.0, 0.0);
        }
    }
    for d in 0..dim {
        out[(d, d)] -= C64::new(n as f64, 0.0);
    }
    Ok(QuantumOperator::from_parts(n, out))
}

/// A list of computational indices closed under every site permutation.
/// Both the full space and each magnon sector qualify.
#[derive(Debug, Clone)]
pub(crate) struct InvariantBasis {
    pub n: usize,
    pub indices: Vec<usize>,
}

impl InvariantBasis {
    pub fn full(n: usize) -> Self {
        Self { n, indices: (0..1usize << n).collect() }
    }

    pub fn sector(basis: &SectorBasis) -> Self {
        Self { n: basis.n, indices: basis.indices.clone() }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    fn swap_map(&self, i: usize, j: usize) -> Vec<usize> {
        self.indices
            .iter()
            .map(|&k| {
                let s = swap_sites(k, i, j, self.n);
                self.indices.binary_search(&s).expect("basis not closed under permutations")
            })
            .collect()
    }

    /// Diagonal block of a site-local diagonal operator `diag(a, b)` at `j`.
    pub fn local_diagonal(&self, a: C64, b: C64, j: usize) -> CMatrix {
        let d = self.len();
        let mut out = CMatrix::zeros(d, d);
        for (r, &k) in self.indices.iter().enumerate() {
            out[(r, r)] = if site_bit(k, j, self.n) == 0 { a } else { b };
        }
        out
    }

    /// Block of `P_ij` in this basis.
    pub fn permutation(&self, i: usize, j: usize) -> CMatrix {
        let map = self.swap_map(i, j);
        let d = self.len();
        let mut out = CMatrix::zeros(d, d);
        for (c, &r) in map.iter().enumerate() {
            out[(r, c)] = C64::new(1.0, 0.0);
        }
        out
    }

    /// `x <- (I + c P_ij) x`.
    pub fn left_mul_one_plus_perm(&self, x: &mut CMatrix, i: usize, j: usize, c: C64) {
        let map = self.swap_map(i, j);
        let px = CMatrix::from_fn(x.nrows(), x.ncols(), |r, col| x[(map[r], col)]);
        *x += px * c;
    }

    /// `x <- x (I + c P_ij)`.
    pub fn right_mul_one_plus_perm(&self, x: &mut CMatrix, i: usize, j: usize, c: C64) {
        let map = self.swap_map(i, j);
        let xp = CMatrix::from_fn(x.nrows(), x.ncols(), |r, col| x[(r, map[col])]);
        *x += xp * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basis_vec(n: usize, k: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); 1 << n];
        v[k] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn embed_identity_is_identity() {
        let op = embed_local(&spin::identity(), 1, 3).unwrap();
        assert_eq!(op, QuantumOperator::identity(3));
    }

    #[test]
    fn embed_sz_single_site() {
        let op = embed_local(&spin::sz(), 1, 1).unwrap();
        let m = op.matrix();
        assert_eq!(m[(0, 0)], C64::new(0.5, 0.0));
        assert_eq!(m[(1, 1)], C64::new(-0.5, 0.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn lowering_second_site() {
        // |++> = index 0, |+-> = index 1
        let op = embed_local(&spin::s_minus(), 2, 2).unwrap();
        assert_eq!(op.apply_to_basis(0), basis_vec(2, 1));
    }

    #[test]
    fn embed_matches_kronecker_product() {
        let a = spin::sy() + spin::sz() * C64::new(0.3, 0.7);
        let n = 3;
        for j in 1..=n {
            let mut k = CMatrix::identity(1, 1);
            for s in 1..=n {
                let f = if s == j {
                    CMatrix::from_iterator(2, 2, a.iter().copied())
                } else {
                    CMatrix::identity(2, 2)
                };
                k = linalg::kron(&k, &f);
            }
            let op = embed_local(&a, j, n).unwrap();
            assert_eq!(op.matrix(), &k);
        }
    }

    #[test]
    fn embed_errors() {
        assert_eq!(
            embed_local(&spin::sz(), 0, 2).unwrap_err(),
            Error::SiteOutOfRange { site: 0, sites: 2 }
        );
        assert_eq!(
            embed_local(&spin::sz(), 3, 2).unwrap_err(),
            Error::SiteOutOfRange { site: 3, sites: 2 }
        );
        assert_eq!(
            embed_local(&spin::sz(), 1, 0).unwrap_err(),
            Error::TooFewSites { sites: 0, min: 1 }
        );
    }

    #[test]
    fn permutation_swaps_and_fixes() {
        let p = permutation(1, 2, 2).unwrap();
        assert_eq!(p.apply_to_basis(1), basis_vec(2, 2)); // |+-> -> |-+>
        assert_eq!(p.apply_to_basis(0), basis_vec(2, 0));
        assert_eq!(permutation(2, 2, 3).unwrap_err(), Error::SameSite(2));
    }

    #[test]
    fn permutation_13_brute_force() {
        let p = permutation(1, 3, 3).unwrap();
        for k in 0..8usize {
            let bits = [(k >> 2) & 1, (k >> 1) & 1, k & 1];
            let target = (bits[2] << 2) | (bits[1] << 1) | bits[0];
            assert_eq!(p.apply_to_basis(k), basis_vec(3, target));
        }
    }

    #[test]
    fn permutation_equals_spin_dot_form() {
        let n = 3;
        let (i, j) = (1, 3);
        let mut dot = CMatrix::zeros(8, 8);
        for s in [spin::sx(), spin::sy(), spin::sz()] {
            let a = embed_local(&s, i, n).unwrap().into_matrix();
            let b = embed_local(&s, j, n).unwrap().into_matrix();
            dot += a * b;
        }
        let form = (CMatrix::identity(8, 8) + dot * C64::new(4.0, 0.0)) * C64::new(0.5, 0.0);
        let p = permutation(i, j, n).unwrap();
        assert!(linalg::max_abs_diff(&form, p.matrix()) < 1e-15);
    }

    #[test]
    fn magnon_counts_down_spins() {
        let m2 = magnon_number(2).unwrap();
        assert_eq!(m2.matrix()[(0, 0)].re, 0.0);
        assert_eq!(m2.matrix()[(3, 3)].re, 2.0);
        let m3 = magnon_number(3).unwrap();
        assert_eq!(m3.matrix()[(0b010, 0b010)].re, 1.0);
    }

    #[test]
    fn magnon_matches_s2_sum() {
        let n = 4;
        let mut sum = CMatrix::zeros(16, 16);
        for j in 1..=n {
            sum += embed_local(&spin::s2(), j, n).unwrap().into_matrix();
        }
        assert_eq!(&sum, magnon_number(n).unwrap().matrix());
    }

    #[test]
    fn sectors_small() {
        let b = sector_basis(2, 1).unwrap();
        assert_eq!(b.indices(), &[1, 2]);
        assert_eq!(sector_basis(2, 0).unwrap().indices(), &[0]);
        assert_eq!(sector_basis(4, 2).unwrap().len(), 6);
        assert_eq!(sector_basis(2, 3).unwrap_err(), Error::SectorOutOfRange { m: 3, n: 2 });
    }

    #[test]
    fn heisenberg_two_sites() {
        let h = heisenberg_hamiltonian(2).unwrap();
        // triplet 0, singlet -4: check on explicit vectors
        let m = h.matrix();
        assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(m[(3, 3)], C64::new(0.0, 0.0));
        // singlet (|+-> - |-+>)
        let s = nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let hs = m * &s;
        assert!((hs - s * C64::new(-4.0, 0.0)).norm() < 1e-15);
        assert_eq!(heisenberg_hamiltonian(1).unwrap_err(), Error::TooFewSites { sites: 1, min: 2 });
    }

    #[test]
    fn heisenberg_annihilates_vacuum() {
        for n in 2..=6 {
            let h = heisenberg_hamiltonian(n).unwrap();
            assert!(h.apply_to_basis(0).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn heisenberg_commutes_with_magnon_number() {
        for n in 2..=6 {
            let h = heisenberg_hamiltonian(n).unwrap();
            let m = magnon_number(n).unwrap();
            assert!(linalg::commutator_norm(h.matrix(), m.matrix()) < 1e-12);
            assert!(linalg::max_abs_diff(h.matrix(), &h.matrix().adjoint()) == 0.0);
        }
    }

    #[test]
    fn too_many_sites_rejected() {
        assert_eq!(
            magnon_number(13).unwrap_err(),
            Error::TooManySites { sites: 13, max: DEFAULT_MAX_SITES }
        );
        assert!(check_sites_with_limit(13, 14).is_ok());
    }

    #[test]
    fn invariant_basis_ops_match_dense() {
        let n = 4;
        let full = InvariantBasis::full(n);
        let p = permutation(2, 4, n).unwrap();
        assert_eq!(&full.permutation(2, 4), p.matrix());
        let x = CMatrix::from_fn(16, 16, |r, c| C64::new(r as f64, c as f64 * 0.5));
        let c = C64::new(0.3, -0.2);
        let mut left = x.clone();
        full.left_mul_one_plus_perm(&mut left, 2, 4, c);
        let dense_left = (CMatrix::identity(16, 16) + p.matrix() * c) * &x;
        assert!(linalg::max_abs_diff(&left, &dense_left) < 1e-13);
        let mut right = x.clone();
        full.right_mul_one_plus_perm(&mut right, 2, 4, c);
        let dense_right = &x * (CMatrix::identity(16, 16) + p.matrix() * c);
        assert!(linalg::max_abs_diff(&right, &dense_right) < 1e-13);
    }

    proptest! {
        #[test]
        fn permutation_squares_to_identity(n in 2usize..=6, i in 1usize..=6, j in 1usize..=6) {
            prop_assume!(i <= n && j <= n && i != j);
            let p = permutation(i, j, n).unwrap();
            let sq = p.matrix() * p.matrix();
            let id = QuantumOperator::identity(n);
            prop_assert_eq!(&sq, id.matrix());
            prop_assert_eq!(p.matrix(), &p.matrix().transpose());
        }

        #[test]
        fn embeds_on_distinct_sites_commute(
            n in 2usize..=5, j in 1usize..=5, k in 1usize..=5,
            a in proptest::array::uniform8(-1.0f64..1.0),
        ) {
            prop_assume!(j <= n && k <= n && j != k);
            let la = Local::new(C64::new(a[0], a[1]), C64::new(a[2], a[3]), C64::new(a[4], a[5]), C64::new(a[6], a[7]));
            let lb = Local::new(C64::new(a[7], a[5]), C64::new(a[3], a[1]), C64::new(a[0], a[2]), C64::new(a[4], a[6]));
            let ea = embed_local(&la, j, n).unwrap();
            let eb = embed_local(&lb, k, n).unwrap();
            prop_assert!(linalg::commutator_norm(ea.matrix(), eb.matrix()) < 1e-14);
        }

        #[test]
        fn sectors_partition_the_space(n in 1usize..=10) {
            let mut seen = vec![false; 1 << n];
            let mut total = 0;
            for m in 0..=n {
                let b = sector_basis(n, m).unwrap();
                prop_assert_eq!(b.len() as f64, linalg::binomial(n, m));
                prop_assert!(b.indices().windows(2).all(|w| w[0] < w[1]));
                for &k in b.indices() {
                    prop_assert!(!seen[k]);
                    seen[k] = true;
                }
                total += b.len();
            }
            prop_assert_eq!(total, 1 << n);
        }
    }
}
