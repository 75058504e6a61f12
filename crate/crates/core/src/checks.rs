//! A compact battery of invariants at small sizes, one row per check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bethe::{self, BetheModel, BetheOptions};
use crate::chain::{self, ChainParams, GaudinParams};
use crate::classical::{self, ClassicalState, LaxKind};
use crate::duality;
use crate::spectra;
use crate::tensorspace;
use crate::{linalg, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn row(name: &'static str, value: f64, tolerance: f64) -> CheckRow {
    CheckRow { name, value, tolerance, passed: value.is_finite() && value < tolerance }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn random_chain(rng: &mut ChaCha8Rng, n: usize) -> ChainParams {
    loop {
        let eta = rng.random_range(0.2..0.8);
        let w = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        let ok = (0..n).all(|i| (0..i).all(|j| {
            let d = (x[i] - x[j]).abs();
            d > 0.05 && (d - eta).abs() > 0.05
        }));
        if ok {
            if let Ok(p) = ChainParams::real(eta, w, &x) {
                return p;
            }
        }
    }
}

/// Runs every check; `seed` fixes the random parameters.
pub fn run_checks(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();

    let mut perm = 0.0f64;
    for n in 2..=5 {
        for i in 1..=n {
            for j in i + 1..=n {
                let p = tensorspace::permutation(i, j, n)?.into_matrix();
                perm = perm.max(linalg::max_abs_diff(&(&p * &p), &crate::CMatrix::identity(1 << n, 1 << n)));
            }
        }
    }
    rows.push(row("permutation squares to identity", perm, 1e-15));

    let mut hm = 0.0f64;
    for n in 2..=6 {
        let h = tensorspace::heisenberg_hamiltonian(n)?;
        let m = tensorspace::magnon_number(n)?;
        hm = hm.max(linalg::commutator_norm(h.matrix(), m.matrix()));
    }
    rows.push(row("[H_xxx, M] = 0", hm, 1e-12));

    let eta = C64::new(0.7, 0.2);
    rows.push(row("Yang-Baxter equation", chain::yang_baxter_residual(eta, C64::new(0.3, -0.4), C64::new(-0.8, 0.5)), 1e-12));

    let p3 = random_chain(&mut rng, 3);
    let mut rll = 0.0f64;
    for j in 1..=3 {
        rll = rll.max(chain::check_rll(&p3, j, C64::new(0.4, 0.1), C64::new(-0.3, 0.6))?);
    }
    rows.push(row("RLL relation", rll, 1e-12));

    let ta = chain::transfer_matrix(&p3, C64::new(0.2, 0.3));
    let tb = chain::transfer_matrix(&p3, C64::new(-1.1, 0.4));
    rows.push(row("[T(x), T(y)] = 0", linalg::commutator_norm(ta.matrix(), tb.matrix()), 1e-10));

    let mut comm = 0.0f64;
    let mut sum_rule = 0.0f64;
    let mut cross = 0.0f64;
    for n in 2..=5 {
        let p = random_chain(&mut rng, n);
        let hs = chain::nonlocal_hamiltonians(&p)?;
        for a in &hs {
            for b in &hs {
                comm = comm.max(linalg::commutator_norm(a.matrix(), b.matrix()));
            }
        }
        let total = hs.iter().fold(crate::CMatrix::zeros(1 << n, 1 << n), |acc, h| acc + h.matrix());
        sum_rule = sum_rule.max(linalg::max_abs_diff(&total, chain::twist_sum(&p).matrix()));
        let residue = chain::residue_hamiltonians(&p);
        for (a, b) in hs.iter().zip(&residue) {
            cross = cross.max(linalg::max_abs_diff(a.matrix(), b.matrix()));
        }
    }
    rows.push(row("[H_i, H_j] = 0, N <= 5", comm, 1e-10));
    rows.push(row("sum_i H_i = sum_i g^(i)", sum_rule, 1e-10));
    rows.push(row("ordered product = residue form", cross, 1e-8));

    let golden = ChainParams::real(1.0, (2.0, 1.0), &[0.0, 2.0])?;
    let s3 = 3f64.sqrt();
    let expected: [Vec<Vec<f64>>; 3] = [
        vec![vec![1.0, 3.0]],
        vec![vec![(3.0 - s3) / 2.0, (3.0 + s3) / 2.0], vec![(3.0 + s3) / 2.0, (3.0 - s3) / 2.0]],
        vec![vec![0.5, 1.5]],
    ];
    let mut gold = 0.0f64;
    for (m, exp) in expected.iter().enumerate() {
        let recs = spectra::joint_spectrum(&golden, m)?;
        if recs.len() != exp.len() {
            gold = f64::INFINITY;
            continue;
        }
        for (r, e) in recs.iter().zip(exp) {
            let e: Vec<C64> = e.iter().map(|&v| c(v)).collect();
            gold = gold.max(linalg::max_abs_diff_slice(&r.h, &e));
        }
    }
    rows.push(row("two-site golden spectrum", gold, 1e-9));

    let mut dual = 0.0f64;
    let p4 = random_chain(&mut rng, 4);
    for m in 0..=4 {
        let rep = duality::verify_duality(&p4, m, &spectra::joint_spectrum(&p4, m)?)?;
        dual = dual.max(rep.max_distance / rep.tolerance * duality::DUALITY_TOL);
    }
    rows.push(row("RS duality, N = 4, all M", dual, duality::DUALITY_TOL));

    let gp = GaudinParams::real((0.9, -0.4), &[0.0, 1.1, -0.7, 2.3])?;
    let mut gdual = 0.0f64;
    for m in 0..=4 {
        let rep = duality::verify_gaudin_duality(&gp, m, &spectra::gaudin_joint_spectrum(&gp, m)?)?;
        gdual = gdual.max(rep.max_distance / rep.tolerance * duality::DUALITY_TOL);
    }
    rows.push(row("CM duality, N = 4, all M", gdual, duality::DUALITY_TOL));

    let inv = duality::solve_inverse(&golden, 0, 40)?;
    let extra = (inv.solutions.len() as f64 - 2.0).abs() + (inv.matched_count() as f64 - 1.0).abs();
    rows.push(row("inverse problem, two sites, M = 0", extra, 0.5));

    // classical identities at N = 6
    let x: Vec<C64> = (0..6).map(|k| C64::new(k as f64 * 0.9 + rng.random_range(0.0..0.3), rng.random_range(-0.3..0.3))).collect();
    let h: Vec<C64> = (0..6).map(|_| C64::new(rng.random_range(0.5..1.5), rng.random_range(-0.3..0.3))).collect();
    let ceta = C64::new(0.45, 0.1);
    let cd = (classical::cauchy_det(&x, ceta)? - classical::cauchy_det_direct(&x, ceta)?).norm() / classical::cauchy_det(&x, ceta)?.norm();
    rows.push(row("Cauchy determinant", cd, 1e-12));
    let v: Vec<C64> = h.iter().map(|z| -z).collect();
    let state = ClassicalState::rs(x.clone(), v.clone(), ceta)?;
    let y = classical::rs_lax(&state)?.entries;
    let closed = classical::rs_char_poly_closed(&x, &h, ceta)?;
    rows.push(row("closed-form RS characteristic polynomial", classical::char_poly(&y).relative_diff(&closed), 1e-10));
    rows.push(row("epsilon-sum form", classical::rs_char_poly_eps_sum(&x, &h, ceta)?.relative_diff(&closed), 1e-12));
    rows.push(row("Newton identity", classical::newton_residual(&closed, &classical::power_sums(&y))?, 1e-9));
    rows.push(row("[X,Y] = eta Y + eta Xdot E", classical::commutation_residual(&state)?, 1e-12));
    let cm_state = ClassicalState::cm(x.clone(), v)?;
    let ycm = classical::cm_lax(&cm_state)?.entries;
    rows.push(row(
        "closed-form CM characteristic polynomial",
        classical::char_poly(&ycm).relative_diff(&classical::cm_char_poly_closed(&x, &h)?),
        1e-10,
    ));

    let rs3 = ClassicalState::rs(vec![c(-1.5), c(0.1), c(1.7)], vec![c(-0.8), c(-1.1), c(-0.9)], c(0.4))?;
    let traj = classical::integrate(LaxKind::Rs, &rs3, 1.0, 1e-3)?;
    let drift = (classical::rs_integrals(&rs3, 1)? - classical::rs_integrals(traj.last(), 1)?).norm();
    rows.push(row("H_1^RS drift, N = 3", drift, 1e-8));
    let r = |dt: f64| -> Result<f64> { classical::lax_residual(LaxKind::Rs, &classical::lax_window(LaxKind::Rs, &rs3, dt)?, dt) };
    rows.push(row("Lax residual order (|ratio - 4|)", (r(2e-2)? / r(1e-2)? - 4.0).abs(), 0.5));

    let lgp = GaudinParams::real((0.8, -0.3), &[0.0, 1.2, -0.9])?;
    let table = duality::limit_checks(&lgp, &[c(0.4), c(-0.7), c(0.2)], &[1e-1, 1e-2, 1e-3, 1e-4])?;
    rows.push(row("chain -> Gaudin order (|slope - 1|)", (table.hamiltonian_slope - 1.0).abs(), 0.1));
    rows.push(row("RS -> CM Lax order (|slope - 1|)", (table.lax_slope - 1.0).abs(), 0.1));

    let cmp = bethe::bethe_vs_oracle(&BetheModel::XxxInhomogeneous(p3), 1, &BetheOptions::default())?;
    rows.push(row("Bethe vs diagonalization, N = 3", cmp.max_deviation, bethe::ORACLE_MATCH_TOL));
    let hom = bethe::bethe_vs_oracle(&BetheModel::XxxHomogeneous { n: 4, eta: c(1.0) }, 2, &BetheOptions::default())?;
    rows.push(row("homogeneous Bethe energies, N = 4", hom.max_deviation, 1e-8));

    Ok(rows)
}
