//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report reads as a table; the
//! process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use qcdual_core::bethe::{self, BetheModel, BetheOptions};
use qcdual_core::chain::{self, ChainParams, GaudinParams};
use qcdual_core::classical::{self, ClassicalState, LaxKind};
use qcdual_core::duality::{self, InverseOptions};
use qcdual_core::linalg;
use qcdual_core::spectra::{self, eigendecompose};
use qcdual_core::tensorspace;
use qcdual_core::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn general_position(x: &[f64], eta: f64, gap: f64) -> bool {
    (0..x.len()).all(|i| {
        (0..i).all(|j| {
            let d = (x[i] - x[j]).abs();
            d > gap && (d - eta).abs() > gap
        })
    })
}

fn draw_chain(rng: &mut ChaCha8Rng, n: usize) -> ChainParams {
    loop {
        let eta = rng.random_range(0.1..2.0);
        let w = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0));
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        if general_position(&x, eta, 0.1) {
            return ChainParams::real(eta, w, &x).unwrap();
        }
    }
}

fn draw_gaudin(rng: &mut ChaCha8Rng, n: usize) -> GaudinParams {
    loop {
        let omega = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        if general_position(&x, f64::INFINITY, 0.1) {
            return GaudinParams::real(omega, &x).unwrap();
        }
    }
}

fn ac1_golden() -> Outcome {
    let start = Instant::now();
    let p = ChainParams::real(1.0, (2.0, 1.0), &[0.0, 2.0]).unwrap();
    let s3 = 3f64.sqrt();
    let expected = [
        vec![vec![1.0, 3.0]],
        vec![vec![(3.0 - s3) / 2.0, (3.0 + s3) / 2.0], vec![(3.0 + s3) / 2.0, (3.0 - s3) / 2.0]],
        vec![vec![0.5, 1.5]],
    ];
    let mut dev = 0.0f64;
    let mut counts_ok = true;
    for (m, exp) in expected.iter().enumerate() {
        let recs = spectra::joint_spectrum(&p, m).unwrap();
        counts_ok &= recs.len() == exp.len();
        for (r, e) in recs.iter().zip(exp) {
            let e: Vec<C64> = e.iter().map(|&v| c(v)).collect();
            dev = dev.max(linalg::max_abs_diff_slice(&r.h, &e));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        passed: counts_ok && dev < 1e-9 && elapsed < Duration::from_secs(1),
        detail: format!("max deviation {dev:.2e} (tol 1e-9), {:.3} s (limit 1 s)", elapsed.as_secs_f64()),
    }
}

fn ac2_forward_duality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac02);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for n in 1..=5 {
        for _ in 0..50 {
            let p = draw_chain(&mut rng, n);
            for m in 0..=n {
                let recs = spectra::joint_spectrum(&p, m).unwrap();
                let rep = duality::verify_duality(&p, m, &recs).unwrap();
                worst = worst.max(rep.max_distance / rep.tolerance * duality::DUALITY_TOL);
                checked += recs.len();
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        passed: worst < 1e-7 && elapsed < Duration::from_secs(120),
        detail: format!(
            "{checked} records, worst relative distance {worst:.2e} (tol 1e-7), {:.2} s (limit 120 s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn ac3_gaudin_duality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac03);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for n in 1..=5 {
        for _ in 0..50 {
            let gp = draw_gaudin(&mut rng, n);
            for m in 0..=n {
                let recs = spectra::gaudin_joint_spectrum(&gp, m).unwrap();
                let rep = duality::verify_gaudin_duality(&gp, m, &recs).unwrap();
                worst = worst.max(rep.max_distance / rep.tolerance * duality::DUALITY_TOL);
                checked += recs.len();
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        passed: worst < 1e-7 && elapsed < Duration::from_secs(120),
        detail: format!(
            "{checked} records, worst relative distance {worst:.2e} (tol 1e-7), {:.2} s (limit 120 s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn ac4_inverse() -> Outcome {
    let opts = InverseOptions { starts: 200, ..Default::default() };
    let mut notes = Vec::new();
    let mut ok = true;

    let mut rng = ChaCha8Rng::seed_from_u64(0xac04);
    let mut sectors = 0;
    for n in 1..=4 {
        for _ in 0..3 {
            let p = draw_chain(&mut rng, n);
            for m in 0..=n {
                let recs = spectra::joint_spectrum(&p, m).unwrap();
                let out = duality::solve_inverse_with(&p, m, &recs, &opts).unwrap();
                let want = linalg::binomial(n, m) as usize;
                let distinct_records = {
                    let mut idx: Vec<usize> = out.solutions.iter().filter_map(|s| s.record).collect();
                    idx.sort();
                    idx.dedup();
                    idx.len()
                };
                sectors += 1;
                if distinct_records != want {
                    ok = false;
                    notes.push(format!("N={n} M={m}: matched {distinct_records} of {want}"));
                }
            }
        }
    }

    // the two-site example: extra solutions exactly at M = 0 and M = 2
    let p = ChainParams::real(1.0, (2.0, 1.0), &[0.0, 2.0]).unwrap();
    let unmatched_expected: [Option<[f64; 2]>; 3] = [Some([3.0, 1.0]), None, Some([1.5, 0.5])];
    for (m, extra) in unmatched_expected.iter().enumerate() {
        let recs = spectra::joint_spectrum(&p, m).unwrap();
        let out = duality::solve_inverse_with(&p, m, &recs, &opts).unwrap();
        let unmatched: Vec<_> = out.solutions.iter().filter(|s| !s.matched).collect();
        let good = match extra {
            None => unmatched.is_empty() && out.matched_count() == recs.len(),
            Some(e) => {
                unmatched.len() == 1
                    && linalg::max_abs_diff_slice(&unmatched[0].h, &[c(e[0]), c(e[1])]) < 1e-6
                    && out.matched_count() == recs.len()
            }
        };
        if !good {
            ok = false;
            notes.push(format!("two-site M={m}: {} solutions, {} unmatched", out.solutions.len(), unmatched.len()));
        }
    }
    Outcome {
        passed: ok,
        detail: if notes.is_empty() {
            format!("{sectors} random sectors fully recovered (200 starts); two-site extra solutions as expected")
        } else {
            notes.join("; ")
        },
    }
}

fn ac5_bethe() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac05);
    let opts = BetheOptions::default();
    let mut worst = 0.0f64;
    let mut root_sets = 0;
    let mut matched_records = 0;
    let mut records = 0;
    let mut ok = true;
    for n in 2..=4 {
        for _ in 0..3 {
            let p = draw_chain(&mut rng, n);
            for m in 1..=n / 2 {
                let cmp = bethe::bethe_vs_oracle(&BetheModel::XxxInhomogeneous(p.clone()), m, &opts).unwrap();
                worst = worst.max(cmp.max_deviation);
                root_sets += cmp.root_sets;
                matched_records += cmp.matched_records;
                records += cmp.records;
                ok &= cmp.root_sets > 0;
            }
        }
    }
    let mut hom_worst = 0.0f64;
    let mut hom_sets = 0;
    for n in 2..=6 {
        for m in 1..=n / 2 {
            let cmp = bethe::bethe_vs_oracle(&BetheModel::XxxHomogeneous { n, eta: c(1.0) }, m, &opts).unwrap();
            hom_worst = hom_worst.max(cmp.max_deviation);
            hom_sets += cmp.root_sets;
            ok &= cmp.root_sets > 0;
        }
    }
    Outcome {
        passed: ok && worst < 1e-7 && hom_worst < 1e-8,
        detail: format!(
            "inhomogeneous: {root_sets} root sets, worst deviation {worst:.2e} (tol 1e-7), {matched_records}/{records} records reached; \
             homogeneous: {hom_sets} root sets, worst energy deviation {hom_worst:.2e} (tol 1e-8)"
        ),
    }
}

fn random_classical(rng: &mut ChaCha8Rng, n: usize) -> (Vec<C64>, Vec<C64>, C64) {
    loop {
        let eta = C64::new(rng.random_range(0.1..0.9), rng.random_range(-0.2..0.2));
        let x: Vec<C64> = (0..n).map(|k| C64::new(k as f64 * 0.8 + rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))).collect();
        let h: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.5..1.5), rng.random_range(-0.5..0.5))).collect();
        let ok = (0..n).all(|i| (0..i).all(|j| {
            let d = x[i] - x[j];
            d.norm() > 0.1 && (d - eta).norm() > 0.1 && (d + eta).norm() > 0.1
        }));
        if ok {
            return (x, h, eta);
        }
    }
}

fn ac6_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac06);
    let (mut qc5, mut qc6, mut cauchy, mut newton) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 1..=8 {
        for _ in 0..100 {
            let (x, h, eta) = random_classical(&mut rng, n);
            let v: Vec<C64> = h.iter().map(|z| -z).collect();
            let y = classical::rs_lax(&ClassicalState::rs(x.clone(), v, eta).unwrap()).unwrap().entries;
            let closed = classical::rs_char_poly_closed(&x, &h, eta).unwrap();
            qc5 = qc5.max(classical::char_poly(&y).relative_diff(&closed));
            if n <= 6 {
                qc6 = qc6.max(classical::rs_char_poly_eps_sum(&x, &h, eta).unwrap().relative_diff(&closed));
            }
            let f = classical::cauchy_det(&x, eta).unwrap();
            let d = classical::cauchy_det_direct(&x, eta).unwrap();
            cauchy = cauchy.max((f - d).norm() / f.norm());
            newton = newton.max(classical::newton_residual(&closed, &classical::power_sums(&y)).unwrap());
        }
    }
    Outcome {
        passed: qc5 < 1e-10 && qc6 < 1e-12 && cauchy < 1e-12 && newton < 1e-9,
        detail: format!(
            "closed form vs det {qc5:.2e} (1e-10), eps-sum {qc6:.2e} (1e-12), Cauchy {cauchy:.2e} (1e-12), Newton {newton:.2e} (1e-9)"
        ),
    }
}

fn sorted_eigenvalues(y: &CMatrix) -> Vec<C64> {
    let mut e = eigendecompose(y).unwrap().values;
    e.sort_by(|a, b| spectra::compare_tuples(&[*a], &[*b]));
    e
}

fn ac7_dynamics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac07);
    let (mut eig_drift, mut h_drift) = (0.0f64, 0.0f64);
    let mut ratios = Vec::new();
    for _ in 0..5 {
        let s = loop {
            let x: Vec<C64> = (0..3).map(|k| c(k as f64 * 1.5 - 1.5 + rng.random_range(-0.2..0.2))).collect();
            let v: Vec<C64> = (0..3).map(|_| c(rng.random_range(-1.2..-0.8))).collect();
            let eta = c(rng.random_range(0.2..0.6));
            if let Ok(s) = ClassicalState::rs(x, v, eta) {
                if s.singular_distance().0 > 0.3 {
                    break s;
                }
            }
        };
        let traj = classical::integrate(LaxKind::Rs, &s, 1.0, 1e-3).unwrap();
        let e0 = sorted_eigenvalues(&classical::rs_lax(&s).unwrap().entries);
        let h0 = classical::rs_integrals(&s, 1).unwrap();
        for st in &traj.states {
            let e = sorted_eigenvalues(&classical::rs_lax(st).unwrap().entries);
            eig_drift = eig_drift.max(linalg::max_abs_diff_slice(&e0, &e));
            h_drift = h_drift.max((classical::rs_integrals(st, 1).unwrap() - h0).norm());
        }
        let mid = &traj.states[traj.states.len() / 2];
        let r = |dt: f64| classical::lax_residual(LaxKind::Rs, &classical::lax_window(LaxKind::Rs, mid, dt).unwrap(), dt).unwrap();
        ratios.push(r(1e-2) / r(5e-3));
    }
    let ratio_ok = ratios.iter().all(|r| (r - 4.0).abs() < 0.5);
    let ratio_text: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Outcome {
        passed: eig_drift < 1e-8 && h_drift < 1e-8 && ratio_ok,
        detail: format!(
            "eigenvalue drift {eig_drift:.2e}, H_1 drift {h_drift:.2e} (tol 1e-8); residual ratios [{}] (4 +- 0.5)",
            ratio_text.join(", ")
        ),
    }
}

fn ac8_limits() -> Outcome {
    let etas = [1e-1, 1e-2, 1e-3, 1e-4];
    let cases = [
        (GaudinParams::real((0.8, -0.3), &[0.0, 1.2]).unwrap(), vec![c(0.4), c(-0.7)]),
        (GaudinParams::real((1.1, 0.2), &[0.0, 1.2, -0.9]).unwrap(), vec![c(0.4), c(-0.7), c(0.3)]),
    ];
    let mut slopes = Vec::new();
    for (gp, v) in &cases {
        let t = duality::limit_checks(gp, v, &etas).unwrap();
        slopes.push((t.hamiltonian_slope, t.lax_slope));
    }
    let ok = slopes.iter().all(|(a, b)| (a - 1.0).abs() < 0.1 && (b - 1.0).abs() < 0.1);
    let text: Vec<String> = slopes.iter().map(|(a, b)| format!("H {a:.3} / Y {b:.3}")).collect();
    Outcome { passed: ok, detail: format!("orders per N=2,3: {} (1.0 +- 0.1)", text.join("; ")) }
}

fn ac9_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac09);
    let (mut comm, mut sum_rule) = (0.0f64, 0.0f64);
    for n in 1..=5 {
        for _ in 0..3 {
            let p = loop {
                let eta = rng.random_range(0.2..0.8);
                let w = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
                if general_position(&x, eta, 0.05) {
                    break ChainParams::real(eta, w, &x).unwrap();
                }
            };
            let hs = chain::nonlocal_hamiltonians(&p).unwrap();
            let mag = tensorspace::magnon_number(n).unwrap();
            for a in &hs {
                comm = comm.max(linalg::commutator_norm(a.matrix(), mag.matrix()));
                for b in &hs {
                    comm = comm.max(linalg::commutator_norm(a.matrix(), b.matrix()));
                }
            }
            let t1 = chain::transfer_matrix(&p, C64::new(0.3, 0.1));
            let t2 = chain::transfer_matrix(&p, C64::new(-0.7, 0.5));
            comm = comm.max(linalg::commutator_norm(t1.matrix(), t2.matrix()));
            let total = hs.iter().fold(CMatrix::zeros(1 << n, 1 << n), |acc, h| acc + h.matrix());
            sum_rule = sum_rule.max(linalg::max_abs_diff(&total, chain::twist_sum(&p).matrix()));
        }
        if n >= 2 {
            let h = tensorspace::heisenberg_hamiltonian(n).unwrap();
            let mag = tensorspace::magnon_number(n).unwrap();
            comm = comm.max(linalg::commutator_norm(h.matrix(), mag.matrix()));
        }
    }
    Outcome {
        passed: comm < 1e-10 && sum_rule < 1e-10,
        detail: format!("max commutator {comm:.2e}, sum rule {sum_rule:.2e} (tol 1e-10)"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AC1 two-site golden spectrum", ac1_golden),
        ("AC2 forward RS duality sweep", ac2_forward_duality),
        ("AC3 Gaudin/CM duality sweep", ac3_gaudin_duality),
        ("AC4 inverse problem recovery", ac4_inverse),
        ("AC5 Bethe cross-validation", ac5_bethe),
        ("AC6 closed-form identities", ac6_identities),
        ("AC7 classical dynamics", ac7_dynamics),
        ("AC8 eta -> 0 limits", ac8_limits),
        ("AC9 algebraic structure", ac9_structure),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let out = run();
        if !out.passed {
            failures += 1;
        }
        println!("[{}] {name}: {}", if out.passed { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
