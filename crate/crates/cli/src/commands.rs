//! The workflows behind each command. Each one fills an [`Outcome`] as it
//! goes so that a failure part-way still leaves a usable report.

use qcdual_core::bethe::{self, BetheModel, BetheOptions};
use qcdual_core::chain::{ChainParams, GaudinParams};
use qcdual_core::classical::{self, ClassicalState, IntegratorOptions, LaxKind};
use qcdual_core::duality::{self, InverseOptions};
use qcdual_core::spectra::{self, JointSpectrumRecord, SpectrumOptions};
use qcdual_core::{Error, Result, C64};
use serde_json::{json, Map, Value};

use crate::config::{Command, Kind, Model, Resolved};
use crate::report::{complex, complexes, fmt_f64, Check};

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub payload: Map<String, Value>,
    pub checks: Vec<Check>,
    pub table: Option<Table>,
    pub error: Option<String>,
}

impl Outcome {
    fn push(&mut self, key: &str, v: Value) {
        match self.payload.entry(key).or_insert_with(|| Value::Array(Vec::new())) {
            Value::Array(a) => a.push(v),
            other => *other = Value::Array(vec![v]),
        }
    }

    fn check(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(Check::new(name, value, limit));
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(Check::passed)
    }
}

pub fn execute(r: &Resolved) -> Outcome {
    let mut out = Outcome::default();
    let res = match (&r.model, r.command) {
        (Model::Chain(p), Command::Spectrum) => spectrum(r, p, &mut out),
        (Model::Chain(p), Command::Duality) => duality_cmd(r, p, &mut out),
        (Model::Chain(p), Command::Invert) => invert(r, p, &mut out),
        (Model::Chain(p), Command::Bethe) => bethe_cmd(r, p, &mut out),
        (Model::Gaudin(g), Command::Gaudin) => gaudin(r, g, &mut out),
        (Model::Gaudin(g), Command::Limits) => limits(r, g, &mut out),
        (Model::Classical, Command::Dynamics) => dynamics(r, &mut out),
        _ => unreachable!("resolve pairs each command with its model"),
    };
    if let Err(e) = res {
        if let Error::NearCollision { time, i, j, last } = &e {
            out.payload.insert(
                "collision".into(),
                json!({ "time": time, "pair": [i, j], "last": state_json(last) }),
            );
        }
        out.error = Some(e.to_string());
    }
    out
}

fn spectrum_options(r: &Resolved) -> SpectrumOptions {
    SpectrumOptions { seed: r.seed, ..Default::default() }
}

fn record_json(rec: &JointSpectrumRecord) -> Value {
    json!({ "h": complexes(&rec.h), "sum": complex(rec.sum()), "residual": rec.residual })
}

fn spectrum_table(n: usize) -> Table {
    let mut header = vec!["m".to_string(), "index".to_string()];
    for i in 1..=n {
        header.push(format!("h{i}_re"));
        header.push(format!("h{i}_im"));
    }
    header.push("residual".into());
    Table { header, rows: Vec::new() }
}

fn table_rows(table: &mut Option<Table>, m: usize, recs: &[JointSpectrumRecord]) {
    if let Some(t) = table {
        for (k, rec) in recs.iter().enumerate() {
            let mut row = vec![m.to_string(), k.to_string()];
            for z in &rec.h {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            row.push(fmt_f64(rec.residual));
            t.rows.push(row);
        }
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn spectrum(r: &Resolved, p: &ChainParams, out: &mut Outcome) -> Result<()> {
    out.table = Some(spectrum_table(p.n()));
    let opts = spectrum_options(r);
    for &m in &r.sectors {
        let recs = spectra::joint_spectrum_with(p, m, &opts)?;
        let sum_rule = max_of(recs.iter().map(|rec| spectra::sum_rule_residual(p, rec)));
        let residual = max_of(recs.iter().map(|rec| rec.residual));
        table_rows(&mut out.table, m, &recs);
        out.push(
            "sectors",
            json!({
                "m": m,
                "records": recs.iter().map(record_json).collect::<Vec<_>>(),
                "max_residual": residual,
                "max_sum_rule_residual": sum_rule,
            }),
        );
        out.check(format!("eigenpair residual, M={m}"), residual, r.tol);
        out.check(format!("sum rule, M={m}"), sum_rule, 1e-10);
    }
    Ok(())
}

fn duality_json(rep: &duality::DualityReport, recs: &[JointSpectrumRecord], target: &[C64]) -> Value {
    let records: Vec<Value> = recs
        .iter()
        .zip(rep.distances.iter().zip(&rep.passed))
        .map(|(rec, (d, ok))| json!({ "h": complexes(&rec.h), "distance": d, "passed": ok }))
        .collect();
    json!({
        "m": rep.m,
        "target": complexes(target),
        "records": records,
        "tolerance": rep.tolerance,
        "max_distance": rep.max_distance,
        "passed": rep.all_passed(),
    })
}

fn duality_cmd(r: &Resolved, p: &ChainParams, out: &mut Outcome) -> Result<()> {
    let opts = spectrum_options(r);
    let (w1, w2) = p.twist();
    for &m in &r.sectors {
        let recs = spectra::joint_spectrum_with(p, m, &opts)?;
        let rep = duality::verify_duality_with(p, m, &recs, r.tol)?;
        let target = duality::target_coefficients(p.n(), m, w1, w2)?;
        out.push("sectors", duality_json(&rep, &recs, &target));
        out.check(format!("duality distance, M={m}"), rep.max_distance, rep.tolerance);
    }
    Ok(())
}

fn invert(r: &Resolved, p: &ChainParams, out: &mut Outcome) -> Result<()> {
    let opts = InverseOptions { starts: r.starts, seed: r.seed };
    for &m in &r.sectors {
        let recs = spectra::joint_spectrum_with(p, m, &spectrum_options(r))?;
        let res = duality::solve_inverse_with(p, m, &recs, &opts)?;
        let solutions: Vec<Value> = res
            .solutions
            .iter()
            .map(|s| {
                json!({
                    "h": complexes(&s.h),
                    "residual": s.residual,
                    "matched": s.matched,
                    "record": s.record,
                    "multiplicity": s.multiplicity,
                })
            })
            .collect();
        let mut reached: Vec<usize> = res.solutions.iter().filter_map(|s| s.record).collect();
        reached.sort_unstable();
        reached.dedup();
        let missing = recs.len() - reached.len();
        let worst = max_of(res.solutions.iter().map(|s| s.residual));
        out.push(
            "sectors",
            json!({
                "m": m,
                "records": recs.iter().map(|rec| complexes(&rec.h)).collect::<Vec<_>>(),
                "solutions": solutions,
                "solution_count": res.solutions.len(),
                "matched_count": res.matched_count(),
                "unmatched_count": res.solutions.len() - res.matched_count(),
                "converged_starts": res.converged_starts,
                "failed_starts": res.failed_starts,
            }),
        );
        out.check(format!("records without a solution, M={m}"), missing as f64, 0.0);
        out.check(format!("solution residual, M={m}"), worst, r.tol);
    }
    Ok(())
}

fn bethe_cmd(r: &Resolved, p: &ChainParams, out: &mut Outcome) -> Result<()> {
    let model = BetheModel::XxxInhomogeneous(p.clone());
    let opts = BetheOptions { starts: r.starts, seed: r.seed, ..Default::default() };
    for &m in &r.sectors {
        let roots = bethe::solve_bethe(&model, m, &opts)?;
        let mut sets = Vec::with_capacity(roots.len());
        for set in &roots {
            let ev = bethe::eigenvalues_from_roots(&model, set)?;
            sets.push(json!({
                "u": complexes(&set.u),
                "residual": set.residual,
                "symmetric": complexes(&set.symmetric),
                "h": ev.h.as_deref().map(complexes),
                "transfer": ev.transfer.as_deref().map(complexes),
                "remainder": ev.remainder,
                "pole_residue": ev.pole_residue,
            }));
        }
        let cmp = bethe::bethe_vs_oracle(&model, m, &opts)?;
        out.push(
            "sectors",
            json!({
                "m": m,
                "root_sets": sets,
                "comparison": {
                    "root_sets": cmp.root_sets,
                    "matched_root_sets": cmp.matched_root_sets,
                    "matched_records": cmp.matched_records,
                    "records": cmp.records,
                    "matched_fraction": cmp.matched_fraction,
                    "max_deviation": cmp.max_deviation,
                },
            }),
        );
        out.check(format!("Bethe vs diagonalization, M={m}"), cmp.max_deviation, r.tol);
    }
    Ok(())
}

fn gaudin(r: &Resolved, g: &GaudinParams, out: &mut Outcome) -> Result<()> {
    out.table = Some(spectrum_table(g.n()));
    let (w1, w2) = g.omega();
    for &m in &r.sectors {
        let recs = spectra::gaudin_joint_spectrum_with(g, m, &spectrum_options(r))?;
        let trace = spectra::gaudin_trace_residual(g, m, &recs)?;
        let rep = duality::verify_gaudin_duality_with(g, m, &recs, r.tol)?;
        let target = duality::target_coefficients(g.n(), m, w1, w2)?;
        table_rows(&mut out.table, m, &recs);
        let mut sector = duality_json(&rep, &recs, &target);
        sector["trace_residual"] = json!(trace);
        sector["records"] = Value::Array(
            recs.iter()
                .zip(sector["records"].as_array().cloned().unwrap_or_default())
                .map(|(rec, mut v)| {
                    v["residual"] = json!(rec.residual);
                    v
                })
                .collect(),
        );
        out.push("sectors", sector);
        out.check(format!("CM duality distance, M={m}"), rep.max_distance, rep.tolerance);
        out.check(format!("trace identity, M={m}"), trace, 1e-10);
    }
    Ok(())
}

fn state_json(s: &ClassicalState) -> Value {
    json!({ "x": complexes(&s.x), "v": complexes(&s.v) })
}

fn integrals(kind: LaxKind, s: &ClassicalState) -> Result<Vec<C64>> {
    (1..=s.n())
        .map(|k| match kind {
            LaxKind::Rs => classical::rs_integrals(s, k),
            LaxKind::Cm => classical::cm_integrals(s, k),
        })
        .collect()
}

fn dynamics(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let s = r.classical.as_ref().expect("dynamics carries an initial state");
    let d = &r.config.dynamics;
    let kind = match d.kind {
        Kind::Rs => LaxKind::Rs,
        Kind::Cm => LaxKind::Cm,
    };
    out.payload.insert("initial".into(), state_json(s));

    let r1 = classical::lax_residual(kind, &classical::lax_window(kind, s, 2.0 * d.dt)?, 2.0 * d.dt)?;
    let r2 = classical::lax_residual(kind, &classical::lax_window(kind, s, d.dt)?, d.dt)?;
    let ratio = r1 / r2;
    out.payload.insert("lax_residual".into(), json!({ "dt": d.dt, "at_dt": r2, "at_2dt": r1, "ratio": ratio }));
    out.check("Lax residual order |ratio - 4|", (ratio - 4.0).abs(), 0.5);

    let traj = classical::integrate_with(kind, s, d.t_end, d.dt, &IntegratorOptions::default())?;
    let p0 = classical::char_poly(&classical::lax(kind, s)?.entries);
    let i0 = integrals(kind, s)?;
    let (mut poly_drift, mut integral_drift) = (0.0f64, 0.0f64);
    for st in &traj.states {
        poly_drift = poly_drift.max(classical::char_poly(&classical::lax(kind, st)?.entries).relative_diff(&p0));
        for (a, b) in integrals(kind, st)?.iter().zip(&i0) {
            integral_drift = integral_drift.max((a - b).norm() / b.norm().max(1.0));
        }
    }
    out.payload.insert("steps".into(), json!(traj.states.len() - 1));
    out.payload.insert("step".into(), json!(traj.times.get(1).copied().unwrap_or(0.0)));
    out.payload.insert("final".into(), state_json(traj.last()));
    out.payload.insert("initial_integrals".into(), complexes(&i0));
    out.payload.insert("spectral_drift".into(), json!(poly_drift));
    out.payload.insert("integral_drift".into(), json!(integral_drift));
    out.payload.insert("min_singular_distance".into(), json!(traj.states.iter().map(|s| s.singular_distance().0).fold(f64::INFINITY, f64::min)));
    out.check("Lax spectrum drift", poly_drift, r.tol);
    out.check("integral drift", integral_drift, r.tol);
    Ok(())
}

fn limits(r: &Resolved, g: &GaudinParams, out: &mut Outcome) -> Result<()> {
    let v: Vec<C64> = r.config.dynamics.v.as_ref().expect("resolved").iter().map(|z| z.0).collect();
    let table = duality::limit_checks(g, &v, &r.config.limits.etas)?;
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            json!({
                "eta": row.eta,
                "hamiltonian_error": row.hamiltonian_error,
                "lax_error": row.lax_error,
                "energy_error": row.energy_error,
            })
        })
        .collect();
    out.payload.insert("rows".into(), Value::Array(rows));
    out.payload.insert(
        "slopes".into(),
        json!({
            "hamiltonian": table.hamiltonian_slope,
            "lax": table.lax_slope,
            "energy": table.energy_slope,
        }),
    );
    let off = |s: f64, want: f64| if s.is_finite() { (s - want).abs() } else { f64::INFINITY };
    out.check("chain -> Gaudin order |slope - 1|", off(table.hamiltonian_slope, 1.0), r.tol);
    out.check("RS -> CM Lax order |slope - 1|", off(table.lax_slope, 1.0), r.tol);
    Ok(())
}
