use super::{b_matrix, lax, ClassicalState, LaxKind};
use crate::{linalg, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Minimum allowed distance to the singular set.
    pub collision_tol: f64,
    /// How many times a step may be split in half before aborting.
    pub max_halvings: u32,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { collision_tol: 1e-6, max_halvings: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: LaxKind,
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
}

impl Trajectory {
    pub fn last(&self) -> &ClassicalState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn acceleration(kind: LaxKind, x: &[C64], v: &[C64], eta: Option<C64>) -> Vec<C64> {
    let n = x.len();
    let mut a = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for k in 0..n {
            if k == i {
                continue;
            }
            let d = x[i] - x[k];
            a[i] -= match kind {
                LaxKind::Rs => {
                    let eta = eta.expect("RS state carries eta");
                    2.0 * eta * eta * v[i] * v[k] / (d * (d * d - eta * eta))
                }
                LaxKind::Cm => 2.0 / (d * d * d),
            };
        }
    }
    a
}

fn rk4(kind: LaxKind, s: &ClassicalState, h: f64) -> ClassicalState {
    let n = s.n();
    let axpy = |base: &[C64], k: &[C64], c: f64| -> Vec<C64> { (0..n).map(|i| base[i] + k[i] * c).collect() };

    let k1x = s.v.clone();
    let k1v = acceleration(kind, &s.x, &s.v, s.eta);
    let (x2, v2) = (axpy(&s.x, &k1x, h / 2.0), axpy(&s.v, &k1v, h / 2.0));
    let k2x = v2.clone();
    let k2v = acceleration(kind, &x2, &v2, s.eta);
    let (x3, v3) = (axpy(&s.x, &k2x, h / 2.0), axpy(&s.v, &k2v, h / 2.0));
    let k3x = v3.clone();
    let k3v = acceleration(kind, &x3, &v3, s.eta);
    let (x4, v4) = (axpy(&s.x, &k3x, h), axpy(&s.v, &k3v, h));
    let k4v = acceleration(kind, &x4, &v4, s.eta);
    let k4x = v4;

    let x = (0..n).map(|i| s.x[i] + (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]) * (h / 6.0)).collect();
    let v = (0..n).map(|i| s.v[i] + (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]) * (h / 6.0)).collect();
    ClassicalState { x, v, eta: s.eta }
}

fn check_kind(kind: LaxKind, s: &ClassicalState) -> Result<()> {
    match (kind, s.eta) {
        (LaxKind::Rs, None) => Err(Error::InvalidArgument("RS integration needs eta".into())),
        (LaxKind::Cm, Some(_)) => Err(Error::InvalidArgument("CM state must not carry eta".into())),
        _ => Ok(()),
    }
}

/// One step of size `h`, split into halves up to `halvings` times when the
/// full step lands too close to the singular set.
fn guarded_step(kind: LaxKind, s: &ClassicalState, h: f64, halvings: u32, tol: f64) -> Option<ClassicalState> {
    let next = rk4(kind, s, h);
    if next.singular_distance().0 >= tol {
        return Some(next);
    }
    if halvings == 0 {
        return None;
    }
    let mid = guarded_step(kind, s, h / 2.0, halvings - 1, tol)?;
    guarded_step(kind, &mid, h / 2.0, halvings - 1, tol)
}

pub fn integrate(kind: LaxKind, s: &ClassicalState, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_with(kind, s, t_end, dt, &IntegratorOptions::default())
}

/// Fixed-step RK4 on `(x, xdot)`. The step is adjusted so that an integer
/// number of steps reaches `t_end`. If the motion approaches the singular set
/// the integration stops with [`Error::NearCollision`], carrying the last
/// accepted state.
pub fn integrate_with(kind: LaxKind, s: &ClassicalState, t_end: f64, dt: f64, opts: &IntegratorOptions) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be non-negative, got {t_end}")));
    }
    check_kind(kind, s)?;
    s.validate()?;
    let steps = (t_end / dt).round().max(if t_end > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };

    let mut times = vec![0.0];
    let mut states = vec![s.clone()];
    for k in 1..=steps {
        let cur = states.last().unwrap();
        match guarded_step(kind, cur, h, opts.max_halvings, opts.collision_tol) {
            Some(next) => {
                times.push(k as f64 * h);
                states.push(next);
            }
            None => {
                let probe = rk4(kind, cur, h);
                let (_, (i, j)) = probe.singular_distance();
                return Err(Error::NearCollision { time: times[k - 1], i, j, last: Box::new(cur.clone()) });
            }
        }
    }
    Ok(Trajectory { kind, times, states })
}

/// States at `t - dt`, `t`, `t + dt` around `s`, each neighbour reached by
/// one RK4 step.
pub fn lax_window(kind: LaxKind, s: &ClassicalState, dt: f64) -> Result<[ClassicalState; 3]> {
    check_kind(kind, s)?;
    s.validate()?;
    Ok([rk4(kind, s, -dt), s.clone(), rk4(kind, s, dt)])
}

/// `max |dY/dt - [B, Y]|` at the middle point of three equally spaced
/// states, with `dY/dt` by central differences.
pub fn lax_residual(kind: LaxKind, window: &[ClassicalState; 3], dt: f64) -> Result<f64> {
    let y0 = lax(kind, &window[0])?.entries;
    let y1 = lax(kind, &window[1])?.entries;
    let y2 = lax(kind, &window[2])?.entries;
    let b = b_matrix(kind, &window[1])?;
    let ydot = (y2 - y0) / C64::new(2.0 * dt, 0.0);
    Ok(linalg::max_norm(&(ydot - linalg::commutator(&b, &y1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{rs_integrals, rs_lax};
    use crate::spectra::eigendecompose;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }
    fn cv(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x)).collect()
    }

    #[test]
    fn free_particle() {
        let s = ClassicalState::rs(cv(&[0.5]), cv(&[-1.25]), c(0.3)).unwrap();
        let tr = integrate(LaxKind::Rs, &s, 2.0, 0.1).unwrap();
        assert_eq!(tr.states.len(), 21);
        assert!((tr.last().x[0] - c(0.5 - 2.5)).norm() < 1e-13);
        let w = lax_window(LaxKind::Rs, &s, 1e-3).unwrap();
        assert!(lax_residual(LaxKind::Rs, &w, 1e-3).unwrap() < 1e-12);
    }

    #[test]
    fn cm_center_of_mass() {
        let s = ClassicalState::cm(cv(&[-1.0, 1.0]), cv(&[0.3, -0.1])).unwrap();
        let tr = integrate(LaxKind::Cm, &s, 1.0, 1e-3).unwrap();
        let total = |st: &ClassicalState| st.v.iter().sum::<C64>();
        for st in &tr.states {
            assert!((total(st) - c(0.2)).norm() < 1e-10);
        }
    }

    #[test]
    fn rs_isospectral_and_conserving() {
        let s = ClassicalState::rs(cv(&[-1.5, 0.1, 1.7]), cv(&[-0.8, -1.1, -0.9]), c(0.4)).unwrap();
        let tr = integrate(LaxKind::Rs, &s, 1.0, 1e-3).unwrap();
        let h0 = rs_integrals(&s, 1).unwrap();
        let h1 = rs_integrals(tr.last(), 1).unwrap();
        assert!((h0 - h1).norm() < 1e-8);
        let spec = |st: &ClassicalState| {
            let mut e = eigendecompose(&rs_lax(st).unwrap().entries).unwrap().values;
            e.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
            e
        };
        assert!(linalg::max_abs_diff_slice(&spec(&s), &spec(tr.last())) < 1e-8);
    }

    #[test]
    fn lax_residual_second_order() {
        let s = ClassicalState::rs(cv(&[0.0, 1.3]), cv(&[-1.0, -0.6]), c(0.5)).unwrap();
        let r = |dt: f64| lax_residual(LaxKind::Rs, &lax_window(LaxKind::Rs, &s, dt).unwrap(), dt).unwrap();
        assert!(r(1e-3) < 1e-5);
        let ratio = r(2e-2) / r(1e-2);
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");

        let s = ClassicalState::cm(cv(&[0.0, 1.3, -0.9]), cv(&[0.2, -0.6, 0.1])).unwrap();
        let r = |dt: f64| lax_residual(LaxKind::Cm, &lax_window(LaxKind::Cm, &s, dt).unwrap(), dt).unwrap();
        let ratio = r(2e-2) / r(1e-2);
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn collision_aborts_with_last_state() {
        // two CM particles with complex data can run into each other
        let s = ClassicalState::cm(cv(&[0.0, 0.5]), cv(&[0.0, 0.0])).unwrap();
        let err = integrate_with(LaxKind::Cm, &s, 5.0, 1e-3, &IntegratorOptions { collision_tol: 0.05, max_halvings: 0 }).unwrap_err();
        match err {
            Error::NearCollision { last, .. } => assert!(last.singular_distance().0 >= 0.05),
            other => panic!("unexpected {other:?}"),
        }
        assert!(integrate(LaxKind::Cm, &s, 1.0, 0.0).is_err());
        assert!(integrate(LaxKind::Rs, &s, 1.0, 0.1).is_err());
    }
}
