//! Fixed inputs shared by the benchmarks.

use qcdual_core::chain::ChainParams;
use qcdual_core::classical::ClassicalState;
use qcdual_core::C64;

/// A chain in general position with `n` sites.
pub fn chain(n: usize) -> ChainParams {
    let x: Vec<f64> = (0..n).map(|k| 0.37 * k as f64 + 0.05 * (k * k) as f64).collect();
    ChainParams::real(0.9, (1.7, 0.6), &x).expect("fixture is in general position")
}

/// An RS state with `n` particles spread along a slanted line.
pub fn rs_state(n: usize) -> ClassicalState {
    let x = (0..n).map(|k| C64::new(0.9 * k as f64, 0.1 * k as f64)).collect();
    let v = (0..n).map(|k| C64::new(-1.0 - 0.05 * k as f64, 0.02)).collect();
    ClassicalState::rs(x, v, C64::new(0.45, 0.05)).expect("fixture is regular")
}
