//! Inputs shared by the benchmarks.

use std::f64::consts::PI;

use riemann_spectra::pde::{Model, SolverState};
use riemann_spectra::{GridSpec, InitialProfile, WaveField};

/// Gaussian profile on its default periodic box.
pub fn gaussian() -> InitialProfile {
    InitialProfile::gaussian(1.0, 1.0).expect("valid profile")
}

/// Periodic field `exp(sin x)` with `n` points on `[0, 2*pi)`.
pub fn smooth_field(n: usize) -> WaveField {
    let grid = GridSpec::periodic(n, 0.0, 2.0 * PI).expect("valid grid");
    WaveField::from_fn(grid, 0.0, |x| x.sin().exp()).expect("finite field")
}

/// Solver state for `model` started from `0.5 sin x` on `n` points.
pub fn sine_state(model: Model, n: usize) -> SolverState {
    let grid = GridSpec::periodic(n, 0.0, 2.0 * PI).expect("valid grid");
    let field = WaveField::from_fn(grid, 0.0, |x| 0.5 * x.sin()).expect("finite field");
    SolverState::from_field(model, &field).expect("valid state")
}
