//! Pseudospectral integrators for viscous Burgers, KdV and reduced Ostrovsky
//! equations on periodic grids.
//!
//! Each model is written as `u_hat_t = L(k) u_hat + N(u_hat)` with a diagonal
//! linear part that is integrated exactly by the factor `exp(L dt)`; the
//! quadratic flux is advanced with classical RK4 in the interaction picture.
//! Quadratic products are dealiased by zeroing the top third of the modes.
//!
//! | model     | equation                      | `L(k)`     | `N`                 |
//! |-----------|-------------------------------|------------|---------------------|
//! | burgers   | `u_t + u u_x = nu u_xx`       | `-nu k^2`  | `-(u^2/2)_x`        |
//! | kdv       | `u_t + 6 u u_x + u_xxx = 0`   | `i k^3`    | `-3 (u^2)_x`        |
//! | ostrovsky | `(u_t + u u_x)_x = gamma u`   | `-i gamma/k` | `-(u^2/2)_x`, `k != 0` |

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, WaveField};
use crate::profiles::InitialProfile;

/// Growth of `max|u|` over its initial value that is reported as a blow-up.
pub const BLOW_UP_FACTOR: f64 = 1e3;
/// Tolerated `|mean| / max|u|` of Ostrovsky initial data.
pub const MEAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Burgers {
        #[serde(default = "default_viscosity")]
        nu: f64,
    },
    Kdv,
    Ostrovsky {
        gamma: f64,
    },
}

/// Viscosity used when a configuration leaves `nu` out.
pub const DEFAULT_VISCOSITY: f64 = 0.1;

fn default_viscosity() -> f64 {
    DEFAULT_VISCOSITY
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Burgers { .. } => "burgers",
            Model::Kdv => "kdv",
            Model::Ostrovsky { .. } => "ostrovsky",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Model::Burgers { nu } if !(nu > 0.0 && nu.is_finite()) => {
                Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")))
            }
            Model::Ostrovsky { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::InvalidInput(format!("rotation parameter must be positive, got {gamma}")))
            }
            _ => Ok(()),
        }
    }

    /// Coefficient `c` of the advective term `c u u_x`.
    pub fn advection(&self) -> f64 {
        match self {
            Model::Kdv => 6.0,
            _ => 1.0,
        }
    }

    fn linear(&self, k: f64) -> Complex64 {
        match *self {
            Model::Burgers { nu } => Complex64::new(-nu * k * k, 0.0),
            Model::Kdv => Complex64::new(0.0, k * k * k),
            Model::Ostrovsky { gamma } => {
                if k == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -gamma / k)
                }
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Burgers { nu } => write!(f, "burgers(nu={nu})"),
            Model::Kdv => write!(f, "kdv"),
            Model::Ostrovsky { gamma } => write!(f, "ostrovsky(gamma={gamma})"),
        }
    }
}

/// Fixed-step policy: `dt = min(max_dt, cfl / (c k_max max|u|))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub cfl: f64,
    pub max_dt: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy { cfl: 0.5, max_dt: 0.1 }
    }
}

impl StepPolicy {
    /// KdV runs at half the default Courant number: at 0.5 the interaction-picture
    /// RK4 lets modes near the dealiasing cutoff grow slowly over long runs.
    pub fn for_model(model: Model) -> Self {
        match model {
            Model::Kdv => StepPolicy { cfl: 0.25, ..Self::default() },
            _ => Self::default(),
        }
    }
}

/// Spectral state of one evolution. Owns its transform plans.
#[derive(Clone)]
pub struct SolverState {
    pub model: Model,
    pub grid: GridSpec,
    pub u_hat: Vec<Complex64>,
    pub t: f64,
    initial_max: f64,
    kernel: Arc<Kernel>,
}

impl fmt::Debug for SolverState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverState")
            .field("model", &self.model)
            .field("grid", &self.grid)
            .field("t", &self.t)
            .finish_non_exhaustive()
    }
}

/// Per-grid transform plans, wavenumbers and dealiasing mask.
struct Kernel {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    keep: Vec<bool>,
}

impl Kernel {
    fn new(grid: &GridSpec) -> Self {
        let n = grid.n_points;
        let mut planner = FftPlanner::new();
        let cutoff = n as f64 / 3.0;
        let keep = (0..n)
            .map(|j| {
                let m = grid.mode_index(j);
                (m.unsigned_abs() as f64) < cutoff && m != n as i64 / 2
            })
            .collect();
        Kernel {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            k: grid.wavenumbers(),
            keep,
        }
    }
}

impl SolverState {
    /// Samples `profile` on `grid`; the profile must be periodic with the grid's period.
    pub fn new(model: Model, grid: GridSpec, profile: &InitialProfile) -> Result<Self> {
        let domain = profile.domain();
        let tol = 1e-12 * grid.length.abs().max(1.0);
        if !profile.is_periodic() || (domain.length() - grid.length).abs() > tol {
            return Err(Error::InvalidInput(format!(
                "profile domain [{}, {}) is not periodic with the grid period {}",
                domain.x_lo, domain.x_hi, grid.length
            )));
        }
        let field = WaveField::from_fn(grid, 0.0, |x| profile.value(x).unwrap_or(f64::NAN))?;
        Self::from_field(model, &field)
    }

    /// Starts an evolution from sampled data; the field time becomes the state time.
    pub fn from_field(model: Model, field: &WaveField) -> Result<Self> {
        model.validate()?;
        let grid = field.grid;
        grid.validate()?;
        if !grid.periodic {
            return Err(Error::InvalidGrid("pseudospectral evolution needs a periodic grid".into()));
        }
        let kernel = Arc::new(Kernel::new(&grid));
        let mut u_hat: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        kernel.forward.process(&mut u_hat);
        let initial_max = field.max_abs();
        if let Model::Ostrovsky { .. } = model {
            let mean = field.mean();
            if mean.abs() > MEAN_TOLERANCE * initial_max {
                return Err(Error::NonZeroMean { mean });
            }
            u_hat[0] = Complex64::new(0.0, 0.0);
        }
        let mut state = SolverState { model, grid, u_hat, t: field.t, initial_max, kernel };
        state.apply_mask();
        Ok(state)
    }

    fn apply_mask(&mut self) {
        for (c, &keep) in self.u_hat.iter_mut().zip(&self.kernel.keep) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    fn inverse(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let mut buf = hat.to_vec();
        self.kernel.inverse.process(&mut buf);
        let scale = 1.0 / self.grid.n_points as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Physical field at the current time.
    pub fn field(&self) -> WaveField {
        let values = self.inverse(&self.u_hat).iter().map(|c| c.re).collect();
        WaveField { grid: self.grid, values, t: self.t }
    }

    /// Largest imaginary part left by the inverse transform, relative to `max|u|`.
    pub fn imaginary_residue(&self) -> f64 {
        let buf = self.inverse(&self.u_hat);
        let max_re = buf.iter().fold(0.0_f64, |m, c| m.max(c.re.abs()));
        let max_im = buf.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
        if max_re == 0.0 {
            max_im
        } else {
            max_im / max_re
        }
    }

    /// `int u dx`
    pub fn mass(&self) -> f64 {
        self.u_hat[0].re * self.grid.dx()
    }

    /// `int u^2 dx`
    pub fn momentum(&self) -> f64 {
        let n = self.grid.n_points as f64;
        self.u_hat.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx() / n
    }

    pub fn max_abs(&self) -> f64 {
        self.field().max_abs()
    }

    /// Step size allowed by `policy` for the current amplitude.
    pub fn stable_dt(&self, policy: StepPolicy) -> f64 {
        let umax = self.max_abs();
        let bound = policy.cfl / (self.model.advection() * self.grid.k_max() * umax);
        if bound.is_finite() {
            bound.min(policy.max_dt)
        } else {
            policy.max_dt
        }
    }

    /// Dealiased `N(u_hat) = -(c/2) i k FT(u^2)`.
    fn nonlinear(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let physical = self.inverse(hat);
        let mut sq: Vec<Complex64> = physical.iter().map(|c| Complex64::new(c.re * c.re, 0.0)).collect();
        self.kernel.forward.process(&mut sq);
        let half_c = 0.5 * self.model.advection();
        sq.iter_mut().zip(&self.kernel.k).zip(&self.kernel.keep).for_each(|((c, &k), &keep)| {
            *c = if keep && k != 0.0 { *c * Complex64::new(0.0, -half_c * k) } else { Complex64::new(0.0, 0.0) };
        });
        sq
    }

    /// One integrating-factor RK4 step for whatever model the state carries.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let n = self.grid.n_points;
        let mut e_full = Vec::with_capacity(n);
        let mut e_half = Vec::with_capacity(n);
        for &k in &self.kernel.k {
            let l = self.model.linear(k);
            e_full.push((l * dt).exp());
            e_half.push((l * (0.5 * dt)).exp());
        }
        let u = &self.u_hat;
        let a = self.nonlinear(u);
        let stage: Vec<Complex64> = (0..n).map(|j| e_half[j] * (u[j] + 0.5 * dt * a[j])).collect();
        let b = self.nonlinear(&stage);
        let stage: Vec<Complex64> = (0..n).map(|j| e_half[j] * u[j] + 0.5 * dt * b[j]).collect();
        let c = self.nonlinear(&stage);
        let stage: Vec<Complex64> = (0..n).map(|j| e_full[j] * u[j] + dt * e_half[j] * c[j]).collect();
        let d = self.nonlinear(&stage);
        let next: Vec<Complex64> = (0..n)
            .map(|j| e_full[j] * u[j] + dt / 6.0 * (e_full[j] * a[j] + 2.0 * e_half[j] * (b[j] + c[j]) + d[j]))
            .collect();
        self.u_hat = next;
        self.apply_mask();
        if let Model::Ostrovsky { .. } = self.model {
            let drift = self.u_hat[0].norm() / n as f64;
            if drift > 1e-10 {
                return Err(Error::NonZeroMean { mean: drift });
            }
            self.u_hat[0] = Complex64::new(0.0, 0.0);
        }
        self.t += dt;
        let max_abs = self.max_abs();
        if !max_abs.is_finite() || (self.initial_max > 0.0 && max_abs > BLOW_UP_FACTOR * self.initial_max) {
            return Err(Error::BlowUp { t: self.t, max_abs });
        }
        Ok(())
    }

    fn expect(&self, expected: &'static str) -> Result<()> {
        if self.model.name() != expected {
            return Err(Error::ModelMismatch { expected, found: self.model.name() });
        }
        Ok(())
    }
}

pub fn init_state(model: Model, grid: GridSpec, profile: &InitialProfile) -> Result<SolverState> {
    SolverState::new(model, grid, profile)
}

pub fn step_burgers(mut state: SolverState, dt: f64) -> Result<SolverState> {
    state.expect("burgers")?;
    state.step(dt)?;
    Ok(state)
}

pub fn step_kdv(mut state: SolverState, dt: f64) -> Result<SolverState> {
    state.expect("kdv")?;
    state.step(dt)?;
    Ok(state)
}

pub fn step_ostrovsky(mut state: SolverState, dt: f64) -> Result<SolverState> {
    state.expect("ostrovsky")?;
    state.step(dt)?;
    Ok(state)
}

/// Advances to `t_end` with a fixed step from `policy`, shortening the last
/// substep before each output time so snapshots land on it exactly. With no
/// output times the single snapshot is taken at `t_end`.
pub fn integrate(
    state: &mut SolverState,
    t_end: f64,
    output_times: &[f64],
    policy: StepPolicy,
) -> Result<Vec<WaveField>> {
    if !(t_end >= state.t) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} precedes the state time {}", state.t)));
    }
    if output_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("output times must be sorted".into()));
    }
    if let Some(bad) = output_times.iter().find(|&&t| t < state.t || t > t_end) {
        return Err(Error::InvalidInput(format!("output time {bad} outside [{}, {t_end}]", state.t)));
    }
    let default_output = [t_end];
    let targets = if output_times.is_empty() { &default_output[..] } else { output_times };
    let dt = state.stable_dt(policy);
    let mut snapshots = Vec::with_capacity(targets.len());
    for &target in targets {
        advance_to(state, target, dt)?;
        snapshots.push(state.field());
    }
    advance_to(state, t_end, dt)?;
    Ok(snapshots)
}

fn advance_to(state: &mut SolverState, target: f64, dt: f64) -> Result<()> {
    let slack = 1e-12 * dt;
    while target - state.t > slack {
        let h = dt.min(target - state.t);
        state.step(h)?;
    }
    state.t = state.t.max(target);
    Ok(())
}
