//! Breaking Riemann waves and their Fourier spectra.
//!
//! The crate evaluates exact simple-wave solutions of `v_t + v v_x = 0` by the
//! method of characteristics up to the breaking time, locates the breaking
//! point and the local singularity exponent, reconstructs the Bessel-Fubini
//! series for sine data, integrates viscous Burgers, KdV and reduced
//! Ostrovsky equations pseudospectrally, and measures power-law slopes of
//! amplitude and energy spectra.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod grid;
pub mod io;
mod jet;
pub mod pde;
pub mod profiles;

pub use error::{Error, Result};
pub use grid::{GridSpec, WaveField};
pub use pde::{Model, SolverState, StepPolicy};
pub use profiles::{Domain, InitialProfile, ProfileKind, ProfileSpec};
pub mod riemann;
pub mod spectra;

pub use analytic::AmplitudeSpectrum;
pub use riemann::{BreakingPoint, ExponentFit, ParametricCurve, RiemannWave, SpeedLaw, SpeedMap};
pub use spectra::{SlopeFit, SpectrumResult};
