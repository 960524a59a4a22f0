//! Closed-form spectrum of the sine-initialized simple wave.
//!
//! For `v(x, 0) = sin x` the solution before breaking (`t_b = 1`) is the
//! Bessel-Fubini series `v = sum_n b_n(t) sin(n x)` with
//! `b_n = 2 (-1)^(n-1) J_n(n t) / (n t)`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, WaveField};
use crate::spectra::SpectrumResult;

/// Largest order accepted by [`bessel_j`].
pub const MAX_BESSEL_ORDER: u32 = 1_000_000;
/// Default number of modes for spectrum work.
pub const DEFAULT_SPECTRUM_MODES: usize = 500;
/// Default number of modes for field reconstruction.
pub const DEFAULT_FIELD_MODES: usize = 2000;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Bessel function of the first kind `J_n(x)`, integer order, `x >= 0`.
///
/// Miller's backward recurrence `J_{k-1} = (2k/x) J_k - J_{k+1}` started well
/// above `max(n, x)` and normalized with `J_0 + 2 sum_k J_{2k} = 1`. The start
/// index grows like `max(n, x)^{1/3}` past the turning point so the neglected
/// tail stays below double precision in the transition region `x ~ n`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(n <= MAX_BESSEL_ORDER, "bessel_j order {n} exceeds {MAX_BESSEL_ORDER}");
    assert!(x.is_finite() && x >= 0.0, "bessel_j needs finite x >= 0, got {x}");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let reach = (n as f64).max(x);
    let mut start = (reach + 12.0 * reach.cbrt() + 40.0).ceil() as u64;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let (mut above, mut current) = (0.0_f64, 1e-30_f64);
    let mut norm = 0.0;
    let mut value = 0.0;
    // invariant: `current` holds J_k (unnormalized), `above` holds J_{k+1}
    let mut k = start;
    loop {
        if k == n as u64 {
            value = current;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { current } else { 2.0 * current };
        }
        if k == 0 {
            break;
        }
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        k -= 1;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            value *= RESCALE_BY;
        }
    }
    value / norm
}

/// Fourier amplitudes `|A_n|` of the sine-initialized wave at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSpectrum {
    pub n: Vec<u32>,
    pub amplitude: Vec<f64>,
    pub t: f64,
}

impl AmplitudeSpectrum {
    /// View on `[0, 2*pi)`, where wavenumber and mode index coincide.
    pub fn to_spectrum(&self) -> SpectrumResult {
        SpectrumResult {
            k: self.n.iter().map(|&n| n as f64).collect(),
            amplitude: self.amplitude.clone(),
            energy: self.amplitude.iter().map(|a| a * a).collect(),
            t: self.t,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::DomainError { what: "(0, 1]".into(), value: t });
    }
    Ok(())
}

/// `|A_n| = 2 J_n(n t) / (n t)` for `n = 1..=modes`; at `t = 1` this is `2 J_n(n) / n`.
pub fn bessel_fubini_spectrum(t: f64, modes: usize) -> Result<AmplitudeSpectrum> {
    check_time(t)?;
    if modes == 0 || modes > MAX_BESSEL_ORDER as usize {
        return Err(Error::InvalidInput(format!("mode count {modes} outside 1..={MAX_BESSEL_ORDER}")));
    }
    let n: Vec<u32> = (1..=modes as u32).collect();
    let amplitude = n
        .iter()
        .map(|&n| {
            let arg = n as f64 * t;
            2.0 * bessel_j(n, arg) / arg
        })
        .collect();
    Ok(AmplitudeSpectrum { n, amplitude, t })
}

/// Signed sine coefficients `b_n = (-1)^(n-1) |A_n|`.
pub fn bessel_fubini_coefficients(t: f64, modes: usize) -> Result<Vec<f64>> {
    let spectrum = bessel_fubini_spectrum(t, modes)?;
    Ok(spectrum.amplitude.iter().enumerate().map(|(i, a)| if i % 2 == 0 { *a } else { -a }).collect())
}

/// Partial sum of the Bessel-Fubini series on a grid covering `[0, 2*pi)`.
pub fn bessel_fubini_field(t: f64, grid: GridSpec, modes: usize) -> Result<WaveField> {
    grid.validate()?;
    if grid.x_lo.abs() > 1e-12 || (grid.length - 2.0 * PI).abs() > 1e-12 {
        return Err(Error::DomainError { what: "grid on [0, 2pi)".into(), value: grid.x_lo });
    }
    let b = bessel_fubini_coefficients(t, modes)?;
    let values = grid
        .xs()
        .into_iter()
        .map(|x| {
            // sin(n x) = Im(e^{i x})^n, advanced by complex rotation
            let step = Complex64::new(x.cos(), x.sin());
            let mut phase = step;
            let mut sum = 0.0;
            for (i, bn) in b.iter().enumerate() {
                sum += bn * phase.im;
                phase *= step;
                if i % 64 == 63 {
                    // renormalize to stop drift of |phase|
                    let n = (i + 2) as f64;
                    phase = Complex64::new((n * x).cos(), (n * x).sin());
                }
            }
            sum
        })
        .collect();
    WaveField::new(grid, values, t)
}
