//! Fourier amplitude and energy spectra of periodic fields and log-log slope fits.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::WaveField;

/// Bins below this value are dropped from slope fits.
pub const FIT_FLOOR: f64 = 1e-30;
/// Minimum number of usable bins in a fit band.
pub const MIN_FIT_BINS: usize = 8;

/// Single-sided spectrum for `k_j = 2*pi*j/length`, `j = 1 .. n/2 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub k: Vec<f64>,
    /// `2 |u_hat_j| / n`, so `A sin(k x)` shows amplitude `A`.
    pub amplitude: Vec<f64>,
    /// `amplitude^2`
    pub energy: Vec<f64>,
    pub t: f64,
}

impl SpectrumResult {
    /// Energies divided by the energy of the first bin of `reference`.
    pub fn normalized_energy(&self, reference: &SpectrumResult) -> Result<Vec<f64>> {
        let e0 = reference.energy.first().copied().unwrap_or(0.0);
        if !(e0 > 0.0) {
            return Err(Error::ZeroField);
        }
        Ok(self.energy.iter().map(|e| e / e0).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub band: [f64; 2],
    /// RMS misfit in log space.
    pub residual: f64,
    pub n_used: usize,
}

pub(crate) fn forward_fft(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

pub fn amplitude_spectrum(field: &WaveField) -> SpectrumResult {
    let n = field.values.len();
    let coeffs = forward_fft(&field.values);
    let k0 = field.grid.k0();
    let scale = 2.0 / n as f64;
    let bins = 1..n / 2;
    let k = bins.clone().map(|j| j as f64 * k0).collect();
    let amplitude: Vec<f64> = bins.map(|j| coeffs[j].norm() * scale).collect();
    let energy = amplitude.iter().map(|a| a * a).collect();
    SpectrumResult { k, amplitude, energy, t: field.t }
}

/// Ordinary least squares `y = slope * x + intercept`; returns the RMS residual too.
pub fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(&a, &b)| (b - slope * a - intercept).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Log-log slope of amplitude (or energy) over `band[0] <= k <= band[1]`.
pub fn fit_slope(spectrum: &SpectrumResult, band: [f64; 2], use_energy: bool) -> Result<SlopeFit> {
    let [k_lo, k_hi] = band;
    if !(k_lo > 0.0 && k_hi > k_lo) {
        return Err(Error::InvalidInput(format!("fit band [{k_lo}, {k_hi}] must satisfy 0 < k_lo < k_hi")));
    }
    let values = if use_energy { &spectrum.energy } else { &spectrum.amplitude };
    let (lx, ly): (Vec<f64>, Vec<f64>) = spectrum
        .k
        .iter()
        .zip(values)
        .filter(|&(&k, &v)| k >= k_lo && k <= k_hi && v >= FIT_FLOOR)
        .map(|(&k, &v)| (k.ln(), v.ln()))
        .unzip();
    if lx.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientBins { k_lo, k_hi, found: lx.len(), needed: MIN_FIT_BINS });
    }
    let (slope, intercept, residual) = least_squares_line(&lx, &ly);
    Ok(SlopeFit { slope, intercept, band, residual, n_used: lx.len() })
}

/// Picks the snapshot whose band is best described by a single power law
/// (smallest log-space residual). Snapshots with too few usable bins are skipped.
pub fn best_power_law(fields: &[WaveField], band: [f64; 2], use_energy: bool) -> Result<(usize, SlopeFit)> {
    let mut best: Option<(usize, SlopeFit)> = None;
    let mut last_err = Error::InvalidInput("no snapshots to fit".into());
    for (i, field) in fields.iter().enumerate() {
        match fit_slope(&amplitude_spectrum(field), band, use_energy) {
            Ok(fit) => {
                if best.as_ref().is_none_or(|(_, b)| fit.residual < b.residual) {
                    best = Some((i, fit));
                }
            }
            Err(e @ Error::InsufficientBins { .. }) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(last_err)
}

/// Relative mismatch between `sum u^2 dx` and the spectral energy sum.
pub fn parseval_residual(field: &WaveField) -> Result<f64> {
    let n = field.values.len() as f64;
    let dx = field.grid.dx();
    let physical: f64 = field.values.iter().map(|u| u * u).sum::<f64>() * dx;
    if physical == 0.0 {
        return Err(Error::ZeroField);
    }
    let spectral: f64 = forward_fft(&field.values).iter().map(|c| c.norm_sqr()).sum::<f64>() * dx / n;
    Ok((physical - spectral).abs() / physical)
}
