//! Uniform grids and sampled wave fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid of `n_points` nodes `x_lo + i*dx`, `dx = length / n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub x_lo: f64,
    pub length: f64,
    #[serde(default = "default_periodic")]
    pub periodic: bool,
}

fn default_periodic() -> bool {
    true
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    /// Periodic grid on `[x_lo, x_lo + length)`.
    pub fn periodic(n_points: usize, x_lo: f64, length: f64) -> Result<Self> {
        let grid = GridSpec { n_points, x_lo, length, periodic: true };
        grid.validate()?;
        Ok(grid)
    }

    /// Non-periodic uniform grid, used for local zooms around a breaking point.
    pub fn open(n_points: usize, x_lo: f64, length: f64) -> Result<Self> {
        let grid = GridSpec { n_points, x_lo, length, periodic: false };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {} must be a power of two >= {}",
                self.n_points,
                Self::MIN_POINTS
            )));
        }
        if !(self.length.is_finite() && self.length > 0.0) || !self.x_lo.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "length = {} must be positive and x_lo = {} finite",
                self.length, self.x_lo
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Fundamental wavenumber `2*pi/length`.
    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Signed integer mode index of FFT bin `j` (`0, 1, .., n/2, -n/2+1, .., -1`).
    pub fn mode_index(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Physical wavenumbers in FFT ordering; the Nyquist bin is reported as positive.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let k0 = self.k0();
        (0..self.n_points).map(|j| self.mode_index(j) as f64 * k0).collect()
    }

    /// Largest resolved wavenumber, `pi / dx`.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }
}

/// Wave values on a uniform grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub t: f64,
}

impl WaveField {
    pub fn new(grid: GridSpec, values: Vec<f64>, t: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.n_points {
            return Err(Error::InvalidInput(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.n_points
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at index {i}")));
        }
        Ok(WaveField { grid, values, t })
    }

    pub fn from_fn(grid: GridSpec, t: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.xs().into_iter().map(f).collect();
        WaveField::new(grid, values, t)
    }

    pub fn xs(&self) -> Vec<f64> {
        self.grid.xs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Rectangle-rule integral, which is the trapezoid rule on a periodic grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> WaveField {
        WaveField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), t: self.t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(GridSpec::periodic(100, 0.0, 1.0).is_err());
        assert!(GridSpec::periodic(8, 0.0, 1.0).is_err());
        assert!(GridSpec::periodic(16, 0.0, 0.0).is_err());
        assert!(GridSpec::periodic(16, 0.0, 1.0).is_ok());
    }

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = GridSpec::periodic(16, 0.0, 2.0 * std::f64::consts::PI).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert!((k[1] - 1.0).abs() < 1e-15);
        assert!((k[8] - 8.0).abs() < 1e-15);
        assert!((k[9] + 7.0).abs() < 1e-15);
        assert!((k[15] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn field_rejects_nan_and_length_mismatch() {
        let g = GridSpec::periodic(16, 0.0, 1.0).unwrap();
        assert!(WaveField::new(g, vec![0.0; 15], 0.0).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(WaveField::new(g, v, 0.0).is_err());
    }
}
