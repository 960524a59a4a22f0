//! CSV and JSON serialization of fields, curves, spectra and fit results.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so every value
//! round-trips exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analytic::AmplitudeSpectrum;
use crate::error::{Error, Result};
use crate::grid::WaveField;
use crate::riemann::ParametricCurve;
use crate::spectra::SpectrumResult;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_columns(path: &Path, header: &[&str], columns: &[Vec<String>]) -> Result<()> {
    let rows = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidInput("columns differ in length".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| c[i].as_str()))?;
    }
    w.flush()?;
    Ok(())
}

fn floats(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_f64(v)).collect()
}

/// `x,v` pairs of a single-valued profile.
pub fn write_profile_csv(path: &Path, x: &[f64], v: &[f64]) -> Result<()> {
    write_columns(path, &["x", "v"], &[floats(x), floats(v)])
}

/// `zeta,x,v`
pub fn write_parametric_csv(path: &Path, curve: &ParametricCurve) -> Result<()> {
    write_columns(path, &["zeta", "x", "v"], &[floats(&curve.zeta), floats(&curve.x), floats(&curve.v)])
}

/// `x,u` snapshot.
pub fn write_field_csv(path: &Path, field: &WaveField) -> Result<()> {
    write_columns(path, &["x", "u"], &[floats(&field.xs()), floats(&field.values)])
}

/// `n,amplitude`
pub fn write_amplitude_csv(path: &Path, spectrum: &AmplitudeSpectrum) -> Result<()> {
    let n = spectrum.n.iter().map(u32::to_string).collect();
    write_columns(path, &["n", "amplitude"], &[n, floats(&spectrum.amplitude)])
}

/// `k,amplitude,energy`
pub fn write_spectrum_csv(path: &Path, spectrum: &SpectrumResult) -> Result<()> {
    write_columns(
        path,
        &["k", "amplitude", "energy"],
        &[floats(&spectrum.k), floats(&spectrum.amplitude), floats(&spectrum.energy)],
    )
}

/// Reads the named float columns of a CSV file with a header row.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let idx = names
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::InvalidInput(format!("{}: missing column {name}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::new(); names.len()];
    for record in r.records() {
        let record = record?;
        for (col, &i) in out.iter_mut().zip(&idx) {
            let cell = record.get(i).unwrap_or("");
            let v = cell
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("{}: bad number {cell:?}", path.display())))?;
            col.push(v);
        }
    }
    Ok(out)
}

/// Reads a `k,amplitude,energy` file back.
pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumResult> {
    let mut cols = read_columns(path, &["k", "amplitude", "energy"])?.into_iter();
    let (k, amplitude, energy) = (cols.next().unwrap(), cols.next().unwrap(), cols.next().unwrap());
    Ok(SpectrumResult { k, amplitude, energy, t: f64::NAN })
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
