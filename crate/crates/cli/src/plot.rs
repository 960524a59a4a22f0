//! Figure-ready CSVs and a plain-text plotting recipe built from a run's artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use riemann_spectra::io;
use riemann_spectra::riemann::fit_power_law;

use crate::experiments::{Artifact, ArtifactKind, RunReport};
use crate::CliError;

/// Reference power laws overlaid on spectra: (label, exponent, fitted quantity).
pub const REFERENCE_SLOPES: [(&str, f64, &str); 4] = [
    ("-4/3", -4.0 / 3.0, "amplitude"),
    ("-8/3", -8.0 / 3.0, "energy"),
    ("-2", -2.0, "energy"),
    ("-6/5", -6.0 / 5.0, "amplitude"),
];

fn read(dir: &Path, artifact: &Artifact, columns: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    io::read_columns(&dir.join(&artifact.file), columns)
        .map_err(|source| CliError::Runtime { context: artifact.file.clone(), source })
}

fn label(artifact: &Artifact) -> String {
    artifact.t.map_or_else(|| artifact.file.clone(), |t| format!("t={t}"))
}

/// Writes a wide CSV; columns may differ in length, short ones leave empty cells.
fn write_wide(path: &Path, header: &[String], columns: &[Vec<f64>]) -> Result<(), CliError> {
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    let mut text = header.join(",");
    text.push('\n');
    for i in 0..rows {
        let cells: Vec<String> = columns.iter().map(|c| c.get(i).map_or(String::new(), |v| io::fmt_f64(*v))).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes per-figure CSVs and `recipe.txt` next to the run's artifacts; returns the new files.
pub fn emit_plot_data(report: &RunReport) -> Result<Vec<PathBuf>, CliError> {
    if report.artifacts.is_empty() {
        return Err(CliError::MissingArtifact("report lists no artifacts".into()));
    }
    let dir = &report.output_dir;
    for a in &report.artifacts {
        let ok = std::fs::metadata(dir.join(&a.file)).map(|m| m.len() > 0).unwrap_or(false);
        if !ok {
            return Err(CliError::MissingArtifact(dir.join(&a.file).display().to_string()));
        }
    }
    let of = |kind| report.artifacts.iter().filter(move |a| a.kind == kind).collect::<Vec<_>>();
    let mut recipe = format!("experiment: {}\n\n", report.experiment);
    let mut written = Vec::new();

    let curves = of(ArtifactKind::Parametric);
    if !curves.is_empty() {
        let mut header = vec!["zeta".to_string()];
        let mut columns = Vec::new();
        for (i, a) in curves.iter().enumerate() {
            let mut c = read(dir, a, &["zeta", "x", "v"])?;
            if i == 0 {
                columns.push(std::mem::take(&mut c[0]));
            }
            header.push(format!("x@{}", label(a)));
            header.push(format!("v@{}", label(a)));
            columns.push(std::mem::take(&mut c[1]));
            columns.push(std::mem::take(&mut c[2]));
        }
        let path = dir.join("figure_profiles.csv");
        write_wide(&path, &header, &columns)?;
        let _ = writeln!(
            recipe,
            "figure_profiles.csv: wave profiles v(x) along characteristics.\n  plot each (x@t, v@t) pair as a curve; linear axes.\n  snapshots: {}\n",
            curves.iter().map(|a| label(a)).collect::<Vec<_>>().join(", ")
        );
        written.push(path);
    }

    let snapshots = of(ArtifactKind::Snapshot);
    if !snapshots.is_empty() {
        let mut header = vec!["x".to_string()];
        let mut columns = Vec::new();
        for (i, a) in snapshots.iter().enumerate() {
            let mut c = read(dir, a, &["x", "u"])?;
            if i == 0 {
                columns.push(std::mem::take(&mut c[0]));
            }
            header.push(format!("u@{}", label(a)));
            columns.push(std::mem::take(&mut c[1]));
        }
        let path = dir.join("figure_snapshots.csv");
        write_wide(&path, &header, &columns)?;
        let _ = writeln!(recipe, "figure_snapshots.csv: field snapshots u(x) on the uniform grid.\n  x against each u@t column; linear axes.\n");
        written.push(path);
    }

    let spectra = of(ArtifactKind::Spectrum);
    if !spectra.is_empty() {
        let mut header = vec!["k".to_string()];
        let mut columns = Vec::new();
        let mut anchor = None;
        for (i, a) in spectra.iter().enumerate() {
            let mut c = read(dir, a, &["k", "amplitude", "energy"])?;
            if i == 0 {
                let lo = report.bands.values().next().map_or(c[0][0], |b| b[0]);
                anchor = (0..c[0].len()).find(|&j| c[0][j] >= lo && c[2][j] > 0.0).map(|j| (c[0][j], c[1][j], c[2][j]));
                columns.push(std::mem::take(&mut c[0]));
            }
            header.push(format!("amplitude@{}", label(a)));
            header.push(format!("energy@{}", label(a)));
            columns.push(std::mem::take(&mut c[1]));
            columns.push(std::mem::take(&mut c[2]));
        }
        if let Some((k0, a0, e0)) = anchor {
            let k = columns[0].clone();
            for (name, s, quantity) in REFERENCE_SLOPES {
                let base = if quantity == "amplitude" { a0 } else { e0 };
                header.push(format!("ref_{quantity}_k^{name}"));
                columns.push(k.iter().map(|k| base * (k / k0).powf(s)).collect());
            }
        }
        let path = dir.join("figure_spectra.csv");
        write_wide(&path, &header, &columns)?;
        let _ = writeln!(
            recipe,
            "figure_spectra.csv: Fourier spectra; log-log axes, k on the horizontal axis.\n  amplitude@t and energy@t for each snapshot: {}",
            spectra.iter().map(|a| label(a)).collect::<Vec<_>>().join(", ")
        );
        let _ = writeln!(recipe, "  reference lines (dashed), anchored at the first spectrum:");
        for (name, _, quantity) in REFERENCE_SLOPES {
            let _ = writeln!(recipe, "    ref_{quantity}_k^{name}: {quantity} ~ k^{name}");
        }
        for (name, band) in &report.bands {
            let tag = if name.is_empty() { "fit" } else { name.as_str() };
            let _ = writeln!(recipe, "  {tag} band: [{}, {}]", band[0], band[1]);
        }
        recipe.push('\n');
        written.push(path);
    }

    for a in of(ArtifactKind::ExponentSamples) {
        let c = read(dir, a, &["r", "dv"])?;
        let window = [c[0][0], *c[0].last().unwrap()];
        let fit = fit_power_law(&c[0], &c[1], window)
            .map_err(|source| CliError::Runtime { context: a.file.clone(), source })?;
        let line = c[0].iter().map(|r| fit.amplitude * r.powf(fit.exponent)).collect();
        let path = dir.join("figure_exponent.csv");
        write_wide(&path, &["r".into(), "dv".into(), "fit".into()], &[c[0].clone(), c[1].clone(), line])?;
        let _ = writeln!(
            recipe,
            "figure_exponent.csv: |v - v_b| against distance r from the breaking point; log-log axes.\n  fit: dv = {} r^{}\n",
            fit.amplitude, fit.exponent
        );
        written.push(path);
    }

    let path = dir.join("recipe.txt");
    std::fs::write(&path, recipe).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(written)
}
