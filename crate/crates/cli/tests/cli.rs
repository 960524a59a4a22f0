use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use riemann_spectra::io::{read_columns, read_spectrum_csv};
use riemann_spectra::spectra::fit_slope;
use riemann_spectra_cli::{emit_plot_data, CliError, Experiment, ExperimentConfig, RunReport};

fn cli(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riemann-spectra"))
        .args(args)
        .env("RIEMANN_SPECTRA_OUT", out)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn csv_files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            files.insert(PathBuf::from(path.file_name().unwrap()), std::fs::read(&path).unwrap());
        }
    }
    files
}

#[test]
fn breaking_reports_gaussian_breaking_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["breaking", "--profile", "gaussian"]);
    assert_ok(&out);
    let r = report(dir.path());
    assert!((r.scalars["t_b"] - 1.16582).abs() < 1e-5);
    assert!(String::from_utf8_lossy(&out.stdout).contains("t_b = 1.16582"));
    // three snapshots at t = 0, 0.5, t_b
    let times: Vec<f64> = r.artifacts.iter().filter(|a| a.file.starts_with("profile_")).map(|a| a.t.unwrap()).collect();
    assert_eq!(times.len(), 3);
    assert_eq!(&times[..2], &[0.0, 0.5]);
    assert_eq!(times[2], r.scalars["t_b"]);
    let recipe = std::fs::read_to_string(dir.path().join("recipe.txt")).unwrap();
    assert!(recipe.contains("figure_profiles.csv"));
    assert!(recipe.contains("t=0.5"));
}

#[test]
fn riemann_spectrum_of_sine_at_unit_time() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&cli(dir.path(), &["riemann-spectrum", "--profile", "sine", "--t-end", "1", "--band", "10,500"]));
    let r = report(dir.path());
    assert!((r.scalars["slope_amplitude"] + 4.0 / 3.0).abs() < 0.03);
    assert!(r.scalars["parseval_residual"] < 1e-12);
}

#[test]
fn report_scalars_are_recomputable_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&cli(dir.path(), &["bessel-fubini"]));
    let r = report(dir.path());
    let spectrum = read_spectrum_csv(&dir.path().join("spectrum.csv")).unwrap();
    let band = r.bands[""];
    let amp = fit_slope(&spectrum, band, false).unwrap();
    let energy = fit_slope(&spectrum, band, true).unwrap();
    for (name, value) in [
        ("slope_amplitude", amp.slope),
        ("residual_amplitude", amp.residual),
        ("slope_energy", energy.slope),
        ("residual_energy", energy.residual),
    ] {
        assert!((r.scalars[name] - value).abs() <= 1e-10, "{name}");
    }
    let amplitudes = read_columns(&dir.path().join("amplitudes.csv"), &["n", "amplitude"]).unwrap();
    assert_eq!(amplitudes[1], spectrum.amplitude);
}

#[test]
fn evolve_to_zero_time_returns_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&cli(dir.path(), &["evolve", "--model", "kdv", "--t-end", "0"]));
    let r = report(dir.path());
    let snapshots: Vec<_> = r.artifacts.iter().filter(|a| a.file.starts_with("snapshot_")).collect();
    assert_eq!(snapshots.len(), 1);
    let cols = read_columns(&dir.path().join(&snapshots[0].file), &["x", "u"]).unwrap();
    let s0 = 1.0 / (6.0 * 25.5);
    for (x, u) in cols[0].iter().zip(&cols[1]) {
        assert!((u - s0 * x.sin()).abs() < 1e-15);
    }
    assert_eq!(cols[0][0], 0.0);
    assert!((cols[0][1] - 2.0 * PI / 2048.0).abs() < 1e-15);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["evolve", "--model", "burgers:nu=0.05", "--profile", "sine", "--t-end", "0.5", "--grid-n", "256"];
    assert_ok(&cli(a.path(), &args));
    assert_ok(&cli(b.path(), &args));
    let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
    assert!(fa.len() >= 4);
    assert_eq!(fa, fb);
}

#[test]
fn energy_spectra_at_three_times() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("fig.toml");
    std::fs::write(
        &config,
        "experiment = \"evolve\"\nt_end = 30.0\ntimes = [10.0, 20.0, 30.0]\n\
         [model]\nkind = \"burgers\"\n[profile]\nkind = \"sine\"\nparams = { amplitude = 1.0 }\n[grid]\nn_points = 256\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    assert_ok(&cli(&out_dir, &["evolve", "--config", config.to_str().unwrap()]));
    let r = report(&out_dir);
    let spectra: Vec<f64> =
        r.artifacts.iter().filter(|a| a.file.starts_with("spectrum_")).map(|a| a.t.unwrap()).collect();
    assert_eq!(spectra, vec![10.0, 20.0, 30.0]);
    let recipe = std::fs::read_to_string(out_dir.join("recipe.txt")).unwrap();
    assert!(recipe.contains("energy ~ k^-8/3"));
    assert!(recipe.contains("t=10, t=20, t=30"));
    let header = std::fs::read_to_string(out_dir.join("figure_spectra.csv")).unwrap();
    assert!(header.lines().next().unwrap().contains("ref_energy_k^-8/3"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"experiment": "breaking", "bogus": 1}"#).unwrap();
    let out = cli(dir.path(), &["breaking", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(cli(dir.path(), &["evolve", "--model", "kdv"]).status.code(), Some(2));
    assert_eq!(
        cli(dir.path(), &["evolve", "--model", "kdv", "--t-end", "1", "--grid-n", "100"]).status.code(),
        Some(2)
    );
    assert_eq!(cli(dir.path(), &["breaking", "--profile", "square"]).status.code(), Some(2));
    // breaking time beyond the Bessel-Fubini range is a runtime error
    let out = cli(dir.path(), &["bessel-fubini", "--t-end", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn jobs_fan_out_over_configs() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (name, amplitude) in [("a", 1.0), ("b", 2.0)] {
        let p = dir.path().join(format!("{name}.json"));
        std::fs::write(&p, format!(r#"{{"profile": {{"kind": "gaussian", "params": {{"amplitude": {amplitude}}}}}}}"#))
            .unwrap();
        paths.push(p);
    }
    let out_dir = dir.path().join("out");
    let out = cli(
        &out_dir,
        &["breaking", "--jobs", "2", "--config", paths[0].to_str().unwrap(), "--config", paths[1].to_str().unwrap()],
    );
    assert_ok(&out);
    let ta = report(&out_dir.join("00_a")).scalars["t_b"];
    let tb = report(&out_dir.join("01_b")).scalars["t_b"];
    assert!((ta / tb - 2.0).abs() < 1e-12);
}

#[test]
fn slope_of_a_written_field() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert_ok(&cli(&first, &["riemann-spectrum", "--profile", "gaussian", "--grid-n", "8192"]));
    let config = dir.path().join("slope.toml");
    std::fs::write(&config, "input = \"first/field.csv\"\n").unwrap();
    let second = dir.path().join("second");
    assert_ok(&cli(&second, &["slope", "--config", config.to_str().unwrap()]));
    let (a, b) = (report(&first), report(&second));
    assert!((a.scalars["slope_amplitude"] - b.scalars["slope_amplitude"]).abs() < 1e-9);
    assert!((b.scalars["slope_amplitude"] + 4.0 / 3.0).abs() < 0.05);
}

#[test]
fn exponent_of_quintic_profile() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&cli(dir.path(), &["exponent", "--profile", "quintic-degenerate"]));
    let r = report(dir.path());
    assert!((r.scalars["exponent"] - 0.2).abs() < 0.02);
    assert_eq!(r.scalars["degeneracy"], 2.0);
    assert!(dir.path().join("figure_exponent.csv").exists());
}

#[test]
fn empty_report_is_missing_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut report = RunReport {
        experiment: Experiment::Breaking,
        config: ExperimentConfig::default(),
        output_dir: dir.path().to_path_buf(),
        artifacts: Vec::new(),
        scalars: BTreeMap::new(),
        bands: BTreeMap::new(),
        notes: Vec::new(),
        version: "0".into(),
        wall_clock_s: 0.0,
    };
    assert!(matches!(emit_plot_data(&report), Err(CliError::MissingArtifact(_))));
    report.artifacts.push(riemann_spectra_cli::Artifact {
        file: "gone.csv".into(),
        kind: riemann_spectra_cli::ArtifactKind::Spectrum,
        t: None,
    });
    assert!(matches!(emit_plot_data(&report), Err(CliError::MissingArtifact(_))));
}
