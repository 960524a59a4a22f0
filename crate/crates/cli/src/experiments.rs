//! Experiment drivers. Each writes its CSV/JSON artifacts and returns a report.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use riemann_spectra::analytic::{bessel_fubini_field, bessel_fubini_spectrum, DEFAULT_SPECTRUM_MODES};
use riemann_spectra::io;
use riemann_spectra::pde::{integrate, Model, SolverState, StepPolicy};
use riemann_spectra::riemann::{eval_implicit, find_breaking, fit_power_law, resample_uniform, sample_parametric};
use riemann_spectra::spectra::{amplitude_spectrum, fit_slope, parseval_residual, SlopeFit, SpectrumResult};
use riemann_spectra::{GridSpec, InitialProfile, WaveField};
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

pub const DEFAULT_EXPONENT_WINDOW: [f64; 2] = [1e-6, 1e-3];
pub const DEFAULT_EXPONENT_SAMPLES: usize = 64;
pub const DEFAULT_SPECTRUM_POINTS: usize = 1 << 14;
pub const DEFAULT_EVOLVE_POINTS: usize = 2048;
pub const DEFAULT_CURVE_POINTS: usize = 2048;
/// Breaking time that fixes the default sine amplitude of `evolve`.
pub const REFERENCE_BREAKING_TIME: f64 = 25.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    /// `zeta,x,v`
    Parametric,
    /// `x,u`
    Snapshot,
    /// `k,amplitude,energy`
    Spectrum,
    /// `n,amplitude`
    AmplitudeSeries,
    /// `r,dv`
    ExponentSamples,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub kind: ArtifactKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub output_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
    pub scalars: BTreeMap<String, f64>,
    /// Fit bands used for the slope scalars, so they can be recomputed from the CSVs.
    #[serde(default)]
    pub bands: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub version: String,
    pub wall_clock_s: f64,
}

struct Run {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
    scalars: BTreeMap<String, f64>,
    bands: BTreeMap<String, [f64; 2]>,
    notes: Vec<String>,
}

fn runtime(context: &str) -> impl FnOnce(riemann_spectra::Error) -> CliError + '_ {
    move |source| CliError::Runtime { context: context.to_string(), source }
}

impl Run {
    fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn record(&mut self, file: &str, kind: ArtifactKind, t: Option<f64>) {
        self.artifacts.push(Artifact { file: file.into(), kind, t });
    }

    fn scalar(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        if value.is_finite() {
            self.scalars.insert(name, value);
        } else {
            self.notes.push(format!("{name} is not finite"));
        }
    }

    fn fits(
        &mut self,
        prefix: &str,
        spectrum: &SpectrumResult,
        band: [f64; 2],
    ) -> Result<(SlopeFit, SlopeFit), CliError> {
        let amp = fit_slope(spectrum, band, false).map_err(runtime("amplitude fit"))?;
        let energy = fit_slope(spectrum, band, true).map_err(runtime("energy fit"))?;
        self.scalar(format!("{prefix}slope_amplitude"), amp.slope);
        self.scalar(format!("{prefix}residual_amplitude"), amp.residual);
        self.scalar(format!("{prefix}slope_energy"), energy.slope);
        self.scalar(format!("{prefix}residual_energy"), energy.residual);
        self.bands.insert(prefix.trim_end_matches('_').to_string(), band);
        Ok((amp, energy))
    }

    fn spectrum_csv(&mut self, file: &str, spectrum: &SpectrumResult) -> Result<(), CliError> {
        io::write_spectrum_csv(&self.path(file), spectrum).map_err(runtime(file))?;
        self.record(file, ArtifactKind::Spectrum, Some(spectrum.t));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, file: &str, value: &T) -> Result<(), CliError> {
        io::write_json(&self.path(file), value).map_err(runtime(file))?;
        self.record(file, ArtifactKind::Json, None);
        Ok(())
    }
}

/// Runs one experiment into the configured output directory and writes `report.json`.
pub fn run(experiment: Experiment, config: &ExperimentConfig) -> Result<RunReport, CliError> {
    config.validate(experiment)?;
    let start = Instant::now();
    let dir = config.resolved_output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut run =
        Run { dir, artifacts: Vec::new(), scalars: BTreeMap::new(), bands: BTreeMap::new(), notes: Vec::new() };
    match experiment {
        Experiment::Breaking => breaking(config, &mut run)?,
        Experiment::RiemannSpectrum => riemann_spectrum(config, &mut run)?,
        Experiment::BesselFubini => bessel_fubini(config, &mut run)?,
        Experiment::Evolve => evolve(config, &mut run)?,
        Experiment::Slope => slope(config, &mut run)?,
        Experiment::Exponent => exponent(config, &mut run)?,
    }
    let report = RunReport {
        experiment,
        config: config.clone(),
        output_dir: run.dir.clone(),
        artifacts: run.artifacts,
        scalars: run.scalars,
        bands: run.bands,
        notes: run.notes,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    io::write_json(&run.dir.join("report.json"), &report).map_err(runtime("report.json"))?;
    Ok(report)
}

fn profile(config: &ExperimentConfig) -> Result<InitialProfile, CliError> {
    let spec = config.profile.as_ref().ok_or_else(|| CliError::Config("missing profile".into()))?;
    spec.build(config.base_dir.as_deref()).map_err(|e| CliError::Config(format!("profile: {e}")))
}

/// Config grid, with the box taken from the profile domain unless given.
fn grid_for(config: &ExperimentConfig, profile: &InitialProfile, default_n: usize) -> Result<GridSpec, CliError> {
    let domain = profile.domain();
    let n = config.grid.map_or(default_n, |g| g.n_points);
    let x_lo = config.grid.and_then(|g| g.x_lo).unwrap_or(domain.x_lo);
    let length = config.grid.and_then(|g| g.length).unwrap_or(domain.length());
    GridSpec::periodic(n, x_lo, length).map_err(|e| CliError::Config(format!("grid: {e}")))
}

fn time_tag(i: usize) -> String {
    format!("{i:02}")
}

fn breaking(config: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let profile = profile(config)?;
    let bp = find_breaking(&profile).map_err(runtime("breaking point"))?;
    run.scalar("t_b", bp.t_b);
    run.scalar("x_b", bp.x_b);
    run.scalar("v_b", bp.v_b);
    run.scalar("zeta_b", bp.zeta_b);
    run.json("breaking.json", &bp)?;

    let mut times: Vec<f64> = if config.times.is_empty() { vec![0.0, 0.5] } else { config.times.clone() };
    times.retain(|&t| t < bp.t_b);
    times.push(bp.t_b);
    let domain = profile.domain();
    let n = config.grid.map_or(DEFAULT_CURVE_POINTS, |g| g.n_points);
    let zeta: Vec<f64> = (0..n).map(|i| domain.x_lo + domain.length() * i as f64 / n as f64).collect();
    for (i, &t) in times.iter().enumerate() {
        let curve = sample_parametric(&profile, t, &zeta).map_err(runtime("characteristics"))?;
        let file = format!("profile_{}.csv", time_tag(i));
        io::write_parametric_csv(&run.path(&file), &curve).map_err(runtime(&file))?;
        run.record(&file, ArtifactKind::Parametric, Some(t));
    }
    Ok(())
}

fn riemann_spectrum(config: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let profile = profile(config)?;
    if !profile.is_periodic() {
        return Err(CliError::Config("riemann-spectrum needs a periodic profile".into()));
    }
    let grid = grid_for(config, &profile, DEFAULT_SPECTRUM_POINTS)?;
    let t = match config.t_end.or(config.times.first().copied()) {
        Some(t) => t,
        None => find_breaking(&profile).map_err(runtime("breaking point"))?.t_b,
    };
    let field = resample_uniform(&profile, t, grid).map_err(runtime("resampling"))?;
    io::write_field_csv(&run.path("field.csv"), &field).map_err(runtime("field.csv"))?;
    run.record("field.csv", ArtifactKind::Snapshot, Some(t));
    let spectrum = amplitude_spectrum(&field);
    run.spectrum_csv("spectrum.csv", &spectrum)?;
    let n = grid.n_points as f64;
    let band = config.band.unwrap_or([8.0 * grid.k0(), n / 8.0 * grid.k0()]);
    let (amp, energy) = run.fits("", &spectrum, band)?;
    run.json("fit.json", &[amp, energy])?;
    run.scalar("t", t);
    run.scalar("parseval_residual", parseval_residual(&field).map_err(runtime("parseval"))?);
    Ok(())
}

fn bessel_fubini(config: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let t = config.t_end.or(config.times.first().copied()).unwrap_or(1.0);
    let modes = config.modes.unwrap_or(DEFAULT_SPECTRUM_MODES);
    let series = bessel_fubini_spectrum(t, modes).map_err(runtime("Bessel-Fubini series"))?;
    io::write_amplitude_csv(&run.path("amplitudes.csv"), &series).map_err(runtime("amplitudes.csv"))?;
    run.record("amplitudes.csv", ArtifactKind::AmplitudeSeries, Some(t));
    let spectrum = series.to_spectrum();
    run.spectrum_csv("spectrum.csv", &spectrum)?;
    let band = config.band.unwrap_or([10.0, modes as f64]);
    let (amp, energy) = run.fits("", &spectrum, band)?;
    run.json("fit.json", &[amp, energy])?;
    run.scalar("t", t);
    if let Some(g) = config.grid {
        let grid = GridSpec::periodic(g.n_points, 0.0, 2.0 * PI).map_err(|e| CliError::Config(format!("grid: {e}")))?;
        let field = bessel_fubini_field(t, grid, modes).map_err(runtime("Bessel-Fubini field"))?;
        io::write_field_csv(&run.path("field.csv"), &field).map_err(runtime("field.csv"))?;
        run.record("field.csv", ArtifactKind::Snapshot, Some(t));
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    model: Model,
    grid: GridSpec,
    dt: f64,
    cfl: f64,
    output_times: &'a [f64],
    t_end: f64,
    wall_clock_s: f64,
}

fn evolve(config: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let model = config.model.ok_or_else(|| CliError::Config("missing model".into()))?;
    let profile = match &config.profile {
        Some(_) => profile(config)?,
        None => {
            // sine whose inviscid breaking time under the model's own advection speed is 25.5
            let s0 = 1.0 / (model.advection() * REFERENCE_BREAKING_TIME);
            run.notes.push(format!("default profile: sine with amplitude {s0}"));
            InitialProfile::sine(s0, 1).map_err(runtime("default profile"))?
        }
    };
    let grid = grid_for(config, &profile, DEFAULT_EVOLVE_POINTS)?;
    let t_end = config.t_end.ok_or_else(|| CliError::Config("missing t_end".into()))?;
    let samples = WaveField::from_fn(grid, 0.0, |x| profile.value(x).unwrap_or(f64::NAN))
        .map_err(|e| CliError::Config(format!("profile does not cover the grid: {e}")))?;
    let mut state = SolverState::from_field(model, &samples).map_err(runtime("initial state"))?;
    let policy = StepPolicy::for_model(model);
    let dt = state.stable_dt(policy);
    let (mass, momentum) = (state.mass(), state.momentum());
    let started = Instant::now();
    let snapshots = integrate(&mut state, t_end, &config.times, policy).map_err(runtime("time integration"))?;
    let wall = started.elapsed().as_secs_f64();
    let output_times: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let default_band = match model {
        Model::Ostrovsky { .. } => [30.0 * grid.k0(), grid.n_points as f64 / 8.0 * grid.k0()],
        _ => [2.0 * grid.k0(), 30.0 * grid.k0()],
    };
    let band = config.band.unwrap_or(default_band);
    for (i, snap) in snapshots.iter().enumerate() {
        let tag = time_tag(i);
        let file = format!("snapshot_{tag}.csv");
        io::write_field_csv(&run.path(&file), snap).map_err(runtime(&file))?;
        run.record(&file, ArtifactKind::Snapshot, Some(snap.t));
        let spectrum = amplitude_spectrum(snap);
        run.spectrum_csv(&format!("spectrum_{tag}.csv"), &spectrum)?;
        if let Err(e) = run.fits(&format!("t{tag}_"), &spectrum, band) {
            run.notes.push(format!("no slope at t = {}: {e}", snap.t));
        }
    }
    run.scalar("dt", dt);
    run.scalar("mass_drift", state.mass() - mass);
    run.scalar("momentum_change_relative", if momentum > 0.0 { state.momentum() / momentum - 1.0 } else { 0.0 });
    run.scalar("max_abs_final", state.max_abs());
    let manifest =
        Manifest { model, grid, dt, cfl: policy.cfl, output_times: &output_times, t_end, wall_clock_s: wall };
    run.json("manifest.json", &manifest)
}

fn resolve(config: &ExperimentConfig, path: &Path) -> PathBuf {
    match &config.base_dir {
        Some(base) if path.is_relative() => base.join(path),
        _ => path.to_path_buf(),
    }
}

fn slope(config: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let input = resolve(config, config.input.as_deref().ok_or_else(|| CliError::Config("missing input".into()))?);
    let header = first_line(&input)?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let (spectrum, default_band) = if columns.contains(&"k") {
        let s = io::read_spectrum_csv(&input).map_err(runtime("input spectrum"))?;
        (s, None)
    } else {
        let value = ["u", "v"].into_iter().find(|c| columns.contains(c));
        let value = value.ok_or_else(|| CliError::Config(format!("{}: need columns k or x,u", input.display())))?;
        let cols = io::read_columns(&input, &["x", value]).map_err(runtime("input field"))?;
        let field = field_from_samples(&cols[0], &cols[1])?;
        let n = field.grid.n_points as f64;
        (amplitude_spectrum(&field), Some([8.0 * field.grid.k0(), n / 8.0 * field.grid.k0()]))
    };
    let band =
        config.band.or(default_band).ok_or_else(|| CliError::Config("slope on a spectrum file needs `band`".into()))?;
    run.spectrum_csv("spectrum.csv", &spectrum)?;
    let (amp, energy) = run.fits("", &spectrum, band)?;
    run.json("fit.json", &[amp, energy])
}

fn first_line(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(text.lines().next().unwrap_or("").to_string())
}

/// Rebuilds a periodic field from uniformly spaced `x` samples.
fn field_from_samples(x: &[f64], u: &[f64]) -> Result<WaveField, CliError> {
    let n = x.len();
    if n < 2 {
        return Err(CliError::Config("input field has fewer than two samples".into()));
    }
    let dx = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x.iter().enumerate().all(|(i, &xi)| (xi - x[0] - i as f64 * dx).abs() <= 1e-9 * dx.abs().max(1.0));
    if !uniform {
        return Err(CliError::Config("input field is not uniformly sampled".into()));
    }
    let grid = GridSpec::periodic(n, x[0], dx * n as f64).map_err(|e| CliError::Config(format!("input field: {e}")))?;
    WaveField::new(grid, u.to_vec(), 0.0).map_err(runtime("input field"))
}

fn exponent(config: &ExperimentConfig, run: &mut Run) -> Result<(), CliError> {
    let profile = profile(config)?;
    let bp = find_breaking(&profile).map_err(runtime("breaking point"))?;
    run.json("breaking.json", &bp)?;
    let window = config.window.unwrap_or(DEFAULT_EXPONENT_WINDOW);
    let n = config.samples.unwrap_or(DEFAULT_EXPONENT_SAMPLES);
    if n < 16 {
        return Err(CliError::Config(format!("samples = {n}, need at least 16")));
    }
    let ratio = (window[1] / window[0]).ln();
    let r: Vec<f64> = (0..n).map(|j| window[0] * (ratio * j as f64 / (n - 1) as f64).exp()).collect();
    let dv = r
        .iter()
        .map(|&r| Ok((eval_implicit(&profile, bp.x_b + r, bp.t_b)? - bp.v_b).abs()))
        .collect::<riemann_spectra::Result<Vec<f64>>>()
        .map_err(runtime("front samples"))?;
    let path = run.path("exponent_samples.csv");
    write_pairs(&path, ["r", "dv"], &r, &dv)?;
    run.record("exponent_samples.csv", ArtifactKind::ExponentSamples, Some(bp.t_b));
    let fit = fit_power_law(&r, &dv, window).map_err(runtime("exponent fit"))?;
    run.json("exponent.json", &fit)?;
    run.scalar("exponent", fit.exponent);
    run.scalar("exponent_residual", fit.residual);
    run.scalar("t_b", bp.t_b);
    run.scalar("degeneracy", bp.degeneracy as f64);
    Ok(())
}

fn write_pairs(path: &Path, header: [&str; 2], a: &[f64], b: &[f64]) -> Result<(), CliError> {
    let mut text = format!("{},{}\n", header[0], header[1]);
    for (x, y) in a.iter().zip(b) {
        text.push_str(&format!("{},{}\n", io::fmt_f64(*x), io::fmt_f64(*y)));
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
