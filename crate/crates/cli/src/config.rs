//! Experiment configuration: schema, file loading and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use riemann_spectra::pde::Model;
use riemann_spectra::profiles::ProfileParams;
use riemann_spectra::{GridSpec, ProfileSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable that replaces `output_dir`.
pub const OUT_ENV: &str = "RIEMANN_SPECTRA_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Breaking,
    RiemannSpectrum,
    BesselFubini,
    Evolve,
    Slope,
    Exponent,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Breaking => "breaking",
            Experiment::RiemannSpectrum => "riemann-spectrum",
            Experiment::BesselFubini => "bessel-fubini",
            Experiment::Evolve => "evolve",
            Experiment::Slope => "slope",
            Experiment::Exponent => "exponent",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid size with an optional explicit box; the box defaults to the profile domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<[f64; 2]>,
    /// Series length for `bessel-fubini`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Distance window `[r_min, r_max]` for `exponent`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Field or spectrum CSV analysed by `slope`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Directory that relative paths resolve against; not part of the schema.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
    /// Appended to the output directory when several configs run together.
    #[serde(skip)]
    pub subdir: Option<String>,
}

/// Command-line replacements for config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub profile: Option<String>,
    pub model: Option<String>,
    pub t_end: Option<f64>,
    pub grid_n: Option<usize>,
    pub band: Option<[f64; 2]>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    /// Reads JSON (`.json`) or TOML (anything else that parses as TOML).
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config: ExperimentConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?
        };
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(p) = &o.profile {
            self.profile = Some(parse_profile(p)?);
        }
        if let Some(m) = &o.model {
            self.model = Some(parse_model(m)?);
        }
        if let Some(t) = o.t_end {
            self.t_end = Some(t);
        }
        if let Some(n) = o.grid_n {
            let grid = self.grid.get_or_insert(GridConfig { n_points: n, x_lo: None, length: None });
            grid.n_points = n;
        }
        if let Some(b) = o.band {
            self.band = Some(b);
        }
        Ok(())
    }

    /// Output directory: the environment variable wins over the config file.
    pub fn resolved_output_dir(&self) -> PathBuf {
        let base = match std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
            Some(dir) => PathBuf::from(dir),
            None => self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
        };
        match &self.subdir {
            Some(sub) => base.join(sub),
            None => base,
        }
    }

    /// Schema checks that do not need any computation.
    pub fn validate(&self, experiment: Experiment) -> Result<(), CliError> {
        if let Some(declared) = self.experiment {
            if declared != experiment {
                return Err(config_err(format!(
                    "config declares experiment {declared}, command asks for {experiment}"
                )));
            }
        }
        if let Some(grid) = &self.grid {
            let probe = GridSpec::periodic(grid.n_points, 0.0, 1.0);
            if probe.is_err() || !grid.n_points.is_power_of_two() {
                return Err(config_err(format!("grid.n_points = {} must be a power of two >= 16", grid.n_points)));
            }
            if grid.length.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
                return Err(config_err("grid.length must be positive"));
            }
        }
        if let Some([lo, hi]) = self.band {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(config_err(format!("band [{lo}, {hi}] must satisfy 0 < lo < hi")));
            }
        }
        if let Some([lo, hi]) = self.window {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(config_err(format!("window [{lo}, {hi}] must satisfy 0 < lo < hi")));
            }
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(config_err("times must be finite, non-negative and sorted"));
        }
        if self.t_end.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
            return Err(config_err("t_end must be finite and non-negative"));
        }
        let need = |ok: bool, field: &str| {
            if ok {
                Ok(())
            } else {
                Err(config_err(format!("experiment {experiment} needs `{field}`")))
            }
        };
        match experiment {
            Experiment::Breaking | Experiment::RiemannSpectrum | Experiment::Exponent => {
                need(self.profile.is_some(), "profile")
            }
            Experiment::BesselFubini => Ok(()),
            Experiment::Evolve => {
                need(self.model.is_some(), "model")?;
                need(self.t_end.is_some(), "t_end")?;
                if let (Some(t_end), Some(last)) = (self.t_end, self.times.last()) {
                    if *last > t_end {
                        return Err(config_err(format!("output time {last} exceeds t_end = {t_end}")));
                    }
                }
                let default_profile = !matches!(self.model, Some(Model::Ostrovsky { .. }));
                need(self.profile.is_some() || default_profile, "profile")
            }
            Experiment::Slope => need(self.input.is_some(), "input"),
        }
    }
}

/// `KIND` or `KIND:key=value,key=value`, e.g. `sine:amplitude=0.5,wavenumber=2`.
pub fn parse_profile(text: &str) -> Result<ProfileSpec, CliError> {
    let value = tagged_value(text)?;
    let kind = value["kind"].clone();
    let mut spec = serde_json::Map::new();
    spec.insert("kind".into(), kind);
    let params: serde_json::Map<_, _> = value
        .as_object()
        .into_iter()
        .flatten()
        .filter(|(k, _)| *k != "kind")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    spec.insert("params".into(), serde_json::Value::Object(params));
    let spec: ProfileSpec = serde_json::from_value(serde_json::Value::Object(spec))
        .map_err(|e| config_err(format!("--profile {text}: {e}")))?;
    if let ProfileParams::Tabulated { .. } = spec.kind {
        return Err(config_err("tabulated profiles need a config file"));
    }
    Ok(spec)
}

/// `burgers:nu=0.1`, `kdv` or `ostrovsky:gamma=1`.
pub fn parse_model(text: &str) -> Result<Model, CliError> {
    serde_json::from_value(tagged_value(text)?).map_err(|e| config_err(format!("--model {text}: {e}")))
}

fn tagged_value(text: &str) -> Result<serde_json::Value, CliError> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut map = serde_json::Map::new();
    map.insert("kind".into(), kind.trim().replace('-', "_").into());
    for pair in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = pair.split_once('=').ok_or_else(|| config_err(format!("expected key=value in {text:?}")))?;
        let value = value.trim();
        let parsed = match value.parse::<u64>() {
            Ok(u) => serde_json::Value::from(u),
            Err(_) => value
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(serde_json::Value::Number)
                .ok_or_else(|| config_err(format!("{key}: {value:?} is not a number")))?,
        };
        map.insert(key.trim().into(), parsed);
    }
    Ok(serde_json::Value::Object(map))
}

/// `LO,HI`
pub fn parse_band(text: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = text.split_once(',').ok_or("expected LO,HI")?;
    let lo = lo.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([lo, hi])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_and_model_flags() {
        let p = parse_profile("sine:amplitude=0.5,wavenumber=2").unwrap();
        assert_eq!(p.kind, ProfileParams::Sine { amplitude: 0.5, wavenumber: 2 });
        let g = parse_profile("gaussian").unwrap();
        assert_eq!(g.kind, ProfileParams::Gaussian { amplitude: 1.0, width: 1.0 });
        assert!(parse_profile("quintic-degenerate:half_width=3").is_ok());
        assert!(parse_profile("square").is_err());
        assert!(parse_profile("sine:amplitude").is_err());
        assert_eq!(parse_model("burgers:nu=0.1").unwrap(), Model::Burgers { nu: 0.1 });
        assert_eq!(parse_model("kdv").unwrap(), Model::Kdv);
        assert_eq!(parse_model("ostrovsky:gamma=1").unwrap(), Model::Ostrovsky { gamma: 1.0 });
        assert_eq!(parse_model("burgers").unwrap(), Model::Burgers { nu: 0.1 });
        assert!(parse_model("ostrovsky").is_err());
        assert_eq!(parse_band("10, 500").unwrap(), [10.0, 500.0]);
        assert!(parse_band("10").is_err());
    }

    #[test]
    fn toml_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("c.toml");
        std::fs::write(
            &toml_path,
            "experiment = \"evolve\"\nt_end = 1.0\ntimes = [0.5]\n[model]\nkind = \"burgers\"\nnu = 0.1\n\
             [profile]\nkind = \"sine\"\nparams = { amplitude = 0.5 }\n[grid]\nn_points = 64\n",
        )
        .unwrap();
        let json_path = dir.path().join("c.json");
        std::fs::write(
            &json_path,
            r#"{"experiment": "evolve", "t_end": 1.0, "times": [0.5], "model": {"kind": "burgers", "nu": 0.1},
                "profile": {"kind": "sine", "params": {"amplitude": 0.5}}, "grid": {"n_points": 64}}"#,
        )
        .unwrap();
        let a = ExperimentConfig::from_file(&toml_path).unwrap();
        let b = ExperimentConfig::from_file(&json_path).unwrap();
        assert_eq!(a, b);
        a.validate(Experiment::Evolve).unwrap();
        assert!(matches!(a.validate(Experiment::Breaking), Err(CliError::Config(_))));
    }

    #[test]
    fn schema_violations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, r#"{"experiment": "evolve", "colour": 3}"#).unwrap();
        assert!(matches!(ExperimentConfig::from_file(&path), Err(CliError::Config(_))));
        let mut c = ExperimentConfig {
            grid: Some(GridConfig { n_points: 100, x_lo: None, length: None }),
            ..Default::default()
        };
        assert!(c.validate(Experiment::BesselFubini).is_err());
        c.grid = None;
        c.band = Some([5.0, 1.0]);
        assert!(c.validate(Experiment::BesselFubini).is_err());
        c.band = None;
        c.times = vec![2.0, 1.0];
        assert!(c.validate(Experiment::BesselFubini).is_err());
        let evolve =
            ExperimentConfig { model: Some(Model::Kdv), t_end: Some(1.0), times: vec![2.0], ..Default::default() };
        assert!(evolve.validate(Experiment::Evolve).is_err());
        let ostrovsky =
            ExperimentConfig { model: Some(Model::Ostrovsky { gamma: 1.0 }), t_end: Some(1.0), ..Default::default() };
        assert!(ostrovsky.validate(Experiment::Evolve).is_err());
    }

    #[test]
    fn overrides_replace_fields() {
        let mut c = ExperimentConfig::default();
        c.apply(&Overrides {
            profile: Some("gaussian:width=2".into()),
            model: Some("kdv".into()),
            t_end: Some(3.0),
            grid_n: Some(128),
            band: Some([1.0, 2.0]),
        })
        .unwrap();
        assert_eq!(c.model, Some(Model::Kdv));
        assert_eq!(c.t_end, Some(3.0));
        assert_eq!(c.grid.unwrap().n_points, 128);
        assert_eq!(c.band, Some([1.0, 2.0]));
        assert_eq!(c.profile.unwrap().kind, ProfileParams::Gaussian { amplitude: 1.0, width: 2.0 });
    }
}
