use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Parser;
use riemann_spectra_cli::config::parse_band;
use riemann_spectra_cli::{run_and_plot, CliError, Experiment, ExperimentConfig, Overrides, RunReport};

/// Breaking Riemann waves and their spectra: reproducible experiments.
///
/// Artifacts (CSV, report.json, recipe.txt) go to the config's output_dir,
/// or to $RIEMANN_SPECTRA_OUT when set. Exit status: 0 ok, 1 runtime error,
/// 2 configuration error.
#[derive(Debug, Parser)]
#[command(name = "riemann-spectra", version)]
struct Args {
    experiment: Experiment,
    /// JSON or TOML experiment file; repeat to run a sweep.
    #[arg(long = "config", value_name = "FILE")]
    configs: Vec<PathBuf>,
    /// Profile such as `gaussian`, `sine:amplitude=0.5`, `quintic-degenerate:half_width=4`.
    #[arg(long)]
    profile: Option<String>,
    /// Model such as `burgers:nu=0.1`, `kdv`, `ostrovsky:gamma=1`.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    /// Fit band `LO,HI` in wavenumber units.
    #[arg(long, value_parser = parse_band, allow_hyphen_values = true)]
    band: Option<[f64; 2]>,
    /// Number of configs run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load(args: &Args) -> Result<Vec<ExperimentConfig>, CliError> {
    let overrides = Overrides {
        profile: args.profile.clone(),
        model: args.model.clone(),
        t_end: args.t_end,
        grid_n: args.grid_n,
        band: args.band,
    };
    let mut configs = if args.configs.is_empty() {
        vec![ExperimentConfig::default()]
    } else {
        args.configs.iter().map(|p| ExperimentConfig::from_file(p)).collect::<Result<Vec<_>, _>>()?
    };
    if configs.len() > 1 {
        for (i, (config, path)) in configs.iter_mut().zip(&args.configs).enumerate() {
            let stem = path.file_stem().map_or_else(|| format!("run{i}"), |s| s.to_string_lossy().into_owned());
            config.subdir = Some(format!("{i:02}_{stem}"));
        }
    }
    for config in &mut configs {
        config.apply(&overrides)?;
    }
    Ok(configs)
}

fn print_report(report: &RunReport) {
    println!("{} -> {}", report.experiment, report.output_dir.display());
    for (name, value) in &report.scalars {
        println!("  {name} = {}", riemann_spectra::io::fmt_f64(*value));
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let configs = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("riemann-spectra: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunReport, CliError>>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    let workers = args.jobs.clamp(1, configs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(config) = configs.get(i) else { break };
                let outcome = run_and_plot(args.experiment, config);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    let mut code = 0;
    for outcome in results.into_inner().unwrap().into_iter().flatten() {
        match outcome {
            Ok(report) => print_report(&report),
            Err(e) => {
                eprintln!("riemann-spectra: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    ExitCode::from(code)
}
