//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use riemann_spectra::analytic::{bessel_fubini_field, bessel_fubini_spectrum};
use riemann_spectra::pde::{init_state, integrate, Model, SolverState, StepPolicy};
use riemann_spectra::riemann::{
    eval_implicit, field_exponent, find_breaking, local_exponent, resample_uniform, transform_general_speed,
};
use riemann_spectra::spectra::{amplitude_spectrum, best_power_law, fit_slope, parseval_residual};
use riemann_spectra::{GridSpec, InitialProfile, SpeedLaw, WaveField};

const EXPONENT_WINDOW: [f64; 2] = [1e-6, 1e-3];

/// Fields analyzed by earlier criteria, rechecked for Parseval by the last one.
#[derive(Default)]
struct Ctx {
    fields: Vec<(String, WaveField)>,
}

struct Report {
    checks: Vec<(bool, String)>,
}

impl Report {
    fn new() -> Self {
        Report { checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.checks.push((ok, detail));
    }

    fn within(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        self.check((value - target).abs() <= tol, format!("{label} = {value:.6} (target {target:.6} +- {tol})"));
    }

    fn relative(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        let rel = (value - target).abs() / target.abs();
        self.check(rel <= tol, format!("{label} rel err {rel:.1e} (<= {tol:.0e})"));
    }

    fn fail(&mut self, detail: String) {
        self.check(false, detail);
    }
}

type Criterion = fn(&mut Ctx, &mut Report);

fn c1_breaking_point(_: &mut Ctx, r: &mut Report) {
    let bp = find_breaking(&InitialProfile::gaussian(1.0, 1.0).unwrap()).unwrap();
    r.relative("t_b", bp.t_b, 0.5_f64.exp() / 2.0_f64.sqrt(), 1e-9);
    r.relative("zeta_b", bp.zeta_b, 0.5_f64.sqrt(), 1e-9);
    r.relative("v_b", bp.v_b, (-0.5_f64).exp(), 1e-9);
    r.relative("x_b", bp.x_b, 2.0_f64.sqrt(), 1e-9);
}

fn c2_bessel_fubini_slope(_: &mut Ctx, r: &mut Report) {
    let spectrum = bessel_fubini_spectrum(1.0, 500).unwrap().to_spectrum();
    let amp = fit_slope(&spectrum, [10.0, 500.0], false).unwrap();
    let energy = fit_slope(&spectrum, [10.0, 500.0], true).unwrap();
    r.within("amplitude slope", amp.slope, -4.0 / 3.0, 0.03);
    r.within("energy slope", energy.slope, -8.0 / 3.0, 0.06);
}

fn c3_singularity_exponents(_: &mut Ctx, r: &mut Report) {
    for (name, profile, target) in [
        ("gaussian", InitialProfile::gaussian(1.0, 1.0).unwrap(), 1.0 / 3.0),
        ("quintic", InitialProfile::quintic_degenerate(4.0).unwrap(), 1.0 / 5.0),
    ] {
        let start = Instant::now();
        let bp = find_breaking(&profile).unwrap();
        let fit = local_exponent(&profile, &bp, EXPONENT_WINDOW, 64).unwrap();
        r.within(&format!("{name} exponent"), fit.exponent, target, 0.02);
        let elapsed = start.elapsed();
        r.check(elapsed < Duration::from_secs(5), format!("{name} took {elapsed:.2?} (< 5s)"));
    }
}

fn c4_riemann_spectrum(ctx: &mut Ctx, r: &mut Report) {
    let profile = InitialProfile::gaussian(1.0, 1.0).unwrap();
    let n = 1 << 14;
    let grid = GridSpec::periodic(n, -20.0, 40.0).unwrap();
    let t_b = find_breaking(&profile).unwrap().t_b;
    let field = resample_uniform(&profile, t_b, grid).unwrap();
    // band given in mode indices [8, N/8]
    let band = [8.0 * grid.k0(), (n / 8) as f64 * grid.k0()];
    let spectrum = amplitude_spectrum(&field);
    let amp = fit_slope(&spectrum, band, false).unwrap();
    let energy = fit_slope(&spectrum, band, true).unwrap();
    r.within("amplitude slope", amp.slope, -4.0 / 3.0, 0.05);
    r.within("energy slope", energy.slope, -8.0 / 3.0, 0.10);
    ctx.fields.push(("riemann at t_b".into(), field));
}

fn c5_general_speed(_: &mut Ctx, r: &mut Report) {
    // v = c + w(x - c t, t) solves v_t + v v_x = 0 whenever w does
    let shift = 2.0;
    let profile = InitialProfile::gaussian(1.0, 1.0).unwrap();
    let bp = find_breaking(&profile).unwrap();
    let grid = GridSpec::periodic(1 << 20, -20.0, 40.0).unwrap();
    let w = resample_uniform(&profile, bp.t_b, grid).unwrap();
    let moved = GridSpec::periodic(grid.n_points, grid.x_lo + shift * bp.t_b, grid.length).unwrap();
    let v = WaveField::new(moved, w.values.iter().map(|w| w + shift).collect(), bp.t_b).unwrap();
    let u = transform_general_speed(&v, &SpeedLaw::Exp).unwrap();
    let x_b = bp.x_b + shift * bp.t_b;
    let fit = field_exponent(&u, x_b, (bp.v_b + shift).ln(), EXPONENT_WINDOW).unwrap();
    r.within("exponent of u = ln v", fit.exponent, 1.0 / 3.0, 0.02);
}

fn c6_burgers(ctx: &mut Ctx, r: &mut Report) {
    let grid = GridSpec::periodic(2048, 0.0, 2.0 * PI).unwrap();
    let model = Model::Burgers { nu: 0.1 };
    let mut state = init_state(model, grid, &InitialProfile::sine(1.0 / 25.5, 1).unwrap()).unwrap();
    let out = integrate(&mut state, 100.0, &[25.0, 100.0], StepPolicy::for_model(model)).unwrap();
    for (field, band, target) in [(&out[0], [2.0, 30.0], -8.0 / 3.0), (&out[1], [50.0, 300.0], -2.0)] {
        match fit_slope(&amplitude_spectrum(field), band, true) {
            Ok(fit) => r.within(&format!("energy slope at t = {} over {band:?}", field.t), fit.slope, target, 0.15),
            Err(e) => r.fail(format!("t = {} over {band:?}: {e}", field.t)),
        }
    }
    ctx.fields.extend(out.into_iter().map(|f| (format!("burgers t = {}", f.t), f)));
}

fn c7_kdv(ctx: &mut Ctx, r: &mut Report) {
    let grid = GridSpec::periodic(2048, 0.0, 2.0 * PI).unwrap();
    let mut state = init_state(Model::Kdv, grid, &InitialProfile::sine(1.0 / (6.0 * 25.5), 1).unwrap()).unwrap();
    let scale = state.field().values.iter().map(|u| u.abs()).sum::<f64>() * grid.dx();
    let (mass, momentum) = (state.mass(), state.momentum());
    let out = integrate(&mut state, 25.5, &[], StepPolicy::for_model(Model::Kdv)).unwrap();
    let drift = (state.mass() - mass).abs() / scale;
    r.check(drift <= 1e-12, format!("mass drift {drift:.1e} of int|u| (<= 1e-12)"));
    r.relative("momentum", state.momentum(), momentum, 1e-8);
    match fit_slope(&amplitude_spectrum(&out[0]), [2.0, 30.0], true) {
        Ok(fit) => r.within("energy slope at t = 25.5 over [2, 30]", fit.slope, -8.0 / 3.0, 0.15),
        Err(e) => r.fail(format!("t = 25.5 over [2, 30]: {e}")),
    }
    ctx.fields.push(("kdv t = 25.5".into(), out[0].clone()));
}

fn c8_ostrovsky(ctx: &mut Ctx, r: &mut Report) {
    let n = 2048;
    let grid = GridSpec::periodic(n, 0.0, 2.0 * PI).unwrap();
    let profile = InitialProfile::sine(1.0, 1).unwrap();
    // inviscid breaking at t = 1; scan around it for the cleanest power law
    let times: Vec<f64> = (0..=80).map(|i| 0.9 + 0.0025 * i as f64).collect();
    let band = [30.0, (n / 8) as f64];
    let mut slopes = Vec::new();
    for gamma in [0.1, 1.0] {
        let model = Model::Ostrovsky { gamma };
        let mut state = init_state(model, grid, &profile).unwrap();
        let out = integrate(&mut state, 1.1, &times, StepPolicy::for_model(model)).unwrap();
        let (i, fit) = best_power_law(&out, band, true).unwrap();
        r.within(&format!("gamma = {gamma} energy slope at t = {:.4}", out[i].t), fit.slope, -8.0 / 3.0, 0.2);
        slopes.push(fit.slope);
        ctx.fields.push((format!("ostrovsky gamma = {gamma}"), out[i].clone()));
    }
    let spread = (slopes[0] - slopes[1]).abs();
    r.check(spread <= 0.1, format!("slope difference across gamma {spread:.4} (<= 0.1)"));
}

fn c9_oracles(ctx: &mut Ctx, r: &mut Report) {
    let grid = GridSpec::periodic(1024, 0.0, 2.0 * PI).unwrap();
    let series = bessel_fubini_field(0.5, grid, 200).unwrap();
    let profile = InitialProfile::sine(1.0, 1).unwrap();
    let err = grid
        .xs()
        .iter()
        .zip(&series.values)
        .map(|(&x, &v)| (eval_implicit(&profile, x, 0.5).unwrap() - v).abs())
        .fold(0.0, f64::max);
    r.check(err < 1e-8, format!("Bessel-Fubini vs characteristics {err:.1e} (< 1e-8)"));
    ctx.fields.push(("bessel-fubini t = 0.5".into(), series));

    let grid = GridSpec::periodic(4096, 0.0, 40.0 * PI).unwrap();
    let soliton = |x: f64, t: f64| 2.0 / (x - 20.0 * PI - 4.0 * t).cosh().powi(2);
    let initial = WaveField::from_fn(grid, 0.0, |x| soliton(x, 0.0)).unwrap();
    let exact: Vec<f64> = grid.xs().iter().map(|&x| soliton(x, 1.0)).collect();
    let state = SolverState::from_field(Model::Kdv, &initial).unwrap();
    let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let mut evolved = state.clone();
    let out = integrate(&mut evolved, 1.0, &[], StepPolicy::for_model(Model::Kdv)).unwrap();
    let err = max_diff(&out[0].values, &exact);
    r.check(err < 1e-6, format!("soliton translation error {err:.1e} (< 1e-6)"));

    let run = |steps: usize| {
        let mut s = state.clone();
        for _ in 0..steps {
            s.step(1.0 / steps as f64).unwrap();
        }
        s.field().values
    };
    let (coarse, fine, reference) = (run(1000), run(2000), run(4000));
    let order = (max_diff(&coarse, &reference) / max_diff(&fine, &reference)).log2();
    r.check(order >= 3.8, format!("RK4 order {order:.3} (>= 3.8)"));
    ctx.fields.push(("kdv soliton t = 1".into(), out[0].clone()));
}

fn c10_invariants(ctx: &mut Ctx, r: &mut Report) {
    let worst = ctx
        .fields
        .iter()
        .map(|(name, f)| (name, parseval_residual(f).unwrap()))
        .fold((None, 0.0), |acc, (name, res)| if res >= acc.1 { (Some(name), res) } else { acc });
    r.check(
        !ctx.fields.is_empty() && worst.1 < 1e-12,
        format!(
            "Parseval over {} fields, worst {:.1e} ({}) (< 1e-12)",
            ctx.fields.len(),
            worst.1,
            worst.0.map_or("-", |s| s)
        ),
    );

    let mut rng = StdRng::seed_from_u64(20240611);
    let mut worst = 0.0_f64;
    for profile in [InitialProfile::gaussian(1.0, 1.0).unwrap(), InitialProfile::sine(1.0, 1).unwrap()] {
        let t_b = find_breaking(&profile).unwrap().t_b;
        let domain = profile.domain();
        for _ in 0..50 {
            let zeta = rng.random_range(domain.x_lo..domain.x_hi);
            let t = rng.random_range(0.0..t_b);
            let f = profile.value(zeta).unwrap();
            worst = worst.max((eval_implicit(&profile, zeta + t * f, t).unwrap() - f).abs());
        }
    }
    r.check(worst <= 1e-10, format!("characteristic constancy on 100 samples, worst {worst:.1e} (<= 1e-10)"));

    let field = match ctx.fields.first() {
        Some((_, f)) => f.clone(),
        None => WaveField::from_fn(GridSpec::periodic(256, 0.0, 2.0 * PI).unwrap(), 0.0, |x| x.sin().exp()).unwrap(),
    };
    let band = [field.grid.k0() * 8.0, field.grid.k0() * (field.grid.n_points / 8) as f64];
    let base = fit_slope(&amplitude_spectrum(&field), band, false).unwrap().slope;
    let worst = [1e-3, 0.37, 42.0, -5.0]
        .iter()
        .map(|&a| (fit_slope(&amplitude_spectrum(&field.map(|v| a * v)), band, false).unwrap().slope - base).abs())
        .fold(0.0, f64::max);
    r.check(worst <= 1e-12, format!("slope change under amplitude scaling {worst:.1e} (<= 1e-12)"));
}

fn main() {
    let criteria: [(&str, Criterion, Duration); 10] = [
        ("breaking point of the Gaussian", c1_breaking_point, Duration::from_secs(1)),
        ("Bessel-Fubini slope", c2_bessel_fubini_slope, Duration::from_secs(5)),
        ("singularity exponents", c3_singularity_exponents, Duration::from_secs(10)),
        ("Riemann spectrum at breaking", c4_riemann_spectrum, Duration::from_secs(30)),
        ("general speed law", c5_general_speed, Duration::from_secs(60)),
        ("viscous Burgers spectra", c6_burgers, Duration::from_secs(120)),
        ("KdV small-k law", c7_kdv, Duration::from_secs(120)),
        ("reduced Ostrovsky large-k law", c8_ostrovsky, Duration::from_secs(120)),
        ("oracle equivalence", c9_oracles, Duration::from_secs(120)),
        ("invariant suite", c10_invariants, Duration::from_secs(120)),
    ];
    let mut ctx = Ctx::default();
    let mut failed = 0;
    for (i, (name, criterion, budget)) in criteria.iter().enumerate() {
        let mut report = Report::new();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| criterion(&mut ctx, &mut report)));
        let elapsed = start.elapsed();
        if let Err(payload) = outcome {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            report.fail(format!("aborted: {msg}"));
        }
        report.check(elapsed <= *budget, format!("runtime {elapsed:.2?} (<= {budget:?})"));
        let pass = report.checks.iter().all(|(ok, _)| *ok);
        if !pass {
            failed += 1;
        }
        let details: Vec<String> =
            report.checks.iter().map(|(ok, d)| if *ok { d.clone() } else { format!("FAILED {d}") }).collect();
        println!("criterion {:>2} {} [{name}]: {}", i + 1, if pass { "PASS" } else { "FAIL" }, details.join("; "));
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
