//! Exact simple-wave evolution `v_t + v v_x = 0`, `v(x, 0) = F(x)`.
//!
//! Every point of the profile travels along the characteristic
//! `x = zeta + t F(zeta)` carrying the value `F(zeta)`. Until the breaking
//! time `t_b = -1 / min F'` this map is one-to-one and the wave is the unique
//! solution of `v = F(x - t v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, WaveField};
use crate::profiles::InitialProfile;

/// Samples used by the dense pre-scan for the minimum of `F'`.
pub const PRESCAN_SAMPLES: usize = 4096;
/// Relative cutoff below which `F'''(zeta_b)` is treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
/// Default distance window from `x_b` for exponent fits.
pub const DEFAULT_EXPONENT_WINDOW: [f64; 2] = [1e-6, 1e-3];
/// Minimum number of mesh points used by [`resample_uniform`].
pub const RESAMPLE_MIN_POINTS: usize = 1 << 20;
/// Finest characteristic spacing next to `zeta_b` in the resampling mesh.
pub const RESAMPLE_FINEST_SPACING: f64 = 1e-10;

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakingPoint {
    /// Characteristic coordinate of the minimum of `F'`.
    pub zeta_b: f64,
    pub t_b: f64,
    /// Eulerian breaking location `zeta_b + t_b F(zeta_b)`.
    pub x_b: f64,
    pub v_b: f64,
    /// `F'''(zeta_b)`
    pub f3: f64,
    /// `p` such that `F^(2p+1)` is the first non-vanishing odd derivative past `F'`.
    pub degeneracy: u32,
}

/// Locates the global minimum of `F'` and the resulting breaking point.
pub fn find_breaking(profile: &InitialProfile) -> Result<BreakingPoint> {
    let domain = profile.domain();
    let n = PRESCAN_SAMPLES;
    let step = domain.length() / n as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..n {
        let s = profile.slope(domain.x_lo + i as f64 * step)?;
        if s < best.1 {
            best = (i, s);
        }
    }
    if best.1 >= 0.0 {
        return Err(Error::NoBreaking { min_slope: best.1 });
    }
    // F'' must be available before committing to the bracket.
    profile.eval(domain.x_lo, 2)?;

    let center = domain.x_lo + best.0 as f64 * step;
    let (mut a, mut b) = (center - step, center + step);
    if !domain.periodic {
        a = a.max(domain.x_lo);
        b = b.min(domain.x_hi.next_down());
    }
    let curvature = |x: f64| profile.eval(x, 2);
    let zeta = if curvature(a)? <= 0.0 && curvature(b)? >= 0.0 {
        bisect_sign_change(a, b, curvature)?
    } else {
        golden_minimize(a, b, |x| profile.slope(x))?
    };
    let zeta_b = domain.reduce(zeta)?;

    let slope = profile.slope(zeta_b)?;
    if slope >= 0.0 {
        return Err(Error::NoBreaking { min_slope: slope });
    }
    let t_b = -1.0 / slope;
    let v_b = profile.value(zeta_b)?;
    let f3 = profile.eval(zeta_b, 3)?;
    let degeneracy = classify_degeneracy(profile, zeta_b, f3)?;
    Ok(BreakingPoint { zeta_b, t_b, x_b: zeta_b + t_b * v_b, v_b, f3, degeneracy })
}

fn classify_degeneracy(profile: &InitialProfile, zeta_b: f64, f3: f64) -> Result<u32> {
    let f5 = profile.eval(zeta_b, 5)?;
    if f3.abs() > DEGENERACY_THRESHOLD * f5.abs().max(1.0) {
        if f3 < 0.0 {
            return Err(Error::InvalidInput(format!("F''' = {f3} < 0 at the located minimum of F' (zeta = {zeta_b})")));
        }
        return Ok(1);
    }
    if f5 > 0.0 {
        Ok(2)
    } else {
        Err(Error::InvalidInput(format!(
            "minimum of F' at zeta = {zeta_b} is degenerate beyond fifth order (F^(5) = {f5})"
        )))
    }
}

/// Bisection for `f(a) <= 0 <= f(b)`, run until the bracket cannot shrink.
fn bisect_sign_change(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

fn golden_minimize(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..MAX_ITERATIONS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Characteristic samples `(zeta, x, v)` at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    pub zeta: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    /// True when `x(zeta)` decreases somewhere, i.e. the curve is multivalued.
    pub folded: bool,
}

impl ParametricCurve {
    /// Trapezoid rule for `int v dx` along the curve.
    pub fn integral(&self) -> f64 {
        self.x.windows(2).zip(self.v.windows(2)).map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0])).sum()
    }
}

/// Maps characteristic coordinates to `(x, v)` at time `t`; past breaking
/// the curve is returned with `folded` set rather than rejected.
pub fn sample_parametric(profile: &InitialProfile, t: f64, zeta: &[f64]) -> Result<ParametricCurve> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("time must be nonnegative, got {t}")));
    }
    if zeta.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("zeta samples must be sorted".into()));
    }
    let v = zeta.iter().map(|&z| profile.value(z)).collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = zeta.iter().zip(&v).map(|(&z, &f)| z + t * f).collect();
    let folded = x.windows(2).any(|w| w[1] < w[0]);
    Ok(ParametricCurve { zeta: zeta.to_vec(), x, v, t, folded })
}

/// Pointwise evaluator of the implicit solution with the breaking time cached.
#[derive(Debug, Clone)]
pub struct RiemannWave<'a> {
    profile: &'a InitialProfile,
    breaking: Option<BreakingPoint>,
    t_b: f64,
}

impl<'a> RiemannWave<'a> {
    pub fn new(profile: &'a InitialProfile) -> Result<Self> {
        match find_breaking(profile) {
            Ok(bp) => Ok(RiemannWave { profile, breaking: Some(bp), t_b: bp.t_b }),
            Err(Error::NoBreaking { .. }) => Ok(RiemannWave { profile, breaking: None, t_b: f64::INFINITY }),
            Err(Error::UnsupportedDerivativeOrder { .. }) => {
                // tabulated data: dense estimate of min F'
                let domain = profile.domain();
                let n = 16 * PRESCAN_SAMPLES;
                let step = domain.length() / n as f64;
                let mut min_slope = f64::INFINITY;
                for i in 0..n {
                    min_slope = min_slope.min(profile.slope(domain.x_lo + i as f64 * step)?);
                }
                let t_b = if min_slope < 0.0 { -1.0 / min_slope } else { f64::INFINITY };
                Ok(RiemannWave { profile, breaking: None, t_b })
            }
            Err(e) => Err(e),
        }
    }

    pub fn profile(&self) -> &InitialProfile {
        self.profile
    }

    pub fn breaking(&self) -> Option<&BreakingPoint> {
        self.breaking.as_ref()
    }

    pub fn breaking_time(&self) -> f64 {
        self.t_b
    }

    /// Characteristic foot `zeta` of the point `(x, t)`.
    pub fn foot(&self, x: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("time must be nonnegative, got {t}")));
        }
        if t > self.t_b {
            return Err(Error::PostBreaking { t, t_b: self.t_b });
        }
        solve_characteristic(self.profile, x, t)
    }

    /// `v(x, t)`, the root of `v = F(x - t v)`.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let zeta = self.foot(x, t)?;
        self.profile.value(zeta)
    }

    /// Samples the solution pointwise on `grid`.
    pub fn sample(&self, grid: GridSpec, t: f64) -> Result<WaveField> {
        let values = grid.xs().into_iter().map(|x| self.eval(x, t)).collect::<Result<Vec<_>>>()?;
        WaveField::new(grid, values, t)
    }
}

/// `v(x, t)` solving `v = F(x - t v)` for `0 <= t <= t_b`.
pub fn eval_implicit(profile: &InitialProfile, x: f64, t: f64) -> Result<f64> {
    RiemannWave::new(profile)?.eval(x, t)
}

/// Root of `g(zeta) = zeta + t F(zeta) - x`, which is nondecreasing for `t <= t_b`.
fn solve_characteristic(profile: &InitialProfile, x: f64, t: f64) -> Result<f64> {
    let domain = profile.domain();
    let g = |z: f64| -> Result<f64> { Ok(z + t * profile.value(z)? - x) };
    let tol = 1e-13 * x.abs().max(1.0);

    let start = if domain.periodic { x } else { x.clamp(domain.x_lo, domain.x_hi.next_down()) };
    let start = start - t * profile.value(start)?;
    let g0 = g(start)?;
    if g0 == 0.0 {
        return Ok(start);
    }

    // expand outward until the sign changes
    let mut step = 1e-3 * start.abs().max(1.0);
    let (mut lo, mut hi, mut g_lo, mut g_hi);
    let mut iterations = 0;
    if g0 > 0.0 {
        (hi, g_hi) = (start, g0);
        loop {
            lo = hi - step;
            g_lo = g(lo)?;
            if g_lo <= 0.0 {
                break;
            }
            (hi, g_hi) = (lo, g_lo);
            step *= 2.0;
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::ConvergenceFailure { iterations, residual: g_hi });
            }
        }
    } else {
        (lo, g_lo) = (start, g0);
        loop {
            hi = lo + step;
            g_hi = g(hi)?;
            if g_hi >= 0.0 {
                break;
            }
            (lo, g_lo) = (hi, g_hi);
            step *= 2.0;
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                return Err(Error::ConvergenceFailure { iterations, residual: g_lo });
            }
        }
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }

    // safeguarded Newton inside the bracket
    let mut z = if g_hi - g_lo > 0.0 { lo - g_lo * (hi - lo) / (g_hi - g_lo) } else { 0.5 * (lo + hi) };
    let mut polish = 0;
    for _ in 0..MAX_ITERATIONS {
        let gz = g(z)?;
        if gz == 0.0 {
            return Ok(z);
        }
        if gz < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        if gz.abs() <= tol {
            polish += 1;
            if polish > 2 {
                return Ok(z);
            }
        }
        let dg = 1.0 + t * profile.slope(z)?;
        let newton = z - gz / dg;
        let next = if dg > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next == z || hi - lo <= f64::EPSILON * z.abs().max(f64::MIN_POSITIVE) {
            let residual = g(z)?.abs();
            return if residual <= tol {
                Ok(z)
            } else {
                Err(Error::ConvergenceFailure { iterations: MAX_ITERATIONS, residual })
            };
        }
        z = next;
    }
    let residual = g(z)?.abs();
    if residual <= tol {
        Ok(z)
    } else {
        Err(Error::ConvergenceFailure { iterations: MAX_ITERATIONS, residual })
    }
}

/// Characteristic mesh used for resampling: uniform over one period (or the
/// whole domain) with a geometric cluster around `zeta_b`.
pub fn resampling_mesh(profile: &InitialProfile, t: f64) -> Result<ParametricCurve> {
    let wave = RiemannWave::new(profile)?;
    if t > wave.t_b {
        return Err(Error::PostBreaking { t, t_b: wave.t_b });
    }
    let zeta = mesh_points(profile, wave.breaking.map(|bp| bp.zeta_b));
    sample_parametric(profile, t, &zeta)
}

fn mesh_points(profile: &InitialProfile, center: Option<f64>) -> Vec<f64> {
    let domain = profile.domain();
    let length = domain.length();
    let (start, end) = match (domain.periodic, center) {
        (true, Some(c)) => (c - 0.5 * length, c + 0.5 * length),
        (true, None) => (domain.x_lo, domain.x_hi),
        (false, _) => (domain.x_lo, domain.x_hi.next_down()),
    };
    let n = RESAMPLE_MIN_POINTS;
    let h = (end - start) / n as f64;
    let mut zeta: Vec<f64> = (0..=n).map(|i| start + i as f64 * h).collect();
    if let Some(c) = center {
        let mut d = RESAMPLE_FINEST_SPACING;
        zeta.push(c);
        while d < h {
            for z in [c - d, c + d] {
                if z > start && z < end {
                    zeta.push(z);
                }
            }
            d *= 1.02;
        }
        zeta.sort_by(f64::total_cmp);
        zeta.dedup();
    }
    zeta
}

/// Riemann wave at time `t <= t_b` on a uniform grid, by linear interpolation
/// of the refined characteristic mesh.
pub fn resample_uniform(profile: &InitialProfile, t: f64, grid: GridSpec) -> Result<WaveField> {
    grid.validate()?;
    let curve = resampling_mesh(profile, t)?;
    let domain = profile.domain();
    let (x0, x1) = (curve.x[0], *curve.x.last().unwrap());
    let values = grid
        .xs()
        .into_iter()
        .map(|x| {
            let x = if domain.periodic { x0 + (x - x0).rem_euclid(domain.length()) } else { x };
            if x < x0 || x > x1 {
                return Err(Error::DomainError { what: format!("characteristic image [{x0}, {x1}]"), value: x });
            }
            polish_on_segment(profile, &curve, x, t)
        })
        .collect::<Result<Vec<_>>>()?;
    WaveField::new(grid, values, t)
}

/// Linear interpolation on the mesh segment holding `x`, refined by a few
/// safeguarded Newton steps on the characteristic equation inside that segment.
fn polish_on_segment(profile: &InitialProfile, curve: &ParametricCurve, x: f64, t: f64) -> Result<f64> {
    let xs = &curve.x;
    let p = xs.partition_point(|&xi| xi <= x).clamp(1, xs.len() - 1);
    let (xa, xb) = (xs[p - 1], xs[p]);
    let (mut lo, mut hi) = (curve.zeta[p - 1], curve.zeta[p]);
    let w = if xb > xa { ((x - xa) / (xb - xa)).clamp(0.0, 1.0) } else { 0.0 };
    let linear = curve.v[p - 1] + w * (curve.v[p] - curve.v[p - 1]);
    let mut zeta = lo + w * (hi - lo);
    let mut best = (f64::INFINITY, linear);
    for _ in 0..6 {
        let f = profile.value(zeta)?;
        let g = zeta + t * f - x;
        if g.abs() < best.0 {
            best = (g.abs(), f);
        }
        if g == 0.0 {
            break;
        }
        if g < 0.0 {
            lo = zeta;
        } else {
            hi = zeta;
        }
        let dg = 1.0 + t * profile.slope(zeta)?;
        let newton = zeta - g / dg;
        let next = if dg > 0.0 && newton >= lo && newton <= hi { newton } else { 0.5 * (lo + hi) };
        if next == zeta {
            break;
        }
        zeta = next;
    }
    Ok(best.1)
}

/// Local power-law fit `|v - v_b| ~ amplitude * r^exponent`, `r = x - x_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub window: [f64; 2],
    /// RMS misfit of the log-log regression.
    pub residual: f64,
}

/// Least-squares line through `(ln r, ln dv)`.
pub fn fit_power_law(r: &[f64], dv: &[f64], window: [f64; 2]) -> Result<ExponentFit> {
    if r.len() != dv.len() || r.len() < 2 {
        return Err(Error::InvalidInput(format!("need >= 2 paired samples, got {} and {}", r.len(), dv.len())));
    }
    if r.iter().chain(dv).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("power-law fit needs strictly positive samples".into()));
    }
    let lx: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = dv.iter().map(|v| v.ln()).collect();
    let (slope, intercept, residual) = crate::spectra::least_squares_line(&lx, &ly);
    Ok(ExponentFit { exponent: slope, amplitude: intercept.exp(), window, residual })
}

fn check_window(window: [f64; 2]) -> Result<()> {
    if !(window[0] > 0.0 && window[1] > window[0] && window[1].is_finite()) {
        return Err(Error::InvalidInput(format!("exponent window {window:?} must satisfy 0 < r_min < r_max")));
    }
    Ok(())
}

/// Singularity exponent at the breaking point, from `n_samples` log-spaced
/// distances `r` on the front side `x = x_b + r`.
pub fn local_exponent(
    profile: &InitialProfile,
    bp: &BreakingPoint,
    window: [f64; 2],
    n_samples: usize,
) -> Result<ExponentFit> {
    check_window(window)?;
    if n_samples < 16 {
        return Err(Error::InvalidInput(format!("need at least 16 samples, got {n_samples}")));
    }
    let ratio = (window[1] / window[0]).ln();
    let r: Vec<f64> = (0..n_samples).map(|j| window[0] * (ratio * j as f64 / (n_samples - 1) as f64).exp()).collect();
    let dv = r
        .iter()
        .map(|&r| {
            let zeta = solve_characteristic(profile, bp.x_b + r, bp.t_b)?;
            Ok((profile.value(zeta)? - bp.v_b).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(&r, &dv, window)?;
    if fit.residual > 0.1 {
        return Err(Error::WindowTooWide { r_min: window[0], r_max: window[1], residual: fit.residual });
    }
    Ok(fit)
}

/// Exponent fit from a sampled field, using grid points with `x - x_center` in the window.
pub fn field_exponent(field: &WaveField, x_center: f64, v_center: f64, window: [f64; 2]) -> Result<ExponentFit> {
    check_window(window)?;
    let (r, dv): (Vec<f64>, Vec<f64>) = field
        .xs()
        .into_iter()
        .zip(&field.values)
        .map(|(x, &v)| (x - x_center, (v - v_center).abs()))
        .filter(|&(r, dv)| r >= window[0] && r <= window[1] && dv > 0.0)
        .unzip();
    if r.len() < 16 {
        return Err(Error::InvalidInput(format!("only {} field samples fall in window {window:?}", r.len())));
    }
    let fit = fit_power_law(&r, &dv, window)?;
    if fit.residual > 0.1 {
        return Err(Error::WindowTooWide { r_min: window[0], r_max: window[1], residual: fit.residual });
    }
    Ok(fit)
}

/// Invertible nonlinear wave speed `V(u)` of `u_t + V(u) u_x = 0`.
pub trait SpeedMap {
    fn speed(&self, u: f64) -> f64;
    fn derivative(&self, u: f64) -> f64;
}

/// Speed map assembled from two closures.
pub struct FnSpeed<S, D> {
    pub speed: S,
    pub derivative: D,
}

impl<S: Fn(f64) -> f64, D: Fn(f64) -> f64> SpeedMap for FnSpeed<S, D> {
    fn speed(&self, u: f64) -> f64 {
        (self.speed)(u)
    }
    fn derivative(&self, u: f64) -> f64 {
        (self.derivative)(u)
    }
}

/// Closed-form speed laws selectable from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SpeedLaw {
    Identity,
    /// `V(u) = scale * u + offset`
    Affine {
        scale: f64,
        offset: f64,
    },
    Exp,
    Log,
}

impl SpeedMap for SpeedLaw {
    fn speed(&self, u: f64) -> f64 {
        match *self {
            SpeedLaw::Identity => u,
            SpeedLaw::Affine { scale, offset } => scale * u + offset,
            SpeedLaw::Exp => u.exp(),
            SpeedLaw::Log => u.ln(),
        }
    }
    fn derivative(&self, u: f64) -> f64 {
        match *self {
            SpeedLaw::Identity => 1.0,
            SpeedLaw::Affine { scale, .. } => scale,
            SpeedLaw::Exp => u.exp(),
            SpeedLaw::Log => 1.0 / u,
        }
    }
}

/// Converts a speed field `v = V(u)` back to the wave field `u = V^{-1}(v)`.
pub fn transform_general_speed(v_field: &WaveField, speed: &impl SpeedMap) -> Result<WaveField> {
    let mut values = Vec::with_capacity(v_field.values.len());
    let mut guess = v_field.values.first().copied().unwrap_or(0.0);
    for &v in &v_field.values {
        let u = invert_speed(speed, v, guess)?;
        values.push(u);
        guess = u;
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    let probes = (0..=64).map(|i| lo + (hi - lo) * i as f64 / 64.0);
    for u in values.iter().copied().chain(probes) {
        let slope = speed.derivative(u);
        if !(slope > 0.0) {
            return Err(Error::NotInvertible { u, slope });
        }
    }
    WaveField::new(v_field.grid, values, v_field.t)
}

fn invert_speed(speed: &impl SpeedMap, v: f64, guess: f64) -> Result<f64> {
    let tol = 1e-13 * v.abs().max(1.0);
    let h = |u: f64| speed.speed(u) - v;
    let start = if h(guess).is_finite() { guess } else { v };
    let h0 = h(start);
    if !h0.is_finite() {
        return Err(Error::NotInvertible { u: start, slope: speed.derivative(start) });
    }
    if h0 == 0.0 {
        return Ok(start);
    }
    let mut step = 1e-3 * start.abs().max(1.0);
    let (mut lo, mut hi) = (start, start);
    let mut found = false;
    for _ in 0..MAX_ITERATIONS {
        let probe = if h0 > 0.0 { lo - step } else { hi + step };
        let hp = h(probe);
        if hp.is_nan() {
            step *= 0.5;
            continue;
        }
        if h0 > 0.0 {
            hi = lo;
            lo = probe;
            if hp <= 0.0 {
                found = true;
                break;
            }
        } else {
            lo = hi;
            hi = probe;
            if hp >= 0.0 {
                found = true;
                break;
            }
        }
        step *= 2.0;
    }
    if !found {
        return Err(Error::NotInvertible { u: start, slope: speed.derivative(start) });
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let hu = h(u);
        if hu == 0.0 {
            return Ok(u);
        }
        if hu < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let d = speed.derivative(u);
        let newton = u - hu / d;
        let next = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hu.abs() <= tol && (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1e-300) {
            return Ok(next);
        }
        if next == u {
            return if hu.abs() <= tol {
                Ok(u)
            } else {
                Err(Error::ConvergenceFailure { iterations: MAX_ITERATIONS, residual: hu })
            };
        }
        u = next;
    }
    let residual = h(u);
    if residual.abs() <= tol {
        Ok(u)
    } else {
        Err(Error::ConvergenceFailure { iterations: MAX_ITERATIONS, residual })
    }
}
