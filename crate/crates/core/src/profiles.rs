//! Initial wave profiles `F(x)` with derivatives up to fifth order.
//!
//! Three analytic families are provided (Gaussian pulse, periodic sine and a
//! compactly windowed profile whose slope has a degenerate minimum) plus a
//! tabulated profile interpolated by a monotone cubic.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Highest derivative order available for the analytic kinds.
pub const MAX_ORDER: usize = 5;

/// Interval `[x_lo, x_hi)`; periodic profiles reduce arguments modulo `x_hi - x_lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_lo: f64,
    pub x_hi: f64,
    pub periodic: bool,
}

impl Domain {
    pub fn new(x_lo: f64, x_hi: f64, periodic: bool) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_hi > x_lo) {
            return Err(Error::InvalidInput(format!("empty domain [{x_lo}, {x_hi})")));
        }
        Ok(Domain { x_lo, x_hi, periodic })
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// Maps `x` into the domain, or fails for non-periodic domains.
    pub fn reduce(&self, x: f64) -> Result<f64> {
        if x >= self.x_lo && x < self.x_hi {
            return Ok(x);
        }
        if !self.periodic || !x.is_finite() {
            return Err(Error::DomainError { what: format!("[{}, {})", self.x_lo, self.x_hi), value: x });
        }
        let period = self.length();
        let r = self.x_lo + (x - self.x_lo).rem_euclid(period);
        Ok(if r >= self.x_hi { self.x_lo } else { r })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `a * exp(-(x/w)^2)`
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    /// `S0 * sin(m x)` on `[0, 2*pi)`
    Sine {
        amplitude: f64,
        wavenumber: u32,
    },
    /// `F'(x) = -exp(-x^4) * chi(x/L)`, `F(0) = 0`
    QuinticDegenerate {
        half_width: f64,
    },
    Tabulated(MonotoneCubic),
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Gaussian { .. } => "gaussian",
            ProfileKind::Sine { .. } => "sine",
            ProfileKind::QuinticDegenerate { .. } => "quintic_degenerate",
            ProfileKind::Tabulated(_) => "tabulated",
        }
    }
}

/// Initial datum `F` of the simple-wave problem. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialProfile {
    kind: ProfileKind,
    domain: Domain,
}

impl InitialProfile {
    /// Gaussian on the periodic box `[-20w, 20w)`.
    pub fn gaussian(amplitude: f64, width: f64) -> Result<Self> {
        let domain = Domain::new(-20.0 * width, 20.0 * width, true)?;
        Self::gaussian_on(amplitude, width, domain)
    }

    pub fn gaussian_on(amplitude: f64, width: f64, domain: Domain) -> Result<Self> {
        if !(width > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidInput(format!("gaussian needs width > 0, got {width}")));
        }
        let edge = |x: f64| amplitude.abs() * (-(x / width).powi(2)).exp();
        if edge(domain.x_lo).max(edge(domain.x_hi)) >= 1e-12 {
            return Err(Error::InvalidInput(format!(
                "gaussian domain [{}, {}) too narrow for width {width}",
                domain.x_lo, domain.x_hi
            )));
        }
        Ok(InitialProfile { kind: ProfileKind::Gaussian { amplitude, width }, domain })
    }

    /// `S0 sin(m x)` on the periodic domain `[0, 2*pi)`.
    pub fn sine(amplitude: f64, wavenumber: u32) -> Result<Self> {
        if wavenumber == 0 || !amplitude.is_finite() {
            return Err(Error::InvalidInput("sine needs wavenumber >= 1".into()));
        }
        Ok(InitialProfile {
            kind: ProfileKind::Sine { amplitude, wavenumber },
            domain: Domain::new(0.0, 2.0 * PI, true)?,
        })
    }

    /// Windowed profile with `F'(0) = -1`, `F''(0) = F'''(0) = F''''(0) = 0`,
    /// `F^(5)(0) = 24`. `F` is constant outside `[-L, L]`; the domain is `[-2L, 2L)`.
    pub fn quintic_degenerate(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("window half-width {half_width} must be positive")));
        }
        Ok(InitialProfile {
            kind: ProfileKind::QuinticDegenerate { half_width },
            domain: Domain::new(-2.0 * half_width, 2.0 * half_width, false)?,
        })
    }

    pub fn tabulated(x: Vec<f64>, f: Vec<f64>, periodic: bool) -> Result<Self> {
        let spline = MonotoneCubic::new(x, f)?;
        let domain = Domain::new(spline.x[0], *spline.x.last().unwrap(), periodic)?;
        Ok(InitialProfile { kind: ProfileKind::Tabulated(spline), domain })
    }

    /// Reads a two-column CSV with header `x,f`.
    pub fn from_csv(path: impl AsRef<Path>, periodic: bool) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path.as_ref())?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "f" {
            return Err(Error::InvalidInput(format!(
                "{}: expected header `x,f`, found `{}`",
                path.as_ref().display(),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut xs, mut fs) = (Vec::new(), Vec::new());
        for record in reader.deserialize() {
            let (x, f): (f64, f64) = record?;
            xs.push(x);
            fs.push(f);
        }
        Self::tabulated(xs, fs, periodic)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_periodic(&self) -> bool {
        self.domain.periodic
    }

    /// Highest derivative order `eval` accepts.
    pub fn max_order(&self) -> usize {
        match self.kind {
            ProfileKind::Tabulated(_) => 1,
            _ => MAX_ORDER,
        }
    }

    /// `d^order F / dx^order` at `x`.
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        if order > self.max_order() {
            return Err(Error::UnsupportedDerivativeOrder { kind: self.kind.name(), order });
        }
        let x = self.domain.reduce(x)?;
        Ok(match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => gaussian_derivative(*amplitude, *width, x, order),
            ProfileKind::Sine { amplitude, wavenumber } => sine_derivative(*amplitude, *wavenumber, x, order),
            ProfileKind::QuinticDegenerate { half_width } => {
                if order == 0 {
                    quintic_value(*half_width, x)
                } else {
                    quintic_slope_jet(*half_width, x).derivative(order - 1)
                }
            }
            ProfileKind::Tabulated(spline) => spline.eval(x, order),
        })
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x, 0)
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        self.eval(x, 1)
    }

    /// Returns a copy with all values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let kind = match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => {
                return Self::gaussian_on(amplitude * factor, *width, self.domain);
            }
            ProfileKind::Sine { amplitude, wavenumber } => {
                ProfileKind::Sine { amplitude: amplitude * factor, wavenumber: *wavenumber }
            }
            ProfileKind::QuinticDegenerate { .. } => {
                return Err(Error::InvalidInput("quintic_degenerate profile has no amplitude parameter".into()));
            }
            ProfileKind::Tabulated(spline) => {
                let f = spline.f.iter().map(|v| v * factor).collect();
                ProfileKind::Tabulated(MonotoneCubic::new(spline.x.clone(), f)?)
            }
        };
        Ok(InitialProfile { kind, domain: self.domain })
    }
}

fn gaussian_derivative(amplitude: f64, width: f64, x: f64, order: usize) -> f64 {
    let s = x / width;
    // physicists' Hermite polynomials by recurrence
    let (mut h_prev, mut h) = (0.0, 1.0);
    for n in 0..order {
        let next = 2.0 * s * h - 2.0 * n as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    amplitude * sign * h * (-s * s).exp() / width.powi(order as i32)
}

fn sine_derivative(amplitude: f64, m: u32, x: f64, order: usize) -> f64 {
    let m = m as f64;
    let arg = m * x;
    let base = match order % 4 {
        0 => arg.sin(),
        1 => arg.cos(),
        2 => -arg.sin(),
        _ => -arg.cos(),
    };
    amplitude * m.powi(order as i32) * base
}

/// Smooth cutoff: 1 on `|y| <= 1/2`, 0 on `|y| >= 1`, C-infinity in between.
fn cutoff_jet(y: Jet) -> Jet {
    let a = y.c[0].abs();
    if a <= 0.5 {
        return Jet::constant(1.0);
    }
    if a >= 1.0 {
        return Jet::constant(0.0);
    }
    let abs_y = if y.c[0] < 0.0 { -y } else { y };
    let tau = (Jet::constant(1.0) - abs_y).scale(2.0);
    let rise = (-tau.recip()).exp();
    let fall = (-(Jet::constant(1.0) - tau).recip()).exp();
    rise * (rise + fall).recip()
}

fn quintic_slope_jet(half_width: f64, x: f64) -> Jet {
    let v = Jet::variable(x);
    let sq = v * v;
    let bump = (-(sq * sq)).exp();
    -(bump * cutoff_jet(v.scale(1.0 / half_width)))
}

fn quintic_slope(half_width: f64, x: f64) -> f64 {
    quintic_slope_jet(half_width, x).c[0]
}

/// `F(x) = int_0^x F'(s) ds` by composite Gauss-Legendre quadrature; panel
/// breaks sit at `L/2` and `L` where the cutoff switches regime.
fn quintic_value(half_width: f64, x: f64) -> f64 {
    let sign = x.signum();
    let end = x.abs().min(half_width);
    let plateau = 0.5 * half_width;
    let mut total = 0.0;
    let mut integrate = |a: f64, b: f64| {
        if b <= a {
            return;
        }
        let panels = ((b - a) / 0.125).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            total += gauss_legendre(lo, lo + h, |s| quintic_slope(half_width, s));
        }
    };
    integrate(0.0, end.min(plateau));
    integrate(plateau, end);
    sign * total
}

const GL_POINTS: usize = 16;

fn gauss_legendre_rule() -> &'static [(f64, f64); GL_POINTS] {
    static RULE: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = [(0.0, 0.0); GL_POINTS];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (z, 2.0 / ((1.0 - z * z) * dp * dp));
        }
        rule
    })
}

fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre_rule().iter().map(|&(z, w)| w * f(mid + half * z)).sum::<f64>() * half
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson slopes
/// with the three-point end condition).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    f: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x.len() != f.len() || x.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "tabulated profile needs >= 3 matching samples, got {} x and {} f",
                x.len(),
                f.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("tabulated x must be finite and strictly increasing".into()));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(MonotoneCubic { x, f, d })
    }

    fn eval(&self, x: f64, order: usize) -> f64 {
        let i = match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (x - self.x[i]) / h;
        let (f0, f1, d0, d1) = (self.f[i], self.f[i + 1], self.d[i], self.d[i + 1]);
        if order == 0 {
            let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
            let h10 = s * (1.0 - s) * (1.0 - s);
            let h01 = s * s * (3.0 - 2.0 * s);
            let h11 = s * s * (s - 1.0);
            h00 * f0 + h * h10 * d0 + h01 * f1 + h * h11 * d1
        } else {
            let dh00 = 6.0 * s * (s - 1.0);
            let dh10 = (1.0 - s) * (1.0 - 3.0 * s);
            let dh11 = s * (3.0 * s - 2.0);
            (dh00 * (f0 - f1)) / h + dh10 * d0 + dh11 * d1
        }
    }
}

fn end_slope(h0: f64, h1: f64, delta0: f64, delta1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * delta0 - h0 * delta1) / (h0 + h1);
    if d.signum() != delta0.signum() {
        0.0
    } else if delta0.signum() != delta1.signum() && d.abs() > 3.0 * delta0.abs() {
        3.0 * delta0
    } else {
        d
    }
}

/// Declarative profile description, as written in experiment config files:
/// `{"kind": "gaussian", "params": {"amplitude": 1, "width": 1}, "domain": {..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    #[serde(flatten)]
    pub kind: ProfileParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ProfileParams {
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_u32")]
        wavenumber: u32,
    },
    QuinticDegenerate {
        #[serde(default = "four")]
        half_width: f64,
    },
    Tabulated {
        path: String,
    },
}

fn one() -> f64 {
    1.0
}
fn one_u32() -> u32 {
    1
}
fn four() -> f64 {
    4.0
}

impl ProfileSpec {
    /// Builds the profile; relative CSV paths resolve against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<InitialProfile> {
        match &self.kind {
            ProfileParams::Gaussian { amplitude, width } => match self.domain {
                Some(domain) => InitialProfile::gaussian_on(*amplitude, *width, domain),
                None => InitialProfile::gaussian(*amplitude, *width),
            },
            ProfileParams::Sine { amplitude, wavenumber } => {
                if let Some(d) = self.domain {
                    if d.x_lo != 0.0 || (d.x_hi - 2.0 * PI).abs() > 1e-12 || !d.periodic {
                        return Err(Error::InvalidInput("sine profiles live on the periodic domain [0, 2pi)".into()));
                    }
                }
                InitialProfile::sine(*amplitude, *wavenumber)
            }
            ProfileParams::QuinticDegenerate { half_width } => InitialProfile::quintic_degenerate(*half_width),
            ProfileParams::Tabulated { path } => {
                let path = Path::new(path);
                let resolved = match base_dir {
                    Some(base) if path.is_relative() => base.join(path),
                    _ => path.to_path_buf(),
                };
                InitialProfile::from_csv(resolved, self.domain.map(|d| d.periodic).unwrap_or(false))
            }
        }
    }
}
