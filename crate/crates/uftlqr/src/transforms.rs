//! Spatial profiles and their finite-interval Fourier transform, boundary
//! time signals and the three time-transform families built from them.
//!
//! Time transforms are exposed in premultiplied form so that no bare
//! `e^{kappa t}` with large `Re kappa` is ever formed:
//!
//! * `right_moment(b, a, t) = int_a^t e^{b (s - t)} h(s) ds`
//! * `left_moment(b, a, t)  = int_a^t e^{b (a - s)} h(s) ds`
//!
//! The plain transform is `e^{kappa t} right_moment(kappa, 0, t)`, the future
//! integral is `left_moment(kb, t, tbar)`, and the nested transform follows
//! from swapping the order of integration.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadOptions};
use crate::spectral::{Branch, Dispersion};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest exponent accepted before a bare exponential is refused.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

/// `(e^z - 1) / z`, accurate near `z = 0`.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 0.1 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..14 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `int_0^1 e^{z s} s^j ds` for `j = 0..=n`.
fn power_moments(z: C64, n: usize) -> Vec<C64> {
    if z.norm() > n as f64 + 1.0 {
        // Upward recursion is stable once |z| exceeds the degree.
        let ez = z.exp();
        let mut out = vec![phi1(z)];
        for j in 1..=n {
            let prev = out[j - 1];
            out.push((ez - j as f64 * prev) / z);
        }
        out
    } else {
        (0..=n)
            .map(|j| {
                let mut term = C64::new(1.0, 0.0);
                let mut sum = term / (j as f64 + 1.0);
                for m in 1..200 {
                    term *= z / m as f64;
                    let add = term / (m + j + 1) as f64;
                    sum += add;
                    if add.norm() < 1e-18 * sum.norm() {
                        break;
                    }
                }
                sum
            })
            .collect()
    }
}

/// Natural cubic spline through strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, min_nodes: usize, field: &str) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::config(field, "abscissae and values differ in length"));
        }
        if x.len() < min_nodes {
            return Err(Error::config(field, format!("need at least {min_nodes} nodes, got {}", x.len())));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::config(field, "abscissae must be finite and strictly increasing"));
        }
        let n = x.len();
        // Tridiagonal system for the second derivatives, m_0 = m_{n-1} = 0.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { x, y, m })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    fn locate(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }
}

/// Closed-form families for the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileForm {
    /// `amplitude * sin(mode * pi * x / L)`.
    Sine { amplitude: f64, mode: u32 },
    /// `sum_j coeffs[j] x^j`.
    Polynomial { coeffs: Vec<f64> },
    Tabulated(NaturalSpline),
}

/// A function on `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialProfile {
    pub form: ProfileForm,
    pub l: f64,
}

impl SpatialProfile {
    pub fn sine(amplitude: f64, mode: u32, l: f64) -> Self {
        Self {
            form: ProfileForm::Sine { amplitude, mode },
            l,
        }
    }

    pub fn polynomial(coeffs: Vec<f64>, l: f64) -> Self {
        Self {
            form: ProfileForm::Polynomial { coeffs },
            l,
        }
    }

    pub fn zero(l: f64) -> Self {
        Self::polynomial(vec![0.0], l)
    }

    /// Tabulated profile; needs at least 8 nodes covering `[0, L]`.
    pub fn tabulated(x: Vec<f64>, y: Vec<f64>, l: f64) -> Result<Self> {
        let spline = NaturalSpline::new(x, y, 8, "initial.values")?;
        let nodes = spline.nodes();
        if nodes[0] > 1e-12 || nodes[nodes.len() - 1] < l - 1e-12 {
            return Err(Error::config("initial.x", "tabulated abscissae must span [0, L]"));
        }
        Ok(Self {
            form: ProfileForm::Tabulated(spline),
            l,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.form {
            ProfileForm::Sine { amplitude, mode } => amplitude * (*mode as f64 * PI * x / self.l).sin(),
            ProfileForm::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            ProfileForm::Tabulated(s) => s.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.form {
            ProfileForm::Sine { amplitude, .. } => *amplitude == 0.0,
            ProfileForm::Polynomial { coeffs } => coeffs.iter().all(|&a| a == 0.0),
            ProfileForm::Tabulated(_) => false,
        }
    }

    /// `int_0^L e^{-i kappa x} p(x) dx`.
    pub fn transform(&self, kappa: C64) -> Result<C64> {
        let l = self.l;
        match &self.form {
            ProfileForm::Sine { amplitude, mode } => Ok(*amplitude * sine_mode_transform(*mode as f64 * PI / l, kappa, l)),
            ProfileForm::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Ok(ZERO);
                }
                let e = power_moments(-I * kappa * l, coeffs.len() - 1);
                Ok(coeffs
                    .iter()
                    .enumerate()
                    .fold(ZERO, |acc, (j, &a)| acc + a * l.powi(j as i32 + 1) * e[j]))
            }
            ProfileForm::Tabulated(s) => graded_quad(&|x| s.eval(x), s.nodes(), I * kappa, false),
        }
    }

    /// `e^{i kappa L}` times the transform, i.e. `int_0^L e^{i kappa (L - x)} p(x) dx`,
    /// which stays bounded in the upper half-plane.
    pub fn transform_shifted(&self, kappa: C64) -> Result<C64> {
        let l = self.l;
        match &self.form {
            ProfileForm::Sine { amplitude, mode } => Ok(*amplitude * sine_mode_shifted(*mode as f64 * PI / l, kappa, l)),
            ProfileForm::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Ok(ZERO);
                }
                // Coefficients of p(L - s) in powers of s.
                let n = coeffs.len();
                let mut q = vec![0.0; n];
                for (j, &a) in coeffs.iter().enumerate() {
                    let mut binom = 1.0;
                    for i in 0..=j {
                        q[i] += a * binom * l.powi((j - i) as i32) * if i % 2 == 0 { 1.0 } else { -1.0 };
                        binom = binom * (j - i) as f64 / (i + 1) as f64;
                    }
                }
                let e = power_moments(I * kappa * l, n - 1);
                Ok(q.iter().enumerate().fold(ZERO, |acc, (j, &a)| acc + a * l.powi(j as i32 + 1) * e[j]))
            }
            ProfileForm::Tabulated(s) => graded_quad(&|x| s.eval(x), s.nodes(), -I * kappa, true),
        }
    }

    /// Sine coefficients `(2/L) int_0^L sin(pi m x / L) p(x) dx`, `m = 1..=M`.
    pub fn modal_coeffs(&self, m_max: usize) -> Result<Vec<f64>> {
        if m_max == 0 {
            return Err(Error::config("series.m", "truncation must be at least 1"));
        }
        (1..=m_max)
            .map(|m| match &self.form {
                ProfileForm::Sine { amplitude, mode } => Ok(if m as u32 == *mode { *amplitude } else { 0.0 }),
                _ => {
                    let k = m as f64 * PI / self.l;
                    Ok(-2.0 / self.l * self.transform(C64::new(k, 0.0))?.im)
                }
            })
            .collect()
    }
}

/// `int h(s) e^{beta (s - b)} ds` (`heavy_end`) or `int h(s) e^{beta (a - s)} ds`
/// over `[a, b] = [nodes[0], nodes[last]]`, split at `nodes`.
///
/// For large `Re beta` the mass sits in a layer of width `1 / Re beta` at the
/// heavy end, which plain adaptive subdivision can step over. The part of
/// `[a, b]` where the weight is below `e^{-50}` is dropped; on the layer `h`
/// is first replaced by interpolants of two degrees integrated exactly
/// against the exponential, and when they disagree the layer is integrated
/// adaptively on breakpoints graded toward the heavy end.
fn graded_quad(h: &dyn Fn(f64) -> f64, nodes: &[f64], beta: C64, heavy_end: bool) -> Result<C64> {
    let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
    let edge = if heavy_end { b } else { a };
    let dir = if heavy_end { -1.0 } else { 1.0 };
    let rate = beta.re;
    let mut pts: Vec<f64> = nodes.to_vec();
    if rate * (b - a) > 8.0 {
        let layer = 1.0 / rate;
        let reach = (b - a).min(50.0 * layer);
        let inner: Vec<f64> = nodes.iter().copied().filter(|&x| (x - edge).abs() < reach).collect();
        if inner.len() == 1 {
            if let Some(v) = layer_moment(h, edge, dir, reach, beta) {
                return Ok(v);
            }
        }
        let mut d = 0.25 * layer;
        while d < reach {
            pts.push(edge + dir * d);
            d *= 2.0;
        }
        let far = edge + dir * reach;
        pts.push(far);
        let (lo, hi) = if heavy_end { (far, b) } else { (a, far) };
        pts.retain(|&x| x >= lo && x <= hi);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let weight = |s: f64| (-beta * (s - edge).abs()).exp();
    let mut total = ZERO;
    for w in pts.windows(2) {
        let panels = (beta.im.abs() * (w[1] - w[0]) / PI).ceil() as usize + 1;
        let opts = QuadOptions {
            abs_tol: 1e-14,
            max_evals: 200_000.max(40 * 15 * panels),
            ..QuadOptions::default()
        }
        .with_panels(panels);
        total += integrate(|s| weight(s) * h(s), w[0], w[1], &opts)?.value;
    }
    Ok(total)
}

/// Chebyshev points on `[0, 1]` and the inverse of their Vandermonde matrix.
struct Interpolant {
    nodes: Vec<f64>,
    inverse: nalgebra::DMatrix<f64>,
}

impl Interpolant {
    fn new(n: usize) -> Self {
        let nodes: Vec<f64> = (0..n).map(|i| 0.5 - 0.5 * ((2 * i + 1) as f64 * PI / (2 * n) as f64).cos()).collect();
        let vander = nalgebra::DMatrix::from_fn(n, n, |i, j| nodes[i].powi(j as i32));
        let inverse = vander.try_inverse().expect("Chebyshev Vandermonde matrix is invertible");
        Self { nodes, inverse }
    }
}

fn interpolants() -> &'static [Interpolant; 2] {
    static CELL: std::sync::OnceLock<[Interpolant; 2]> = std::sync::OnceLock::new();
    CELL.get_or_init(|| [Interpolant::new(10), Interpolant::new(14)])
}

/// `int_0^r e^{-beta u} h(edge + dir u) du` from polynomial interpolants of
/// degree 9 and 13 at Chebyshev points; `None` if the two disagree.
fn layer_moment(h: &dyn Fn(f64) -> f64, edge: f64, dir: f64, r: f64, beta: C64) -> Option<C64> {
    let moments = power_moments(-beta * r, 13);
    let mut scale: f64 = 0.0;
    let mut estimate = |ip: &Interpolant| -> C64 {
        let n = ip.nodes.len();
        let y: Vec<f64> = ip.nodes.iter().map(|&v| h(edge + dir * r * v)).collect();
        scale = y.iter().fold(scale, |m, x| m.max(x.abs()));
        let mut total = ZERO;
        for j in 0..n {
            let cj: f64 = (0..n).map(|i| ip.inverse[(j, i)] * y[i]).sum();
            total += cj * moments[j];
        }
        r * total
    };
    let [low, high] = interpolants();
    let lo = estimate(low);
    let hi = estimate(high);
    let tol = 1e-10 * r * scale;
    ((hi - lo).norm() <= tol && hi.is_finite()).then_some(hi)
}

/// `int_0^L e^{-i kappa x} sin(k x) dx`.
pub fn sine_mode_transform(k: f64, kappa: C64, l: f64) -> C64 {
    l / (2.0 * I) * (phi1(-I * (kappa - k) * l) - phi1(-I * (kappa + k) * l))
}

/// `int_0^L e^{i kappa (L - x)} sin(k x) dx`.
pub fn sine_mode_shifted(k: f64, kappa: C64, l: f64) -> C64 {
    let e = C64::from_polar(1.0, k * l);
    l / (2.0 * I) * (e * phi1(I * (kappa - k) * l) - e.conj() * phi1(I * (kappa + k) * l))
}

/// A finite sine sum `sum_m amps[m-1] sin(pi m x / L)`, e.g. a state row.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSum {
    pub l: f64,
    pub amps: Vec<f64>,
}

impl SineSum {
    pub fn transform(&self, kappa: C64) -> C64 {
        self.amps.iter().enumerate().fold(ZERO, |acc, (i, &a)| {
            acc + a * sine_mode_transform(PI * (i + 1) as f64 / self.l, kappa, self.l)
        })
    }

    pub fn transform_shifted(&self, kappa: C64) -> C64 {
        self.amps.iter().enumerate().fold(ZERO, |acc, (i, &a)| {
            acc + a * sine_mode_shifted(PI * (i + 1) as f64 / self.l, kappa, self.l)
        })
    }
}

/// Real-line inverse `(1/2pi) int_{-K}^{K} F(k) e^{i k x} dk`.
///
/// `phase_rate` bounds the oscillation frequency of `F(k) e^{ikx}` in `k`
/// and sets the initial panel count. The returned error adds a tail bound
/// `K (|F(K)| + |F(-K)|) / 2pi`, valid for integrands decaying like `1/k^2`.
pub fn inverse_transform<F: Fn(f64) -> C64>(f: F, x: f64, k_max: f64, phase_rate: f64, opts: &QuadOptions) -> Result<Estimate> {
    let periods = k_max * phase_rate.max(x.abs()) / std::f64::consts::PI;
    let opts = opts.with_panels((2.0 * periods).ceil().max(16.0) as usize);
    let est = integrate(|k| f(k) * (I * k * x).exp(), -k_max, k_max, &opts)?;
    let tail = k_max * (f(k_max).norm() + f(-k_max).norm()) / (2.0 * std::f64::consts::PI);
    Ok(Estimate {
        value: est.value / (2.0 * std::f64::consts::PI),
        error: est.error / (2.0 * std::f64::consts::PI) + tail,
        evals: est.evals,
    })
}

/// Closed-form families for boundary data in time.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeForm {
    Zero,
    Constant(f64),
    /// `amplitude * sin(frequency * t)`.
    Sine { amplitude: f64, frequency: f64 },
    Tabulated(NaturalSpline),
}

static NEXT_SIGNAL_ID: AtomicU64 = AtomicU64::new(1);

/// A boundary signal that vanishes identically from `vanish_time` on. A
/// smooth `C^inf` step over `[vanish_time - taper_width, vanish_time]`
/// brings the base form to zero.
#[derive(Debug, Clone)]
pub struct TimeSignal {
    pub form: TimeForm,
    pub vanish_time: f64,
    pub taper_width: f64,
    id: u64,
}

impl PartialEq for TimeSignal {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form && self.vanish_time == other.vanish_time && self.taper_width == other.taper_width
    }
}

fn bump(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

fn bump_d(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp() / (u * u)
    }
}

/// Smooth step: 0 at `u <= 0`, 1 at `u >= 1`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = bump(u);
        a / (a + bump(1.0 - u))
    }
}

fn smooth_step_d(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let a = bump(u);
        let b = bump(1.0 - u);
        (bump_d(u) * b + a * bump_d(1.0 - u)) / ((a + b) * (a + b))
    }
}

impl TimeSignal {
    pub fn new(form: TimeForm, vanish_time: f64, taper_width: f64, field: &str) -> Result<Self> {
        if !(vanish_time >= 0.0) || !vanish_time.is_finite() {
            return Err(Error::config(format!("{field}.vanish_time"), "must be finite and nonnegative"));
        }
        if !(taper_width >= 0.0) || taper_width > vanish_time {
            return Err(Error::config(
                format!("{field}.taper_width"),
                "must be nonnegative and no larger than vanish_time",
            ));
        }
        let s = TimeSignal {
            form,
            vanish_time,
            taper_width,
            id: NEXT_SIGNAL_ID.fetch_add(1, Ordering::Relaxed),
        };
        if taper_width == 0.0 && !matches!(s.form, TimeForm::Zero) {
            let end = s.base(vanish_time);
            if end.abs() > 1e-12 {
                return Err(Error::config(
                    format!("{field}.taper_width"),
                    format!("signal is {end} at the vanish time; a positive taper width is required"),
                ));
            }
        }
        if let TimeForm::Tabulated(sp) = &s.form {
            let nodes = sp.nodes();
            if nodes[0] > 1e-12 || nodes[nodes.len() - 1] < vanish_time - 1e-12 {
                return Err(Error::config(format!("{field}.t"), "tabulated abscissae must span [0, vanish_time]"));
            }
        }
        Ok(s)
    }

    pub fn zero() -> Self {
        Self::new(TimeForm::Zero, 0.0, 0.0, "boundary").expect("zero signal")
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn is_zero(&self) -> bool {
        match &self.form {
            TimeForm::Zero => true,
            TimeForm::Constant(a) => *a == 0.0 || self.vanish_time == 0.0,
            TimeForm::Sine { amplitude, .. } => *amplitude == 0.0 || self.vanish_time == 0.0,
            TimeForm::Tabulated(_) => self.vanish_time == 0.0,
        }
    }

    fn base(&self, t: f64) -> f64 {
        match &self.form {
            TimeForm::Zero => 0.0,
            TimeForm::Constant(a) => *a,
            TimeForm::Sine { amplitude, frequency } => amplitude * (frequency * t).sin(),
            TimeForm::Tabulated(s) => s.eval(t),
        }
    }

    fn base_d(&self, t: f64) -> f64 {
        match &self.form {
            TimeForm::Zero | TimeForm::Constant(_) => 0.0,
            TimeForm::Sine { amplitude, frequency } => amplitude * frequency * (frequency * t).cos(),
            TimeForm::Tabulated(s) => s.derivative(t),
        }
    }

    fn taper_start(&self) -> f64 {
        self.vanish_time - self.taper_width
    }

    fn window(&self, t: f64) -> f64 {
        if t >= self.vanish_time {
            0.0
        } else if self.taper_width == 0.0 || t <= self.taper_start() {
            1.0
        } else {
            smooth_step((self.vanish_time - t) / self.taper_width)
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let w = self.window(t);
        if w == 0.0 {
            0.0
        } else {
            w * self.base(t)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < 0.0 || t >= self.vanish_time {
            return 0.0;
        }
        let w = self.window(t);
        let dw = if self.taper_width > 0.0 && t > self.taper_start() {
            -smooth_step_d((self.vanish_time - t) / self.taper_width) / self.taper_width
        } else {
            0.0
        };
        w * self.base_d(t) + dw * self.base(t)
    }

    /// Subintervals of `[a, b]` on which the signal has a single analytic
    /// description, tagged with whether the taper is active.
    fn segments(&self, a: f64, b: f64) -> Vec<(f64, f64, bool)> {
        let b = b.min(self.vanish_time);
        if !(b > a) {
            return Vec::new();
        }
        let ts = self.taper_start();
        let mut out = Vec::with_capacity(2);
        if self.taper_width > 0.0 {
            if a < ts {
                out.push((a, b.min(ts), false));
            }
            if b > ts {
                out.push((a.max(ts), b, true));
            }
        } else {
            out.push((a, b, false));
        }
        out
    }

    /// `int_{s0}^{s1} e^{beta (s - s1)} h(s) ds` on one segment.
    fn seg_right(&self, beta: C64, s0: f64, s1: f64, taper: bool) -> Result<C64> {
        let gk = |h: &dyn Fn(f64) -> f64, nodes: &[f64]| graded_quad(h, nodes, beta, true);
        if taper {
            return gk(&|s| self.value(s), &[s0, s1]);
        }
        let d = s1 - s0;
        match &self.form {
            TimeForm::Zero => Ok(ZERO),
            TimeForm::Constant(a) => Ok(*a * d * phi1(-beta * d)),
            TimeForm::Sine { amplitude, frequency } => {
                let nu = *frequency;
                let den = beta * beta + nu * nu;
                if den.norm() < 1e-3 * (beta.norm_sqr() + nu * nu) || (beta * d).norm() < 1e-3 {
                    return gk(&|s| amplitude * (nu * s).sin(), &[s0, s1]);
                }
                let (sn1, cs1) = (nu * s1).sin_cos();
                let (sn0, cs0) = (nu * s0).sin_cos();
                let e = (beta * (s0 - s1)).exp();
                Ok(*amplitude * ((beta * sn1 - nu * cs1) - e * (beta * sn0 - nu * cs0)) / den)
            }
            TimeForm::Tabulated(sp) => {
                let mut nodes = vec![s0];
                nodes.extend(sp.nodes().iter().copied().filter(|&x| x > s0 && x < s1));
                nodes.push(s1);
                gk(&|s| sp.eval(s), &nodes)
            }
        }
    }

    /// `int_{s0}^{s1} e^{beta (s0 - s)} h(s) ds` on one segment.
    fn seg_left(&self, beta: C64, s0: f64, s1: f64, taper: bool) -> Result<C64> {
        let gk = |h: &dyn Fn(f64) -> f64, nodes: &[f64]| graded_quad(h, nodes, beta, false);
        if taper {
            return gk(&|s| self.value(s), &[s0, s1]);
        }
        let d = s1 - s0;
        match &self.form {
            TimeForm::Zero => Ok(ZERO),
            TimeForm::Constant(a) => Ok(*a * d * phi1(-beta * d)),
            TimeForm::Sine { amplitude, frequency } => {
                let nu = *frequency;
                let den = beta * beta + nu * nu;
                if den.norm() < 1e-3 * (beta.norm_sqr() + nu * nu) || (beta * d).norm() < 1e-3 {
                    return gk(&|s| amplitude * (nu * s).sin(), &[s0, s1]);
                }
                let (sn1, cs1) = (nu * s1).sin_cos();
                let (sn0, cs0) = (nu * s0).sin_cos();
                let e = (beta * (s0 - s1)).exp();
                Ok(*amplitude * (e * (-beta * sn1 - nu * cs1) + (beta * sn0 + nu * cs0)) / den)
            }
            TimeForm::Tabulated(sp) => {
                let mut nodes = vec![s0];
                nodes.extend(sp.nodes().iter().copied().filter(|&x| x > s0 && x < s1));
                nodes.push(s1);
                gk(&|s| sp.eval(s), &nodes)
            }
        }
    }

    /// `int_a^b e^{beta (s - b)} h(s) ds`.
    pub fn right_moment(&self, beta: C64, a: f64, b: f64) -> Result<C64> {
        if self.is_zero() {
            return Ok(ZERO);
        }
        let mut total = ZERO;
        for (s0, s1, taper) in self.segments(a, b) {
            let shift = beta * (s1 - b);
            if shift.re < -745.0 {
                continue;
            }
            total += shift.exp() * self.seg_right(beta, s0, s1, taper)?;
        }
        Ok(total)
    }

    /// `int_a^b e^{beta (a - s)} h(s) ds`.
    pub fn left_moment(&self, beta: C64, a: f64, b: f64) -> Result<C64> {
        if self.is_zero() {
            return Ok(ZERO);
        }
        let mut total = ZERO;
        for (s0, s1, taper) in self.segments(a, b) {
            let shift = beta * (a - s0);
            if shift.re < -745.0 {
                continue;
            }
            total += shift.exp() * self.seg_left(beta, s0, s1, taper)?;
        }
        Ok(total)
    }

    /// `e^{-kappa t} int_0^t e^{kappa s} h(s) ds`.
    pub fn tilde_premult(&self, kappa: C64, t: f64) -> Result<C64> {
        self.right_moment(kappa, 0.0, t)
    }

    /// `int_0^t e^{kappa s} h(s) ds`.
    pub fn t_transform(&self, kappa: C64, t: f64) -> Result<C64> {
        if t < 0.0 {
            return Err(Error::config("t", "time must be nonnegative"));
        }
        if kappa.re * t > OVERFLOW_EXPONENT {
            return Err(Error::OverflowGuard(kappa.re * t));
        }
        if kappa.re >= 0.0 {
            Ok((kappa * t).exp() * self.right_moment(kappa, 0.0, t)?)
        } else {
            self.left_moment(-kappa, 0.0, t)
        }
    }

    /// `int_t^{tbar} e^{kb (t - s)} h(s) ds`, the part of the future
    /// integral that survives because the signal vanishes after `tbar`.
    pub fn future(&self, kb: C64, t: f64) -> Result<C64> {
        if t >= self.vanish_time {
            return Ok(ZERO);
        }
        self.left_moment(kb, t.max(0.0), self.vanish_time)
    }

    /// `e^{-kappa t} int_0^t e^{kappa s} future(kb, s) ds`.
    pub fn underline_premult(&self, kappa: C64, kb: C64, t: f64) -> Result<C64> {
        if self.is_zero() || t <= 0.0 {
            return Ok(ZERO);
        }
        let sum = kappa + kb;
        if sum.norm() < 1e-2 * (1.0 + kappa.norm() + kb.norm()) {
            let opts = QuadOptions::default().with_abs_tol(1e-12);
            let est = integrate(
                |s| (kappa * (s - t)).exp() * self.future(kb, s).unwrap_or(C64::new(f64::NAN, 0.0)),
                0.0,
                t,
                &opts.with_panels(8),
            )?;
            return Ok(est.value);
        }
        let mut head = self.future(kb, 0.0)?;
        let decay = -kappa * t;
        head = if decay.re < -745.0 { ZERO } else { decay.exp() * head };
        Ok((self.right_moment(kappa, 0.0, t)? + self.future(kb, t)? - head) / sum)
    }

    /// `int_0^t e^{kappa s} int_s^inf e^{kb (s - r)} h(r) dr ds`.
    pub fn future_weighted_transform(&self, kappa: C64, kb: C64, t: f64) -> Result<C64> {
        if t < 0.0 {
            return Err(Error::config("t", "time must be nonnegative"));
        }
        if kappa.re * t > OVERFLOW_EXPONENT {
            return Err(Error::OverflowGuard(kappa.re * t));
        }
        Ok((kappa * t).exp() * self.underline_premult(kappa, kb, t)?)
    }

    /// `e^{-omega t}` times the check transform at `kappa`.
    pub fn check_premult(&self, branch: &Branch, kappa: C64, t: f64) -> Result<C64> {
        let (om, omb, ph) = branch.gains(kappa)?;
        Ok(self.tilde_premult(om, t)? - ph * self.underline_premult(om, omb, t)?)
    }

    /// The check transform `tilde(omega, t) - phat * underline(omega, omegabar, t)`.
    pub fn check_transform(&self, disp: &Dispersion, kappa: C64, t: f64) -> Result<C64> {
        let br = disp.branch();
        let om = br.omega(kappa)?;
        if om.re * t > OVERFLOW_EXPONENT {
            return Err(Error::OverflowGuard(om.re * t));
        }
        Ok((om * t).exp() * self.check_premult(&br, kappa, t)?)
    }
}

/// Dirichlet data at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySignal {
    pub g0: TimeSignal,
    pub h0: TimeSignal,
}

impl BoundarySignal {
    pub fn homogeneous() -> Self {
        Self {
            g0: TimeSignal::zero(),
            h0: TimeSignal::zero(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.g0.is_zero() && self.h0.is_zero()
    }

    pub fn vanish_time(&self) -> f64 {
        self.g0.vanish_time.max(self.h0.vanish_time)
    }
}

/// `v(kappa, t) = -sum_j c_j(kappa) (g_j(t) - e^{-i kappa L} h_j(t))` for a
/// full tuple of boundary values `g[j] = d^j phi / dx^j (0, t)`,
/// `h[j] = d^j phi / dx^j (L, t)`.
pub fn v_eval(disp: &Dispersion, g: &[f64], h: &[f64], kappa: C64, l: f64) -> Result<C64> {
    let n = disp.order();
    if g.len() != n || h.len() != n {
        return Err(Error::config("boundary", format!("expected {n} values per end")));
    }
    let e = (-I * kappa * l).exp();
    Ok(-disp
        .c_eval(kappa)
        .iter()
        .enumerate()
        .fold(ZERO, |acc, (j, cj)| acc + cj * (g[j] - e * h[j])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Tilde,
    Future,
    Underline,
    Check,
    Custom(u8),
}

type CacheKey = (u64, TransformKind, [u64; 4]);

/// Memo table for transform values. Keys use exact bit patterns, so a hit
/// returns precisely what recomputation would.
#[derive(Debug, Default)]
pub struct TransformCache {
    map: Mutex<HashMap<CacheKey, C64>>,
}

impl TransformCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_compute<F: FnOnce() -> Result<C64>>(&self, id: u64, kind: TransformKind, kappa: C64, t: f64, f: F) -> Result<C64> {
        let key = (id, kind, [kappa.re.to_bits(), kappa.im.to_bits(), t.to_bits(), 0]);
        if let Some(v) = self.map.lock().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(v);
        }
        let v = f()?;
        if let Ok(mut m) = self.map.lock() {
            m.insert(key, v);
        }
        Ok(v)
    }
}
