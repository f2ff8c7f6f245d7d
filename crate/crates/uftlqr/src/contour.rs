//! Contour-integral representation of the optimal control and state.
//!
//! Each point value is the sum of a real-line integral carrying the initial
//! data and integrals over the upper contour (two rays bridged near the
//! origin by a short chord). Integrands are evaluated in premultiplied form,
//! `e^{-omega t} U1 / Delta` and `U2 / Delta`, which never overflow.
//!
//! The initial-data terms decay like `e^{-omega t}` along the rays. The
//! boundary terms decay only like `e^{-Im kappa min(x, L - x)}`, so they get
//! their own, longer truncation radius.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::Complex64 as C64;
use crate::error::{Error, Result};
use crate::field::{Field, Method, Quantity};
use crate::quadrature::{integrate, Estimate, QuadOptions};
use crate::series::SeriesCoefficients;
use crate::spectral::{build_contour_with_angle, contour_angle, sine_ratio, truncation_radius, Branch, Dispersion, QuadratureSpec};
use crate::transforms::{v_eval, BoundarySignal, SineSum, SpatialProfile};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Everything the contour formulas need about one control problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub disp: Dispersion,
    pub profile: SpatialProfile,
    pub boundary: BoundarySignal,
    branch: Branch,
    angle: f64,
}

impl Problem {
    pub fn new(disp: &Dispersion, profile: &SpatialProfile, boundary: &BoundarySignal) -> Result<Self> {
        let c = disp
            .reaction_c()
            .ok_or_else(|| Error::Unsupported("contour evaluation needs a reaction-diffusion dispersion".into()))?;
        if !(profile.l > 0.0) {
            return Err(Error::config("L", "interval length must be positive"));
        }
        Ok(Self {
            disp: disp.clone(),
            profile: profile.clone(),
            boundary: boundary.clone(),
            branch: disp.branch(),
            angle: contour_angle(c),
        })
    }

    pub fn l(&self) -> f64 {
        self.profile.l
    }

    pub fn branch(&self) -> &Branch {
        &self.branch
    }

    /// Angle of the right-hand ray.
    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Raw `(U1, U2)` at `kappa`. `U1` contains `e^{omega t}` factors and is
/// refused with `OverflowGuard` when they would overflow.
///
/// `U2` pairs the instantaneous boundary values with the future integrals
/// `int_t^inf e^{omegabar (t - s)} h(s) ds` of the same signals.
pub fn raw_integrands(p: &Problem, kappa: C64, x: f64, t: f64) -> Result<(C64, C64)> {
    let l = p.l();
    let (om, omb, ph) = p.branch.gains(kappa)?;
    let (g, h) = (&p.boundary.g0, &p.boundary.h0);
    let s_x = 2.0 * (kappa * x).sin();
    let s_lx = 2.0 * (kappa * (l - x)).sin();
    let check = |s: &crate::transforms::TimeSignal| -> Result<C64> {
        if s.is_zero() {
            Ok(ZERO)
        } else {
            s.check_transform(&p.disp, kappa, t)
        }
    };
    let u1 = s_x * (I * (I * kappa * l).exp() * p.profile.transform(kappa)? - 2.0 * kappa * check(h)?)
        + s_lx * (I * p.profile.transform(-kappa)? - 2.0 * kappa * check(g)?);
    let u2 = s_x * (-2.0 * kappa * (h.value(t) - ph * h.future(omb, t)?))
        + s_lx * (-2.0 * kappa * (g.value(t) - ph * g.future(omb, t)?));
    let _ = om;
    Ok((u1, u2))
}

/// `e^{-omega t} U1 / Delta` split into its initial-data and boundary parts,
/// and `U2 / Delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedIntegrands {
    pub i1_initial: C64,
    pub i1_boundary: C64,
    pub i2: C64,
    pub phat: C64,
}

fn initial_part(p: &Problem, kappa: C64, om: C64, x: f64, t: f64) -> Result<C64> {
    if p.profile.is_zero() {
        return Ok(ZERO);
    }
    let l = p.l();
    let decay = -om * t;
    if decay.re < -745.0 {
        return Ok(ZERO);
    }
    let e_plus = p.profile.transform_shifted(kappa)?;
    let e_minus = p.profile.transform(-kappa)?;
    Ok(decay.exp() * (sine_ratio(kappa, x, l) * e_plus + sine_ratio(kappa, l - x, l) * e_minus))
}

fn boundary_parts(p: &Problem, kappa: C64, omb: C64, x: f64, t: f64) -> Result<(C64, C64)> {
    if p.boundary.is_homogeneous() {
        return Ok((ZERO, ZERO));
    }
    let l = p.l();
    let (g, h) = (&p.boundary.g0, &p.boundary.h0);
    let ph = p.branch.phat(kappa)?;
    let rx = sine_ratio(kappa, x, l);
    let rlx = sine_ratio(kappa, l - x, l);
    let cg = g.check_premult(&p.branch, kappa, t)?;
    let ch = h.check_premult(&p.branch, kappa, t)?;
    let i1 = 2.0 * I * kappa * (rx * ch + rlx * cg);
    let ig = g.value(t) - ph * g.future(omb, t)?;
    let ih = h.value(t) - ph * h.future(omb, t)?;
    let i2 = 2.0 * I * kappa * (rx * ih + rlx * ig);
    Ok((i1, i2))
}

pub fn weighted_integrands(p: &Problem, kappa: C64, x: f64, t: f64) -> Result<WeightedIntegrands> {
    let (om, omb, ph) = p.branch.gains(kappa)?;
    let i1_initial = initial_part(p, kappa, om, x, t)?;
    let (i1_boundary, i2) = boundary_parts(p, kappa, omb, x, t)?;
    Ok(WeightedIntegrands {
        i1_initial,
        i1_boundary,
        i2,
        phat: ph,
    })
}

/// A point value with its error budget and the size of each piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: C64,
    pub error: f64,
    pub evals: usize,
    pub real_line: C64,
    pub contour_initial: C64,
    pub contour_boundary: C64,
}

impl PointValue {
    /// Magnitude of the largest retained term.
    pub fn scale(&self) -> f64 {
        self.real_line
            .norm()
            .max(self.contour_initial.norm())
            .max(self.contour_boundary.norm())
    }
}

/// Runs `integrate` on a fallible integrand; the first error wins.
fn integrate_fallible<F: Fn(f64) -> Result<C64>>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let est = integrate(
        |s| match f(s) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                C64::new(f64::NAN, f64::NAN)
            }
        },
        a,
        b,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    est
}

/// Ray geometry for one contour integral.
#[derive(Debug, Clone, Copy)]
struct Rays {
    angle: f64,
    eps: f64,
    radius: f64,
}

/// `int` of `f` over the upper contour truncated at `radius`: the left ray
/// inward, the chord joining the rays at distance `eps`, the right ray
/// outward. Returns the estimate and `|f|` summed over the two far ends.
fn contour_integral<F: Fn(C64) -> Result<C64>>(f: &F, rays: Rays, opts: &QuadOptions) -> Result<(Estimate, f64)> {
    let dl = C64::from_polar(1.0, PI - rays.angle);
    let dr = C64::from_polar(1.0, rays.angle);
    let left = integrate_fallible(|r| Ok(-(f(dl * r)? * dl)), rays.eps, rays.radius, opts)?;
    let right = integrate_fallible(|r| Ok(f(dr * r)? * dr), rays.eps, rays.radius, opts)?;
    let (z0, z1) = (dl * rays.eps, dr * rays.eps);
    let chord = integrate_fallible(|s| Ok(f(z0 + (z1 - z0) * s)? * (z1 - z0)), 0.0, 1.0, &QuadOptions::default())?;
    let ends = f(dl * rays.radius)?.norm() + f(dr * rays.radius)?.norm();
    Ok((
        Estimate {
            value: left.value + right.value + chord.value,
            error: left.error + right.error + chord.error,
            evals: left.evals + right.evals + chord.evals + 2,
        },
        ends,
    ))
}

/// Smallest `r` with `r sin(angle) a >= exponent + ln(1 + r)`.
fn slow_radius(angle: f64, a: f64, exponent: f64) -> f64 {
    let rate = angle.sin() * a;
    let mut r = exponent / rate;
    for _ in 0..50 {
        r = (exponent + (1.0 + r).ln()) / rate;
    }
    r
}

fn options(quad: &QuadratureSpec, panels: f64) -> QuadOptions {
    let panels = panels.ceil().clamp(1.0, 1e6) as usize + 4;
    QuadOptions {
        abs_tol: quad.panel_tolerance,
        rel_tol: 1e-12,
        max_evals: quad.max_evals.max(60 * 15 * panels),
        initial_panels: panels,
    }
}

fn check_point(p: &Problem, x: f64, t: f64, quad: &QuadratureSpec) -> Result<()> {
    if !(x > 0.0 && x < p.l()) {
        return Err(Error::config("x", format!("{x} is not inside (0, L)")));
    }
    if !(quad.t_min > 0.0) {
        return Err(Error::config("quadrature.t_min", "must be positive"));
    }
    if !(t >= quad.t_min) {
        return Err(Error::config(
            "t",
            format!("contour evaluation needs t >= t_min = {}, got {t}", quad.t_min),
        ));
    }
    Ok(())
}

/// Real-line part `int e^{ikx - omega t} weight(k) phihat0(k) dk / 2pi`.
fn real_line(p: &Problem, x: f64, t: f64, quad: &QuadratureSpec, with_phat: bool) -> Result<Estimate> {
    if p.profile.is_zero() {
        return Ok(Estimate {
            value: ZERO,
            error: 0.0,
            evals: 0,
        });
    }
    let c = p.disp.reaction_c().unwrap_or(0.0);
    let k_max = quad.radius_scale * (quad.tail_exponent / t - c).max(1.0).sqrt();
    let f = |k: f64| -> Result<C64> {
        let kappa = C64::new(k, 0.0);
        let (om, _, ph) = p.branch.gains(kappa)?;
        let w = if with_phat { ph } else { C64::new(1.0, 0.0) };
        Ok((I * kappa * x - om * t).exp() * w * p.profile.transform(kappa)?)
    };
    let opts = options(quad, k_max * p.l() / PI);
    let est = integrate_fallible(f, -k_max, k_max, &opts)?;
    let tail = (f(k_max)?.norm() + f(-k_max)?.norm()) / (2.0 * k_max * t);
    Ok(Estimate {
        value: est.value / (2.0 * PI),
        error: (est.error + tail) / (2.0 * PI),
        evals: est.evals,
    })
}

fn evaluate(p: &Problem, x: f64, t: f64, quad: &QuadratureSpec, quantity: Quantity) -> Result<PointValue> {
    check_point(p, x, t, quad)?;
    let l = p.l();
    let angle = p.angle;
    let control = quantity == Quantity::Control;
    let sign = if control { -1.0 } else { 1.0 };

    let rl = real_line(p, x, t, quad, control)?;
    let mut value = sign * rl.value;
    let mut error = rl.error;
    let mut evals = rl.evals;

    let mut initial = ZERO;
    if !p.profile.is_zero() {
        let radius = quad
            .truncation_radius
            .unwrap_or_else(|| quad.radius_scale * truncation_radius(&p.disp, angle, t, quad.tail_exponent));
        let rays = Rays {
            angle,
            eps: quad.epsilon_origin,
            radius,
        };
        let f = |kappa: C64| -> Result<C64> {
            let (om, _, ph) = p.branch.gains(kappa)?;
            let v = initial_part(p, kappa, om, x, t)?;
            Ok(if control { ph * v } else { -v })
        };
        let phase = quad.tail_exponent * (2.0 * angle).tan() + radius * l;
        let (est, ends) = contour_integral(&f, rays, &options(quad, phase / PI))?;
        initial = est.value / (2.0 * PI);
        let tail = ends / (2.0 * radius * t * (2.0 * angle).cos());
        error += (est.error + tail) / (2.0 * PI);
        evals += est.evals;
    }

    let mut boundary = ZERO;
    if !p.boundary.is_homogeneous() {
        let a = x.min(l - x);
        let radius = quad
            .truncation_radius
            .unwrap_or_else(|| quad.radius_scale * slow_radius(angle, a, quad.tail_exponent));
        let rays = Rays {
            angle,
            eps: quad.epsilon_origin,
            radius,
        };
        let f = |kappa: C64| -> Result<C64> {
            let (_, omb, ph) = p.branch.gains(kappa)?;
            let (i1, i2) = boundary_parts(p, kappa, omb, x, t)?;
            Ok(if control { ph * i1 - i2 } else { -i1 })
        };
        let (est, ends) = contour_integral(&f, rays, &options(quad, radius * l / PI))?;
        boundary = est.value / (2.0 * PI);
        let tail = ends / (a * angle.sin());
        error += (est.error + tail) / (2.0 * PI);
        evals += est.evals;
    }

    value += initial + boundary;
    Ok(PointValue {
        value,
        error,
        evals,
        real_line: sign * rl.value,
        contour_initial: initial,
        contour_boundary: boundary,
    })
}

/// Optimal control `u*(x, t)` from the contour representation.
pub fn control_integral_eval(p: &Problem, x: f64, t: f64, quad: &QuadratureSpec) -> Result<PointValue> {
    evaluate(p, x, t, quad, Quantity::Control)
}

/// Closed-loop state `phi(x, t)` from the contour representation.
pub fn state_integral_eval(p: &Problem, x: f64, t: f64, quad: &QuadratureSpec) -> Result<PointValue> {
    evaluate(p, x, t, quad, Quantity::State)
}

/// Evaluates a whole grid concurrently. Interior points only: endpoints of
/// `xs` equal to `0` or `L` take the Dirichlet values for the state and are
/// refused for the control.
pub fn contour_field(p: &Problem, quantity: Quantity, xs: &[f64], ts: &[f64], quad: &QuadratureSpec) -> Result<Field> {
    build_contour_with_angle(&p.disp, quad, p.angle)?;
    let mut field = Field::new(quantity, Method::Contour, xs.to_vec(), ts.to_vec());
    let l = p.l();
    let nx = xs.len();
    let results: Vec<Result<(C64, f64)>> = (0..nx * ts.len())
        .into_par_iter()
        .map(|i| {
            let (x, t) = (xs[i % nx], ts[i / nx]);
            if quantity == Quantity::State && (x == 0.0 || x == l) {
                let s = if x == 0.0 { &p.boundary.g0 } else { &p.boundary.h0 };
                return Ok((C64::new(s.value(t), 0.0), 0.0));
            }
            let pv = evaluate(p, x, t, quad, quantity)?;
            Ok((pv.value, pv.error))
        })
        .collect();
    for (i, r) in results.into_iter().enumerate() {
        let (v, e) = r?;
        field.values[i] = v;
        field.errors[i] = e;
    }
    Ok(field)
}

/// Settings for [`vanishing_term_check_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Ray angle; `None` uses the problem's contour.
    pub angle: Option<f64>,
    pub tail_exponent: f64,
    /// Fixed radius; `None` derives it from `tail_exponent`.
    pub radius: Option<f64>,
    pub epsilon_origin: f64,
    pub panel_tolerance: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            angle: None,
            tail_exponent: 20.0,
            radius: None,
            epsilon_origin: 1e-4,
            panel_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub residual: f64,
    pub error: f64,
    pub radius: f64,
}

/// The unknown-boundary-value integrand
/// `e^{i kappa x} w g1 - e^{i kappa (L - x)} w h1` built from the state
/// transform at `kappa`.
pub fn vanishing_integrand(disp: &Dispersion, state: &SineSum, kappa: C64, x: f64) -> C64 {
    let l = state.l;
    let w = disp.w(kappa);
    let q = (2.0 * I * kappa * l).exp();
    let e_plus = state.transform_shifted(kappa);
    let f_minus = state.transform(-kappa);
    let el = (I * kappa * l).exp();
    let g1 = (f_minus - el * e_plus) / (q - 1.0);
    let h1_shifted = -(I * kappa * (l - x)).exp() * (e_plus - el * f_minus) / (q - 1.0);
    (I * kappa * x).exp() * w * g1 - w * h1_shifted
}

/// `|int over the upper contour of the unknown-term integrand d kappa / 2 pi|`
/// for the given state snapshot. Zero in exact arithmetic for `0 < x < L`.
pub fn vanishing_term_check_with(p: &Problem, state: &SineSum, x: f64, opts: &ProbeOptions) -> Result<ProbeReport> {
    if !(x > 0.0 && x < p.l()) {
        return Err(Error::config("x", format!("{x} is not inside (0, L)")));
    }
    let angle = opts.angle.unwrap_or(p.angle);
    let a = x.min(p.l() - x);
    let radius = opts.radius.unwrap_or_else(|| {
        // The w factor adds two powers of r to the integrand.
        let rate = angle.sin().abs() * a;
        let mut r = opts.tail_exponent / rate;
        for _ in 0..50 {
            r = (opts.tail_exponent + 3.0 * (1.0 + r).ln()) / rate;
        }
        r
    });
    let rays = Rays {
        angle,
        eps: opts.epsilon_origin,
        radius,
    };
    let quad = QuadratureSpec {
        panel_tolerance: opts.panel_tolerance,
        max_evals: 2_000_000,
        ..QuadratureSpec::default()
    };
    let f = |kappa: C64| -> Result<C64> {
        let v = vanishing_integrand(&p.disp, state, kappa, x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::OverflowGuard(kappa.norm()))
        }
    };
    let (est, ends) = contour_integral(&f, rays, &options(&quad, radius * p.l() / PI))?;
    Ok(ProbeReport {
        residual: est.value.norm() / (2.0 * PI),
        error: (est.error + ends / (a * angle.sin().abs())) / (2.0 * PI),
        radius,
    })
}

/// Number of modes used for the state snapshot in [`vanishing_term_check`].
pub const PROBE_MODES: usize = 64;

/// Vanishing-term probe at `(x, t)` using the closed-loop state at time `t`.
pub fn vanishing_term_check(p: &Problem, x: f64, t: f64, quad: &QuadratureSpec) -> Result<ProbeReport> {
    let coeffs = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, PROBE_MODES)?;
    let snap = coeffs.snapshot(t)?;
    let state = SineSum { l: p.l(), amps: snap.a };
    let opts = ProbeOptions {
        radius: quad.truncation_radius,
        ..ProbeOptions::default()
    };
    vanishing_term_check_with(p, &state, x, &opts)
}

/// Largest magnitude of the unknown-term integrand on the arc `|kappa| = r`
/// between the two rays.
pub fn jordan_arc_max(p: &Problem, state: &SineSum, x: f64, r: f64, samples: usize) -> f64 {
    let th = p.angle;
    (0..=samples)
        .map(|i| {
            let arg = th + (PI - 2.0 * th) * i as f64 / samples as f64;
            vanishing_integrand(&p.disp, state, C64::from_polar(r, arg), x).norm()
        })
        .fold(0.0, f64::max)
}

/// `|int e^{ikx} v(k) e^{-(k/K)^2} dk / 2pi|` for a full boundary tuple
/// (`g[j]`, `h[j]` are the `j`-th x-derivatives at each end). The Gaussian
/// window makes the truncated integral converge pointwise as `K` grows.
pub fn u3_bandlimited_check(disp: &Dispersion, g: &[f64], h: &[f64], l: f64, x: f64, k: f64) -> Result<f64> {
    if !(x > 0.0 && x < l) {
        return Err(Error::config("x", format!("{x} is not inside (0, L)")));
    }
    if g.iter().chain(h).all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let kmax = 6.0 * k;
    let f = |s: f64| -> Result<C64> {
        let kappa = C64::new(s, 0.0);
        Ok((I * kappa * x).exp() * v_eval(disp, g, h, kappa, l)? * (-(s / k) * (s / k)).exp())
    };
    let quad = QuadratureSpec {
        panel_tolerance: 1e-13,
        ..QuadratureSpec::default()
    };
    let est = integrate_fallible(f, -kmax, kmax, &options(&quad, kmax * l / PI))?;
    Ok(est.value.norm() / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{TimeForm, TimeSignal};

    fn heat_sine() -> Problem {
        Problem::new(&Dispersion::heat(), &SpatialProfile::sine(1.0, 1, PI), &BoundarySignal::homogeneous()).unwrap()
    }

    fn tapered(c: f64) -> Problem {
        let g = TimeSignal::new(TimeForm::Sine { amplitude: 0.5, frequency: 2.0 }, 1.0, 0.2, "g0").unwrap();
        let h = TimeSignal::new(TimeForm::Constant(-0.3), 0.8, 0.3, "h0").unwrap();
        Problem::new(
            &Dispersion::reaction_diffusion(c).unwrap(),
            &SpatialProfile::polynomial(vec![0.2, 0.0, 0.4], PI),
            &BoundarySignal { g0: g, h0: h },
        )
        .unwrap()
    }

    #[test]
    fn single_mode_control_matches_closed_form() {
        let p = heat_sine();
        let q = QuadratureSpec::default();
        let pv = control_integral_eval(&p, PI / 2.0, 0.5, &q).unwrap();
        let want = -(2f64.sqrt() - 1.0) * (-(2f64.sqrt()) * 0.5).exp();
        assert!((want + 0.204236).abs() < 1e-6);
        assert!((pv.value.re - want).abs() < 1e-8, "{} vs {want}", pv.value);
        assert!(pv.value.im.abs() < 1e-9);
        assert!(pv.error < 1e-6);
    }

    #[test]
    fn single_mode_state_matches_closed_form() {
        let p = heat_sine();
        let q = QuadratureSpec::default();
        for (x, t) in [(0.4, 0.1), (PI / 2.0, 0.5), (2.9, 1.7)] {
            let pv = state_integral_eval(&p, x, t, &q).unwrap();
            let want = (-(2f64.sqrt()) * t).exp() * x.sin();
            assert!((pv.value - want).norm() < 1e-6, "({x},{t}): {} vs {want}", pv.value);
        }
    }

    #[test]
    fn zero_problem_is_zero() {
        let p = Problem::new(&Dispersion::reaction_diffusion(2.0).unwrap(), &SpatialProfile::zero(1.0), &BoundarySignal::homogeneous()).unwrap();
        let pv = control_integral_eval(&p, 0.3, 0.2, &QuadratureSpec::default()).unwrap();
        assert_eq!(pv.value, ZERO);
        let probe = vanishing_term_check(&p, 0.3, 0.2, &QuadratureSpec::default()).unwrap();
        assert_eq!(probe.residual, 0.0);
    }

    #[test]
    fn small_time_reproduces_initial_profile() {
        let p = Problem::new(&Dispersion::heat(), &SpatialProfile::sine(0.5, 1, PI), &BoundarySignal::homogeneous()).unwrap();
        let q = QuadratureSpec::default();
        for x in [0.5, 1.5, 2.5] {
            let pv = state_integral_eval(&p, x, 1e-3, &q).unwrap();
            assert!((pv.value.re - 0.5 * x.sin()).abs() < 1e-3);
        }
        assert!(matches!(state_integral_eval(&p, 1.0, 1e-4, &q), Err(Error::Config { .. })));
    }

    #[test]
    fn integrands_at_hand_assembled_point() {
        // phi0 = sin x on [0, pi]: phihat0(k) = (1 + e^{-i k pi}) / (1 - k^2).
        let p = heat_sine();
        let kappa = C64::new(0.0, 2.0);
        let x = 0.7;
        let ph = |k: C64| (1.0 + (-I * k * PI).exp()) / (1.0 - k * k);
        let want = 2.0 * (kappa * x).sin() * I * (I * kappa * PI).exp() * ph(kappa)
            + 2.0 * (kappa * (PI - x)).sin() * I * ph(-kappa);
        let (u1, u2) = raw_integrands(&p, kappa, x, 0.3).unwrap();
        assert!((u1 - want).norm() < 1e-12 * want.norm());
        assert_eq!(u2, ZERO);
        let w = weighted_integrands(&p, kappa, x, 0.3).unwrap();
        let om = p.branch().omega(kappa).unwrap();
        let d = crate::spectral::delta(kappa, PI);
        assert!((w.i1_initial - (-om * 0.3).exp() * u1 / d).norm() < 1e-12 * w.i1_initial.norm());
    }

    #[test]
    fn weighted_integrands_agree_with_raw_forms() {
        let p = tapered(1.0);
        let (x, t) = (0.9, 0.4);
        for kappa in [C64::new(1.3, 0.4), C64::new(-2.0, 0.9), C64::new(0.2, 0.05)] {
            let (u1, u2) = raw_integrands(&p, kappa, x, t).unwrap();
            let w = weighted_integrands(&p, kappa, x, t).unwrap();
            let om = p.branch().omega(kappa).unwrap();
            let d = crate::spectral::delta(kappa, PI);
            let i1 = (-om * t).exp() * u1 / d;
            assert!((w.i1_initial + w.i1_boundary - i1).norm() < 1e-9 * (1.0 + i1.norm()), "{kappa}");
            assert!((w.i2 - u2 / d).norm() < 1e-9 * (1.0 + w.i2.norm()), "{kappa}");
        }
        // x = 0 kills the sin(kappa x) brackets.
        let (u1, _) = raw_integrands(&p, C64::new(1.0, 1.0), 0.0, t).unwrap();
        let l = PI;
        let kappa = C64::new(1.0, 1.0);
        let g = &p.boundary.g0;
        let want = 2.0 * (kappa * l).sin() * (I * p.profile.transform(-kappa).unwrap() - 2.0 * kappa * g.check_transform(&p.disp, kappa, t).unwrap());
        assert!((u1 - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn contour_matches_series_with_boundary_data() {
        let p = tapered(5.0);
        let q = QuadratureSpec::default();
        let coeffs = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, 400).unwrap();
        // The state series converges like 1/M, with oscillation, when the
        // boundary data are nonzero.
        let fine = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, 32000).unwrap();
        for (x, t) in [(0.6, 0.3), (1.7, 0.9), (2.8, 1.5)] {
            let u = control_integral_eval(&p, x, t, &q).unwrap();
            let s = coeffs.control(x, t).unwrap();
            assert!((u.value.re - s).abs() < 1e-4, "u({x},{t}): {} vs {s}", u.value);
            assert!(u.value.im.abs() < 1e-6 * (1.0 + u.value.re.abs()));
            let ph = state_integral_eval(&p, x, t, &q).unwrap();
            let s = fine.state(x, t).unwrap();
            assert!((ph.value.re - s).abs() < 2e-5, "phi({x},{t}): {} vs {s}", ph.value);
        }
    }

    #[test]
    fn symmetric_problem_gives_symmetric_control() {
        let g = TimeSignal::new(TimeForm::Constant(0.4), 0.7, 0.3, "g0").unwrap();
        let p = Problem::new(
            &Dispersion::reaction_diffusion(1.0).unwrap(),
            &SpatialProfile::polynomial(vec![0.0, 2.0, -1.0], 2.0),
            &BoundarySignal { g0: g.clone(), h0: g },
        )
        .unwrap();
        let q = QuadratureSpec::default();
        for x in [0.3, 0.8] {
            let a = control_integral_eval(&p, x, 0.5, &q).unwrap().value;
            let b = control_integral_eval(&p, 2.0 - x, 0.5, &q).unwrap().value;
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn error_estimate_covers_refinement() {
        let p = tapered(1.0);
        let base = QuadratureSpec::default();
        let fine = QuadratureSpec {
            radius_scale: 2.0,
            panel_tolerance: 0.5 * base.panel_tolerance,
            ..base
        };
        for x in [0.3, 1.2, PI / 2.0, 2.0, 2.9] {
            for t in [0.05, 0.5, 2.0] {
                let a = control_integral_eval(&p, x, t, &base).unwrap();
                let b = control_integral_eval(&p, x, t, &fine).unwrap();
                assert!((a.value - b.value).norm() <= a.error + 1e-13, "({x},{t}): {} > {}", (a.value - b.value).norm(), a.error);
            }
        }
    }

    #[test]
    fn vanishing_probe_is_small_and_needs_the_upper_contour() {
        let p = Problem::new(&Dispersion::heat(), &SpatialProfile::sine(1.0, 1, PI), &BoundarySignal::homogeneous()).unwrap();
        let q = QuadratureSpec::default();
        let pv = control_integral_eval(&p, 1.0, 0.5, &q).unwrap();
        let r = vanishing_term_check(&p, 1.0, 0.5, &q).unwrap();
        assert!(r.residual <= 1e-6 * pv.scale(), "{r:?}");

        let p = tapered(2.0);
        let coeffs = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, 48).unwrap();
        let state = SineSum { l: PI, amps: coeffs.snapshot(0.4).unwrap().a };
        let base = vanishing_term_check_with(&p, &state, 1.1, &ProbeOptions::default()).unwrap();
        let double = vanishing_term_check_with(&p, &state, 1.1, &ProbeOptions { radius: Some(2.0 * base.radius), ..ProbeOptions::default() }).unwrap();
        assert!(double.residual <= base.residual + 1e-15);
        assert!(base.residual < 1e-8, "{base:?}");

        let bad = ProbeOptions {
            angle: Some(-p.angle()),
            ..ProbeOptions::default()
        };
        if let Ok(r) = vanishing_term_check_with(&p, &state, 1.1, &bad) { assert!(r.residual > 1e3 * base.residual.max(1e-12), "{r:?}") }
    }

    #[test]
    fn arc_maximum_decays_geometrically() {
        let p = tapered(0.0);
        let coeffs = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, 32).unwrap();
        let state = SineSum { l: PI, amps: coeffs.snapshot(0.5).unwrap().a };
        let r0 = 40.0;
        let m: Vec<f64> = [r0, 2.0 * r0, 4.0 * r0].iter().map(|&r| jordan_arc_max(&p, &state, 1.2, r, 2000)).collect();
        assert!(m[1] < 0.5 * m[0] && m[2] < 0.5 * m[1], "{m:?}");
    }

    #[test]
    fn band_limited_boundary_term_decays_in_the_interior() {
        let d = Dispersion::reaction_diffusion(1.0).unwrap();
        assert_eq!(u3_bandlimited_check(&d, &[0.0, 0.0], &[0.0, 0.0], 1.0, 0.5, 10.0).unwrap(), 0.0);
        // v = -c_1 g_1 = -1 for a unit Neumann pulse at x = 0: the windowed
        // inverse is -K e^{-K^2 x^2 / 4} / (2 sqrt(pi)).
        let l = 1.0;
        for k in [5.0, 10.0, 20.0] {
            let r = u3_bandlimited_check(&d, &[0.0, 1.0], &[0.0, 0.0], l, 0.5, k).unwrap();
            let want = k * (-(k * k) * 0.25 / 4.0).exp() / (2.0 * PI.sqrt());
            assert!((r - want).abs() < 1e-10 + 1e-6 * want, "K={k}: {r} vs {want}");
        }
        let r1 = u3_bandlimited_check(&d, &[0.0, 1.0], &[0.0, 0.0], l, 0.5, 10.0).unwrap();
        let r2 = u3_bandlimited_check(&d, &[0.0, 1.0], &[0.0, 0.0], l, 0.5, 20.0).unwrap();
        assert!(r2 < r1);
        let near = u3_bandlimited_check(&d, &[0.0, 1.0], &[0.0, 0.0], l, 0.01, 20.0).unwrap();
        assert!(near > 1.0);
    }
}
