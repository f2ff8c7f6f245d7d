//! Per-frequency LQR: the backward Riccati system on a finite horizon, its
//! infinite-horizon limit, the feedforward integral and the closed-loop
//! frequency dynamics.
//!
//! A complex frequency-domain state `phi_hat` is realised as the real
//! 2-vector `(Re, Im)`; the exogenous input enters through the augmented
//! vector `(v_re, v_im, 1)`.

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Vector2, Vector3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spectral::Dispersion;
use crate::transforms::TimeSignal;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `x' = A x + B u + C vv`, `vv' = D(t) vv` at one real frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedSystem {
    pub k: f64,
    pub a: Matrix2<f64>,
    pub b: Matrix2<f64>,
    pub c: Matrix2x3<f64>,
}

impl RealizedSystem {
    pub fn new(disp: &Dispersion, k: f64) -> Self {
        let kk = C64::new(k, 0.0);
        let wr = disp.w_re(kk).re;
        let wi = disp.w_im(kk).re;
        Self {
            k,
            a: Matrix2::new(-wr, wi, -wi, -wr),
            b: Matrix2::identity(),
            c: Matrix2x3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0),
        }
    }

    /// `D(t)`: only the last column is populated, with `d/dt (v_re, v_im)`.
    pub fn d(dv: C64) -> Matrix3<f64> {
        Matrix3::new(0.0, 0.0, dv.re, 0.0, 0.0, dv.im, 0.0, 0.0, 0.0)
    }

    /// `I - P B B^T P + P A + A^T P`.
    pub fn are_residual(&self, p: &Matrix2<f64>) -> Matrix2<f64> {
        Matrix2::identity() - p * self.b * self.b.transpose() * p + p * self.a + self.a.transpose() * p
    }
}

/// Frequency-domain input `v(k, t) = sum_i coeff_i s_i(t)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrequencyInput {
    pub terms: Vec<(C64, TimeSignal)>,
}

impl FrequencyInput {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(coeff: C64, signal: TimeSignal) -> Self {
        Self {
            terms: vec![(coeff, signal)],
        }
    }

    pub fn value(&self, t: f64) -> C64 {
        self.terms.iter().fold(ZERO, |acc, (a, s)| acc + a * s.value(t))
    }

    pub fn derivative(&self, t: f64) -> C64 {
        self.terms.iter().fold(ZERO, |acc, (a, s)| acc + a * s.derivative(t))
    }

    pub fn vanish_time(&self) -> f64 {
        self.terms.iter().map(|(_, s)| s.vanish_time).fold(0.0, f64::max)
    }
}

/// Infinite-horizon gain and closed-loop rates at one real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGain {
    pub k: f64,
    pub w: C64,
    pub phat: f64,
    pub omega: C64,
    pub omegabar: C64,
}

pub fn infinite_horizon_gain(disp: &Dispersion, k: f64) -> FrequencyGain {
    let kk = C64::new(k, 0.0);
    let wr = disp.w_re(kk).re;
    let wi = disp.w_im(kk).re;
    let root = (wr * wr + 1.0).sqrt();
    let phat = if wr > 0.0 { 1.0 / (wr + root) } else { root - wr };
    FrequencyGain {
        k,
        w: C64::new(wr, wi),
        phat,
        omega: C64::new(root, wi),
        omegabar: C64::new(root, -wi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// `P(T) = I`, `R(T) = 0`.
    FiniteHorizonIdentity,
    /// `P(T) = 0`, `R(T) = 0`.
    InfiniteHorizonZero,
}

/// Dense backward solution of the Riccati system.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub times: Vec<f64>,
    pub p: Vec<Matrix2<f64>>,
    pub r: Vec<Matrix2x3<f64>>,
    pub terminal: Terminal,
    /// Richardson estimate of the error in `P(0)` and `R(0)`.
    pub error_estimate: f64,
}

impl RiccatiSolution {
    /// `R = [R_tilde | r]`.
    pub fn split_r(&self, i: usize) -> (Matrix2<f64>, Vector2<f64>) {
        let r = &self.r[i];
        (r.fixed_view::<2, 2>(0, 0).into_owned(), r.column(2).into_owned())
    }

    /// `u = -B^T (P x + R vv)` at node `i`.
    pub fn control(&self, i: usize, phi: C64, v: C64) -> C64 {
        let x = Vector2::new(phi.re, phi.im);
        let vv = Vector3::new(v.re, v.im, 1.0);
        let u = -(self.p[i] * x + self.r[i] * vv);
        C64::new(u[0], u[1])
    }
}

fn riccati_rhs(
    sys: &RealizedSystem,
    p: &Matrix2<f64>,
    r: &Matrix2x3<f64>,
    dv: C64,
) -> (Matrix2<f64>, Matrix2x3<f64>) {
    let at = sys.a.transpose();
    let dp = sys.are_residual(p);
    let bbt = sys.b * sys.b.transpose();
    let dr = p * sys.c + r * RealizedSystem::d(dv) + at * r - p * bbt * r;
    (dp, dr)
}

fn integrate_backward(
    sys: &RealizedSystem,
    horizon: f64,
    v: &FrequencyInput,
    steps: usize,
    terminal: Terminal,
) -> (Vec<f64>, Vec<Matrix2<f64>>, Vec<Matrix2x3<f64>>) {
    let h = horizon / steps as f64;
    let mut p = match terminal {
        Terminal::FiniteHorizonIdentity => Matrix2::identity(),
        Terminal::InfiniteHorizonZero => Matrix2::zeros(),
    };
    let mut r = Matrix2x3::zeros();
    let mut ps = vec![Matrix2::zeros(); steps + 1];
    let mut rs = vec![Matrix2x3::zeros(); steps + 1];
    ps[steps] = p;
    rs[steps] = r;
    // In reversed time s = T - t the system reads dY/ds = F(Y, T - s).
    for i in (0..steps).rev() {
        let t1 = (i + 1) as f64 * h;
        let tm = t1 - 0.5 * h;
        let t0 = i as f64 * h;
        let (k1p, k1r) = riccati_rhs(sys, &p, &r, v.derivative(t1));
        let (k2p, k2r) = riccati_rhs(sys, &(p + k1p * (0.5 * h)), &(r + k1r * (0.5 * h)), v.derivative(tm));
        let (k3p, k3r) = riccati_rhs(sys, &(p + k2p * (0.5 * h)), &(r + k2r * (0.5 * h)), v.derivative(tm));
        let (k4p, k4r) = riccati_rhs(sys, &(p + k3p * h), &(r + k3r * h), v.derivative(t0));
        p += (k1p + 2.0 * k2p + 2.0 * k3p + k4p) * (h / 6.0);
        r += (k1r + 2.0 * k2r + 2.0 * k3r + k4r) * (h / 6.0);
        p = 0.5 * (p + p.transpose());
        ps[i] = p;
        rs[i] = r;
    }
    let times = (0..=steps).map(|i| i as f64 * h).collect();
    (times, ps, rs)
}

/// Default RK4 step count for the backward sweep.
pub const RICCATI_STEPS: usize = 4000;

pub fn solve_riccati_finite(disp: &Dispersion, k: f64, horizon: f64, v: &FrequencyInput) -> Result<RiccatiSolution> {
    solve_riccati(disp, k, horizon, v, Terminal::FiniteHorizonIdentity, RICCATI_STEPS)
}

/// Backward RK4 from `t = T` with one Richardson halving. The step count is
/// raised above `min_steps` when the closed-loop rate would make RK4
/// unstable.
pub fn solve_riccati(
    disp: &Dispersion,
    k: f64,
    horizon: f64,
    v: &FrequencyInput,
    terminal: Terminal,
    min_steps: usize,
) -> Result<RiccatiSolution> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::config("horizon", "must be positive and finite"));
    }
    let sys = RealizedSystem::new(disp, k);
    let g = infinite_horizon_gain(disp, k);
    let rate = 2.0 * g.omega.norm() + 1.0;
    let steps = min_steps.max((horizon * rate / 0.25).ceil() as usize).max(2);
    let (times, p, r) = integrate_backward(&sys, horizon, v, steps, terminal);
    let (_, p2, r2) = integrate_backward(&sys, horizon, v, 2 * steps, terminal);
    let err = ((p[0] - p2[0]).norm() + (r[0] - r2[0]).norm()) / 15.0;
    let scale = 1.0 + p2[0].norm() + r2[0].norm();
    if !err.is_finite() || p.iter().any(|m| !m.iter().all(|x| x.is_finite())) || err > 1e-6 * scale {
        return Err(Error::StepSizeUnderflow(format!(
            "backward sweep with {steps} steps has error estimate {err:e}"
        )));
    }
    Ok(RiccatiSolution {
        times,
        p: p2.into_iter().step_by(2).collect(),
        r: r2.into_iter().step_by(2).collect(),
        terminal,
        error_estimate: err,
    })
}

/// `int_t^inf e^{omegabar (t - s)} v(s) ds`, cut at the vanish time.
pub fn feedforward_integral(g: &FrequencyGain, v: &FrequencyInput, t: f64) -> Result<C64> {
    v.terms
        .iter()
        .try_fold(ZERO, |acc, (a, s)| Ok(acc + a * s.future(g.omegabar, t)?))
}

/// `u = -phat phi - phat int_t^inf e^{omegabar (t - s)} v ds`.
pub fn control_from_state(g: &FrequencyGain, phi: C64, v: &FrequencyInput, t: f64) -> Result<C64> {
    Ok(-g.phat * phi - g.phat * feedforward_integral(g, v, t)?)
}

/// Closed-loop state from the explicit variation-of-constants formula,
/// evaluated with the premultiplied transforms.
pub fn closedloop_exact(g: &FrequencyGain, phi0: C64, v: &FrequencyInput, t: f64) -> Result<C64> {
    let mut acc = (-g.omega * t).exp() * phi0;
    for (a, s) in &v.terms {
        let check = s.tilde_premult(g.omega, t)? - g.phat * s.underline_premult(g.omega, g.omegabar, t)?;
        acc += a * check;
    }
    Ok(acc)
}

fn phi2(z: C64) -> C64 {
    if z.norm() < 0.1 {
        let mut term = C64::new(0.5, 0.0);
        let mut sum = term;
        for k in 3..16 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Largest substep used by [`closedloop_solve`].
pub const CLOSEDLOOP_SUBSTEP: f64 = 2.5e-4;

/// Integrate `phi' = -omega phi + v - phat F(t)` with an exponential
/// integrator: the linear part is propagated exactly and the forcing is
/// interpolated linearly on each substep.
pub fn closedloop_solve(g: &FrequencyGain, phi0: C64, v: &FrequencyInput, t_grid: &[f64]) -> Result<Vec<C64>> {
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::config("t_grid", "times must be nonnegative and nondecreasing"));
    }
    let forcing = |t: f64| -> Result<C64> { Ok(v.value(t) - g.phat * feedforward_integral(g, v, t)?) };
    let mut out = Vec::with_capacity(t_grid.len());
    let mut t = 0.0;
    let mut phi = phi0;
    let mut q0 = forcing(0.0)?;
    for &target in t_grid {
        let span = target - t;
        if span > 0.0 {
            let n = (span / CLOSEDLOOP_SUBSTEP).ceil().max(1.0) as usize;
            let h = span / n as f64;
            if h <= f64::EPSILON * target.max(1.0) {
                return Err(Error::StepSizeUnderflow(format!("substep {h:e}")));
            }
            let z = -g.omega * h;
            let (e, f1, f2) = (z.exp(), crate::transforms::phi1(z), phi2(z));
            for i in 0..n {
                let t1 = t + (i + 1) as f64 * h;
                let q1 = forcing(t1)?;
                phi = e * phi + h * (q0 * f1 + (q1 - q0) * f2);
                q0 = q1;
            }
            t = target;
        }
        out.push(phi);
    }
    Ok(out)
}

/// Quadratic cost `1/2 int_0^T (|phi|^2 + |u|^2) dt` of the homogeneous
/// loop `u = -gain * phi`, in closed form.
pub fn feedback_cost(g: &FrequencyGain, gain: f64, phi0: C64, horizon: f64) -> f64 {
    let rate = 2.0 * (g.w.re + gain);
    let integral = if rate.abs() < 1e-14 { horizon } else { (1.0 - (-rate * horizon).exp()) / rate };
    0.5 * (1.0 + gain * gain) * phi0.norm_sqr() * integral
}

/// The same cost integrated from a sampled trajectory (trapezoid rule).
pub fn sampled_cost(times: &[f64], phi: &[C64], u: &[C64]) -> f64 {
    times
        .windows(2)
        .zip(phi.windows(2).zip(u.windows(2)))
        .map(|(t, (p, q))| {
            let a = p[0].norm_sqr() + q[0].norm_sqr();
            let b = p[1].norm_sqr() + q[1].norm_sqr();
            0.25 * (t[1] - t[0]) * (a + b)
        })
        .sum()
}
