//! Sine-series form of the optimal state and control, the convolution
//! kernel `Gamma` and its Toeplitz/Hankel split.
//!
//! With `k_m = pi m / L`, the closed-loop state is
//! `phi(x,t) = sum_m sin(k_m x) a_m(t)`,
//! `a_m = e^{-omega_m t} (phi0_m + b_m(t))`, and the control is
//! `u(x,t) = -sum_m sin(k_m x) [phat_m a_m(t) + bu_m(t)]`, where `bu_m` is
//! the boundary feedforward
//! `(2 k_m / L) phat_m (F_g - (-1)^m F_h)` built from the future integrals
//! `F = int_t^tbar e^{omega_m (t - s)} (.) ds`.
//!
//! The instantaneous boundary term `(2 k_m / L)(g0(t) - (-1)^m h0(t))` of
//! the full coefficient sums to zero at every interior point and is left out
//! of numerical sums; [`SeriesCoefficients::b_under`] still returns the full
//! coefficient.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lqr::{infinite_horizon_gain, FrequencyGain};
use crate::spectral::Dispersion;
use crate::transforms::{BoundarySignal, SpatialProfile, TimeSignal, TransformCache, TransformKind};

/// Modal data for a scenario truncated at `M` modes.
#[derive(Debug)]
pub struct SeriesCoefficients {
    pub l: f64,
    pub m_max: usize,
    pub k: Vec<f64>,
    pub phi0: Vec<f64>,
    pub gains: Vec<FrequencyGain>,
    disp: Dispersion,
    profile: SpatialProfile,
    boundary: BoundarySignal,
    cache: TransformCache,
}

/// All modal amplitudes at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSnapshot {
    pub t: f64,
    /// State amplitudes `a_m(t)`.
    pub a: Vec<f64>,
    /// Control amplitudes `-(phat_m a_m + bu_m)`.
    pub u: Vec<f64>,
    /// Largest imaginary residue seen while assembling (real data only).
    pub imag_residue: f64,
}

pub fn wavenumber(m: i64, l: f64) -> f64 {
    PI * m as f64 / l
}

fn parity(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SeriesCoefficients {
    pub fn new(disp: &Dispersion, profile: &SpatialProfile, boundary: &BoundarySignal, m_max: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::config("series.m", "truncation must be at least 1"));
        }
        let l = profile.l;
        let k: Vec<f64> = (1..=m_max as i64).map(|m| wavenumber(m, l)).collect();
        Ok(Self {
            l,
            m_max,
            phi0: profile.modal_coeffs(m_max)?,
            gains: k.iter().map(|&km| infinite_horizon_gain(disp, km)).collect(),
            k,
            disp: disp.clone(),
            profile: profile.clone(),
            boundary: boundary.clone(),
            cache: TransformCache::new(),
        })
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.disp
    }

    /// `(2/L) int_0^L sin(k_m x) phi0(x) dx` for any integer `m`.
    pub fn phi0_coeff(&self, m: i64) -> Result<f64> {
        let km = wavenumber(m, self.l);
        Ok(-2.0 / self.l * self.profile.transform(C64::new(km, 0.0))?.im)
    }

    fn cached(&self, s: &TimeSignal, kind: TransformKind, g: &FrequencyGain, t: f64) -> Result<C64> {
        self.cache.get_or_compute(s.id(), kind, g.omega, t, || match kind {
            TransformKind::Future => s.future(g.omegabar, t),
            _ => Ok(s.tilde_premult(g.omega, t)? - g.phat * s.underline_premult(g.omega, g.omegabar, t)?),
        })
    }

    /// `e^{-omega_m t} b_m(t)` for any integer `m`.
    pub fn b_premult(&self, m: i64, t: f64) -> Result<C64> {
        let km = wavenumber(m, self.l);
        let g = infinite_horizon_gain(&self.disp, km);
        let cg = self.cached(&self.boundary.g0, TransformKind::Check, &g, t)?;
        let ch = self.cached(&self.boundary.h0, TransformKind::Check, &g, t)?;
        Ok(2.0 / self.l * km * (cg - parity(m) * ch))
    }

    /// `b_m(t)`; refuses when `e^{omega_m t}` would overflow.
    pub fn b(&self, m: i64, t: f64) -> Result<C64> {
        let g = infinite_horizon_gain(&self.disp, wavenumber(m, self.l));
        if g.omega.re * t > crate::transforms::OVERFLOW_EXPONENT {
            return Err(Error::OverflowGuard(g.omega.re * t));
        }
        Ok((g.omega * t).exp() * self.b_premult(m, t)?)
    }

    /// Boundary feedforward amplitude `bu_m(t)`.
    pub fn b_feedforward(&self, m: i64, t: f64) -> Result<C64> {
        let km = wavenumber(m, self.l);
        let g = infinite_horizon_gain(&self.disp, km);
        let fg = self.cached(&self.boundary.g0, TransformKind::Future, &g, t)?;
        let fh = self.cached(&self.boundary.h0, TransformKind::Future, &g, t)?;
        Ok(2.0 / self.l * km * g.phat * (fg - parity(m) * fh))
    }

    /// Full boundary coefficient
    /// `(2 k_m / L) [(-1)^m (h0 - phat F_h) - (g0 - phat F_g)]`.
    pub fn b_under(&self, m: i64, t: f64) -> Result<C64> {
        let km = wavenumber(m, self.l);
        let inst = 2.0 / self.l * km * (parity(m) * self.boundary.h0.value(t) - self.boundary.g0.value(t));
        Ok(inst + self.b_feedforward(m, t)?)
    }

    pub fn snapshot(&self, t: f64) -> Result<ModalSnapshot> {
        let mut a = Vec::with_capacity(self.m_max);
        let mut u = Vec::with_capacity(self.m_max);
        let mut imag: f64 = 0.0;
        let homogeneous = self.boundary.is_homogeneous();
        for (i, g) in self.gains.iter().enumerate() {
            let m = i as i64 + 1;
            let decay = (-g.omega * t).exp();
            let (am, ff) = if homogeneous {
                (decay * self.phi0[i], C64::new(0.0, 0.0))
            } else {
                (decay * self.phi0[i] + self.b_premult(m, t)?, self.b_feedforward(m, t)?)
            };
            let um = -(g.phat * am + ff);
            imag = imag.max(am.im.abs()).max(um.im.abs());
            a.push(am.re);
            u.push(um.re);
        }
        Ok(ModalSnapshot {
            t,
            a,
            u,
            imag_residue: imag,
        })
    }

    pub fn state_at(&self, snap: &ModalSnapshot, x: f64) -> f64 {
        self.k.iter().zip(&snap.a).map(|(k, a)| (k * x).sin() * a).sum()
    }

    pub fn control_at(&self, snap: &ModalSnapshot, x: f64) -> f64 {
        self.k.iter().zip(&snap.u).map(|(k, u)| (k * x).sin() * u).sum()
    }

    pub fn state(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.state_at(&self.snapshot(t)?, x))
    }

    pub fn control(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.control_at(&self.snapshot(t)?, x))
    }
}

/// `Gamma(s) = phat(0) + 2 sum_{m=1}^M phat(k_m) cos(k_m s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub l: f64,
    pub m_max: usize,
    pub k: Vec<f64>,
    pub phat: Vec<f64>,
    pub phat0: f64,
}

impl Kernel {
    pub fn new(disp: &Dispersion, l: f64, m_max: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::config("kernel.m", "truncation must be at least 1"));
        }
        if !(l > 0.0) {
            return Err(Error::config("kernel.l", "interval length must be positive"));
        }
        let k: Vec<f64> = (1..=m_max as i64).map(|m| wavenumber(m, l)).collect();
        Ok(Self {
            l,
            m_max,
            phat: k.iter().map(|&km| infinite_horizon_gain(disp, km).phat).collect(),
            phat0: infinite_horizon_gain(disp, 0.0).phat,
            k,
        })
    }

    /// `Gamma` as a function of the offset `s = x - xi`.
    pub fn gamma(&self, s: f64) -> f64 {
        self.phat0 + 2.0 * self.k.iter().zip(&self.phat).map(|(k, p)| p * (k * s).cos()).sum::<f64>()
    }

    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        self.gamma(x - xi)
    }

    /// `(Gamma(x, xi) - Gamma(x, -xi)) / (2L)`.
    pub fn combined(&self, x: f64, xi: f64) -> f64 {
        (self.gamma(x - xi) - self.gamma(x + xi)) / (2.0 * self.l)
    }
}

pub fn kernel_eval(disp: &Dispersion, l: f64, m_max: usize, x: f64, xi: f64) -> Result<f64> {
    Ok(Kernel::new(disp, l, m_max)?.eval(x, xi))
}

/// Kernel sampled on a uniform square grid over `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    /// `Gamma(x_i, xi_j)`.
    pub toeplitz: Vec<Vec<f64>>,
    /// `Gamma(x_i, -xi_j)`.
    pub hankel: Vec<Vec<f64>>,
    /// `(toeplitz - hankel) / (2L)`.
    pub combined: Vec<Vec<f64>>,
    pub l: f64,
}

impl KernelMatrix {
    /// Uniform `n x n` grid including both endpoints. Entries are built from
    /// integer offsets so the structure is exact.
    pub fn sample(kernel: &Kernel, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::config("kernel.grid", "need at least 2 nodes"));
        }
        let h = kernel.l / (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let diff: Vec<f64> = (0..n).map(|d| kernel.gamma(d as f64 * h)).collect();
        let sum: Vec<f64> = (0..2 * n - 1).map(|d| kernel.gamma(d as f64 * h)).collect();
        let toeplitz: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| diff[i.abs_diff(j)]).collect()).collect();
        let hankel: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| sum[i + j]).collect()).collect();
        let combined = (0..n)
            .map(|i| (0..n).map(|j| (toeplitz[i][j] - hankel[i][j]) / (2.0 * kernel.l)).collect())
            .collect();
        Ok(Self {
            xi: x.clone(),
            x,
            toeplitz,
            hankel,
            combined,
            l: kernel.l,
        })
    }
}

/// Structure report for the two parts of a sampled kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub toeplitz: Vec<Vec<f64>>,
    pub hankel: Vec<Vec<f64>>,
    pub max_diagonal_deviation: f64,
    pub max_antidiagonal_deviation: f64,
    /// Half-height width of the central lobe of `Gamma(d)`.
    pub lobe_width: f64,
    /// Share of `sum |hankel|` in the two corners near the anti-diagonal ends.
    pub hankel_corner_mass: f64,
}

pub fn toeplitz_hankel_decompose(km: &KernelMatrix) -> Result<StructureReport> {
    let n = km.x.len();
    if km.xi.len() != n || km.toeplitz.len() != n {
        return Err(Error::GridMismatch("kernel grids must be square".into()));
    }
    let spread = |cells: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = cells.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        hi - lo
    };
    let mut diag: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for d in 0..2 * n - 1 {
        // i - j = d - (n - 1)
        let off = d as i64 - (n as i64 - 1);
        let mut it = (0..n).filter_map(|i| {
            let j = i as i64 - off;
            (0..n as i64).contains(&j).then(|| km.toeplitz[i][j as usize])
        });
        diag = diag.max(spread(&mut it));
        let mut it = (0..n).filter_map(|i| {
            let j = d as i64 - i as i64;
            (0..n as i64).contains(&j).then(|| km.hankel[i][j as usize])
        });
        anti = anti.max(spread(&mut it));
    }
    // Lobe: first row of the Toeplitz part is Gamma at offsets 0..L.
    let row = &km.toeplitz[0];
    let min = row.iter().copied().fold(f64::INFINITY, f64::min);
    let half = 0.5 * (row[0] - min);
    let h = km.l / (n - 1) as f64;
    let mut lobe = km.l;
    for i in 1..n {
        if row[i] - min <= half {
            let (a, b) = (row[i - 1] - min - half, row[i] - min - half);
            let frac = if a == b { 0.0 } else { a / (a - b) };
            lobe = (i as f64 - 1.0 + frac) * h;
            break;
        }
    }
    let total: f64 = km.hankel.iter().flatten().map(|v| v.abs()).sum();
    let mut corner = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, xi) = (km.x[i], km.xi[j]);
            let near0 = x <= 0.1 * km.l && xi <= 0.1 * km.l;
            let near1 = x >= 0.9 * km.l && xi >= 0.9 * km.l;
            if near0 || near1 {
                corner += km.hankel[i][j].abs();
            }
        }
    }
    Ok(StructureReport {
        toeplitz: km.toeplitz.clone(),
        hankel: km.hankel.clone(),
        max_diagonal_deviation: diag,
        max_antidiagonal_deviation: anti,
        lobe_width: lobe,
        hankel_corner_mass: if total > 0.0 { corner / total } else { 0.0 },
    })
}

/// Feedback form: `-int_0^L K(x, xi) phi(xi) dxi - sum_m sin(k_m x) bu_m(t)`
/// with the composite trapezoid rule on the supplied state row.
pub fn feedback_control_eval(coeffs: &SeriesCoefficients, xs: &[f64], phi: &[f64], x: f64, t: f64) -> Result<f64> {
    if xs.len() != phi.len() {
        return Err(Error::GridMismatch("state row abscissae and values differ in length".into()));
    }
    let l = coeffs.l;
    let kmax = coeffs.k[coeffs.m_max - 1];
    let hmax = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if xs.len() < 16
        || xs[0].abs() > 1e-12
        || (xs[xs.len() - 1] - l).abs() > 1e-12
        || xs.windows(2).any(|w| !(w[1] > w[0]))
        || hmax > PI / (4.0 * kmax)
    {
        return Err(Error::InsufficientStateResolution(format!(
            "need an increasing grid over [0, L] with spacing <= pi/(4 k_M) = {:.3e}, got {} nodes with spacing {hmax:.3e}",
            PI / (4.0 * kmax),
            xs.len()
        )));
    }
    let kernel = Kernel {
        l,
        m_max: coeffs.m_max,
        k: coeffs.k.clone(),
        phat: coeffs.gains.iter().map(|g| g.phat).collect(),
        phat0: infinite_horizon_gain(coeffs.dispersion(), 0.0).phat,
    };
    let mut conv = 0.0;
    for i in 0..xs.len() - 1 {
        let h = xs[i + 1] - xs[i];
        conv += 0.5 * h * (kernel.combined(x, xs[i]) * phi[i] + kernel.combined(x, xs[i + 1]) * phi[i + 1]);
    }
    let mut ff = 0.0;
    if !coeffs.boundary.is_homogeneous() {
        for (i, k) in coeffs.k.iter().enumerate() {
            ff += (k * x).sin() * coeffs.b_feedforward(i as i64 + 1, t)?.re;
        }
    }
    Ok(-conv - ff)
}
