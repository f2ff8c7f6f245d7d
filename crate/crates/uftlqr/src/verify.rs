//! Invariant probes behind `uftlqr verify`.
//!
//! Each probe measures one quantity, compares it with a threshold and
//! records the outcome. Probes never panic; a computation error is a
//! failed probe with the error message as detail.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::contour::{control_integral_eval, vanishing_term_check_with, ProbeOptions, Problem, PROBE_MODES};
use crate::error::Result;
use crate::fd;
use crate::lqr::{infinite_horizon_gain, solve_riccati_finite, FrequencyInput, RealizedSystem};
use crate::quadrature::{integrate_real, QuadOptions};
use crate::scenario::kernel_grid;
use crate::series::SeriesCoefficients;
use crate::spectral::{build_contour, Dispersion, QuadratureSpec};
use crate::transforms::{inverse_transform, BoundarySignal, SineSum, SpatialProfile, TimeForm, TimeSignal};
use crate::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Measured and printed, but not gating.
    Note,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
    pub seconds: f64,
}

impl Probe {
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Note => "NOTE",
        };
        format!(
            "{tag} {:<24} measured={:.3e} threshold={:.3e} ({:.1}s) {}",
            self.name, self.measured, self.threshold, self.seconds, self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOptions {
    pub full: bool,
    /// Evaluate the vanishing probe on the mirrored (lower) rays.
    pub corrupt_angle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub probes: Vec<Probe>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.probes.iter().all(|p| p.status != Status::Fail)
    }
}

struct Measured {
    value: f64,
    threshold: f64,
    ok: bool,
    detail: String,
}

fn probe(name: &str, f: impl FnOnce() -> Result<Measured>) -> Probe {
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    match out {
        Ok(m) => Probe {
            name: name.into(),
            status: if m.ok { Status::Pass } else { Status::Fail },
            measured: m.value,
            threshold: m.threshold,
            detail: m.detail,
            seconds,
        },
        Err(e) => Probe {
            name: name.into(),
            status: Status::Fail,
            measured: f64::NAN,
            threshold: f64::NAN,
            detail: format!("{}: {e}", e.kind()),
            seconds,
        },
    }
}

fn at_most(value: f64, threshold: f64, detail: String) -> Measured {
    Measured {
        value,
        threshold,
        ok: value <= threshold,
        detail,
    }
}

/// The single-mode heat problem: `c = 0`, `L = pi`, `phi0 = sin x`.
pub fn heat_single_mode() -> Result<Problem> {
    Problem::new(&Dispersion::heat(), &SpatialProfile::sine(1.0, 1, PI), &BoundarySignal::homogeneous())
}

/// `c = 5`, `phi0 = sin x`, `g0 = h0 = sin t` tapered to zero over `[2pi - 1, 2pi]`.
pub fn reaction_with_boundary_data() -> Result<Problem> {
    let sig = || TimeSignal::new(TimeForm::Sine { amplitude: 1.0, frequency: 1.0 }, 2.0 * PI, 1.0, "boundary");
    let bnd = BoundarySignal { g0: sig()?, h0: sig()? };
    Problem::new(&Dispersion::reaction_diffusion(5.0)?, &SpatialProfile::sine(1.0, 1, PI), &bnd)
}

/// `-(sqrt 2 - 1) e^{-sqrt 2 t} sin x`.
pub fn heat_single_mode_control(x: f64, t: f64) -> f64 {
    let s = 2f64.sqrt();
    -(s - 1.0) * (-s * t).exp() * x.sin()
}

fn admissibility() -> Result<Measured> {
    let mut worst = f64::INFINITY;
    let mut detail = String::new();
    for c in [0.0, 5.0] {
        let fam = build_contour(&Dispersion::reaction_diffusion(c)?, &QuadratureSpec::default())?;
        let a = fam.admissibility;
        worst = worst.min(a.min_re_omega.min(a.min_cut_distance));
        detail += &format!("c={c}: min Re omega={:.3e} cut distance={:.3e}; ", a.min_re_omega, a.min_cut_distance);
    }
    Ok(Measured {
        value: worst,
        threshold: 0.0,
        ok: worst > 0.0,
        detail: detail.trim_end_matches("; ").into(),
    })
}

/// Vanishing probe on the single-mode problem: the residual at the default
/// radius relative to the control scale, and the decay under radius
/// doubling while truncation still dominates.
fn vanishing(corrupt: bool) -> Result<Measured> {
    let p = heat_single_mode()?;
    let q = QuadratureSpec::default();
    let coeffs = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, PROBE_MODES)?;
    let t = 0.5;
    let state = SineSum { l: PI, amps: coeffs.snapshot(t)?.a };
    let angle = if corrupt { Some(-p.angle()) } else { None };
    let mut worst_rel = 0.0_f64;
    let mut worst_ratio = 0.0_f64;
    for x in [1.0, 2.0] {
        let scale = control_integral_eval(&p, x, t, &q)?.scale();
        let base = ProbeOptions { angle, ..ProbeOptions::default() };
        let r = vanishing_term_check_with(&p, &state, x, &base)?;
        worst_rel = worst_rel.max(r.residual / scale);
        let res: Vec<f64> = [8.0, 16.0, 32.0]
            .iter()
            .map(|&radius| vanishing_term_check_with(&p, &state, x, &ProbeOptions { radius: Some(radius), ..base }).map(|r| r.residual))
            .collect::<Result<_>>()?;
        for w in res.windows(2) {
            worst_ratio = worst_ratio.max(w[1] / w[0]);
        }
    }
    let ok = worst_rel <= 1e-6 && worst_ratio <= 0.5;
    Ok(Measured {
        value: worst_rel,
        threshold: 1e-6,
        ok,
        detail: format!("residual/scale at (1,0.5),(2,0.5); worst ratio under radius doubling {worst_ratio:.2e} (<= 0.5)"),
    })
}

fn parseval() -> Result<Measured> {
    let p = SpatialProfile::sine(1.0, 1, PI);
    let opts = QuadOptions::default().with_abs_tol(1e-12).with_panels(400);
    let (energy, _) = integrate_real(|k| p.transform(C64::new(k, 0.0)).map(|v| v.norm_sqr()).unwrap_or(f64::NAN), -200.0, 200.0, &opts)?;
    let rel = (energy / (2.0 * PI) - PI / 2.0).abs() / (PI / 2.0);
    Ok(at_most(rel, 1e-4, "sin x on [0, pi], K = 200".into()))
}

fn inversion() -> Result<Measured> {
    let p = SpatialProfile::sine(1.0, 1, PI);
    let opts = QuadOptions::default().with_abs_tol(1e-11);
    let mut worst = 0.0_f64;
    for x in [0.7, PI / 2.0, 2.4] {
        let est = inverse_transform(|k| p.transform(C64::new(k, 0.0)).unwrap_or(C64::new(f64::NAN, 0.0)), x, 2e4, PI, &opts)?;
        worst = worst.max((est.value - x.sin()).norm());
    }
    Ok(at_most(worst, 1e-6, "sin x at x = 0.7, pi/2, 2.4".into()))
}

fn riccati() -> Result<Measured> {
    let mut worst_p = 0.0_f64;
    let mut worst_are = 0.0_f64;
    for c in [0.0, 5.0] {
        let d = Dispersion::reaction_diffusion(c)?;
        for k in [0.0, 1.0, 2.0] {
            let sol = solve_riccati_finite(&d, k, 20.0, &FrequencyInput::zero())?;
            let g = infinite_horizon_gain(&d, k);
            let target = Matrix2::identity() * g.phat;
            worst_p = worst_p.max((sol.p[0] - target).norm());
            worst_are = worst_are.max(RealizedSystem::new(&d, k).are_residual(&target).norm());
        }
    }
    Ok(Measured {
        value: worst_p,
        threshold: 1e-6,
        ok: worst_p <= 1e-6 && worst_are <= 1e-10,
        detail: format!("|P(0) - phat I| over k in {{0,1,2}}, c in {{0,5}}, T = 20; ARE residual {worst_are:.2e} (<= 1e-10)"),
    })
}

fn structure() -> Result<Measured> {
    let (_, s0) = kernel_grid(0.0, PI, 10, 101)?;
    let (_, s5) = kernel_grid(5.0, PI, 10, 101)?;
    let get = |v: &serde_json::Value, k: &str| v[k].as_f64().unwrap_or(f64::NAN);
    let dev = ["max_diagonal_deviation", "max_antidiagonal_deviation"]
        .iter()
        .map(|k| get(&s0, k).max(get(&s5, k)))
        .fold(0.0, f64::max);
    let (w0, w5) = (get(&s0, "lobe_width"), get(&s5, "lobe_width"));
    let (h0, h5) = (get(&s0, "hankel_corner_mass"), get(&s5, "hankel_corner_mass"));
    Ok(Measured {
        value: dev,
        threshold: 1e-12,
        ok: dev <= 1e-12 && w5 < w0 && h5 > h0,
        detail: format!("lobe width {w0:.4} -> {w5:.4}, corner mass {h0:.4} -> {h5:.4} (c = 0 -> 5)"),
    })
}

fn single_mode_agreement(xs: &[f64], ts: &[f64]) -> Result<Measured> {
    let p = heat_single_mode()?;
    let q = QuadratureSpec::default();
    let mut worst = 0.0_f64;
    for &t in ts {
        for &x in xs {
            let want = heat_single_mode_control(x, t);
            let got = control_integral_eval(&p, x, t, &q)?.value;
            worst = worst.max((got - want).norm() / want.abs());
        }
    }
    Ok(at_most(worst, 1e-6, format!("contour vs closed form, {}x{} points, max relative error", xs.len(), ts.len())))
}

fn series_agreement(xs: &[f64], ts: &[f64]) -> Result<Measured> {
    let p = reaction_with_boundary_data()?;
    let q = QuadratureSpec::default();
    let s = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, 40)?;
    let mut worst = 0.0_f64;
    for &t in ts {
        let snap = s.snapshot(t)?;
        for &x in xs {
            let got = control_integral_eval(&p, x, t, &q)?.value;
            worst = worst.max((got - s.control_at(&snap, x)).norm());
        }
    }
    Ok(at_most(worst, 1e-3, format!("contour vs series (M = 40), c = 5 with boundary data, {}x{} points", xs.len(), ts.len())))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Relative Frobenius error of `K / dx` against the series kernel on the
/// central 80% of nodes.
pub fn fd_kernel_error(c: f64, n: usize, m: usize) -> Result<f64> {
    let model = fd::discretize(c, PI, n)?;
    let care = fd::solve_care(&model)?;
    Ok(fd::compare_kernel(&model, &care, &Dispersion::reaction_diffusion(c)?, m, 0.8)?.rel_frobenius)
}

fn fd_kernel(ns: &[usize], m: usize, require_refinement: bool) -> Result<Measured> {
    let mut worst = 0.0_f64;
    let mut worst_gain = f64::INFINITY;
    let mut detail = format!("M = {m}");
    for c in [0.0, 5.0] {
        let errs: Vec<f64> = ns.iter().map(|&n| fd_kernel_error(c, n, m)).collect::<Result<_>>()?;
        worst = worst.max(*errs.last().unwrap_or(&f64::NAN));
        let gain = errs[0] / errs[errs.len() - 1];
        worst_gain = worst_gain.min(gain);
        let list: Vec<String> = ns.iter().zip(&errs).map(|(n, e)| format!("N={n}:{e:.3e}")).collect();
        detail += &format!("; c={c}: {}", list.join(" "));
        if ns.len() > 1 {
            detail += &format!(" reduction {gain:.2}x");
        }
    }
    let ok = worst <= 0.03 && (!require_refinement || worst_gain >= 3.0);
    Ok(Measured {
        value: worst,
        threshold: 0.03,
        ok,
        detail,
    })
}

pub fn run_suite(opts: &VerifyOptions, mut on_probe: impl FnMut(&Probe)) -> VerifyReport {
    let mut probes = Vec::new();
    let mut push = |p: Probe| {
        on_probe(&p);
        probes.push(p);
    };
    push(probe("contour_admissibility", admissibility));
    push(probe("vanishing_integral", || vanishing(opts.corrupt_angle)));
    push(probe("parseval", parseval));
    push(probe("inversion", inversion));
    push(probe("riccati_convergence", riccati));
    push(probe("toeplitz_hankel", structure));
    if opts.full {
        let xs = linspace(0.1 * PI, 0.9 * PI, 11);
        push(probe("equivalence_single_mode", || single_mode_agreement(&xs, &linspace(0.1, 1.0, 5))));
        push(probe("equivalence_series", || series_agreement(&xs, &linspace(0.2, 1.0, 5))));
        push(probe("fd_kernel_refinement", || fd_kernel(&[51, 101, 201], 2000, true)));
        let mut note = probe("fd_kernel_refinement_m60", || fd_kernel(&[51, 101, 201], 60, true));
        if note.status == Status::Fail && note.measured <= 0.03 {
            // The 3x reduction is limited by the M = 60 kernel's own
            // truncation error; reported, not gating.
            note.status = Status::Note;
        }
        push(note);
    } else {
        push(probe("equivalence_single_mode", || single_mode_agreement(&[1.0, 2.0], &[0.5])));
        push(probe("equivalence_series", || series_agreement(&[1.0, 2.0], &[0.5])));
        push(probe("fd_kernel", || fd_kernel(&[51], 60, false)));
    }
    VerifyReport {
        level: if opts.full { Level::Full } else { Level::Fast },
        probes,
    }
}
