//! JSON scenario files and the pipeline run behind `uftlqr run`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::contour::{contour_field, vanishing_term_check, Problem};
use crate::error::{Error, Result};
use crate::fd;
use crate::field::{compare_fields, Field, Method, Quantity};
use crate::series::{toeplitz_hankel_decompose, Kernel, KernelMatrix, SeriesCoefficients};
use crate::spectral::{Dispersion, QuadratureSpec};
use crate::transforms::{BoundarySignal, NaturalSpline, SpatialProfile, TimeForm, TimeSignal};
use crate::Complex64 as C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    pub equation: Equation,
    pub initial: Initial,
    #[serde(default)]
    pub boundary: Boundary,
    pub grid: Grid,
    pub methods: Vec<MethodName>,
    #[serde(default)]
    pub quadrature: Quadrature,
    #[serde(default)]
    pub series: SeriesSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Equation {
    pub c: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    Zero,
    Sine { amplitude: f64, mode: u32 },
    Polynomial { coeffs: Vec<f64> },
    Tabulated { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Signal {
    Zero,
    Constant { value: f64 },
    Sine { amplitude: f64, frequency: f64 },
    Tabulated { t: Vec<f64>, y: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub g0: Signal,
    pub h0: Signal,
    #[serde(default = "default_vanish_time")]
    pub vanish_time: f64,
    /// Defaults to `min(1, vanish_time)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper_width: Option<f64>,
}

fn default_vanish_time() -> f64 {
    2.0 * std::f64::consts::PI
}

impl Boundary {
    pub fn taper(&self) -> f64 {
        self.taper_width.unwrap_or(self.vanish_time.min(1.0))
    }
}

impl Default for Boundary {
    fn default() -> Self {
        Self {
            g0: Signal::Zero,
            h0: Signal::Zero,
            vanish_time: default_vanish_time(),
            taper_width: None,
        }
    }
}

/// Either explicit values or `count` evenly spaced points on `[start, stop]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x: Axis,
    pub t: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Contour,
    Series,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Quadrature {
    pub epsilon_origin: f64,
    pub truncation_radius: Option<f64>,
    pub panel_tolerance: f64,
    pub max_evals: usize,
    pub t_min: f64,
    pub tail_exponent: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            epsilon_origin: q.epsilon_origin,
            truncation_radius: q.truncation_radius,
            panel_tolerance: q.panel_tolerance,
            max_evals: q.max_evals,
            t_min: q.t_min,
            tail_exponent: q.tail_exponent,
        }
    }
}

impl Quadrature {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            epsilon_origin: self.epsilon_origin,
            truncation_radius: self.truncation_radius,
            panel_tolerance: self.panel_tolerance,
            max_evals: self.max_evals,
            t_min: self.t_min,
            tail_exponent: self.tail_exponent,
            radius_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesSpec {
    pub m: usize,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self { m: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    pub n: usize,
    pub dt: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { n: 201, dt: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Parses and validates a scenario; errors name the offending field.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." || path.is_empty() { "<root>".to_string() } else { path };
        Error::config(field, e.into_inner().to_string())
    })?;
    sc.validate()?;
    Ok(sc)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn signal(s: &Signal, b: &Boundary, field: &str) -> Result<TimeSignal> {
    let form = match s {
        Signal::Zero => return Ok(TimeSignal::zero()),
        Signal::Constant { value } => TimeForm::Constant(*value),
        Signal::Sine { amplitude, frequency } => TimeForm::Sine {
            amplitude: *amplitude,
            frequency: *frequency,
        },
        Signal::Tabulated { t, y } => TimeForm::Tabulated(NaturalSpline::new(t.clone(), y.clone(), 4, field)?),
    };
    TimeSignal::new(form, b.vanish_time, b.taper(), field)
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::config("schema", format!("unsupported schema {}, expected {SCHEMA_VERSION}", self.schema)));
        }
        let Equation { c, l } = self.equation;
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::config("equation.c", "must be finite and nonnegative"));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::config("equation.L", "must be finite and positive"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "at least one method is required"));
        }
        let xs = self.grid.x.points();
        let ts = self.grid.t.points();
        if xs.is_empty() {
            return Err(Error::config("grid.x", "no points"));
        }
        if ts.is_empty() {
            return Err(Error::config("grid.t", "no points"));
        }
        if let Some(x) = xs.iter().find(|&&x| !(x > 0.0 && x < l)) {
            return Err(Error::config("grid.x", format!("{x} is not inside (0, L)")));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("grid.t", "times must be strictly increasing"));
        }
        let t_floor = if self.methods.contains(&MethodName::Contour) { self.quadrature.t_min } else { 0.0 };
        if let Some(t) = ts.iter().find(|&&t| !(t >= t_floor) || !t.is_finite()) {
            return Err(Error::config("grid.t", format!("{t} is below the smallest evaluation time {t_floor}")));
        }
        let q = &self.quadrature;
        if !(q.epsilon_origin > 0.0) {
            return Err(Error::config("quadrature.epsilon_origin", "must be positive"));
        }
        if !(q.t_min > 0.0) {
            return Err(Error::config("quadrature.t_min", "must be positive"));
        }
        if !(q.panel_tolerance > 0.0) {
            return Err(Error::config("quadrature.panel_tolerance", "must be positive"));
        }
        if !(q.tail_exponent > 0.0) {
            return Err(Error::config("quadrature.tail_exponent", "must be positive"));
        }
        if q.truncation_radius.is_some_and(|r| !(r > q.epsilon_origin)) {
            return Err(Error::config("quadrature.truncation_radius", "must exceed epsilon_origin"));
        }
        if self.series.m == 0 {
            return Err(Error::config("series.m", "truncation must be at least 1"));
        }
        if self.oracle.n < 2 {
            return Err(Error::config("oracle.n", "need at least 2 interior nodes"));
        }
        if !(self.oracle.dt > 0.0) {
            return Err(Error::config("oracle.dt", "must be positive"));
        }
        self.profile()?;
        self.boundary_signal()?;
        Ok(())
    }

    pub fn dispersion(&self) -> Result<Dispersion> {
        Dispersion::reaction_diffusion(self.equation.c)
    }

    pub fn profile(&self) -> Result<SpatialProfile> {
        let l = self.equation.l;
        Ok(match &self.initial {
            Initial::Zero => SpatialProfile::zero(l),
            Initial::Sine { amplitude, mode } => {
                if *mode == 0 {
                    return Err(Error::config("initial.mode", "must be at least 1"));
                }
                SpatialProfile::sine(*amplitude, *mode, l)
            }
            Initial::Polynomial { coeffs } => SpatialProfile::polynomial(coeffs.clone(), l),
            Initial::Tabulated { x, y } => SpatialProfile::tabulated(x.clone(), y.clone(), l)
                .map_err(|e| match e {
                    Error::Config { message, .. } => Error::config("initial", message),
                    other => other,
                })?,
        })
    }

    pub fn boundary_signal(&self) -> Result<BoundarySignal> {
        let b = &self.boundary;
        if matches!((&b.g0, &b.h0), (Signal::Zero, Signal::Zero)) {
            return Ok(BoundarySignal::homogeneous());
        }
        if !(b.vanish_time > 0.0) {
            return Err(Error::config("boundary.vanish_time", "nonzero boundary data need a positive vanish time"));
        }
        Ok(BoundarySignal {
            g0: signal(&b.g0, b, "boundary.g0")?,
            h0: signal(&b.h0, b, "boundary.h0")?,
        })
    }
}

/// Formats a field in the long CSV layout.
pub fn field_csv(f: &Field) -> String {
    let mut s = String::from("x,t,value_re,value_im,err_est\n");
    for (x, t, v, e) in f.iter() {
        let _ = writeln!(s, "{x:.16e},{t:.16e},{:.16e},{:.16e},{e:.16e}", v.re, v.im);
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Outcome of `run_scenario`: the report (also written as `report.json`) and
/// whether every requested method succeeded.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub json: Value,
    pub files: Vec<PathBuf>,
    pub failures: Vec<Error>,
}

fn failure_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Config { field, .. } = e {
        v["field"] = json!(field);
    }
    v
}

/// Series state and control on the grid, with `|value(M) - value(M/2)|`
/// as the error estimate.
pub fn series_fields(coeffs: &SeriesCoefficients, half: &SeriesCoefficients, xs: &[f64], ts: &[f64]) -> Result<(Field, Field)> {
    let mut u = Field::new(Quantity::Control, Method::Series, xs.to_vec(), ts.to_vec());
    let mut phi = Field::new(Quantity::State, Method::Series, xs.to_vec(), ts.to_vec());
    for (it, &t) in ts.iter().enumerate() {
        let snap = coeffs.snapshot(t)?;
        let coarse = half.snapshot(t)?;
        for (ix, &x) in xs.iter().enumerate() {
            let i = u.index(ix, it);
            let (uv, pv) = (coeffs.control_at(&snap, x), coeffs.state_at(&snap, x));
            u.values[i] = C64::new(uv, 0.0);
            phi.values[i] = C64::new(pv, 0.0);
            u.errors[i] = (uv - half.control_at(&coarse, x)).abs();
            phi.errors[i] = (pv - half.state_at(&coarse, x)).abs();
        }
    }
    Ok((u, phi))
}

/// FD state and control resampled onto the grid; the error estimate is
/// the difference from a run on roughly half as many nodes.
pub fn oracle_fields(sc: &Scenario, bnd: &BoundarySignal, profile: &SpatialProfile, xs: &[f64], ts: &[f64]) -> Result<(Field, Field)> {
    let run = |n: usize| -> Result<(Field, Field)> {
        let model = fd::discretize(sc.equation.c, sc.equation.l, n)?;
        let care = fd::solve_care(&model)?;
        let phi0: Vec<f64> = model.x.iter().map(|&x| profile.value(x)).collect();
        let tr = fd::simulate_closedloop(&model, &care, &phi0, bnd, ts, sc.oracle.dt)?;
        let state = fd::resample(&tr.state, model.l, xs, |t| (bnd.g0.value(t), bnd.h0.value(t)))?;
        let control = fd::resample(&tr.control, model.l, xs, |_| (0.0, 0.0))?;
        Ok((control, state))
    };
    let (mut u, mut phi) = run(sc.oracle.n)?;
    let (uc, pc) = run(((sc.oracle.n - 1) / 2).max(1))?;
    for i in 0..u.values.len() {
        u.errors[i] = (u.values[i] - uc.values[i]).norm();
        phi.errors[i] = (phi.values[i] - pc.values[i]).norm();
    }
    Ok((u, phi))
}

/// Runs every requested method, writes CSVs and `report.json` into
/// `out_dir`, and returns the report. Failures of individual methods are
/// recorded rather than aborting the run.
pub fn run_scenario_in(sc: &Scenario, out_dir: &Path) -> Result<RunReport> {
    sc.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let disp = sc.dispersion()?;
    let profile = sc.profile()?;
    let bnd = sc.boundary_signal()?;
    let xs = sc.grid.x.points();
    let ts = sc.grid.t.points();
    let mut files = Vec::new();
    let mut failures = Vec::new();
    let mut methods = serde_json::Map::new();
    let mut controls: Vec<(MethodName, Field)> = Vec::new();
    let mut states: Vec<(MethodName, Field)> = Vec::new();
    let mut probes = serde_json::Map::new();

    for &m in &sc.methods {
        let start = Instant::now();
        let result: Result<(Field, Field)> = match m {
            MethodName::Contour => (|| {
                let p = Problem::new(&disp, &profile, &bnd)?;
                let q = sc.quadrature.spec();
                let u = contour_field(&p, Quantity::Control, &xs, &ts, &q)?;
                let phi = contour_field(&p, Quantity::State, &xs, &ts, &q)?;
                let (x, t) = (xs[xs.len() / 2], ts[ts.len() / 2]);
                let probe = vanishing_term_check(&p, x, t, &q)?;
                probes.insert(
                    "vanishing_term".into(),
                    json!({ "x": x, "t": t, "residual": probe.residual, "error": probe.error, "radius": probe.radius }),
                );
                probes.insert("contour_imag_ratio".into(), json!(u.imag_ratio().max(phi.imag_ratio())));
                Ok((u, phi))
            })(),
            MethodName::Series => (|| {
                let coeffs = SeriesCoefficients::new(&disp, &profile, &bnd, sc.series.m)?;
                let half = SeriesCoefficients::new(&disp, &profile, &bnd, (sc.series.m / 2).max(1))?;
                series_fields(&coeffs, &half, &xs, &ts)
            })(),
            MethodName::Oracle => oracle_fields(sc, &bnd, &profile, &xs, &ts),
        };
        let seconds = start.elapsed().as_secs_f64();
        let name = method_name(m);
        match result {
            Ok((u, phi)) => {
                for (prefix, f) in [("u", &u), ("phi", &phi)] {
                    let path = out_dir.join(format!("{prefix}_{name}.csv"));
                    write_file(&path, &field_csv(f))?;
                    files.push(path);
                }
                methods.insert(
                    name.into(),
                    json!({
                        "status": "ok",
                        "seconds": seconds,
                        "max_error_estimate": { "u": u.max_error(), "phi": phi.max_error() },
                    }),
                );
                controls.push((m, u));
                states.push((m, phi));
            }
            Err(e) => {
                let mut v = failure_json(&e);
                v["status"] = json!("failed");
                v["seconds"] = json!(seconds);
                methods.insert(name.into(), v);
                failures.push(e);
            }
        }
    }

    let mut comparisons = serde_json::Map::new();
    for (label, fields) in [("u", &controls), ("phi", &states)] {
        for i in 0..fields.len() {
            for j in i + 1..fields.len() {
                let (a, b) = (&fields[i], &fields[j]);
                let c = compare_fields(&a.1, &b.1)?;
                comparisons.insert(
                    format!("{label}:{}_vs_{}", method_name(a.0), method_name(b.0)),
                    json!({ "max_abs": c.max_abs, "rel_l2": c.rel_l2, "per_time": c.per_time }),
                );
            }
        }
    }

    let report = json!({
        "scenario": sc.name,
        "schema": SCHEMA_VERSION,
        "grid": { "x": xs.len(), "t": ts.len() },
        "methods": methods,
        "comparisons": comparisons,
        "probes": probes,
        "ok": failures.is_empty(),
    });
    let path = out_dir.join("report.json");
    write_file(&path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    files.push(path);
    Ok(RunReport { json: report, files, failures })
}

pub fn run_scenario(config: &Path) -> Result<RunReport> {
    let sc = load_scenario(config)?;
    run_scenario_in(&sc, &sc.output.dir)
}

fn method_name(m: MethodName) -> &'static str {
    match m {
        MethodName::Contour => Method::Contour.as_str(),
        MethodName::Series => Method::Series.as_str(),
        MethodName::Oracle => Method::Oracle.as_str(),
    }
}

/// Kernel samples on an `n x n` grid over `[0, L]^2` plus structure metrics.
pub fn kernel_grid(c: f64, l: f64, m: usize, n: usize) -> Result<(KernelMatrix, Value)> {
    if !(c >= 0.0) {
        return Err(Error::config("c", "must be nonnegative"));
    }
    if m == 0 {
        return Err(Error::config("M", "truncation must be at least 1"));
    }
    if n < 2 {
        return Err(Error::config("grid", "need at least 2 points"));
    }
    let kernel = Kernel::new(&Dispersion::reaction_diffusion(c)?, l, m)?;
    let km = KernelMatrix::sample(&kernel, n)?;
    let rep = toeplitz_hankel_decompose(&km)?;
    let summary = json!({
        "c": c, "L": l, "M": m, "grid": n,
        "max_diagonal_deviation": rep.max_diagonal_deviation,
        "max_antidiagonal_deviation": rep.max_antidiagonal_deviation,
        "lobe_width": rep.lobe_width,
        "hankel_corner_mass": rep.hankel_corner_mass,
    });
    Ok((km, summary))
}

pub fn kernel_csv(km: &KernelMatrix) -> String {
    let mut s = String::from("x,xi,gamma_toeplitz,gamma_hankel,gamma_combined\n");
    for (i, x) in km.x.iter().enumerate() {
        for (j, xi) in km.xi.iter().enumerate() {
            let _ = writeln!(
                s,
                "{x:.16e},{xi:.16e},{:.16e},{:.16e},{:.16e}",
                km.toeplitz[i][j], km.hankel[i][j], km.combined[i][j]
            );
        }
    }
    s
}

/// Writes the kernel CSV and returns the structure summary.
pub fn emit_kernel_grid(c: f64, l: f64, m: usize, n: usize, out: &Path) -> Result<Value> {
    let (km, summary) = kernel_grid(c, l, m, n)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    write_file(out, &kernel_csv(&km))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": 1,
        "equation": {"c": 0.0, "L": 3.141592653589793},
        "initial": {"kind": "sine", "amplitude": 1.0, "mode": 1},
        "grid": {"x": {"start": 0.5, "stop": 2.5, "count": 3}, "t": [0.5, 1.0]},
        "methods": ["series"]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let sc = parse_scenario(MINIMAL).unwrap();
        assert_eq!(sc.series.m, 40);
        assert_eq!(sc.grid.x.points(), vec![0.5, 1.5, 2.5]);
        let text = serde_json::to_string(&sc).unwrap();
        assert_eq!(parse_scenario(&text).unwrap(), sc);
    }

    #[test]
    fn errors_name_the_field() {
        let field_of = |text: &str| match parse_scenario(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(field_of(&MINIMAL.replace("\"c\": 0.0", "\"c\": -1.0")), "equation.c");
        assert_eq!(field_of(&MINIMAL.replace("\"schema\": 1", "\"schema\": 2")), "schema");
        assert_eq!(field_of(&MINIMAL.replace("\"methods\": [\"series\"]", "\"methods\": []")), "methods");
        assert_eq!(field_of(&MINIMAL.replace("\"L\": 3.141592653589793", "\"L\": 3.14, \"d\": 1")), "equation.d");
        assert_eq!(field_of(&MINIMAL.replace("\"mode\": 1", "\"mode\": \"one\"")), "initial");
        assert_eq!(field_of(&MINIMAL.replace("\"stop\": 2.5", "\"stop\": 3.5")), "grid.x");
        let contour = MINIMAL.replace("[\"series\"]", "[\"contour\"]").replace("[0.5, 1.0]", "[0.0, 1.0]");
        assert_eq!(field_of(&contour), "grid.t");
        let bnd = MINIMAL.replace(
            "\"methods\"",
            "\"boundary\": {\"g0\": {\"kind\": \"constant\", \"value\": 1.0}, \"h0\": {\"kind\": \"zero\"}, \"vanish_time\": 1.0, \"taper_width\": 0.0}, \"methods\"",
        );
        assert_eq!(field_of(&bnd), "boundary.g0.taper_width");
    }

    #[test]
    fn method_gating_and_outputs() {
        let dir = std::env::temp_dir().join(format!("uftlqr-scenario-{}", std::process::id()));
        let mut sc = parse_scenario(MINIMAL).unwrap();
        sc.methods = vec![MethodName::Oracle];
        sc.oracle.n = 63;
        let rep = run_scenario_in(&sc, &dir).unwrap();
        assert!(rep.failures.is_empty());
        assert!(dir.join("u_oracle.csv").exists());
        assert!(!dir.join("u_contour.csv").exists());
        assert!(rep.json["methods"].get("contour").is_none());
        let csv = fs::read_to_string(dir.join("phi_oracle.csv")).unwrap();
        assert!(csv.starts_with("x,t,value_re,value_im,err_est\n"));
        assert_eq!(csv.lines().count(), 1 + 3 * 2);
        // Deterministic output.
        let again = run_scenario_in(&sc, &dir).unwrap();
        assert_eq!(fs::read_to_string(dir.join("phi_oracle.csv")).unwrap(), csv);
        assert_eq!(again.json["methods"]["oracle"]["status"], "ok");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn kernel_grid_validation_and_structure() {
        assert!(matches!(kernel_grid(0.0, 1.0, 0, 11), Err(Error::Config { .. })));
        let (_, s0) = kernel_grid(0.0, std::f64::consts::PI, 10, 101).unwrap();
        let (_, s5) = kernel_grid(5.0, std::f64::consts::PI, 10, 101).unwrap();
        assert!(s0["max_diagonal_deviation"].as_f64().unwrap() <= 1e-12);
        assert!(s5["lobe_width"].as_f64().unwrap() < s0["lobe_width"].as_f64().unwrap());
    }
}
