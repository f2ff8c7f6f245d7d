//! Finite-difference LQR for the reaction–diffusion equation, used as an
//! independent oracle for the frequency-domain pipeline.
//!
//! The PDE is discretized on `N` interior nodes with the second-order
//! stencil; Dirichlet data enter through the end nodes. The running cost
//! `int (phi^2 + u^2) dx` becomes `dx * (|phi|^2 + |u|^2)`, so `Q = R = dx I`
//! and `B = I`, giving the feedback `u = -K phi` with `K = P / dx`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::Complex64 as C64;
use crate::error::{Error, Result};
use crate::field::{Field, Method, Quantity};
use crate::series::Kernel;
use crate::spectral::Dispersion;
use crate::transforms::BoundarySignal;

#[derive(Debug, Clone)]
pub struct GridModel {
    pub n: usize,
    pub l: f64,
    pub c: f64,
    pub dx: f64,
    pub a: DMatrix<f64>,
    /// Interior node positions `i dx`, `i = 1..=N`.
    pub x: Vec<f64>,
}

impl GridModel {
    /// Boundary forcing `(g e_1 + h e_N) / dx^2`.
    pub fn injection(&self, g: f64, h: f64) -> DVector<f64> {
        let mut f = DVector::zeros(self.n);
        let s = 1.0 / (self.dx * self.dx);
        f[0] += g * s;
        f[self.n - 1] += h * s;
        f
    }
}

pub fn discretize(c: f64, l: f64, n: usize) -> Result<GridModel> {
    if n == 0 {
        return Err(Error::config("oracle.n", "need at least one interior node"));
    }
    if !(l > 0.0) {
        return Err(Error::config("equation.L", "must be positive"));
    }
    if !(c >= 0.0) {
        return Err(Error::config("equation.c", "must be nonnegative"));
    }
    let dx = l / (n + 1) as f64;
    let s = 1.0 / (dx * dx);
    let a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 * s - c
        } else if i.abs_diff(j) == 1 {
            s
        } else {
            0.0
        }
    });
    Ok(GridModel {
        n,
        l,
        c,
        dx,
        a,
        x: (1..=n).map(|i| i as f64 * dx).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct CareSolution {
    pub p: DMatrix<f64>,
    /// Feedback gain `P / dx`.
    pub k: DMatrix<f64>,
    /// `|A^T P + P A - P^2 / dx + dx I|_F`.
    pub residual: f64,
    pub iterations: usize,
}

fn care_residual(m: &GridModel, p: &DMatrix<f64>) -> f64 {
    let at = m.a.transpose();
    let r = &at * p + p * &m.a - p * p / m.dx + DMatrix::identity(m.n, m.n) * m.dx;
    r.norm()
}

/// Solves `X M + M X = -C` for symmetric `M` with eigenvalues of negative sum.
fn lyapunov_symmetric(m: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let ct = v.transpose() * c * v;
    let lam = &eig.eigenvalues;
    let mut xt = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let s = lam[i] + lam[j];
            if !(s < 0.0) {
                return Err(Error::LinearSolveFailure(format!(
                    "closed-loop matrix is not Hurwitz (eigenvalue sum {s})"
                )));
            }
            xt[(i, j)] = -ct[(i, j)] / s;
        }
    }
    Ok(v * xt * v.transpose())
}

/// Newton–Kleinman iteration from `P0 = dx I`.
pub fn solve_care(m: &GridModel) -> Result<CareSolution> {
    let n = m.n;
    let q = DMatrix::identity(n, n) * m.dx;
    let mut p = q.clone();
    let mut residual = care_residual(m, &p);
    for it in 1..=50 {
        let closed = &m.a - &p / m.dx;
        let rhs = &q + &p * &p / m.dx;
        let mut next = lyapunov_symmetric(&closed, &rhs)?;
        next = (&next + next.transpose()) * 0.5;
        let r = care_residual(m, &next);
        p = next;
        if r <= 1e-10_f64.max(1e-12 * p.norm()) || (r >= residual && r <= 1e-9 * p.norm()) {
            residual = r;
            return Ok(CareSolution {
                k: &p / m.dx,
                p,
                residual,
                iterations: it,
            });
        }
        residual = r;
    }
    Err(Error::NewtonDivergence(residual))
}

/// `P = dx (A + sqrt(A^2 + I))`, valid because `A` is symmetric.
pub fn care_closed_form(m: &GridModel) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.a.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l + (l * l + 1.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose() * m.dx
}

/// Closed-loop trajectories on the interior nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub state: Field,
    pub control: Field,
}

type StepLu = nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>;

/// Crank–Nicolson integration of `phi' = (A - gain K) phi + injection`,
/// reporting at each time in `ts` (nondecreasing, starting at or after 0).
/// The recorded control is `-gain K phi`.
pub fn simulate_closedloop_scaled(
    m: &GridModel,
    care: &CareSolution,
    gain: f64,
    phi0: &[f64],
    boundary: &BoundarySignal,
    ts: &[f64],
    dt_max: f64,
) -> Result<Trajectory> {
    if phi0.len() != m.n {
        return Err(Error::GridMismatch(format!("initial state has {} nodes, model has {}", phi0.len(), m.n)));
    }
    if ts.windows(2).any(|w| w[1] < w[0]) || ts.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::config("grid.t", "times must be nonnegative and nondecreasing"));
    }
    let closed = &m.a - &care.k * gain;
    let id = DMatrix::<f64>::identity(m.n, m.n);
    let mut factors: HashMap<u64, (StepLu, DMatrix<f64>)> = HashMap::new();
    let mut state = Field::new(Quantity::State, Method::Oracle, m.x.clone(), ts.to_vec());
    let mut control = Field::new(Quantity::Control, Method::Oracle, m.x.clone(), ts.to_vec());
    let mut phi = DVector::from_column_slice(phi0);
    let forcing = |t: f64| m.injection(boundary.g0.value(t), boundary.h0.value(t));
    let mut t = 0.0;
    for (it, &target) in ts.iter().enumerate() {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            let entry = factors.entry(dt.to_bits()).or_insert_with(|| {
                let lhs = &id - &closed * (0.5 * dt);
                let rhs = &id + &closed * (0.5 * dt);
                (lhs.lu(), rhs)
            });
            for s in 0..steps {
                let t0 = t + s as f64 * dt;
                let t1 = if s + 1 == steps { target } else { t0 + dt };
                let b = &entry.1 * &phi + (forcing(t0) + forcing(t1)) * (0.5 * dt);
                phi = entry
                    .0
                    .solve(&b)
                    .ok_or_else(|| Error::LinearSolveFailure("Crank-Nicolson matrix is singular".into()))?;
            }
            t = target;
        }
        let u = -(&care.k * gain) * &phi;
        for i in 0..m.n {
            let idx = state.index(i, it);
            state.values[idx] = C64::new(phi[i], 0.0);
            control.values[idx] = C64::new(u[i], 0.0);
        }
    }
    Ok(Trajectory { state, control })
}

pub fn simulate_closedloop(
    m: &GridModel,
    care: &CareSolution,
    phi0: &[f64],
    boundary: &BoundarySignal,
    ts: &[f64],
    dt_max: f64,
) -> Result<Trajectory> {
    simulate_closedloop_scaled(m, care, 1.0, phi0, boundary, ts, dt_max)
}

/// Resamples a node field onto `xs` by linear interpolation, using the
/// supplied end values at `x = 0` and `x = L`.
pub fn resample(field: &Field, l: f64, xs: &[f64], ends: impl Fn(f64) -> (f64, f64)) -> Result<Field> {
    let mut out = Field::new(field.quantity, field.method, xs.to_vec(), field.t.clone());
    let mut nodes = vec![0.0];
    nodes.extend_from_slice(&field.x);
    nodes.push(l);
    for (it, &t) in field.t.iter().enumerate() {
        let (g, h) = ends(t);
        let mut vals = vec![g];
        vals.extend(field.row(it).iter().map(|v| v.re));
        vals.push(h);
        for (ix, &x) in xs.iter().enumerate() {
            if !(0.0..=l).contains(&x) {
                return Err(Error::config("grid.x", format!("{x} is outside [0, L]")));
            }
            let j = nodes.partition_point(|&n| n <= x).clamp(1, nodes.len() - 1);
            let (x0, x1) = (nodes[j - 1], nodes[j]);
            let w = (x - x0) / (x1 - x0);
            let idx = out.index(ix, it);
            out.values[idx] = C64::new((1.0 - w) * vals[j - 1] + w * vals[j], 0.0);
        }
    }
    Ok(out)
}

/// Discrete running cost `dx sum (phi^2 + u^2)` integrated by the trapezoid
/// rule over the trajectory's times.
pub fn trajectory_cost(m: &GridModel, tr: &Trajectory) -> f64 {
    let ts = &tr.state.t;
    let rate = |it: usize| -> f64 {
        let p: f64 = tr.state.row(it).iter().map(|v| v.re * v.re).sum();
        let u: f64 = tr.control.row(it).iter().map(|v| v.re * v.re).sum();
        m.dx * (p + u)
    };
    ts.windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * (rate(i) + rate(i + 1)))
        .sum()
}

/// Relative Frobenius error between `K / dx` and the truncated series
/// kernel `(2/L) sum_m phat(k_m) sin(k_m x) sin(k_m xi)`, restricted to the
/// central `fraction` of nodes in both coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelComparison {
    pub n: usize,
    pub rel_frobenius: f64,
    pub max_abs: f64,
}

pub fn compare_kernel(m: &GridModel, care: &CareSolution, disp: &Dispersion, m_max: usize, fraction: f64) -> Result<KernelComparison> {
    let kernel = Kernel::new(disp, m.l, m_max)?;
    let skip = ((1.0 - fraction) * 0.5 * m.n as f64).round() as usize;
    let range = skip..m.n - skip;
    let (mut num, mut den, mut max_abs) = (0.0, 0.0, 0.0_f64);
    for i in range.clone() {
        for j in range.clone() {
            let reference = kernel.combined(m.x[i], m.x[j]);
            let d = care.k[(i, j)] / m.dx - reference;
            num += d * d;
            den += reference * reference;
            max_abs = max_abs.max(d.abs());
        }
    }
    Ok(KernelComparison {
        n: m.n,
        rel_frobenius: (num / den).sqrt(),
        max_abs,
    })
}
