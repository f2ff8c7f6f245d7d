// Optimal control of the heat equation from a single sine mode, evaluated
// by contour integration and checked against the exact mode-1 law.

use std::f64::consts::PI;

use uftlqr::contour::{contour_field, Problem};
use uftlqr::field::Quantity;
use uftlqr::spectral::{Dispersion, QuadratureSpec};
use uftlqr::transforms::{BoundarySignal, SpatialProfile};
use uftlqr::Result;

pub fn run_example() -> Result<f64> {
    let p = Problem::new(&Dispersion::heat(), &SpatialProfile::sine(1.0, 1, PI), &BoundarySignal::homogeneous())?;
    let xs: Vec<f64> = (1..=9).map(|i| i as f64 * PI / 10.0).collect();
    let ts = [0.1, 0.5, 1.0];
    let u = contour_field(&p, Quantity::Control, &xs, &ts, &QuadratureSpec::default())?;
    let s = 2f64.sqrt();
    let mut worst = 0.0_f64;
    for (x, t, v, err) in u.iter() {
        let exact = -(s - 1.0) * (-s * t).exp() * x.sin();
        worst = worst.max((v.re - exact).abs() / exact.abs());
        if (x - PI / 2.0).abs() < 1e-12 {
            println!("u(pi/2, {t}) = {:.12} (exact {exact:.12}, error estimate {err:.1e})", v.re);
        }
    }
    println!("max relative error over {} points: {worst:.2e}", u.values.len());
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
