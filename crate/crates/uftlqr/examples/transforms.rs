// Finite-interval Fourier transform of an initial profile: energy
// identity and pointwise inversion.

use std::f64::consts::PI;

use uftlqr::quadrature::{integrate_real, QuadOptions};
use uftlqr::transforms::{inverse_transform, SpatialProfile};
use uftlqr::{Complex64, Result};

pub fn run_example() -> Result<(f64, f64)> {
    let p = SpatialProfile::polynomial(vec![0.0, PI, -1.0], PI);
    let energy_x = PI.powi(5) / 30.0;
    let opts = QuadOptions::default().with_abs_tol(1e-12).with_panels(400);
    let (energy_k, _) = integrate_real(|k| p.transform(Complex64::new(k, 0.0)).unwrap().norm_sqr(), -200.0, 200.0, &opts)?;
    let parseval = (energy_k / (2.0 * PI) - energy_x).abs() / energy_x;
    println!("int p^2 = {energy_x:.8}, spectral energy = {:.8}", energy_k / (2.0 * PI));

    let x = 1.2;
    let inv = inverse_transform(|k| p.transform(Complex64::new(k, 0.0)).unwrap(), x, 2e4, PI, &opts)?;
    let inversion = (inv.value.re - p.value(x)).abs();
    println!("p({x}) = {:.10}, inverse transform = {:.10}", p.value(x), inv.value.re);
    Ok((parseval, inversion))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
