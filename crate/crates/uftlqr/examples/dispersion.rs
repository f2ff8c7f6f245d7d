// Closed-loop dispersion of `phi_t = phi_xx - c phi + u` and the ray
// contour that the control integrals are deformed onto.

use std::f64::consts::PI;

use uftlqr::spectral::{build_contour, contour_angle, Dispersion, QuadratureSpec};
use uftlqr::{Complex64, Result};

pub struct DispersionSummary {
    pub phat_at_one: f64,
    pub omega_at_one: f64,
    pub branch_points: usize,
    pub angle: f64,
    pub min_re_omega: f64,
}

pub fn run_example() -> Result<DispersionSummary> {
    let c = 5.0;
    let disp = Dispersion::reaction_diffusion(c)?;
    let k = Complex64::new(1.0, 0.0);
    let (phat, omega) = (disp.phat(k)?, disp.omega(k)?);
    println!("c = {c}: phat(1) = {:.6}, omega(1) = {:.6}", phat.re, omega.re);
    for z in disp.branch_points() {
        println!("  branch point {:.4} {:+.4}i", z.re, z.im);
    }
    let fam = build_contour(&disp, &QuadratureSpec::default())?;
    let angle = contour_angle(c);
    println!(
        "rays at {:.3} and {:.3} rad, min Re omega on rays = {:.4}",
        angle,
        PI - angle,
        fam.admissibility.min_re_omega
    );
    Ok(DispersionSummary {
        phat_at_one: phat.re,
        omega_at_one: omega.re,
        branch_points: disp.branch_points().len(),
        angle,
        min_re_omega: fam.admissibility.min_re_omega,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
