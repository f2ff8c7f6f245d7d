// The unknown boundary values contribute nothing once the real-line
// integral is pushed onto the upper rays; the residual of that term is a
// direct check on the contour.

use std::f64::consts::PI;

use uftlqr::contour::{vanishing_term_check_with, ProbeOptions, Problem};
use uftlqr::series::SeriesCoefficients;
use uftlqr::spectral::Dispersion;
use uftlqr::transforms::{BoundarySignal, SineSum, SpatialProfile};
use uftlqr::Result;

pub fn run_example() -> Result<Vec<f64>> {
    let p = Problem::new(&Dispersion::heat(), &SpatialProfile::sine(1.0, 1, PI), &BoundarySignal::homogeneous())?;
    let coeffs = SeriesCoefficients::new(&p.disp, &p.profile, &p.boundary, 64)?;
    let state = SineSum { l: PI, amps: coeffs.snapshot(0.5)?.a };
    let mut res = Vec::new();
    for r in [8.0, 16.0, 32.0, 64.0] {
        let rep = vanishing_term_check_with(&p, &state, 1.0, &ProbeOptions { radius: Some(r), ..ProbeOptions::default() })?;
        println!("radius {r:>4}: residual {:.3e}", rep.residual);
        res.push(rep.residual);
    }
    let wrong = ProbeOptions { angle: Some(-p.angle()), radius: Some(16.0), ..ProbeOptions::default() };
    match vanishing_term_check_with(&p, &state, 1.0, &wrong) {
        Ok(rep) => println!("lower rays: residual {:.3e}", rep.residual),
        Err(e) => println!("lower rays: {e}"),
    }
    Ok(res)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
