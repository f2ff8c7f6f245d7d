// Reaction-diffusion with time-varying Dirichlet data that switch off at
// `t = 2 pi`: contour and sine-series controls side by side.

use std::f64::consts::PI;

use uftlqr::contour::{control_integral_eval, Problem};
use uftlqr::series::SeriesCoefficients;
use uftlqr::spectral::{Dispersion, QuadratureSpec};
use uftlqr::transforms::{BoundarySignal, SpatialProfile, TimeForm, TimeSignal};
use uftlqr::Result;

pub fn run_example() -> Result<f64> {
    let sine = || TimeSignal::new(TimeForm::Sine { amplitude: 1.0, frequency: 1.0 }, 2.0 * PI, 1.0, "boundary");
    let bnd = BoundarySignal { g0: sine()?, h0: sine()? };
    let disp = Dispersion::reaction_diffusion(5.0)?;
    let p = Problem::new(&disp, &SpatialProfile::sine(1.0, 1, PI), &bnd)?;
    let series = SeriesCoefficients::new(&disp, &p.profile, &bnd, 40)?;
    let q = QuadratureSpec::default();
    let mut worst = 0.0_f64;
    for (x, t) in [(0.6, 0.3), (1.5, 0.6), (2.4, 0.9)] {
        let c = control_integral_eval(&p, x, t, &q)?;
        let s = series.control(x, t)?;
        println!("u({x}, {t}): contour {:.9}  series {s:.9}  (contour error estimate {:.1e})", c.value.re, c.error);
        worst = worst.max((c.value.re - s).abs());
    }
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
