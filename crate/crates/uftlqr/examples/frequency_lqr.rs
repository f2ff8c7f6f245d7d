// Scalar LQR at each spatial frequency: the finite-horizon Riccati sweep
// settles onto the algebraic gain.

use nalgebra::Matrix2;
use uftlqr::lqr::{infinite_horizon_gain, solve_riccati_finite, FrequencyInput};
use uftlqr::spectral::Dispersion;
use uftlqr::Result;

pub fn run_example() -> Result<f64> {
    let disp = Dispersion::reaction_diffusion(5.0)?;
    let mut worst = 0.0_f64;
    for k in [0.0, 1.0, 2.0, 4.0] {
        let g = infinite_horizon_gain(&disp, k);
        let sol = solve_riccati_finite(&disp, k, 20.0, &FrequencyInput::zero())?;
        let gap = (sol.p[0] - Matrix2::identity() * g.phat).norm();
        println!("k = {k}: phat = {:.8}, omega = {:.6}, |P(0) - phat I| = {gap:.2e}", g.phat, g.omega.re);
        worst = worst.max(gap);
    }
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
