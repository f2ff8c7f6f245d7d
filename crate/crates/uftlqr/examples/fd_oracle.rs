// Finite-difference LQR on a 2nd-order grid: Newton-Kleinman Riccati
// solve, and the gain matrix read as a sampled feedback kernel.

use std::f64::consts::PI;

use uftlqr::fd::{compare_kernel, discretize, solve_care};
use uftlqr::spectral::Dispersion;
use uftlqr::Result;

pub fn run_example() -> Result<Vec<f64>> {
    let c = 5.0;
    let disp = Dispersion::reaction_diffusion(c)?;
    let mut errs = Vec::new();
    for n in [51, 101, 201] {
        let model = discretize(c, PI, n)?;
        let care = solve_care(&model)?;
        let cmp = compare_kernel(&model, &care, &disp, 2000, 0.8)?;
        println!(
            "N = {n}: {} Newton steps, residual {:.1e}, kernel error {:.3e}",
            care.iterations, care.residual, cmp.rel_frobenius
        );
        errs.push(cmp.rel_frobenius);
    }
    Ok(errs)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
