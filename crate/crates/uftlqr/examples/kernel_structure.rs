// The feedback kernel splits into a Toeplitz part in `x - xi` and a Hankel
// part in `x + xi`; stronger reaction narrows both.

use std::f64::consts::PI;

use uftlqr::scenario::kernel_grid;
use uftlqr::Result;

pub fn run_example() -> Result<[(f64, f64); 2]> {
    let mut out = [(0.0, 0.0); 2];
    for (slot, c) in out.iter_mut().zip([0.0, 5.0]) {
        let (km, s) = kernel_grid(c, PI, 10, 101)?;
        let lobe = s["lobe_width"].as_f64().unwrap_or(f64::NAN);
        let corner = s["hankel_corner_mass"].as_f64().unwrap_or(f64::NAN);
        println!(
            "c = {c}: Gamma(0) = {:.5}, lobe width {lobe:.4}, Hankel corner mass {corner:.4}",
            km.toeplitz[0][0]
        );
        *slot = (lobe, corner);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
