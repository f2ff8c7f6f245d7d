macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(dispersion);
example!(transforms);
example!(frequency_lqr);
example!(contour_control);
example!(boundary_forcing);
example!(kernel_structure);
example!(fd_oracle);
example!(vanishing_probe);
example!(scenario);

#[test]
fn dispersion_example() {
    let s = dispersion::run_example().unwrap();
    // w = 6 at k = 1: phat = sqrt(37) - 6.
    assert!((s.phat_at_one - (37f64.sqrt() - 6.0)).abs() < 1e-14);
    assert!((s.omega_at_one - 37f64.sqrt()).abs() < 1e-14);
    assert_eq!(s.branch_points, 4);
    assert!(s.angle > 0.0 && s.min_re_omega > 0.0);
}

#[test]
fn transforms_example() {
    let (parseval, inversion) = transforms::run_example().unwrap();
    assert!(parseval < 1e-4, "{parseval}");
    assert!(inversion < 1e-6, "{inversion}");
}

#[test]
fn frequency_lqr_example() {
    assert!(frequency_lqr::run_example().unwrap() < 1e-6);
}

#[test]
fn contour_control_example() {
    assert!(contour_control::run_example().unwrap() < 1e-6);
}

#[test]
fn boundary_forcing_example() {
    assert!(boundary_forcing::run_example().unwrap() < 1e-3);
}

#[test]
fn kernel_structure_example() {
    let [(w0, h0), (w5, h5)] = kernel_structure::run_example().unwrap();
    assert!(w5 < w0 && h5 > h0);
}

#[test]
fn fd_oracle_example() {
    let e = fd_oracle::run_example().unwrap();
    assert!(e[2] < 0.03 && e[0] / e[2] >= 3.0, "{e:?}");
}

#[test]
fn vanishing_probe_example() {
    let r = vanishing_probe::run_example().unwrap();
    assert!(r.windows(2).all(|w| w[1] <= 0.5 * w[0]), "{r:?}");
}

#[test]
fn scenario_example() {
    let rep = scenario::run_example().unwrap();
    assert_eq!(rep["ok"], true);
    assert!(rep["comparisons"]["u:contour_vs_series"]["max_abs"].as_f64().unwrap() < 1e-6);
}
