use std::f64::consts::PI;

use proptest::prelude::*;
use uftlqr::lqr::infinite_horizon_gain;
use uftlqr::series::SeriesCoefficients;
use uftlqr::spectral::{sine_ratio, Dispersion};
use uftlqr::transforms::{BoundarySignal, SpatialProfile};
use uftlqr::Complex64 as C64;

fn cplx() -> impl Strategy<Value = C64> {
    (-6.0..6.0f64, -6.0..6.0f64).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn omega_and_phat_are_even(c in 0.0..10.0f64, k in cplx()) {
        let d = Dispersion::reaction_diffusion(c).unwrap();
        // Skip points too close to a cut, where the two sides legitimately differ.
        prop_assume!(d.branch_cuts().distance(k) > 1e-3 && d.branch_cuts().distance(-k) > 1e-3);
        let (a, b) = (d.omega(k).unwrap(), d.omega(-k).unwrap());
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        let (p, q) = (d.phat(k).unwrap(), d.phat(-k).unwrap());
        prop_assert!((p - q).norm() <= 1e-10 * (1.0 + p.norm()));
    }

    #[test]
    fn gain_solves_the_scalar_riccati_equation(c in 0.0..50.0f64, k in -30.0..30.0f64) {
        let d = Dispersion::reaction_diffusion(c).unwrap();
        let g = infinite_horizon_gain(&d, k);
        let w = k * k + c;
        prop_assert!(g.phat > 0.0 && g.phat <= 1.0);
        prop_assert!((g.phat * (w + (w * w + 1.0).sqrt()) - 1.0).abs() < 1e-12);
        let ph = d.phat(C64::new(k, 0.0)).unwrap();
        prop_assert!((ph.re - g.phat).abs() < 1e-12 && ph.im.abs() < 1e-12);
    }

    #[test]
    fn divided_difference_reproduces_w(c in 0.0..5.0f64, k in cplx(), l in cplx(), order in prop::sample::select(vec![2usize, 4, 6])) {
        let d = if order == 2 { Dispersion::reaction_diffusion(c).unwrap() } else { Dispersion::even_order(order).unwrap() };
        let cs = d.c_eval(k);
        let i = C64::new(0.0, 1.0);
        let sum: C64 = cs.iter().enumerate().map(|(j, cj)| cj * (i * l).powu(j as u32)).sum();
        let lhs = sum * (k - l) / i + d.w(l);
        let want = d.w(k);
        prop_assert!((lhs - want).norm() <= 1e-10 * (1.0 + want.norm()), "{lhs} vs {want}");
    }

    #[test]
    fn sine_ratio_is_bounded_in_the_upper_half_plane(a in 0.0..1.0f64, re in -50.0..50.0f64, im in 0.0..200.0f64) {
        let r = sine_ratio(C64::new(re, im), a * PI, PI);
        prop_assert!(r.is_finite());
        // |sin(kappa a)/sin(kappa L)| <= ~e^{-Im kappa (L - a)} away from the real zeros.
        if im > 1.0 {
            prop_assert!(r.norm() <= 3.0 * (-im * (PI - a * PI)).exp() + 1e-300);
        }
    }

    #[test]
    fn transform_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, k in cplx()) {
        let p = SpatialProfile::polynomial(vec![0.3, -1.0, 0.5], 2.0);
        let q = SpatialProfile::sine(1.0, 3, 2.0);
        let mix = SpatialProfile::tabulated(
            (0..=200).map(|i| 2.0 * i as f64 / 200.0).collect(),
            (0..=200).map(|i| { let x = 2.0 * i as f64 / 200.0; a * p.value(x) + b * q.value(x) }).collect(),
            2.0,
        ).unwrap();
        let want = a * p.transform(k).unwrap() + b * q.transform(k).unwrap();
        let got = mix.transform(k).unwrap();
        // The spline reproduces the mixture to O(h^4).
        prop_assert!((got - want).norm() <= 1e-5 * (1.0 + want.norm()) * (2.0 * k.im.abs()).exp());
    }

    #[test]
    fn series_control_is_linear_in_the_initial_state(a in -2.0..2.0f64, b in -2.0..2.0f64, x in 0.1..3.0f64, t in 0.0..1.0f64) {
        let d = Dispersion::reaction_diffusion(1.5).unwrap();
        let h = BoundarySignal::homogeneous();
        let ctl = |p: SpatialProfile| SeriesCoefficients::new(&d, &p, &h, 24).unwrap().control(x, t).unwrap();
        let u1 = ctl(SpatialProfile::polynomial(vec![0.0, 1.0, -1.0 / PI], PI));
        let u2 = ctl(SpatialProfile::polynomial(vec![1.0, 0.2], PI));
        let mixed = ctl(SpatialProfile::polynomial(vec![b, a + 0.2 * b, -a / PI], PI));
        prop_assert!((mixed - (a * u1 + b * u2)).abs() < 1e-12 * (1.0 + mixed.abs()));
    }
}
