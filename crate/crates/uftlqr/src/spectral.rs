//! Dispersion relation, the closed-loop rate `omega`, the gain `phat`, the
//! boundary-coefficient polynomials `c_j`, branch cuts and the ray contours
//! onto which real-line integrals are deformed.
//!
//! `omega(kappa)` is the analytic continuation of `sqrt(w_re(k)^2 + 1)` from
//! the real axis to the plane slit along radial cuts that start at each
//! branch point and run outward. It is evaluated as the principal square root
//! with a sign correction, the correction being decided by a product of
//! single-cut square roots over the branch points.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Sampling used for the well-posedness check `Re w(k) >= 0`.
pub const WELL_POSED_K: f64 = 100.0;
pub const WELL_POSED_SAMPLES: usize = 1001;

/// A polynomial in one complex variable, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn eval(&self, z: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|a| a.norm() > 0.0).unwrap_or(0)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// The dispersion polynomial `w(kappa) = sum_j alpha_j kappa^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispersion {
    coeffs: Vec<C64>,
    order: usize,
    reaction_c: Option<f64>,
    deformation_unsupported: bool,
}

impl Dispersion {
    /// General dispersion; fails if the leading coefficient vanishes or if
    /// `Re w(k) < 0` somewhere on the sampled real grid.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let order = coeffs.len().saturating_sub(1);
        if coeffs.is_empty() || order == 0 || coeffs[order].norm() == 0.0 {
            return Err(Error::config("equation.coeffs", "leading coefficient must be nonzero and order >= 1"));
        }
        let d = Dispersion {
            deformation_unsupported: coeffs.iter().any(|a| a.im != 0.0),
            coeffs,
            order,
            reaction_c: None,
        };
        d.check_well_posed()?;
        Ok(d)
    }

    /// `w(kappa) = kappa^2 + c`.
    pub fn reaction_diffusion(c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::config("equation.c", format!("must be a finite nonnegative number, got {c}")));
        }
        Ok(Dispersion {
            coeffs: vec![C64::new(c, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            order: 2,
            reaction_c: Some(c),
            deformation_unsupported: false,
        })
    }

    pub fn heat() -> Self {
        Self::reaction_diffusion(0.0).expect("c = 0 is valid")
    }

    /// `w(kappa) = kappa^n` for even `n`.
    pub fn even_order(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::config("equation.order", "even-order dispersion needs even n >= 2"));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = C64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    fn check_well_posed(&self) -> Result<()> {
        for i in 0..WELL_POSED_SAMPLES {
            let k = -WELL_POSED_K + 2.0 * WELL_POSED_K * i as f64 / (WELL_POSED_SAMPLES - 1) as f64;
            let v = self.w(C64::new(k, 0.0)).re;
            if v < -1e-12 * (1.0 + k.abs().powi(self.order as i32)) {
                return Err(Error::IllPosed { k, value: v });
            }
        }
        Ok(())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn reaction_c(&self) -> Option<f64> {
        self.reaction_c
    }

    /// True when `w` is not real on the real axis; such dispersions are
    /// representable but the contour pipeline does not handle them.
    pub fn deformation_unsupported(&self) -> bool {
        self.deformation_unsupported
    }

    pub fn w(&self, kappa: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * kappa + a)
    }

    /// Continuation of the real part of `w` from the real axis.
    pub fn w_re(&self, kappa: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * kappa + a.re)
    }

    /// Continuation of the imaginary part of `w` from the real axis.
    pub fn w_im(&self, kappa: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * kappa + a.im)
    }

    /// The polynomials `c_j`, `j = 0..n-1`, from the divided difference
    /// `i (w(kappa) - w(l)) / (kappa - l)` with `l` replaced by `-i d/dx`.
    pub fn c_coeffs(&self) -> Vec<Poly> {
        let n = self.order;
        // (kappa^m - l^m)/(kappa - l) = sum_{p+q=m-1} kappa^p l^q, and
        // l^q -> (-i)^q d^q/dx^q.
        let mut out = vec![Poly(vec![C64::new(0.0, 0.0); n]); n];
        for (m, &alpha) in self.coeffs.iter().enumerate().skip(1) {
            for q in 0..m {
                let p = m - 1 - q;
                out[q].0[p] += I * alpha * (-I).powu(q as u32);
            }
        }
        out
    }

    /// `c_j(kappa)` for all `j`.
    pub fn c_eval(&self, kappa: C64) -> Vec<C64> {
        self.c_coeffs().iter().map(|p| p.eval(kappa)).collect()
    }

    /// Zeros of `w_re(kappa)^2 + 1`.
    pub fn branch_points(&self) -> Vec<C64> {
        if let Some(c) = self.reaction_c {
            let mut pts = Vec::with_capacity(4);
            for s in [1.0, -1.0] {
                let r = C64::new(-c, s).sqrt();
                pts.push(r);
                pts.push(-r);
            }
            pts.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
            return pts;
        }
        let re = Poly(self.coeffs.iter().map(|a| C64::new(a.re, 0.0)).collect());
        let mut sq = re.mul(&re);
        sq.0[0] += 1.0;
        let mut pts = poly_roots(&sq);
        pts.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        pts
    }

    pub fn branch_cuts(&self) -> BranchCutSet {
        let pts = self.branch_points();
        let cut_rays = pts.iter().map(|&p| (p, p.arg())).collect();
        BranchCutSet {
            branch_points: pts,
            cut_rays,
        }
    }

    /// Evaluator that precomputes branch data for repeated `omega` calls.
    pub fn branch(&self) -> Branch {
        Branch::new(self)
    }

    pub fn omega(&self, kappa: C64) -> Result<C64> {
        self.branch().omega(kappa)
    }

    pub fn omega_bar(&self, kappa: C64) -> Result<C64> {
        self.branch().omega_bar(kappa)
    }

    pub fn phat(&self, kappa: C64) -> Result<C64> {
        self.branch().phat(kappa)
    }
}

/// Branch points and their outward radial cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCutSet {
    pub branch_points: Vec<C64>,
    /// `(origin, angle)` of each cut ray.
    pub cut_rays: Vec<(C64, f64)>,
}

impl BranchCutSet {
    /// Euclidean distance from `z` to the union of cut rays.
    pub fn distance(&self, z: C64) -> f64 {
        self.cut_rays
            .iter()
            .map(|&(o, a)| {
                let d = C64::from_polar(1.0, a);
                let t = ((z - o) * d.conj()).re.max(0.0);
                (z - (o + d * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Precomputed branch data for fast `omega`, `omega_bar` and `phat`.
#[derive(Debug, Clone)]
pub struct Branch {
    disp: Dispersion,
    cuts: BranchCutSet,
    // exp(-i theta_m) for each branch point, and the normalisation making
    // the product positive at the origin.
    rot: Vec<C64>,
    norm: C64,
}

impl Branch {
    fn new(disp: &Dispersion) -> Self {
        let cuts = disp.branch_cuts();
        let rot: Vec<C64> = cuts.cut_rays.iter().map(|&(_, a)| C64::from_polar(1.0, -a)).collect();
        let mut b = Branch {
            disp: disp.clone(),
            cuts,
            rot,
            norm: C64::new(1.0, 0.0),
        };
        let z0 = C64::new(0.0, 0.0);
        let target = principal(disp.w_re(z0) * disp.w_re(z0) + 1.0);
        b.norm = target / b.product(z0);
        b
    }

    fn product(&self, kappa: C64) -> C64 {
        self.cuts
            .branch_points
            .iter()
            .zip(&self.rot)
            .fold(C64::new(1.0, 0.0), |acc, (&p, &r)| acc * (-(kappa - p) * r).sqrt())
    }

    pub fn cuts(&self) -> &BranchCutSet {
        &self.cuts
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.disp
    }

    /// `sqrt(w_re^2 + 1)` on the cut plane.
    pub fn root(&self, kappa: C64) -> Result<C64> {
        let scale = 1.0 + kappa.norm();
        if self.cuts.distance(kappa) < 1e-12 * scale {
            return Err(Error::BranchCutViolation {
                re: kappa.re,
                im: kappa.im,
            });
        }
        let wr = self.disp.w_re(kappa);
        let p = principal(wr * wr + 1.0);
        let reference = self.product(kappa) * self.norm;
        Ok(if (p - reference).norm() <= (p + reference).norm() { p } else { -p })
    }

    pub fn omega(&self, kappa: C64) -> Result<C64> {
        Ok(self.root(kappa)? + I * self.disp.w_im(kappa))
    }

    pub fn omega_bar(&self, kappa: C64) -> Result<C64> {
        Ok(self.root(kappa)? - I * self.disp.w_im(kappa))
    }

    pub fn phat(&self, kappa: C64) -> Result<C64> {
        let r = self.root(kappa)?;
        let wr = self.disp.w_re(kappa);
        // -w + sqrt(w^2+1) = 1/(w + sqrt(w^2+1)); the second form avoids
        // cancellation where w_re dominates.
        let s = wr + r;
        Ok(if s.norm() > 1.0 { 1.0 / s } else { r - wr })
    }

    /// `(omega, omega_bar, phat)` in one call.
    pub fn gains(&self, kappa: C64) -> Result<(C64, C64, C64)> {
        let r = self.root(kappa)?;
        let wr = self.disp.w_re(kappa);
        let wi = self.disp.w_im(kappa);
        let s = wr + r;
        let ph = if s.norm() > 1.0 { 1.0 / s } else { r - wr };
        Ok((r + I * wi, r - I * wi, ph))
    }
}

fn principal(z: C64) -> C64 {
    z.sqrt()
}

/// Track `sqrt(w_re^2 + 1)` along sampled points, flipping the principal
/// root whenever it jumps by more than half its modulus.
pub fn track_root(disp: &Dispersion, path: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(path.len());
    let mut prev: Option<C64> = None;
    for &k in path {
        let wr = disp.w_re(k);
        let mut r = principal(wr * wr + 1.0);
        if let Some(p) = prev {
            if (r - p).norm() > 0.5 * p.norm() {
                r = -r;
            }
        } else if r.re < 0.0 {
            r = -r;
        }
        out.push(r);
        prev = Some(r);
    }
    out
}

/// `Delta(kappa) = e^{i kappa L} - e^{-i kappa L} = 2 i sin(kappa L)`.
pub fn delta(kappa: C64, l: f64) -> C64 {
    2.0 * I * (kappa * l).sin()
}

/// `sin(kappa a) / sin(kappa L)` for `0 <= a <= L`, stable for large
/// `|Im kappa|` and at the removable point `kappa = 0`.
pub fn sine_ratio(kappa: C64, a: f64, l: f64) -> C64 {
    let z = kappa * l;
    if z.norm() < 1e-3 {
        // sin(ra z)/sin(z) with ra = a/L, three-term Taylor.
        let ra = a / l;
        let z2 = z * z;
        let ra2 = ra * ra;
        return ra * (1.0 + z2 * (1.0 - ra2) / 6.0 + z2 * z2 * (7.0 - 10.0 * ra2 + 3.0 * ra2 * ra2) / 360.0);
    }
    let s = if kappa.im >= 0.0 { 1.0 } else { -1.0 };
    // Multiply through by e^{i s kappa L}, which is bounded for s Im >= 0.
    let e = |x: f64| (I * s * kappa * x).exp();
    (e(a + l) - e(l - a)) / (e(2.0 * l) - 1.0)
}

/// Where to start, stop and how to sample each ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub epsilon_origin: f64,
    /// Fixed ray length; `None` derives it from the decay of `e^{-omega t}`.
    pub truncation_radius: Option<f64>,
    pub panel_tolerance: f64,
    pub max_evals: usize,
    pub t_min: f64,
    /// Exponent that the tail factor must reach, `Re omega(R) * t`.
    pub tail_exponent: f64,
    /// Multiplier applied to every automatically chosen radius.
    pub radius_scale: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            epsilon_origin: 1e-4,
            truncation_radius: None,
            panel_tolerance: 1e-10,
            max_evals: 100_000,
            t_min: 1e-3,
            tail_exponent: 40.0,
            radius_scale: 1.0,
        }
    }
}

/// One ray `r e^{i angle}`, `r in [origin_offset, truncation_radius]`.
/// `orientation = +1` runs outward, `-1` runs inward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayContour {
    pub angle: f64,
    pub origin_offset: f64,
    pub truncation_radius: f64,
    pub orientation: f64,
}

impl RayContour {
    pub fn direction(&self) -> C64 {
        C64::from_polar(1.0, self.angle)
    }

    pub fn point(&self, r: f64) -> C64 {
        self.direction() * r
    }
}

/// Evidence gathered while sampling the rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub min_re_omega: f64,
    pub min_cut_distance: f64,
    pub samples: usize,
}

/// The upper contour: the left ray traversed inward, then the right ray
/// traversed outward.
#[derive(Debug, Clone)]
pub struct ContourFamily {
    pub rays: Vec<RayContour>,
    pub branch_cuts: BranchCutSet,
    pub admissibility: Admissibility,
}

/// Angle of the right-hand ray of the upper contour, `arctan(1/c)/4`.
pub fn contour_angle(c: f64) -> f64 {
    if c == 0.0 {
        PI / 8.0
    } else {
        0.25 * (1.0 / c).atan()
    }
}

/// Smallest ray length with `Re omega(R e^{i theta}) * t >= exponent`.
pub fn truncation_radius(disp: &Dispersion, angle: f64, t: f64, exponent: f64) -> f64 {
    let br = disp.branch();
    let target = exponent / t;
    let f = |r: f64| br.omega(C64::from_polar(r, angle)).map(|w| w.re).unwrap_or(0.0);
    let mut hi = 1.0;
    while f(hi) < target && hi < 1e8 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Upper contour for a reaction–diffusion dispersion, optionally with an
/// overridden ray angle (used by negative tests).
pub fn build_contour_with_angle(disp: &Dispersion, quad: &QuadratureSpec, angle: f64) -> Result<ContourFamily> {
    if disp.order() != 2 || disp.reaction_c().is_none() {
        return Err(Error::Unsupported(
            "contour construction is implemented for reaction-diffusion dispersions".into(),
        ));
    }
    if !(quad.epsilon_origin > 0.0) {
        return Err(Error::config("quadrature.epsilon_origin", "must be positive"));
    }
    let r_max = quad
        .truncation_radius
        .unwrap_or_else(|| quad.radius_scale * truncation_radius(disp, angle, quad.t_min, quad.tail_exponent));
    if !(r_max > quad.epsilon_origin) {
        return Err(Error::config("quadrature.truncation_radius", "must exceed epsilon_origin"));
    }
    let left = RayContour {
        angle: PI - angle,
        origin_offset: quad.epsilon_origin,
        truncation_radius: r_max,
        orientation: -1.0,
    };
    let right = RayContour {
        angle,
        origin_offset: quad.epsilon_origin,
        truncation_radius: r_max,
        orientation: 1.0,
    };
    let br = disp.branch();
    let cuts = br.cuts().clone();
    let samples = 4000;
    let mut min_re = f64::INFINITY;
    let mut min_dist = f64::INFINITY;
    for ray in [&left, &right] {
        let path: Vec<C64> = (0..samples)
            .map(|i| {
                // Geometric spacing resolves both the origin and the far tail.
                let s = i as f64 / (samples - 1) as f64;
                ray.point(ray.origin_offset * (r_max / ray.origin_offset).powf(s))
            })
            .collect();
        let tracked = track_root(disp, &path);
        for (k, tr) in path.iter().zip(&tracked) {
            let om = br.omega(*k).map_err(|e| Error::InadmissibleContour(e.to_string()))?;
            if (om - tr).norm() > 1e-9 * (1.0 + om.norm()) {
                return Err(Error::InadmissibleContour(format!(
                    "branch of omega is discontinuous along the ray at angle {}",
                    ray.angle
                )));
            }
            min_re = min_re.min(om.re);
            min_dist = min_dist.min(cuts.distance(*k));
        }
    }
    let admissibility = Admissibility {
        min_re_omega: min_re,
        min_cut_distance: min_dist,
        samples: 2 * samples,
    };
    if !(min_re > 0.0) {
        return Err(Error::InadmissibleContour(format!("min Re omega = {min_re} along the rays")));
    }
    if !(min_dist > 0.0) {
        return Err(Error::InadmissibleContour("a ray meets a branch cut".into()));
    }
    Ok(ContourFamily {
        rays: vec![left, right],
        branch_cuts: cuts,
        admissibility,
    })
}

pub fn build_contour(disp: &Dispersion, quad: &QuadratureSpec) -> Result<ContourFamily> {
    let c = disp
        .reaction_c()
        .ok_or_else(|| Error::Unsupported("contour needs a reaction-diffusion dispersion".into()))?;
    build_contour_with_angle(disp, quad, contour_angle(c))
}

/// Roots of a complex polynomial by simultaneous Weierstrass iteration,
/// polished with Newton steps.
pub fn poly_roots(p: &Poly) -> Vec<C64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.0[n];
    let monic: Vec<C64> = p.0[..=n].iter().map(|a| a / lead).collect();
    let mp = Poly(monic);
    let bound = 1.0 + mp.0[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = C64::from_polar(0.9 * bound.clamp(0.5, 10.0), 0.4);
    let mut z: Vec<C64> = (0..n).map(|k| seed * C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    for _ in 0..500 {
        let mut delta_max: f64 = 0.0;
        for i in 0..n {
            let num = mp.eval(z[i]);
            let den = (0..n).filter(|&j| j != i).fold(C64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            if den.norm() == 0.0 {
                continue;
            }
            let step = num / den;
            z[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-15 {
            break;
        }
    }
    let deriv = Poly(mp.0.iter().enumerate().skip(1).map(|(j, a)| a * j as f64).collect());
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = deriv.eval(*zi);
            if d.norm() > 0.0 {
                *zi -= mp.eval(*zi) / d;
            }
        }
    }
    z
}

/// Arguments of the four reaction–diffusion branch points, sorted.
pub fn reaction_branch_angles(c: f64) -> [f64; 4] {
    let a = FRAC_PI_2 - 0.5 * (1.0 / c).atan();
    let a = if c == 0.0 { PI / 4.0 } else { a };
    [-(PI - a), -a, a, PI - a]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn horner_matches_direct_powers() {
        let d = Dispersion::even_order(4).unwrap();
        let z = c(1.0, 1.0);
        assert!((d.w(z) - c(-4.0, 0.0)).norm() < 1e-12);
        let rd = Dispersion::reaction_diffusion(5.0).unwrap();
        assert!((rd.w(I) - c(4.0, 0.0)).norm() < 1e-14);
        assert!((Dispersion::heat().w(c(2.0, 0.0)) - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn heat_coefficients() {
        let cs = Dispersion::heat().c_coeffs();
        assert_eq!(cs.len(), 2);
        let k = c(0.3, -1.7);
        assert!((cs[0].eval(k) - I * k).norm() < 1e-14);
        assert!((cs[1].eval(k) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn even_order_coefficients() {
        for n in [2usize, 4, 6] {
            let d = Dispersion::even_order(n).unwrap();
            let k = c(0.7, 0.4);
            for (j, cj) in d.c_eval(k).iter().enumerate() {
                let want = I.powu((3 * j + 1) as u32) * k.powu((n - 1 - j) as u32);
                assert!((cj - want).norm() < 1e-12, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn principal_values_on_real_axis() {
        let d = Dispersion::heat();
        assert!((d.omega(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((d.omega(c(1.0, 0.0)).unwrap() - 2f64.sqrt()).norm() < 1e-15);
        assert!((d.phat(c(1.0, 0.0)).unwrap() - (2f64.sqrt() - 1.0)).norm() < 1e-15);
        let d5 = Dispersion::reaction_diffusion(5.0).unwrap();
        assert!((d5.phat(c(0.0, 0.0)).unwrap() - (26f64.sqrt() - 5.0)).norm() < 1e-14);
    }

    #[test]
    fn branch_points_are_zeros_of_omega_squared() {
        for cc in [0.0, 0.5, 1.0, 5.0] {
            let d = Dispersion::reaction_diffusion(cc).unwrap();
            let pts = d.branch_points();
            assert_eq!(pts.len(), 4);
            let angles = reaction_branch_angles(cc);
            for (p, a) in pts.iter().zip(angles) {
                let wr = d.w_re(*p);
                assert!((wr * wr + 1.0).norm() < 1e-12);
                assert!((p.norm() - (cc * cc + 1.0).powf(0.25)).abs() < 1e-12);
                assert!((p.arg() - a).abs() < 1e-12, "c={cc} arg {} vs {a}", p.arg());
            }
        }
    }

    #[test]
    fn heat_branch_point_at_e_i_pi_over_4() {
        let d = Dispersion::heat();
        let k1 = C64::from_polar(1.0, PI / 4.0);
        let wr = d.w_re(k1);
        assert!((wr * wr + 1.0).norm() < 1e-15);
        assert!(matches!(d.omega(k1), Err(Error::BranchCutViolation { .. })));
    }

    #[test]
    fn weierstrass_roots_match_closed_form() {
        let d = Dispersion::new(vec![c(5.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        // generic path: reaction_c not set
        assert!(d.reaction_c().is_none());
        let mut got = d.branch_points();
        let mut want = Dispersion::reaction_diffusion(5.0).unwrap().branch_points();
        got.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        want.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn contour_angles() {
        assert!((contour_angle(0.0) - PI / 8.0).abs() < 1e-15);
        assert!((contour_angle(1.0) - PI / 16.0).abs() < 1e-15);
        let q = QuadratureSpec::default();
        let fam = build_contour(&Dispersion::reaction_diffusion(1.0).unwrap(), &q).unwrap();
        assert!((fam.rays[1].angle - PI / 16.0).abs() < 1e-15);
        assert!((fam.rays[0].angle - 15.0 * PI / 16.0).abs() < 1e-15);
        assert_eq!(fam.rays[0].orientation, -1.0);
    }

    #[test]
    fn delta_values() {
        assert!(delta(c(PI, 0.0), 1.0).norm() < 1e-15);
        assert!((delta(c(PI / 2.0, 0.0), 1.0) - 2.0 * I).norm() < 1e-15);
        assert!((delta(I, PI) - (-2.0 * PI.sinh())).norm() < 1e-12);
    }

    #[test]
    fn sine_ratio_branches_agree() {
        let l = 2.0;
        for &k in &[c(0.3, 0.2), c(-4.0, 3.0), c(1e-5, 1e-5), c(2.0, -1.0)] {
            for &a in &[0.0, 0.5, 1.3, 2.0] {
                let direct = (k * a).sin() / (k * l).sin();
                assert!((sine_ratio(k, a, l) - direct).norm() < 1e-10 * (1.0 + direct.norm()));
            }
        }
    }

    #[test]
    fn ill_posed_dispersion_is_rejected() {
        let r = Dispersion::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(r, Err(Error::IllPosed { .. })));
        assert!(Dispersion::reaction_diffusion(-1.0).is_err());
    }
}
