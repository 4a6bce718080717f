//! Support function identities, the `H_max` lower bound, and a
//! volume-preserving perturbation that lowers `H_max` of a non-circular
//! planar domain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    curvature_of, geometry_summary, revolution_mean_curvature, star2d_volume_area, unit_ball_volume, DomainSpec,
    FourierSeries,
};
use crate::quadrature::{periodic_trapezoid, GaussLegendre};

/// `p = s·n(s)` computed from the boundary point and its outward normal.
/// The boundary parameter is `θ` for planar domains and the polar angle `φ`
/// for surfaces of revolution; it is ignored for balls. For shells it is the
/// radius of the sphere the point lies on.
pub fn support_function(spec: &DomainSpec, param: f64) -> Result<f64> {
    match spec {
        DomainSpec::Star2D(r) => {
            let j = r.jet(param);
            let (c, s) = (param.cos(), param.sin());
            let x = [j.f * c, j.f * s];
            let t = [j.d1 * c - j.f * s, j.d1 * s + j.f * c];
            let len = t[0].hypot(t[1]);
            // counter-clockwise curve: outward normal is the tangent turned clockwise
            let n = [t[1] / len, -t[0] / len];
            Ok(x[0] * n[0] + x[1] * n[1])
        }
        DomainSpec::Revolution(p) => {
            let r = p.series();
            let j = r.jet(param);
            let (c, s) = (param.cos(), param.sin());
            let x = [j.f * s, j.f * c];
            let t = [j.d1 * s + j.f * c, j.d1 * c - j.f * s];
            let len = t[0].hypot(t[1]);
            let n = [-t[1] / len, t[0] / len];
            Ok(x[0] * n[0] + x[1] * n[1])
        }
        DomainSpec::Ball { radius, .. } => Ok(*radius),
        DomainSpec::Shell { inner, outer, .. } => {
            if (param - inner).abs() <= 1e-12 * inner {
                Ok(-inner)
            } else if (param - outer).abs() <= 1e-12 * outer {
                Ok(*outer)
            } else {
                Err(Error::InvalidParameter(format!("{param} is not a radius of the shell")))
            }
        }
    }
}

/// Both sides of an integral identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / |lhs|`.
    pub residual: f64,
    pub quadrature_n: usize,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, quadrature_n: usize) -> Self {
        Self { lhs, rhs, residual: (lhs - rhs).abs() / lhs.abs(), quadrature_n }
    }
}

fn shell_sides(dim: usize, inner: f64, outer: f64) -> [(f64, f64, f64); 2] {
    // (support, mean curvature, area) of each sphere
    let area = |r: f64| dim as f64 * unit_ball_volume(dim) * r.powi(dim as i32 - 1);
    [(-inner, -1.0 / inner, area(inner)), (outer, 1.0 / outer, area(outer))]
}

/// `Vol Ω` (by integrating over the interior) against `(1/ν)∫_S p dS`.
pub fn check_divergence_identity(spec: &DomainSpec, quadrature_n: usize) -> Result<IdentityCheck> {
    spec.validate()?;
    if quadrature_n < 16 {
        return Err(Error::InvalidParameter(format!("quadrature_n must be at least 16, got {quadrature_n}")));
    }
    let n = quadrature_n;
    let radial = GaussLegendre::new(4);
    match spec {
        DomainSpec::Star2D(r) => {
            let vol = periodic_trapezoid(|t| radial.integrate(0.0, r.value(t), |rho| rho), n);
            let flux = periodic_trapezoid(|t| support_function(spec, t).unwrap() * speed_2d(r, t), n);
            Ok(IdentityCheck::new(vol, flux / 2.0, n))
        }
        DomainSpec::Revolution(p) => {
            let r = p.series();
            let gl = GaussLegendre::new(n);
            let vol = 2.0 * PI * gl.integrate(-1.0, 1.0, |u| radial.integrate(0.0, r.value(u.acos()), |rho| rho * rho));
            let flux = 2.0
                * PI
                * gl.integrate(-1.0, 1.0, |u| {
                    let phi = u.acos();
                    support_function(spec, phi).unwrap() * revolution_area_density(&r, phi)
                });
            Ok(IdentityCheck::new(vol, flux / 3.0, n))
        }
        DomainSpec::Ball { dim, radius } => {
            let vol = unit_ball_volume(*dim) * radius.powi(*dim as i32);
            let area = *dim as f64 * vol / radius;
            Ok(IdentityCheck::new(vol, radius * area / *dim as f64, n))
        }
        DomainSpec::Shell { dim, inner, outer } => {
            let vol = unit_ball_volume(*dim) * (outer.powi(*dim as i32) - inner.powi(*dim as i32));
            let flux: f64 = shell_sides(*dim, *inner, *outer).iter().map(|(p, _, a)| p * a).sum();
            Ok(IdentityCheck::new(vol, flux / *dim as f64, n))
        }
    }
}

/// `Area S` against `∫_S p H dS`.
pub fn check_minkowski(spec: &DomainSpec, quadrature_n: usize) -> Result<IdentityCheck> {
    spec.validate()?;
    if quadrature_n < 16 {
        return Err(Error::InvalidParameter(format!("quadrature_n must be at least 16, got {quadrature_n}")));
    }
    let n = quadrature_n;
    match spec {
        DomainSpec::Star2D(r) => {
            let area = periodic_trapezoid(|t| speed_2d(r, t), n);
            let m = periodic_trapezoid(|t| support_function(spec, t).unwrap() * curvature_of(r, t) * speed_2d(r, t), n);
            Ok(IdentityCheck::new(area, m, n))
        }
        DomainSpec::Revolution(p) => {
            let r = p.series();
            let gl = GaussLegendre::new(n);
            let area = 2.0 * PI * gl.integrate(-1.0, 1.0, |u| revolution_area_density(&r, u.acos()));
            let m = 2.0
                * PI
                * gl.integrate(-1.0, 1.0, |u| {
                    let phi = u.acos();
                    support_function(spec, phi).unwrap()
                        * revolution_mean_curvature(&r, phi)
                        * revolution_area_density(&r, phi)
                });
            Ok(IdentityCheck::new(area, m, n))
        }
        DomainSpec::Ball { dim, radius } => {
            let area = *dim as f64 * unit_ball_volume(*dim) * radius.powi(*dim as i32 - 1);
            Ok(IdentityCheck::new(area, radius * (1.0 / radius) * area, n))
        }
        DomainSpec::Shell { dim, inner, outer } => {
            let sides = shell_sides(*dim, *inner, *outer);
            let area: f64 = sides.iter().map(|s| s.2).sum();
            let m: f64 = sides.iter().map(|(p, h, a)| p * h * a).sum();
            Ok(IdentityCheck::new(area, m, n))
        }
    }
}

fn speed_2d(r: &FourierSeries, t: f64) -> f64 {
    let j = r.jet(t);
    j.f.hypot(j.d1)
}

/// `R sin φ √(R² + R′²)`, the area element per `dφ` and unit azimuth,
/// divided by `sin φ` for integration in `u = cos φ`.
fn revolution_area_density(r: &FourierSeries, phi: f64) -> f64 {
    let j = r.jet(phi);
    j.f * j.f.hypot(j.d1)
}

/// `H_max` against its two lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HmaxBound {
    pub h_max: f64,
    /// `(1/ν)·Area/Vol`.
    pub rhs_area: f64,
    /// `(Vol B_ν / Vol Ω)^{1/ν}`.
    pub rhs_volume: f64,
    /// `h_max − rhs_volume`.
    pub margin: f64,
    pub is_ball: bool,
}

/// Evaluates `H_max ≥ (1/ν)·Area/Vol ≥ (Vol B_ν/Vol Ω)^{1/ν}` for a
/// star-shaped domain.
pub fn check_hmax_bound(spec: &DomainSpec, quadrature_n: usize) -> Result<HmaxBound> {
    if let DomainSpec::Shell { .. } = spec {
        return Err(Error::Precondition("a spherical shell is not star-shaped".into()));
    }
    let g = geometry_summary(spec, quadrature_n)?;
    let nu = g.dim as f64;
    let rhs_area = g.boundary_area / (nu * g.volume);
    let rhs_volume = (unit_ball_volume(g.dim) / g.volume).powf(1.0 / nu);
    Ok(HmaxBound { h_max: g.h_max, rhs_area, rhs_volume, margin: g.h_max - rhs_volume, is_ball: spec.is_ball() })
}

/// Result of one volume-preserving perturbation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbOutcome {
    pub spec: DomainSpec,
    /// Bump amplitude actually used, after any halving.
    pub eps_used: f64,
    pub h_max_before: f64,
    pub h_max_after: f64,
    pub area_before: f64,
    pub area_after: f64,
    /// Centre and half-width of the bump in `θ`.
    pub theta_star: f64,
    pub half_width: f64,
    /// Gap between `H_max` and the lower quartile of `κ`.
    pub delta: f64,
    /// Upper bound on the Hausdorff distance: `max |r_new − r_old|`.
    pub hausdorff_bound: f64,
}

/// Fourier degree used for perturbed boundaries.
pub const PERTURB_DEGREE: usize = 512;

/// Sampling density for curvature extrema of perturbed boundaries.
fn dense_grid(r: &FourierSeries) -> usize {
    (16 * r.degree()).max(4096)
}

fn curvature_extrema(r: &FourierSeries) -> (f64, f64, f64, f64) {
    let n = dense_grid(r);
    let mut lo = (0.0, f64::INFINITY);
    let mut hi = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        let k = curvature_of(r, t);
        if k < lo.1 {
            lo = (t, k);
        }
        if k > hi.1 {
            hi = (t, k);
        }
    }
    (lo.0, lo.1, hi.0, hi.1)
}

/// Start and length of the longest run of `true` in a cyclic sequence.
fn longest_circular_run(v: &[bool]) -> (usize, usize) {
    let n = v.len();
    if v.iter().all(|&b| b) {
        return (0, n);
    }
    let first_false = v.iter().position(|&b| !b).unwrap_or(0);
    let mut best = (0, 0);
    let mut cur = (0, 0);
    for k in 1..=n {
        let i = (first_false + k) % n;
        if v[i] {
            if cur.1 == 0 {
                cur.0 = i;
            }
            cur.1 += 1;
            if cur.1 > best.1 {
                best = cur;
            }
        } else {
            cur.1 = 0;
        }
    }
    best
}

/// `(1 − x²)⁴` on `[−1, 1]`, zero outside.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - x * x).powi(4)
    }
}

fn wrap(t: f64) -> f64 {
    (t + PI).rem_euclid(2.0 * PI) - PI
}

/// Pushes the boundary inwards by `ε·ψ` on a low-curvature arc, then
/// dilates back to the original enclosed area. The bump is centred on the
/// longest arc where `κ < H_max − δ/2`, with `δ` the gap between `H_max` and the lower
/// quartile of `κ`, and covers
/// its middle 80%. If the perturbed curvature
/// leaves that bound on the bump, or `H_max` fails to drop, `ε` is halved,
/// up to 20 times.
pub fn perturb_reduce_hmax(spec: &DomainSpec, eps: f64) -> Result<PerturbOutcome> {
    let r = match spec {
        DomainSpec::Star2D(r) => r,
        other => {
            return Err(Error::InvalidDomain(format!("perturbation needs a star2d domain, got {}", other.kind_name())))
        }
    };
    spec.validate()?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let (_, k_min, _, h_max) = curvature_extrema(r);
    let mean = 0.5 * (k_min + h_max);
    if h_max - k_min <= 1e-6 * mean.abs() {
        return Err(Error::Precondition("boundary curvature is constant; no perturbation lowers H_max".into()));
    }
    // gap to the lower quartile of κ: stable under repeated dents, which
    // drive min κ down without widening the low-curvature region
    let n = dense_grid(r);
    let step = 2.0 * PI / n as f64;
    let mut kappa: Vec<f64> = (0..n).map(|i| curvature_of(r, i as f64 * step)).collect();
    let below_of = |k: &[f64], t: f64| k.iter().map(|&x| x < t).collect::<Vec<bool>>();
    let mut sorted = kappa.clone();
    sorted.sort_by(f64::total_cmp);
    let delta = h_max - sorted[n / 4];
    let threshold = h_max - delta / 2.0;

    // longest arc on which κ stays below the threshold; the bump sits at its middle
    let below = below_of(&kappa, threshold);
    kappa.clear();
    let (start, len) = longest_circular_run(&below);
    let theta_star = (start as f64 + 0.5 * (len as f64 - 1.0)) * step;
    let half_width = (0.4 * len as f64 * step).min(0.4 * PI);
    if half_width < 4.0 * step {
        return Err(Error::Degenerate("low-curvature arc too narrow for a bump".into()));
    }

    let (area_before, _) = star2d_volume_area(r, n);
    let degree = PERTURB_DEGREE.max(r.degree());
    let samples_n = 8 * degree;
    let mut e = eps;
    for _ in 0..=20 {
        let samples: Vec<f64> = (0..samples_n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / samples_n as f64;
                r.value(t) - e * bump(wrap(t - theta_star) / half_width)
            })
            .collect();
        let dented = FourierSeries::from_samples(&samples, degree)?;
        let ok_positive = samples.iter().all(|&v| v > 0.0);
        let (area_dented, _) = star2d_volume_area(&dented, samples_n);
        let lambda = (area_before / area_dented).sqrt();
        let candidate = dented.scaled(lambda);
        let (_, _, _, h_after) = curvature_extrema(&candidate);
        let bump_ok = (0..=64).all(|i| {
            let t = theta_star + half_width * (2.0 * i as f64 / 64.0 - 1.0);
            curvature_of(&dented, t) < threshold
        });
        if ok_positive && bump_ok && h_after < h_max {
            let (area_after, _) = star2d_volume_area(&candidate, samples_n);
            let hausdorff_bound = (0..samples_n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / samples_n as f64;
                    (candidate.value(t) - r.value(t)).abs()
                })
                .fold(0.0, f64::max);
            return Ok(PerturbOutcome {
                spec: DomainSpec::Star2D(candidate),
                eps_used: e,
                h_max_before: h_max,
                h_max_after: h_after,
                area_before,
                area_after,
                theta_star,
                half_width,
                delta,
                hausdorff_bound,
            });
        }
        e *= 0.5;
    }
    Err(Error::NoConvergence(format!("no admissible bump amplitude at or below {eps}")))
}

/// One line of the geometry report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeomCheckReport {
    pub check: String,
    pub domain_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual_or_margin: f64,
    pub quadrature_n: usize,
    pub pass: bool,
}

/// Tolerance for the integral identities at `quadrature_n ≥ 256`.
pub const IDENTITY_TOL: f64 = 1e-8;

impl GeomCheckReport {
    pub fn divergence(domain_id: &str, c: &IdentityCheck) -> Self {
        Self {
            check: "divergence".into(),
            domain_id: domain_id.into(),
            lhs: c.lhs,
            rhs: c.rhs,
            residual_or_margin: c.residual,
            quadrature_n: c.quadrature_n,
            pass: c.residual < IDENTITY_TOL,
        }
    }

    pub fn minkowski(domain_id: &str, c: &IdentityCheck) -> Self {
        Self { check: "minkowski".into(), ..Self::divergence(domain_id, c) }
    }

    /// Passes when the margin is non-negative, and is small only for balls.
    pub fn hmax_bound(domain_id: &str, b: &HmaxBound, quadrature_n: usize) -> Self {
        let pass = b.margin >= -1e-10 && b.h_max >= b.rhs_area - 1e-10 && (b.is_ball || b.margin >= 1e-8);
        Self {
            check: "hmax-bound".into(),
            domain_id: domain_id.into(),
            lhs: b.h_max,
            rhs: b.rhs_volume,
            residual_or_margin: b.margin,
            quadrature_n,
            pass,
        }
    }
}
