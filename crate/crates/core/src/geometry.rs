//! Domain descriptions and boundary geometry.
//!
//! Curvatures are signed with respect to the outward unit normal: a convex
//! boundary has positive curvature, a circle of radius `R` has `1/R`, and the
//! inner sphere of a spherical shell has `−1/a`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{periodic_trapezoid, GaussLegendre};
use crate::roots::grid_then_golden_max;

/// Positivity of radial functions is checked on this many samples.
const POSITIVITY_GRID: usize = 4096;

/// Finite Fourier series `a_0 + Σ_k (a_k cos kθ + b_k sin kθ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    /// Cosine coefficients `a_0..a_K`.
    pub cos: Vec<f64>,
    /// Sine coefficients `b_1..b_K`.
    #[serde(default)]
    pub sin: Vec<f64>,
}

/// Value and first three derivatives of a Fourier series at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl FourierSeries {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self { cos, sin }
    }

    pub fn constant(c: f64) -> Self {
        Self { cos: vec![c], sin: vec![] }
    }

    /// Highest harmonic carried by the series.
    pub fn degree(&self) -> usize {
        self.cos.len().saturating_sub(1).max(self.sin.len())
    }

    /// Evaluates the series and its derivatives. Harmonics are generated by
    /// the angle-addition recurrence.
    pub fn jet(&self, theta: f64) -> Jet {
        let (s1, c1) = theta.sin_cos();
        let (mut ck, mut sk) = (1.0, 0.0);
        let mut jet = Jet { f: self.cos.first().copied().unwrap_or(0.0), d1: 0.0, d2: 0.0, d3: 0.0 };
        for k in 1..=self.degree() {
            let next_c = ck * c1 - sk * s1;
            let next_s = sk * c1 + ck * s1;
            ck = next_c;
            sk = next_s;
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            let kf = k as f64;
            let even = a * ck + b * sk;
            let odd = -a * sk + b * ck;
            jet.f += even;
            jet.d1 += kf * odd;
            jet.d2 -= kf * kf * even;
            jet.d3 -= kf * kf * kf * odd;
        }
        jet
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.jet(theta).f
    }

    /// Least-squares (DFT) projection of equispaced samples on `[0, 2π)` onto
    /// harmonics `0..=degree`. Requires `samples.len() > 2·degree`.
    pub fn from_samples(samples: &[f64], degree: usize) -> Result<Self> {
        let n = samples.len();
        if n <= 2 * degree {
            return Err(Error::InvalidParameter(format!(
                "{n} samples cannot resolve {degree} harmonics"
            )));
        }
        let h = 2.0 * PI / n as f64;
        let mut cos = vec![0.0; degree + 1];
        let mut sin = vec![0.0; degree];
        cos[0] = samples.iter().sum::<f64>() / n as f64;
        for k in 1..=degree {
            let (mut a, mut b) = (0.0, 0.0);
            for (i, &v) in samples.iter().enumerate() {
                // exact angle per node keeps the transform free of drift
                let (s, c) = ((k * i % n) as f64 * h).sin_cos();
                a += v * c;
                b += v * s;
            }
            cos[k] = 2.0 * a / n as f64;
            sin[k - 1] = 2.0 * b / n as f64;
        }
        Ok(Self { cos, sin })
    }

    /// Same curve rotated by `phase` (value at `θ` becomes value at `θ − phase`).
    pub fn rotated(&self, phase: f64) -> Self {
        let mut out = self.clone();
        out.sin.resize(self.degree(), 0.0);
        out.cos.resize(self.degree() + 1, 0.0);
        for k in 1..=self.degree() {
            let (s, c) = (k as f64 * phase).sin_cos();
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            out.cos[k] = a * c - b * s;
            out.sin[k - 1] = a * s + b * c;
        }
        out
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|a| a * lambda).collect(),
            sin: self.sin.iter().map(|b| b * lambda).collect(),
        }
    }

    fn all_finite(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|v| v.is_finite())
    }
}

/// Declarative description of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    /// Planar domain bounded by the radial graph `θ ↦ r(θ)(cos θ, sin θ)`.
    #[serde(rename = "star2d")]
    Star2D(FourierSeries),
    /// Ball of the given radius in `R^dim`.
    #[serde(rename = "ball")]
    Ball { dim: usize, radius: f64 },
    /// Spherical shell `inner < |x| < outer` in `R^dim`.
    #[serde(rename = "shell")]
    Shell { dim: usize, inner: f64, outer: f64 },
    /// Axisymmetric solid in `R^3` whose boundary is the radial graph
    /// `R(φ)(sin φ cos ϑ, sin φ sin ϑ, cos φ)`, `φ ∈ [0, π]` measured from the
    /// symmetry axis.
    #[serde(rename = "revolution")]
    Revolution(RevolutionProfile),
}

/// Radial profile of a solid of revolution, `R(φ)` over the polar angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevolutionProfile {
    pub profile_cos: Vec<f64>,
    #[serde(default)]
    pub profile_sin: Vec<f64>,
}

impl RevolutionProfile {
    pub fn series(&self) -> FourierSeries {
        FourierSeries::new(self.profile_cos.clone(), self.profile_sin.clone())
    }
}

impl DomainSpec {
    pub fn star2d(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        DomainSpec::Star2D(FourierSeries::new(cos, sin))
    }

    /// Circle of radius `r` as a radial graph.
    pub fn disk(r: f64) -> Self {
        DomainSpec::Star2D(FourierSeries::constant(r))
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        DomainSpec::Ball { dim, radius }
    }

    pub fn shell(dim: usize, inner: f64, outer: f64) -> Self {
        DomainSpec::Shell { dim, inner, outer }
    }

    pub fn revolution(profile_cos: Vec<f64>, profile_sin: Vec<f64>) -> Self {
        DomainSpec::Revolution(RevolutionProfile { profile_cos, profile_sin })
    }

    /// Ambient dimension ν.
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Star2D(_) => 2,
            DomainSpec::Ball { dim, .. } | DomainSpec::Shell { dim, .. } => *dim,
            DomainSpec::Revolution(_) => 3,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DomainSpec::Star2D(_) => "star2d",
            DomainSpec::Ball { .. } => "ball",
            DomainSpec::Shell { .. } => "shell",
            DomainSpec::Revolution(_) => "revolution",
        }
    }

    /// Checks the data invariants of the spec.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Star2D(r) => {
                if r.cos.is_empty() || !r.all_finite() {
                    return Err(Error::InvalidDomain("star2d needs finite cosine coefficients".into()));
                }
                let min = min_on_grid(|t| r.value(t), 0.0, 2.0 * PI, POSITIVITY_GRID);
                if min <= 0.0 {
                    return Err(Error::InvalidDomain(format!("radial function not positive (min {min:e})")));
                }
                Ok(())
            }
            DomainSpec::Ball { dim, radius } => {
                check_dim(*dim)?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
                }
                Ok(())
            }
            DomainSpec::Shell { dim, inner, outer } => {
                check_dim(*dim)?;
                if !(inner.is_finite() && outer.is_finite() && *inner > 0.0 && inner < outer) {
                    return Err(Error::InvalidDomain(format!("shell needs 0 < inner < outer, got {inner}, {outer}")));
                }
                Ok(())
            }
            DomainSpec::Revolution(p) => {
                let r = p.series();
                if r.cos.is_empty() || !r.all_finite() {
                    return Err(Error::InvalidDomain("revolution needs finite profile coefficients".into()));
                }
                let min = min_on_grid(|t| r.value(t), 0.0, PI, POSITIVITY_GRID);
                if min <= 0.0 {
                    return Err(Error::InvalidDomain(format!("profile radius not positive (min {min:e})")));
                }
                for pole in [0.0, PI] {
                    let j = r.jet(pole);
                    if j.d1.abs() > 1e-12 * j.f.abs().max(1.0) {
                        return Err(Error::Degenerate(format!(
                            "profile meets the axis at φ = {pole} with slope {:e} (conical point)",
                            j.d1
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Dilation by `lambda > 0` about the origin.
    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            DomainSpec::Star2D(r) => DomainSpec::Star2D(r.scaled(lambda)),
            DomainSpec::Ball { dim, radius } => DomainSpec::Ball { dim: *dim, radius: radius * lambda },
            DomainSpec::Shell { dim, inner, outer } => {
                DomainSpec::Shell { dim: *dim, inner: inner * lambda, outer: outer * lambda }
            }
            DomainSpec::Revolution(p) => DomainSpec::Revolution(RevolutionProfile {
                profile_cos: p.profile_cos.iter().map(|a| a * lambda).collect(),
                profile_sin: p.profile_sin.iter().map(|a| a * lambda).collect(),
            }),
        }
    }

    /// Radius of the largest centred ball inside the domain (crude for
    /// radial graphs: the minimum of the radial function).
    pub fn inradius_estimate(&self) -> f64 {
        match self {
            DomainSpec::Star2D(r) => min_on_grid(|t| r.value(t), 0.0, 2.0 * PI, POSITIVITY_GRID),
            DomainSpec::Ball { radius, .. } => *radius,
            DomainSpec::Shell { inner, outer, .. } => 0.5 * (outer - inner),
            DomainSpec::Revolution(p) => {
                let r = p.series();
                min_on_grid(|t| r.value(t), 0.0, PI, POSITIVITY_GRID)
            }
        }
    }

    /// Whether the spec describes a ball by construction, or a radial graph
    /// whose curvature is constant to `1e-6` relative.
    pub fn is_ball(&self) -> bool {
        match self {
            DomainSpec::Ball { .. } => true,
            DomainSpec::Shell { .. } => false,
            DomainSpec::Star2D(r) => {
                let (lo, hi, mean) = curvature_range(|t| curvature_of(r, t), 0.0, 2.0 * PI, 2048);
                hi - lo <= 1e-6 * mean.abs()
            }
            DomainSpec::Revolution(p) => {
                let r = p.series();
                let (lo, hi, mean) = curvature_range(|t| revolution_mean_curvature(&r, t), 0.0, PI, 2048);
                hi - lo <= 1e-6 * mean.abs()
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDomain(format!("dimension must be at least 2, got {dim}")));
    }
    Ok(())
}

fn min_on_grid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    (0..=n).map(|i| f(a + (b - a) * i as f64 / n as f64)).fold(f64::INFINITY, f64::min)
}

fn curvature_range<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> (f64, f64, f64) {
    let vals: Vec<f64> = (0..n).map(|i| f(a + (b - a) * (i as f64 + 0.5) / n as f64)).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi, vals.iter().sum::<f64>() / n as f64)
}

/// Volume of the unit ball in `R^dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / dim as f64 * unit_ball_volume(dim - 2),
    }
}

/// Signed curvature of the radial graph `r(θ)` w.r.t. the outward normal:
/// `κ = (r² + 2r′² − r r″)/(r² + r′²)^{3/2}`.
pub fn curvature_of(r: &FourierSeries, theta: f64) -> f64 {
    let j = r.jet(theta);
    polar_curvature(j.f, j.d1, j.d2)
}

fn polar_curvature(r: f64, r1: f64, r2: f64) -> f64 {
    (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1).powf(1.5)
}

/// Curvature of a `Star2D` boundary at polar angle `theta`.
pub fn curvature_star2d(spec: &DomainSpec, theta: f64) -> Result<f64> {
    match spec {
        DomainSpec::Star2D(r) => Ok(curvature_of(r, theta)),
        other => Err(Error::InvalidDomain(format!("curvature_star2d needs star2d, got {}", other.kind_name()))),
    }
}

/// Principal curvatures `(κ_meridian, κ_parallel)` of a surface of
/// revolution generated by the meridian `(x(t), z(t))`, `x > 0` the distance
/// to the axis. The meridian must run so that the outward normal is
/// `(z′, −x′)/|·|` in the `(x, z)` half-plane.
pub fn revolution_principal_curvatures(x: f64, dx: f64, ddx: f64, dz: f64, ddz: f64) -> (f64, f64) {
    let speed2 = dx * dx + dz * dz;
    let speed = speed2.sqrt();
    let k_meridian = (dx * ddz - dz * ddx) / (speed2 * speed);
    let normal_x = dz / speed;
    (k_meridian, normal_x / x)
}

/// Mean curvature of the revolution profile `R(φ)` at polar angle `phi`.
/// At the poles the parallel curvature is replaced by its limit, which
/// equals the meridian curvature there.
pub fn revolution_mean_curvature(r: &FourierSeries, phi: f64) -> f64 {
    let j = r.jet(phi);
    let k_meridian = polar_curvature(j.f, j.d1, j.d2);
    let s = phi.sin();
    let k_parallel = if s.abs() < 1e-7 {
        k_meridian
    } else {
        let c = phi.cos();
        (j.f * s - j.d1 * c) / (j.f * s * (j.f * j.f + j.d1 * j.d1).sqrt())
    };
    0.5 * (k_meridian + k_parallel)
}

/// Mean curvature of a `Revolution` boundary. `param = (azimuth, polar)`;
/// the azimuth does not enter.
pub fn mean_curvature_revolution(spec: &DomainSpec, param: (f64, f64)) -> Result<f64> {
    match spec {
        DomainSpec::Revolution(p) => {
            let r = p.series();
            let phi = param.1;
            if !(0.0..=PI).contains(&phi) {
                return Err(Error::InvalidParameter(format!("polar angle {phi} outside [0, π]")));
            }
            let pole_slope = r.jet(if phi < 0.5 * PI { 0.0 } else { PI }).d1;
            if phi.sin().abs() < 1e-7 && pole_slope.abs() > 1e-12 {
                return Err(Error::Degenerate(format!("conical pole at φ = {phi}")));
            }
            Ok(revolution_mean_curvature(&r, phi))
        }
        other => Err(Error::InvalidDomain(format!(
            "mean_curvature_revolution needs revolution, got {}",
            other.kind_name()
        ))),
    }
}

/// Support function `p = s·n(s)` of the radial graph at `θ`.
pub fn support_star2d(r: &FourierSeries, theta: f64) -> f64 {
    let j = r.jet(theta);
    j.f * j.f / (j.f * j.f + j.d1 * j.d1).sqrt()
}

/// Support function of the revolution profile at polar angle `phi`.
pub fn support_revolution(r: &FourierSeries, phi: f64) -> f64 {
    let j = r.jet(phi);
    j.f * j.f / (j.f * j.f + j.d1 * j.d1).sqrt()
}

/// Per-domain scalars obtained by quadrature (or closed forms for balls and
/// shells).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub dim: usize,
    pub volume: f64,
    pub boundary_area: f64,
    pub h_max: f64,
    /// Boundary parameter where `H` is maximal.
    pub h_argmax: f64,
    pub h_samples: Vec<(f64, f64)>,
    pub p_samples: Vec<(f64, f64)>,
    pub quadrature_n: usize,
    /// Whether doubling the quadrature changed volume and area by less than
    /// `1e-10` relative.
    pub converged: bool,
}

/// Volume, boundary area and `H_max` of a domain.
pub fn geometry_summary(spec: &DomainSpec, quadrature_n: usize) -> Result<GeometrySummary> {
    if quadrature_n < 16 {
        return Err(Error::InvalidParameter(format!("quadrature_n must be at least 16, got {quadrature_n}")));
    }
    spec.validate()?;
    let dim = spec.dim();
    match spec {
        DomainSpec::Ball { radius, .. } => {
            let vol = unit_ball_volume(dim) * radius.powi(dim as i32);
            Ok(GeometrySummary {
                dim,
                volume: vol,
                boundary_area: dim as f64 * vol / radius,
                h_max: 1.0 / radius,
                h_argmax: *radius,
                h_samples: vec![(*radius, 1.0 / radius)],
                p_samples: vec![(*radius, *radius)],
                quadrature_n,
                converged: true,
            })
        }
        DomainSpec::Shell { inner, outer, .. } => {
            let w = unit_ball_volume(dim);
            let area = |r: f64| dim as f64 * w * r.powi(dim as i32 - 1);
            Ok(GeometrySummary {
                dim,
                volume: w * (outer.powi(dim as i32) - inner.powi(dim as i32)),
                boundary_area: area(*inner) + area(*outer),
                h_max: 1.0 / outer,
                h_argmax: *outer,
                // The inner sphere bends away from the outward normal.
                h_samples: vec![(*inner, -1.0 / inner), (*outer, 1.0 / outer)],
                p_samples: vec![(*inner, -inner), (*outer, *outer)],
                quadrature_n,
                converged: true,
            })
        }
        DomainSpec::Star2D(r) => {
            let (vol, area) = star2d_volume_area(r, quadrature_n);
            let (vol2, area2) = star2d_volume_area(r, 2 * quadrature_n);
            let converged = (vol - vol2).abs() <= 1e-10 * vol2 && (area - area2).abs() <= 1e-10 * area2;
            let (h_argmax, h_max) =
                grid_then_golden_max(|t| curvature_of(r, t), 0.0, 2.0 * PI, 4 * quadrature_n, 1e-12);
            let grid = |i: usize| 2.0 * PI * i as f64 / quadrature_n as f64;
            Ok(GeometrySummary {
                dim,
                volume: vol2,
                boundary_area: area2,
                h_max,
                h_argmax: h_argmax.rem_euclid(2.0 * PI),
                h_samples: (0..quadrature_n).map(|i| (grid(i), curvature_of(r, grid(i)))).collect(),
                p_samples: (0..quadrature_n).map(|i| (grid(i), support_star2d(r, grid(i)))).collect(),
                quadrature_n,
                converged,
            })
        }
        DomainSpec::Revolution(p) => {
            let r = p.series();
            let (vol, area) = revolution_volume_area(&r, quadrature_n);
            let (vol2, area2) = revolution_volume_area(&r, 2 * quadrature_n);
            let converged = (vol - vol2).abs() <= 1e-10 * vol2 && (area - area2).abs() <= 1e-10 * area2;
            let (h_argmax, h_max) =
                grid_then_golden_max(|t| revolution_mean_curvature(&r, t.clamp(0.0, PI)), 0.0, PI, 4 * quadrature_n, 1e-12);
            let grid = |i: usize| PI * i as f64 / (quadrature_n - 1) as f64;
            Ok(GeometrySummary {
                dim,
                volume: vol2,
                boundary_area: area2,
                h_max,
                h_argmax: h_argmax.clamp(0.0, PI),
                h_samples: (0..quadrature_n).map(|i| (grid(i), revolution_mean_curvature(&r, grid(i)))).collect(),
                p_samples: (0..quadrature_n).map(|i| (grid(i), support_revolution(&r, grid(i)))).collect(),
                quadrature_n,
                converged,
            })
        }
    }
}

/// Enclosed area `½∫r² dθ` and perimeter `∫√(r²+r′²) dθ` by the periodic
/// trapezoid rule.
pub fn star2d_volume_area(r: &FourierSeries, n: usize) -> (f64, f64) {
    let vol = 0.5 * periodic_trapezoid(|t| r.value(t).powi(2), n);
    let area = periodic_trapezoid(
        |t| {
            let j = r.jet(t);
            (j.f * j.f + j.d1 * j.d1).sqrt()
        },
        n,
    );
    (vol, area)
}

/// Volume `(2π/3)∫R³ sin φ dφ` and area `2π∫R sin φ √(R²+R′²) dφ`, by
/// Gauss–Legendre in `u = cos φ`.
pub fn revolution_volume_area(r: &FourierSeries, n: usize) -> (f64, f64) {
    let gl = GaussLegendre::new(n);
    let vol = 2.0 * PI / 3.0 * gl.integrate(-1.0, 1.0, |u| r.value(u.acos()).powi(3));
    let area = 2.0
        * PI
        * gl.integrate(-1.0, 1.0, |u| {
            let j = r.jet(u.acos());
            j.f * (j.f * j.f + j.d1 * j.d1).sqrt()
        });
    (vol, area)
}
