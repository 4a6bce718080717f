//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use robin_core::asympt::{compare_domains, fit_linear_coefficient, fit_remainder_exponent, FitReport};
use robin_core::fem2d::{max_radius, refine_and_extrapolate, Preset};
use robin_core::geometry::geometry_summary;
use robin_core::geominequal::{
    check_divergence_identity, check_hmax_bound, check_minkowski, perturb_reduce_hmax, GeomCheckReport,
};
use robin_core::radial::{ball_curve, shell_curve};
use robin_core::{DomainSpec, Method, SpectralResult};

use crate::grid::parse_alpha_grid;
use crate::io::{read_domain, read_json, read_results, write_json, write_results, write_text};
use crate::svg::{Plot, Series};
use crate::{CliError, CliResult};

/// Quadrature nodes used by geometry checks.
pub const GEOM_QUADRATURE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigMethod {
    Radial,
    Fem,
}

impl EigMethod {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "radial" => Ok(EigMethod::Radial),
            "fem" => Ok(EigMethod::Fem),
            other => Err(CliError::Config(format!("unknown method '{other}' (expected radial or fem)"))),
        }
    }
}

/// Computes `count` eigenvalues at every grid point.
pub fn compute_eigenvalues(
    id: &str,
    spec: &DomainSpec,
    alphas: &[f64],
    count: usize,
    method: EigMethod,
    preset: Preset,
) -> CliResult<Vec<SpectralResult>> {
    if count == 0 {
        return Err(CliError::Config("count must be at least 1".into()));
    }
    let mut out: Vec<SpectralResult> = match (method, spec) {
        (EigMethod::Radial, DomainSpec::Ball { dim, radius }) => {
            ball_curve(*dim, *radius, alphas, count)?.iter().flat_map(|s| s.results(id)).collect()
        }
        (EigMethod::Radial, DomainSpec::Shell { dim, inner, outer }) => {
            shell_curve(*dim, *inner, *outer, alphas, count)?.iter().flat_map(|s| s.results(id)).collect()
        }
        (EigMethod::Fem, DomainSpec::Star2D(_)) => {
            let r_max = max_radius(spec)?;
            let per_alpha: Vec<Vec<SpectralResult>> = alphas
                .par_iter()
                .map(|&a| refine_and_extrapolate(spec, id, a, count, &preset.ladder(a, r_max)))
                .collect::<robin_core::Result<_>>()?;
            per_alpha.into_iter().flatten().collect()
        }
        (m, s) => {
            return Err(CliError::Config(format!(
                "method {} cannot handle a {} domain (radial needs ball or shell, fem needs star2d)",
                if m == EigMethod::Radial { "radial" } else { "fem" },
                s.kind_name()
            )))
        }
    };
    out.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.j.cmp(&b.j)));
    Ok(out)
}

pub fn cmd_eig(domain: &Path, alpha_grid: &str, count: usize, method: &str, preset: &str, out: &Path) -> CliResult<()> {
    let (id, spec) = read_domain(domain)?;
    let alphas = parse_alpha_grid(alpha_grid)?;
    let method = EigMethod::parse(method)?;
    let preset = Preset::parse(preset)
        .ok_or_else(|| CliError::Config(format!("unknown mesh preset '{preset}' (coarse, medium, fine)")))?;
    let results = compute_eigenvalues(&id, &spec, &alphas, count, method, preset)?;
    write_results(out, &results)?;
    let unconverged = results.iter().filter(|r| r.flagged && r.method == Method::Fem2D).count();
    if unconverged > 0 {
        return Err(CliError::NonConvergence(format!("{unconverged} eigenvalues missed the residual target")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    Coeff,
    Exponent,
}

impl FitMode {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "coeff" => Ok(FitMode::Coeff),
            "exponent" => Ok(FitMode::Exponent),
            other => Err(CliError::Config(format!("unknown fit mode '{other}' (expected coeff or exponent)"))),
        }
    }
}

/// `(ν−1)·H_max` of a domain.
pub fn linear_coefficient_target(spec: &DomainSpec) -> CliResult<f64> {
    let g = geometry_summary(spec, GEOM_QUADRATURE)?;
    Ok((g.dim as f64 - 1.0) * g.h_max)
}

pub fn fit_results(results: &[SpectralResult], j: usize, mode: FitMode, geometry: Option<&DomainSpec>) -> CliResult<FitReport> {
    let rows: Vec<SpectralResult> = results.iter().filter(|r| r.j == j).cloned().collect();
    let id = rows.first().map(|r| r.domain_id.clone()).ok_or_else(|| CliError::Config(format!("no rows with j = {j}")))?;
    if rows.iter().any(|r| r.domain_id != id) {
        return Err(CliError::Config("input mixes several domains".into()));
    }
    let target = geometry.map(linear_coefficient_target).transpose()?;
    let fit = match mode {
        FitMode::Coeff => return Ok(FitReport::from_fit(&id, &fit_linear_coefficient(&rows)?, target)),
        FitMode::Exponent => {
            let c_ref = target.ok_or_else(|| CliError::Config("exponent mode needs --geometry".into()))?;
            if rows.iter().any(|r| r.method == Method::Fem2D) {
                return Err(CliError::Config("exponent fits need exact (radial or 1D model) data".into()));
            }
            fit_remainder_exponent(&rows, c_ref)?
        }
    };
    let mut report = FitReport::from_fit(&id, &fit, target);
    if fit.flagged {
        report.verdict = "inconclusive".into();
    }
    Ok(report)
}

pub fn cmd_fit(input: &Path, j: usize, mode: &str, geometry: Option<&Path>, out: &Path) -> CliResult<()> {
    let mode = FitMode::parse(mode)?;
    let results = read_results(input)?;
    let geom = geometry.map(read_domain).transpose()?;
    let report = fit_results(&results, j, mode, geom.as_ref().map(|g| &g.1))?;
    write_json(out, &report)
}

pub fn geometry_checks(id: &str, spec: &DomainSpec, checks: &str) -> CliResult<Vec<GeomCheckReport>> {
    let mut out = Vec::new();
    for name in checks.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let report = match name {
            "divergence" => GeomCheckReport::divergence(id, &check_divergence_identity(spec, GEOM_QUADRATURE)?),
            "minkowski" => GeomCheckReport::minkowski(id, &check_minkowski(spec, GEOM_QUADRATURE)?),
            "hmax-bound" => GeomCheckReport::hmax_bound(id, &check_hmax_bound(spec, GEOM_QUADRATURE)?, GEOM_QUADRATURE),
            other => {
                return Err(CliError::Config(format!(
                    "unknown check '{other}' (divergence, minkowski, hmax-bound)"
                )))
            }
        };
        out.push(report);
    }
    if out.is_empty() {
        return Err(CliError::Config("no checks requested".into()));
    }
    Ok(out)
}

pub fn cmd_geom(domain: &Path, checks: &str, out: &Path) -> CliResult<()> {
    let (id, spec) = read_domain(domain)?;
    write_json(out, &geometry_checks(&id, &spec, checks)?)
}

pub fn cmd_compare(a: &Path, b: &Path, j: usize, out: &Path) -> CliResult<()> {
    let ra = read_results(a)?;
    let rb = read_results(b)?;
    write_json(out, &compare_domains(&ra, &rb, j)?)
}

/// Runs `iters` perturbation steps; returns the final spec and per-step
/// `(eps_used, h_max_after, area_after)`.
pub fn perturb_iterations(spec: &DomainSpec, eps: f64, iters: usize) -> CliResult<(DomainSpec, Vec<(f64, f64, f64)>)> {
    let mut cur = spec.clone();
    let mut history = Vec::with_capacity(iters);
    for _ in 0..iters {
        let step = perturb_reduce_hmax(&cur, eps)?;
        history.push((step.eps_used, step.h_max_after, step.area_after));
        cur = step.spec;
    }
    Ok((cur, history))
}

pub fn cmd_perturb(domain: &Path, eps: f64, iters: usize, out: &Path) -> CliResult<()> {
    let (_, spec) = read_domain(domain)?;
    let (fin, history) = perturb_iterations(&spec, eps, iters)?;
    for (k, (e, h, a)) in history.iter().enumerate() {
        println!("step {} eps {e:?} h_max {h:?} area {a:?}", k + 1);
    }
    write_json(out, &fin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    EigCurve,
    CCurve,
    Geometry,
}

impl PlotKind {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "eig-curve" => Ok(PlotKind::EigCurve),
            "c-curve" => Ok(PlotKind::CCurve),
            "geometry" => Ok(PlotKind::Geometry),
            other => Err(CliError::Config(format!("unknown plot kind '{other}' (eig-curve, c-curve, geometry)"))),
        }
    }
}

fn curves_by_index(results: &[SpectralResult], f: impl Fn(&SpectralResult) -> f64) -> Vec<Series> {
    let mut keys: Vec<(String, usize)> = results.iter().map(|r| (r.domain_id.clone(), r.j)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(id, j)| {
            let mut points: Vec<(f64, f64)> =
                results.iter().filter(|r| r.domain_id == id && r.j == j).map(|r| (r.alpha, f(r))).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label: format!("{id} j={j}"), points, markers: true }
        })
        .collect()
}

pub fn eig_curve_plot(results: &[SpectralResult]) -> Plot {
    let log_x = results.iter().all(|r| r.alpha > 0.0);
    Plot {
        title: "E_j + α² against α".into(),
        x_label: "α".into(),
        y_label: "E_j + α²".into(),
        series: curves_by_index(results, |r| r.energy + r.alpha * r.alpha),
        log_x,
        equal_aspect: false,
    }
}

pub fn c_curve_plot(results: &[SpectralResult]) -> Plot {
    let positive: Vec<SpectralResult> = results.iter().filter(|r| r.alpha > 0.0).cloned().collect();
    Plot {
        title: "c(α) = −(E_j + α²)/α".into(),
        x_label: "α".into(),
        y_label: "c(α)".into(),
        series: curves_by_index(&positive, |r| -(r.energy + r.alpha * r.alpha) / r.alpha),
        log_x: true,
        equal_aspect: false,
    }
}

/// Boundary cross-section in the plane (meridian plane for 3D domains).
pub fn geometry_plot(id: &str, spec: &DomainSpec) -> Plot {
    const N: usize = 360;
    let circle = |r: f64| -> Vec<(f64, f64)> {
        (0..=N).map(|i| 2.0 * PI * i as f64 / N as f64).map(|t| (r * t.cos(), r * t.sin())).collect()
    };
    let series = match spec {
        DomainSpec::Star2D(r) => {
            let pts = (0..=N).map(|i| 2.0 * PI * i as f64 / N as f64).map(|t| (r.value(t) * t.cos(), r.value(t) * t.sin()));
            vec![Series { label: id.to_string(), points: pts.collect(), markers: false }]
        }
        DomainSpec::Ball { radius, .. } => vec![Series { label: id.to_string(), points: circle(*radius), markers: false }],
        DomainSpec::Shell { inner, outer, .. } => vec![
            Series { label: format!("{id} outer"), points: circle(*outer), markers: false },
            Series { label: format!("{id} inner"), points: circle(*inner), markers: false },
        ],
        DomainSpec::Revolution(p) => {
            let r = p.series();
            // meridian φ ∈ [0, π] on the right, mirrored on the left
            let pts = (0..=N).map(|i| 2.0 * PI * i as f64 / N as f64).map(|t| {
                let phi = if t <= PI { t } else { 2.0 * PI - t };
                let x = r.value(phi) * phi.sin();
                let z = r.value(phi) * phi.cos();
                (if t <= PI { x } else { -x }, z)
            });
            vec![Series { label: id.to_string(), points: pts.collect(), markers: false }]
        }
    };
    Plot {
        title: format!("{} boundary ({})", id, spec.kind_name()),
        x_label: "x".into(),
        y_label: if spec.dim() == 2 { "y".into() } else { "z".into() },
        series,
        log_x: false,
        equal_aspect: true,
    }
}

pub fn cmd_plot(input: &Path, kind: &str, out: &Path) -> CliResult<()> {
    let plot = match PlotKind::parse(kind)? {
        PlotKind::EigCurve => eig_curve_plot(&read_results(input)?),
        PlotKind::CCurve => c_curve_plot(&read_results(input)?),
        PlotKind::Geometry => {
            let spec: DomainSpec = read_json(input)?;
            let id = input.file_stem().and_then(|s| s.to_str()).unwrap_or("domain");
            geometry_plot(id, &spec)
        }
    };
    write_text(out, &plot.render())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_domain_compatibility() {
        let ball = DomainSpec::ball(3, 1.0);
        let disk = DomainSpec::disk(1.0);
        assert!(compute_eigenvalues("b", &ball, &[1.0], 1, EigMethod::Fem, Preset::Coarse).is_err());
        assert!(compute_eigenvalues("d", &disk, &[1.0], 1, EigMethod::Radial, Preset::Coarse).is_err());
        let rows = compute_eigenvalues("b", &ball, &[10.0, 20.0], 3, EigMethod::Radial, Preset::Coarse).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.windows(2).all(|w| (w[0].alpha, w[0].j) < (w[1].alpha, w[1].j)));
    }

    #[test]
    fn unknown_names_are_config_errors() {
        assert!(matches!(EigMethod::parse("exact"), Err(CliError::Config(_))));
        assert!(matches!(FitMode::parse("slope"), Err(CliError::Config(_))));
        assert!(matches!(PlotKind::parse("bar"), Err(CliError::Config(_))));
        assert!(geometry_checks("d", &DomainSpec::disk(1.0), "volume").is_err());
    }

    #[test]
    fn geometry_checks_on_disk() {
        let reps = geometry_checks("d", &DomainSpec::disk(1.0), "divergence,minkowski,hmax-bound").unwrap();
        assert_eq!(reps.len(), 3);
        assert!(reps.iter().all(|r| r.pass));
    }
}
