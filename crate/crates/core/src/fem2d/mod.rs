//! P1 finite elements for the Robin eigenvalue problem on star-shaped planar
//! domains.
//!
//! The discrete problem is `(K − αB) x = E M x` with stiffness `K`, mass `M`
//! and boundary mass `B`. Eigenvalues on a ladder of uniformly refined meshes
//! are combined by Richardson extrapolation assuming an `O(h²)` error.

pub mod assembly;
pub mod eigen;
pub mod mesh;
pub mod sparse;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::spectral::{Discretization, Method, SpectralResult};

pub use assembly::{assemble, AssembledSystem};
pub use eigen::{lowest_eigenpairs, EigenOptions, EigenPairs};
pub use mesh::{build_mesh, Mesh2D, MeshParams};

/// Eigenvalues of one assembled system.
#[derive(Debug, Clone)]
pub struct FemSolution {
    pub alpha: f64,
    pub energies: Vec<f64>,
    pub residuals: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub converged: bool,
    pub shift: f64,
}

/// Shift below the ground state from the crude bound `E_1 ≥ −(α + 2/ρ)²`.
pub fn default_shift(alpha: f64, inradius: f64) -> f64 {
    -(alpha + 2.0 / inradius).powi(2)
}

/// The `count` lowest eigenpairs of `(K − αB, M)`. `inradius` sets the shift.
pub fn solve_lowest(sys: &AssembledSystem, alpha: f64, count: usize, inradius: f64) -> Result<FemSolution> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be a finite non-negative number, got {alpha}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if !(inradius > 0.0) {
        return Err(Error::InvalidParameter(format!("inradius must be positive, got {inradius}")));
    }
    let a = sys.robin_operator(alpha);
    let pairs = lowest_eigenpairs(&a, &sys.mass, default_shift(alpha, inradius), &sys.ordering, EigenOptions::new(count))?;
    Ok(FemSolution {
        alpha,
        energies: pairs.values,
        residuals: pairs.residuals,
        vectors: pairs.vectors,
        converged: pairs.converged,
        shift: pairs.shift,
    })
}

/// Builds, assembles and solves on one mesh.
pub fn solve_on_mesh(spec: &DomainSpec, params: MeshParams, alpha: f64, count: usize) -> Result<(Mesh2D, FemSolution)> {
    let mesh = build_mesh(spec, params)?;
    let sys = assemble(&mesh)?;
    let sol = solve_lowest(&sys, alpha, count, spec.inradius_estimate())?;
    Ok((mesh, sol))
}

/// Single-mesh results; the error estimate is the eigenvalue residual only.
pub fn single_mesh_results(domain_id: &str, mesh: &Mesh2D, sol: &FemSolution) -> Vec<SpectralResult> {
    let h = mesh.max_edge();
    sol.energies
        .iter()
        .zip(&sol.residuals)
        .enumerate()
        .map(|(i, (&e, &r))| SpectralResult {
            domain_id: domain_id.to_string(),
            alpha: sol.alpha,
            j: i + 1,
            energy: e,
            method: Method::Fem2D,
            disc: Discretization::Fem { h, dofs: mesh.vertices.len(), order: None },
            err_est: r,
            flagged: !sol.converged,
        })
        .collect()
}

/// Named mesh ladders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Coarse,
    Medium,
    Fine,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "coarse" => Some(Preset::Coarse),
            "medium" => Some(Preset::Medium),
            "fine" => Some(Preset::Fine),
            _ => None,
        }
    }

    /// Base `(n_angular, n_radial)` of the coarsest ladder level.
    pub fn base(&self) -> (usize, usize) {
        match self {
            Preset::Coarse => (32, 4),
            Preset::Medium => (48, 6),
            Preset::Fine => (64, 8),
        }
    }

    /// Three-level ratio-2 ladder graded for `alpha` on a domain with
    /// largest radius `r_max`.
    pub fn ladder(&self, alpha: f64, r_max: f64) -> Vec<MeshParams> {
        let (na, nr) = self.base();
        let base = MeshParams::for_alpha(na, nr, alpha, r_max);
        (0..3).map(|l| base.refined(l)).collect()
    }
}

/// Largest radius of a `Star2D` boundary.
pub fn max_radius(spec: &DomainSpec) -> Result<f64> {
    match spec {
        DomainSpec::Star2D(r) => {
            Ok((0..4096).map(|i| r.value(2.0 * std::f64::consts::PI * i as f64 / 4096.0)).fold(f64::MIN, f64::max))
        }
        other => Err(Error::InvalidDomain(format!("finite elements need a star2d domain, got {}", other.kind_name()))),
    }
}

/// One level of a ladder: the mesh data and eigenvalues.
#[derive(Debug, Clone)]
pub struct LadderLevel {
    pub h: f64,
    pub dofs: usize,
    pub energies: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Extrapolated value of one eigenvalue from three levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    pub err_est: f64,
    /// `log₂` of the ratio of successive differences, when monotone.
    pub order: Option<f64>,
    pub monotone: bool,
}

/// Richardson step for values on meshes `h, h/2, h/4` assuming `O(h²)`.
/// Non-monotone sequences return the finest value with an inflated error.
pub fn richardson_h2(coarse: f64, mid: f64, fine: f64) -> Extrapolated {
    let d1 = coarse - mid;
    let d2 = mid - fine;
    if d1 * d2 > 0.0 && d2.abs() < d1.abs() {
        let value = fine - d2 / 3.0;
        Extrapolated { value, err_est: (fine - value).abs(), order: Some((d1 / d2).log2()), monotone: true }
    } else if d1 == 0.0 && d2 == 0.0 {
        Extrapolated { value: fine, err_est: 0.0, order: None, monotone: true }
    } else {
        Extrapolated { value: fine, err_est: 3.0 * d1.abs().max(d2.abs()), order: None, monotone: false }
    }
}

/// Solves every ladder level (concurrently) and extrapolates each of the
/// `count` lowest eigenvalues from the three finest levels.
pub fn refine_and_extrapolate(
    spec: &DomainSpec,
    domain_id: &str,
    alpha: f64,
    count: usize,
    ladder: &[MeshParams],
) -> Result<Vec<SpectralResult>> {
    Ok(extrapolate_levels(domain_id, alpha, count, &solve_ladder(spec, alpha, count, ladder)?))
}

pub fn solve_ladder(spec: &DomainSpec, alpha: f64, count: usize, ladder: &[MeshParams]) -> Result<Vec<LadderLevel>> {
    if ladder.len() < 3 {
        return Err(Error::InvalidParameter(format!("a ladder needs at least 3 meshes, got {}", ladder.len())));
    }
    for w in ladder.windows(2) {
        let same_base = MeshParams { refine: 0, ..w[0] } == MeshParams { refine: 0, ..w[1] };
        if !same_base || w[1].refine != w[0].refine + 1 {
            return Err(Error::InvalidParameter("ladder levels must be successive ratio-2 refinements".into()));
        }
    }
    ladder
        .par_iter()
        .map(|&p| {
            let (mesh, sol) = solve_on_mesh(spec, p, alpha, count)?;
            Ok(LadderLevel {
                h: mesh.max_edge(),
                dofs: mesh.vertices.len(),
                energies: sol.energies,
                residuals: sol.residuals,
                converged: sol.converged,
            })
        })
        .collect()
}

/// Eigenvalues on `levels` successive red refinements of one mesh. The
/// polygon stays fixed, so the P1 spaces are nested and every eigenvalue is
/// non-increasing along the sequence.
pub fn solve_nested(spec: &DomainSpec, params: MeshParams, alpha: f64, count: usize, levels: usize) -> Result<Vec<LadderLevel>> {
    let mut meshes = vec![build_mesh(spec, params)?];
    for _ in 1..levels {
        let next = meshes.last().unwrap().red_refined();
        meshes.push(next);
    }
    meshes
        .par_iter()
        .map(|mesh| {
            let sol = solve_lowest(&assemble(mesh)?, alpha, count, spec.inradius_estimate())?;
            Ok(LadderLevel {
                h: mesh.max_edge(),
                dofs: mesh.vertices.len(),
                energies: sol.energies,
                residuals: sol.residuals,
                converged: sol.converged,
            })
        })
        .collect()
}

pub fn extrapolate_levels(domain_id: &str, alpha: f64, count: usize, levels: &[LadderLevel]) -> Vec<SpectralResult> {
    let n = levels.len();
    let (c, m, f) = (&levels[n - 3], &levels[n - 2], &levels[n - 1]);
    (0..count)
        .map(|i| {
            let x = richardson_h2(c.energies[i], m.energies[i], f.energies[i]);
            SpectralResult {
                domain_id: domain_id.to_string(),
                alpha,
                j: i + 1,
                energy: x.value,
                method: Method::Fem2D,
                disc: Discretization::Fem { h: f.h, dofs: f.dofs, order: x.order },
                err_est: x.err_est + f.residuals[i],
                flagged: !(c.converged && m.converged && f.converged),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::ball_negative_spectrum;

    #[test]
    fn neumann_ground_state_is_constant() {
        let spec = DomainSpec::star2d(vec![1.0, 0.0, 0.15], vec![]);
        let (_, sol) = solve_on_mesh(&spec, MeshParams::new(32, 4, 0.7, 2), 0.0, 2).unwrap();
        assert!(sol.energies[0].abs() < 1e-9);
        let v = &sol.vectors[0];
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!(v.iter().all(|x| (x - mean).abs() < 1e-6 * mean.abs()));
        assert!(sol.energies[1] > 0.1);
    }

    #[test]
    fn disk_matches_radial_oracle() {
        let spec = DomainSpec::disk(1.0);
        let alpha = 1.0;
        let exact = ball_negative_spectrum(2, 1.0, alpha, 1).unwrap().energies()[0];
        let out = refine_and_extrapolate(&spec, "disk", alpha, 3, &Preset::Coarse.ladder(alpha, 1.0)).unwrap();
        assert!((out[0].energy - exact).abs() < 1e-4, "{} vs {exact}", out[0].energy);
        // ℓ = 1 pair
        assert!((out[1].energy - out[2].energy).abs() < 1e-8);
    }

    #[test]
    fn richardson_recovers_quadratic_model() {
        let f = |h: f64| -2.0 + 0.7 * h * h;
        let x = richardson_h2(f(0.4), f(0.2), f(0.1));
        assert!((x.value + 2.0).abs() < 1e-14);
        assert!((x.order.unwrap() - 2.0).abs() < 1e-12);
        let bad = richardson_h2(1.0, 0.5, 0.7);
        assert!(!bad.monotone);
        assert_eq!(bad.value, 0.7);
        assert!(bad.err_est >= 1.5);
    }

    #[test]
    fn ladder_validation() {
        let spec = DomainSpec::disk(1.0);
        let l = Preset::Coarse.ladder(1.0, 1.0);
        assert!(solve_ladder(&spec, 1.0, 1, &l[..2]).is_err());
        assert!(solve_ladder(&spec, 1.0, 1, &[l[0], l[2], l[2].refined(3)]).is_err());
    }
}
