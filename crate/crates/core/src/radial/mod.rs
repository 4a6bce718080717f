//! Exact negative Robin spectrum of balls and spherical shells.
//!
//! Separating variables, a mode of angular momentum `ℓ` has radial part
//! `r^{1−ν/2} Z_μ(kr)` with `μ = ν/2 − 1 + ℓ`, `Z ∈ {I, K}` and energy
//! `E = −k²`. The logarithmic derivatives of these radial parts are
//! `ℓ/r + k·I_{μ+1}/I_μ` and `ℓ/r − k·K_{μ+1}/K_μ`, which keeps every
//! secular function free of overflow.

pub mod bessel;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, scan_sign_changes, Bracket};
use crate::spectral::{Discretization, Method, SpectralResult};

use bessel::{bessel_i_ratio, bessel_ik_scaled};

/// Relative tolerance of secular roots in `k`.
pub const ROOT_TOL: f64 = 1e-13;

/// Number of scan cells per unit of `k·outer` used to bracket shell roots.
const SHELL_SCAN_MIN: usize = 2000;

/// One separated eigenvalue with its degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMode {
    pub l: usize,
    pub multiplicity: usize,
    pub k: f64,
    pub energy: f64,
}

/// Modes of a radial spectrum, sorted by energy and expanded to at most
/// `count` entries counted with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpectrum {
    pub alpha: f64,
    /// One entry per eigenvalue (multiplicities expanded), ascending.
    pub levels: Vec<RadialMode>,
    /// Fewer than the requested number of non-positive eigenvalues exist.
    pub truncated: bool,
}

impl RadialSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|m| m.energy).collect()
    }

    pub fn results(&self, domain_id: &str) -> Vec<SpectralResult> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, m)| SpectralResult {
                domain_id: domain_id.to_string(),
                alpha: self.alpha,
                j: i + 1,
                energy: m.energy,
                method: Method::RadialExact,
                disc: Discretization::Radial { l: m.l, multiplicity: m.multiplicity, tolerance: ROOT_TOL },
                err_est: 2.0 * ROOT_TOL * m.energy.abs(),
                flagged: self.truncated,
            })
            .collect()
    }
}

/// Dimension of the space of degree-`l` spherical harmonics in `R^dim`.
pub fn multiplicity(l: usize, dim: usize) -> usize {
    if dim == 2 {
        return if l == 0 { 1 } else { 2 };
    }
    let binom = |n: usize, k: usize| -> usize {
        let mut r: u128 = 1;
        for i in 0..k {
            r = r * (n - i) as u128 / (i as u128 + 1);
        }
        r as usize
    };
    let a = binom(l + dim - 2, l);
    let b = if l == 0 { 0 } else { binom(l + dim - 3, l - 1) };
    a + b
}

fn bessel_order(l: usize, dim: usize) -> f64 {
    0.5 * dim as f64 - 1.0 + l as f64
}

/// Logarithmic derivative of `r^{1−ν/2} I_μ(kr)`.
fn log_deriv_i(l: usize, mu: f64, k: f64, r: f64) -> f64 {
    l as f64 / r + k * bessel_i_ratio(mu, k * r)
}

/// Logarithmic derivative of `r^{1−ν/2} K_μ(kr)`.
fn log_deriv_k(l: usize, mu: f64, k: f64, r: f64) -> f64 {
    let v = bessel_ik_scaled(mu, k * r);
    l as f64 / r - k * v.k_next / v.k
}

fn check_common(dim: usize, alpha: f64, count: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {dim}")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    Ok(())
}

/// Secular function of the ball for angular momentum `l`:
/// `ℓ/R + k·I_{μ+1}(kR)/I_μ(kR) − α`, increasing in `k`.
pub fn ball_secular(dim: usize, radius: f64, alpha: f64, l: usize, k: f64) -> f64 {
    log_deriv_i(l, bessel_order(l, dim), k, radius) - alpha
}

/// Lowest `count` non-positive eigenvalues of the Robin ball of radius
/// `radius` in `R^dim`. Each `ℓ < αR` contributes exactly one negative
/// eigenvalue; `ℓ = αR` contributes the zero eigenvalue of the harmonic
/// polynomial `r^ℓ Y_ℓ`.
pub fn ball_negative_spectrum(dim: usize, radius: f64, alpha: f64, count: usize) -> Result<RadialSpectrum> {
    check_common(dim, alpha, count)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let mut modes: Vec<RadialMode> = Vec::new();
    for l in 0.. {
        let threshold = l as f64 / radius;
        if threshold > alpha * (1.0 + 1e-14) {
            break;
        }
        let mode = if (threshold - alpha).abs() <= 1e-14 * alpha.max(threshold) {
            RadialMode { l, multiplicity: multiplicity(l, dim), k: 0.0, energy: 0.0 }
        } else {
            let g = |k: f64| ball_secular(dim, radius, alpha, l, k);
            let mut k_hi = alpha + (dim as f64 + 1.0) / radius;
            while g(k_hi) <= 0.0 {
                k_hi *= 2.0;
            }
            let k = bisect(g, Bracket { lo: 0.0, hi: k_hi }, ROOT_TOL, 0.0);
            RadialMode { l, multiplicity: multiplicity(l, dim), k, energy: -k * k }
        };
        let stop = enough(&modes, count, mode.energy);
        modes.push(mode);
        if stop {
            break;
        }
    }
    Ok(expand(alpha, modes, count))
}

/// True once `count` levels are already below `next_energy`; energies grow
/// with `ℓ` so no later mode can enter the lowest `count`.
fn enough(modes: &[RadialMode], count: usize, next_energy: f64) -> bool {
    let mut sorted: Vec<&RadialMode> = modes.iter().collect();
    sorted.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut n = 0;
    for m in sorted {
        if m.energy > next_energy {
            break;
        }
        n += m.multiplicity;
    }
    n >= count
}

fn expand(alpha: f64, mut modes: Vec<RadialMode>, count: usize) -> RadialSpectrum {
    modes.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.l.cmp(&b.l)));
    let mut levels = Vec::with_capacity(count);
    'outer: for m in &modes {
        for _ in 0..m.multiplicity {
            if levels.len() == count {
                break 'outer;
            }
            levels.push(*m);
        }
    }
    let truncated = levels.len() < count;
    RadialSpectrum { alpha, levels, truncated }
}

/// Reduced secular function of the shell `inner < r < outer` for angular
/// momentum `l`, with `∂_n u = αu` on both spheres (the outward normal of the
/// inner sphere points towards the centre). The 2×2 determinant in the
/// `I/K` basis is divided by the positive factor `f_I(b) f_K(a)`.
pub fn shell_secular(dim: usize, inner: f64, outer: f64, alpha: f64, l: usize, k: f64) -> f64 {
    let mu = bessel_order(l, dim);
    let li_b = log_deriv_i(l, mu, k, outer);
    let li_a = log_deriv_i(l, mu, k, inner);
    let lk_b = log_deriv_k(l, mu, k, outer);
    let lk_a = log_deriv_k(l, mu, k, inner);
    // K_μ(kb) I_μ(ka) / (I_μ(kb) K_μ(ka)), computed in logs
    let ia = bessel_ik_scaled(mu, k * inner);
    let ib = bessel_ik_scaled(mu, k * outer);
    let log_ratio = ib.k.ln() + ia.i.ln() - ib.i.ln() - ia.k.ln() - 2.0 * k * (outer - inner);
    let ratio = log_ratio.exp();
    (li_b - alpha) * (lk_a + alpha) - ratio * (lk_b - alpha) * (li_a + alpha)
}

/// Lowest `count` negative eigenvalues of the Robin shell. Each `ℓ` has at
/// most two negative eigenvalues (one per boundary sphere).
pub fn shell_negative_spectrum(
    dim: usize,
    inner: f64,
    outer: f64,
    alpha: f64,
    count: usize,
) -> Result<RadialSpectrum> {
    check_common(dim, alpha, count)?;
    if !(inner > 0.0 && inner < outer && outer.is_finite()) {
        return Err(Error::InvalidParameter(format!("shell needs 0 < inner < outer, got {inner}, {outer}")));
    }
    let mut modes: Vec<RadialMode> = Vec::new();
    if alpha == 0.0 {
        return Ok(expand(alpha, modes, count));
    }
    let k_max = alpha + (dim as f64 + 1.0) / inner;
    let n_scan = SHELL_SCAN_MIN.max((20.0 * k_max * outer) as usize);
    for l in 0.. {
        let f = |k: f64| shell_secular(dim, inner, outer, alpha, l, k);
        let k_min = 1e-7 * k_max;
        let brackets = scan_sign_changes(f, k_min, k_max, n_scan);
        if brackets.is_empty() {
            break;
        }
        let mut found: Vec<RadialMode> = brackets
            .into_iter()
            .map(|br| {
                let k = bisect(f, br, ROOT_TOL, 0.0);
                RadialMode { l, multiplicity: multiplicity(l, dim), k, energy: -k * k }
            })
            .collect();
        found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let lowest = found[0].energy;
        let stop = enough(&modes, count, lowest);
        modes.extend(found);
        if stop {
            break;
        }
    }
    Ok(expand(alpha, modes, count))
}

/// Ball spectra over a grid of `α`, evaluated concurrently; output order
/// follows the input grid.
pub fn ball_curve(dim: usize, radius: f64, alphas: &[f64], count: usize) -> Result<Vec<RadialSpectrum>> {
    alphas.par_iter().map(|&a| ball_negative_spectrum(dim, radius, a, count)).collect()
}

/// Shell spectra over a grid of `α`, evaluated concurrently.
pub fn shell_curve(dim: usize, inner: f64, outer: f64, alphas: &[f64], count: usize) -> Result<Vec<RadialSpectrum>> {
    alphas.par_iter().map(|&a| shell_negative_spectrum(dim, inner, outer, a, count)).collect()
}
