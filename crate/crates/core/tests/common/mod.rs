//! Finite-difference oracles shared by the integration tests.
//!
//! Every oracle discretises a 1D quadratic form on a uniform vertex grid
//! (midpoint stiffness, exact dual-cell mass) into a symmetric tridiagonal
//! pencil with diagonal mass, and counts eigenvalues below a shift with a
//! Sturm sequence.

#![allow(dead_code)]

use robin_core::asympt::geometric_grid;
use robin_core::spectral::{Discretization, Method};
use robin_core::SpectralResult;

/// `A u = E M u` with tridiagonal `A` and diagonal `M > 0`.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut prev = 1.0;
        for i in 0..n {
            let d = self.diag[i] / self.mass[i] - sigma;
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / (self.mass[i - 1] * self.mass[i]) };
            let mut pivot = d - e2 / prev;
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (d.abs() + 1.0);
            }
            if pivot < 0.0 {
                count += 1;
            }
            prev = pivot;
        }
        count
    }

    /// Gershgorin interval of the symmetrised matrix.
    fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let c = self.diag[i] / self.mass[i];
            let mut r = 0.0;
            if i > 0 {
                r += (self.off[i - 1] / (self.mass[i - 1] * self.mass[i]).sqrt()).abs();
            }
            if i + 1 < n {
                r += (self.off[i] / (self.mass[i] * self.mass[i + 1]).sqrt()).abs();
            }
            lo = lo.min(c - r);
            hi = hi.max(c + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lowest(&self, count: usize) -> Vec<f64> {
        (0..count).map(|k| self.eigenvalue(k)).collect()
    }
}

/// `∫ w u′² + ∫ V w u² − a₀ w(0) u(0)² − a₁ w(L) u(L)²` against `∫ w u²` on
/// `[0, L]` with `n` cells. `w(r) = r^p`; `dirichlet_left` removes the node
/// at 0, `dirichlet_right` the node at `L`.
pub struct FormSpec {
    pub length: f64,
    pub cells: usize,
    pub weight_power: f64,
    /// Potential `V(r) = coef / r²`.
    pub inverse_square: f64,
    pub robin_left: f64,
    pub robin_right: f64,
    pub dirichlet_left: bool,
    pub dirichlet_right: bool,
    /// Shifts the grid to `[offset, offset + L]`.
    pub offset: f64,
}

/// `∫_a^b r^p dr`.
fn power_integral(a: f64, b: f64, p: f64) -> f64 {
    if (p + 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }
}

pub fn discretise(s: &FormSpec) -> Tridiagonal {
    let n = s.cells;
    let h = s.length / n as f64;
    let r = |i: usize| s.offset + i as f64 * h;
    let w = |x: f64| x.powf(s.weight_power);
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n];
    let mut mass = vec![0.0; n + 1];
    for i in 0..n {
        let k = w(0.5 * (r(i) + r(i + 1))) / h;
        diag[i] += k;
        diag[i + 1] += k;
        off[i] = -k;
    }
    for (i, m) in mass.iter_mut().enumerate() {
        let a = if i == 0 { r(0) } else { r(i) - 0.5 * h };
        let b = if i == n { r(n) } else { r(i) + 0.5 * h };
        *m = power_integral(a, b, s.weight_power);
        if s.inverse_square != 0.0 && a > 0.0 {
            diag[i] += s.inverse_square * power_integral(a, b, s.weight_power - 2.0);
        }
    }
    diag[0] -= s.robin_left * w(r(0));
    diag[n] -= s.robin_right * w(r(n));
    let lo = usize::from(s.dirichlet_left);
    let hi = if s.dirichlet_right { n } else { n + 1 };
    Tridiagonal { diag: diag[lo..hi].to_vec(), off: off[lo..hi - 1].to_vec(), mass: mass[lo..hi].to_vec() }
}

/// `−f″` on `(0, δ)` with `f′(0) = −γ f(0)` and either `f(δ) = 0` (`beta`
/// is `None`) or `f′(δ) = β f(δ)`.
pub fn model_fd(delta: f64, gamma: f64, beta: Option<f64>, cells: usize) -> Tridiagonal {
    discretise(&FormSpec {
        length: delta,
        cells,
        weight_power: 0.0,
        inverse_square: 0.0,
        robin_left: gamma,
        robin_right: beta.unwrap_or(0.0),
        dirichlet_left: false,
        dirichlet_right: beta.is_none(),
        offset: 0.0,
    })
}

/// Angular-momentum-`l` radial operator on a ball of radius `radius` in
/// `R^dim` with `u′(R) = α u(R)`.
pub fn ball_fd(dim: usize, radius: f64, alpha: f64, l: usize, cells: usize) -> Tridiagonal {
    let nu = dim as f64;
    let lf = l as f64;
    discretise(&FormSpec {
        length: radius,
        cells,
        weight_power: nu - 1.0,
        inverse_square: lf * (lf + nu - 2.0),
        robin_left: 0.0,
        robin_right: alpha,
        dirichlet_left: l > 0,
        dirichlet_right: false,
        offset: 0.0,
    })
}

/// Lowest `count` ball eigenvalues with multiplicity, Richardson-combined
/// from `cells` and `2·cells`.
pub fn ball_fd_spectrum(dim: usize, radius: f64, alpha: f64, count: usize, cells: usize) -> Vec<f64> {
    let mut all = Vec::new();
    for l in 0..=count + 2 {
        let coarse = ball_fd(dim, radius, alpha, l, cells / 2).lowest(count);
        let fine = ball_fd(dim, radius, alpha, l, cells).lowest(count);
        let mult = harmonic_dimension(l, dim);
        for (c, f) in coarse.iter().zip(&fine) {
            let e = (4.0 * f - c) / 3.0;
            all.extend(std::iter::repeat_n(e, mult));
        }
    }
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    all
}

pub fn harmonic_dimension(l: usize, dim: usize) -> usize {
    if dim == 2 {
        return if l == 0 { 1 } else { 2 };
    }
    let binom = |n: usize, k: usize| -> usize { (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1)) };
    binom(l + dim - 1, dim - 1) - if l >= 2 { binom(l + dim - 3, dim - 1) } else { 0 }
}

pub fn synthetic_curve(c: f64, r: f64, p: f64, a: f64, b: f64, n: usize) -> Vec<SpectralResult> {
    geometric_grid(a, b, n)
        .into_iter()
        .map(|alpha| SpectralResult {
            domain_id: "synthetic".into(),
            alpha,
            j: 1,
            energy: -alpha * alpha - c * alpha + r * alpha.powf(p),
            method: Method::Model1D,
            disc: Discretization::Model1D { tolerance: 0.0 },
            err_est: 0.0,
            flagged: false,
        })
        .collect()
}
