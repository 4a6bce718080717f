//! One-dimensional boundary-layer operators on `(0, δ)`.
//!
//! Both act as `−f″` with the Robin condition `f′(0) = −γ f(0)`,
//! `γ = α + m_max`, at the wall. At the far end `T⁺` has `f(δ) = 0` and `T⁻`
//! has `f′(δ) = β f(δ)`. Negative eigenvalues `E = −k²` are roots of
//!
//! * `T⁺`: `k − γ·tanh(kδ) = 0` (eigenfunction `sinh(k(δ − t))`),
//! * `T⁻`: `(k + βγ/k)·tanh(kδ) − (γ + β) = 0`
//!   (eigenfunction `cosh(kt) − (γ/k) sinh(kt)`),
//!
//! and non-negative eigenvalues `E = q²` of their trigonometric analogues.
//! Everything is written with `tanh` so nothing overflows for large `kδ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, scan_sign_changes};
use crate::spectral::{Discretization, Method, SpectralResult};

/// Relative root tolerance in `k` (or `q`).
pub const ROOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model1DParams {
    pub delta: f64,
    pub m_max: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl Model1DParams {
    pub fn new(delta: f64, m_max: f64, beta: f64, alpha: f64) -> Self {
        Self { delta, m_max, beta, alpha }
    }

    /// Effective wall coupling `γ = α + m_max`.
    pub fn gamma(&self) -> f64 {
        self.alpha + self.m_max
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.alpha.is_finite() && self.m_max.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidParameter("non-finite model parameter".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelOperator {
    TMinus,
    TPlus,
}

impl ModelOperator {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelOperator::TMinus => "TMinus",
            ModelOperator::TPlus => "TPlus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model1DResult {
    pub operator: ModelOperator,
    pub params: Model1DParams,
    /// Ascending eigenvalues: every negative one, then non-negative ones up
    /// to the requested count (at least one).
    pub eigenvalues: Vec<f64>,
    /// `k = √(−E)` for each negative eigenvalue.
    pub k_values: Vec<f64>,
    /// `|ψ(0)|²` of the normalised ground state.
    pub trace0: f64,
    /// `C₁/C₂` of the ground state written as `C₁e^{kt} + C₂e^{−kt}`
    /// (NaN when the ground state is not negative).
    pub c1_over_c2: f64,
}

impl Model1DResult {
    pub fn negative_count(&self) -> usize {
        self.k_values.len()
    }

    pub fn results(&self, domain_id: &str) -> Vec<SpectralResult> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &e)| SpectralResult {
                domain_id: domain_id.to_string(),
                alpha: self.params.alpha,
                j: i + 1,
                energy: e,
                method: Method::Model1D,
                disc: Discretization::Model1D { tolerance: ROOT_TOL },
                err_est: 2.0 * ROOT_TOL * e.abs(),
                flagged: false,
            })
            .collect()
    }
}

/// `tanh(x)/x`, finite at `x = 0`.
fn tanhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 3.0 + 2.0 * x.powi(4) / 15.0
    } else {
        x.tanh() / x
    }
}

/// Secular function of `T⁺` in `k`, divided by `k` so that the trivial root
/// `k = 0` is removed: `1 − γδ·tanhc(kδ)`.
pub fn tplus_secular(p: &Model1DParams, k: f64) -> f64 {
    1.0 - p.gamma() * p.delta * tanhc(k * p.delta)
}

/// Secular function of `T⁻` in `k`: `(k + βγ/k)·tanh(kδ) − (γ + β)`.
pub fn tminus_secular(p: &Model1DParams, k: f64) -> f64 {
    let g = p.gamma();
    k * (k * p.delta).tanh() + p.beta * g * p.delta * tanhc(k * p.delta) - (g + p.beta)
}

/// Trigonometric secular functions for `E = q² > 0` in `x = qδ`, scaled to
/// have no poles.
fn tplus_trig(p: &Model1DParams, x: f64) -> f64 {
    // q cos(qδ) − γ sin(qδ) = 0, times δ
    x * x.cos() - p.gamma() * p.delta * x.sin()
}

fn tminus_trig(p: &Model1DParams, x: f64) -> f64 {
    // (βγ − q²) sin(qδ) − (γ + β) q cos(qδ) = 0, times δ²
    let (g, b, d) = (p.gamma(), p.beta, p.delta);
    (b * g * d * d - x * x) * x.sin() - (g + b) * d * x * x.cos()
}

/// Whether `E = 0` is an eigenvalue (linear eigenfunction `1 − γt`).
fn zero_mode(op: ModelOperator, p: &Model1DParams) -> bool {
    let g = p.gamma();
    let tol = 1e-12 * (1.0 + g.abs() * p.delta + p.beta.abs() * p.delta);
    match op {
        ModelOperator::TPlus => (g * p.delta - 1.0).abs() <= tol,
        ModelOperator::TMinus => (p.beta + g - p.beta * g * p.delta).abs() * p.delta <= tol,
    }
}

fn negative_roots(op: ModelOperator, p: &Model1DParams, count: usize) -> Vec<f64> {
    let g = p.gamma();
    let k_hi = g.abs().max(p.beta.abs()) + 10.0 / p.delta;
    let n = (10 * count).max(400);
    let k_lo = 1e-9 * k_hi;
    let f = |k: f64| match op {
        ModelOperator::TPlus => tplus_secular(p, k),
        ModelOperator::TMinus => tminus_secular(p, k),
    };
    let degenerate = zero_mode(op, p);
    let mut ks: Vec<f64> = scan_sign_changes(f, k_lo, k_hi, n)
        .into_iter()
        .map(|br| bisect(f, br, ROOT_TOL, 0.0))
        // at critical coupling the zero mode shows up as a spurious tiny root
        .filter(|&k| !(degenerate && k * p.delta < 1e-4))
        .collect();
    ks.sort_by(|a, b| b.total_cmp(a));
    ks
}

fn nonnegative_levels(op: ModelOperator, p: &Model1DParams, wanted: usize) -> Vec<f64> {
    let mut out = Vec::new();
    if zero_mode(op, p) {
        out.push(0.0);
    }
    let f = |x: f64| match op {
        ModelOperator::TPlus => tplus_trig(p, x),
        ModelOperator::TMinus => tminus_trig(p, x),
    };
    // Between consecutive multiples of π/2 each secular function changes sign
    // at most once away from the origin; sub-scan each half-period anyway.
    let mut a = 1e-9;
    let step = PI / 2.0;
    let mut guard = 0;
    while out.len() < wanted && guard < 100_000 {
        let b = (a / step).floor() * step + step;
        for br in scan_sign_changes(f, a, b, 16) {
            if out.len() < wanted {
                let x = bisect(f, br, ROOT_TOL, 0.0);
                out.push((x / p.delta).powi(2));
            }
        }
        a = b;
        guard += 1;
    }
    out
}

fn solve(op: ModelOperator, p: &Model1DParams, count: usize) -> Result<Model1DResult> {
    p.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if op == ModelOperator::TMinus && p.beta < 0.0 {
        return Err(Error::InvalidParameter(format!("beta must be non-negative, got {}", p.beta)));
    }
    let k_values = negative_roots(op, p, count);
    let mut eigenvalues: Vec<f64> = k_values.iter().map(|k| -k * k).collect();
    let wanted = count.saturating_sub(eigenvalues.len()).max(1);
    eigenvalues.extend(nonnegative_levels(op, p, wanted));
    let (trace0, c1_over_c2) = match k_values.first() {
        Some(&k) => ground_state_trace(op, p, k),
        None => (f64::NAN, f64::NAN),
    };
    Ok(Model1DResult { operator: op, params: *p, eigenvalues, k_values, trace0, c1_over_c2 })
}

/// `|ψ(0)|²` and `C₁/C₂` for the normalised negative ground state.
fn ground_state_trace(op: ModelOperator, p: &Model1DParams, k: f64) -> (f64, f64) {
    let d = p.delta;
    let e2 = (-2.0 * k * d).exp();
    match op {
        ModelOperator::TPlus => {
            // ψ ∝ sinh(k(δ−t)); divide numerator and norm by e^{2kδ}/4
            let num = (1.0 - e2).powi(2);
            let norm = (1.0 - e2 * e2) / (2.0 * k) - 2.0 * d * e2;
            (num / norm, -e2)
        }
        ModelOperator::TMinus => {
            // ψ = C₁e^{kt} + C₂e^{−kt} with C₁ + C₂ = 1, C₁ − C₂ = −γ/k
            let g = p.gamma();
            let c1 = 0.5 * (1.0 - g / k);
            let c2 = 0.5 * (1.0 + g / k);
            // c₁²(e^{2kδ} − 1)/(2k) evaluated in logs; c₁ is exponentially small
            let grow = if c1 == 0.0 {
                0.0
            } else {
                (2.0 * c1.abs().ln() + 2.0 * k * d).exp() * (1.0 - e2) / (2.0 * k)
            };
            let norm = grow + 2.0 * c1 * c2 * d + c2 * c2 * (1.0 - e2) / (2.0 * k);
            (1.0 / norm, c1 / c2)
        }
    }
}

/// Eigenvalues of `T⁺` (Dirichlet at `δ`).
pub fn tplus_eigenvalues(p: &Model1DParams, count: usize) -> Result<Model1DResult> {
    solve(ModelOperator::TPlus, p, count)
}

/// Eigenvalues of `T⁻` (Robin coefficient `β ≥ 0` at `δ`).
pub fn tminus_eigenvalues(p: &Model1DParams, count: usize) -> Result<Model1DResult> {
    solve(ModelOperator::TMinus, p, count)
}

/// One row of [`trace_growth`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub alpha: f64,
    pub trace0: f64,
    pub ratio: f64,
}

/// `(α, |ψ_α(0)|², |ψ_α(0)|²/(2k))` for the `T⁺` ground state along a grid.
pub fn trace_growth(grid: &[Model1DParams]) -> Result<Vec<TraceRow>> {
    grid.iter()
        .map(|p| {
            let r = tplus_eigenvalues(p, 1)?;
            let k = *r
                .k_values
                .first()
                .ok_or_else(|| Error::Precondition(format!("no negative ground state at alpha = {}", p.alpha)))?;
            Ok(TraceRow { alpha: p.alpha, trace0: r.trace0, ratio: r.trace0 / (2.0 * k) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tplus_ground_state_is_exponentially_close() {
        let p = Model1DParams::new(1.0, 0.0, 0.0, 10.0);
        let r = tplus_eigenvalues(&p, 2).unwrap();
        assert_eq!(r.negative_count(), 1);
        assert!((r.eigenvalues[0] + 100.0).abs() < 1e-6);
        assert!(r.eigenvalues[1] >= 0.0);
    }

    #[test]
    fn tplus_no_negative_when_coupling_weak() {
        let p = Model1DParams::new(1.0, 0.0, 0.0, 0.5);
        let r = tplus_eigenvalues(&p, 1).unwrap();
        assert_eq!(r.negative_count(), 0);
        assert!(r.eigenvalues[0] > 0.0);
        assert!(r.trace0.is_nan());
    }

    #[test]
    fn zero_mode_at_critical_coupling() {
        let p = Model1DParams::new(2.0, 0.0, 0.0, 0.5);
        let r = tplus_eigenvalues(&p, 1).unwrap();
        assert_eq!(r.eigenvalues[0], 0.0);
    }

    #[test]
    fn tminus_two_branches() {
        // wall at 0 with γ = 21, far end with β = 5: two localised states
        let p = Model1DParams::new(1.0, 1.0, 5.0, 20.0);
        let r = tminus_eigenvalues(&p, 2).unwrap();
        assert_eq!(r.negative_count(), 2);
        assert!((r.eigenvalues[0] + 441.0).abs() < 1e-3);
        assert!((r.eigenvalues[1] + 25.0).abs() < 1e-2);
    }

    #[test]
    fn trace_ratio_tends_to_one() {
        let grid: Vec<_> = [10.0, 20.0, 40.0].iter().map(|&a| Model1DParams::new(1.0, 0.0, 0.0, a)).collect();
        let rows = trace_growth(&grid).unwrap();
        assert!((rows[2].ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn trace_ratio_for_large_coupling_stays_finite() {
        let p = Model1DParams::new(1.0, 0.0, 0.0, 2000.0);
        let r = tplus_eigenvalues(&p, 1).unwrap();
        assert!((r.trace0 / (2.0 * r.k_values[0]) - 1.0).abs() < 1e-12);
        let q = tminus_eigenvalues(&p, 1).unwrap();
        assert!(q.trace0.is_finite());
    }
}
