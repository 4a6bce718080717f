//! Two-term asymptotics `E_j(α) = −α² − c·α + O(α^p)` read off computed
//! eigenvalue curves, and comparison of curves for two domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralResult;

/// Remainder exponent assumed by default when accelerating `c(α)`.
pub const DEFAULT_EXPONENT: f64 = 2.0 / 3.0;
/// Exponents used for the sensitivity spread of `c_hat`.
pub const SENSITIVITY_EXPONENTS: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub j: usize,
    /// Estimate of the coefficient of `α`.
    pub c_hat: f64,
    pub c_err: f64,
    /// Fitted remainder exponent, when one was estimated.
    pub remainder_exponent_hat: Option<f64>,
    pub exponent_err: Option<f64>,
    pub alpha_window: (f64, f64),
    pub points_used: usize,
    /// `(assumed exponent, c estimate)` for every exponent tried.
    pub sensitivity: Vec<(f64, f64)>,
    /// Non-monotone `c(α)` beyond noise, or an inconclusive exponent fit.
    pub flagged: bool,
}

/// Ordinary least-squares line `y = a + b x` with the standard error of `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_err: f64,
    pub intercept_err: f64,
}

pub fn least_squares_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientData(format!("line fit needs at least 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("line fit needs distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_err, intercept_err) = if n > 2 {
        let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        let s2 = ssr / (nf - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / nf + mx * mx / sxx)).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(LineFit { intercept, slope, slope_err, intercept_err })
}

/// Points `(α, E, err)` of one eigenvalue index, sorted by `α`.
fn curve(results: &[SpectralResult]) -> Result<(usize, Vec<(f64, f64, f64)>)> {
    let j = results.first().ok_or_else(|| Error::InsufficientData("no results".into()))?.j;
    if results.iter().any(|r| r.j != j) {
        return Err(Error::InvalidParameter("results mix several eigenvalue indices".into()));
    }
    let mut pts: Vec<_> = results.iter().map(|r| (r.alpha, r.energy, r.err_est)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter("duplicate alpha values".into()));
    }
    Ok((j, pts))
}

/// `c(α) = −(E + α²)/α`.
pub fn linear_coefficient_sequence(alpha: f64, energy: f64) -> f64 {
    -(energy + alpha * alpha) / alpha
}

/// Richardson step in `α` on the two largest values of the curve under the
/// model `c(α) = c + a·α^{p−1}`. Returns the limit and the weights applied
/// to the last two values. `p = 1` makes the model degenerate and the value
/// at the largest `α` is returned unchanged.
pub fn accelerate(alphas: &[f64], cs: &[f64], p: f64) -> Result<(f64, [f64; 2])> {
    let n = alphas.len();
    if n < 2 || cs.len() != n {
        return Err(Error::InsufficientData("acceleration needs two points".into()));
    }
    if (p - 1.0).abs() < 1e-12 {
        return Ok((cs[n - 1], [0.0, 1.0]));
    }
    let x1 = alphas[n - 2].powf(p - 1.0);
    let x2 = alphas[n - 1].powf(p - 1.0);
    let w = [-x2 / (x1 - x2), x1 / (x1 - x2)];
    Ok((w[0] * cs[n - 2] + w[1] * cs[n - 1], w))
}

/// Remainder exponent `p` read off the three largest `α`: the exponent for
/// which `c + a·α^{p−1}` passes through all three values of `c(α)`. `None`
/// when the two differences are not of one sign, are within `noise`, or no
/// `p ∈ [−2, 0.98]` fits.
pub fn local_exponent(alphas: &[f64], cs: &[f64], noise: &[f64]) -> Option<f64> {
    let n = alphas.len();
    if n < 3 || cs.len() != n || noise.len() != n {
        return None;
    }
    let (a, c, e) = (&alphas[n - 3..], &cs[n - 3..], &noise[n - 3..]);
    let (d1, d2) = (c[1] - c[0], c[2] - c[1]);
    let floor = 4.0 * (e[0] + 2.0 * e[1] + e[2]) + 1e-13 * c[2].abs();
    if d1.abs() <= floor || d2.abs() <= floor || d1.signum() != d2.signum() {
        return None;
    }
    let target = d1 / d2;
    let g = |s: f64| (a[1].powf(s) - a[0].powf(s)) / (a[2].powf(s) - a[1].powf(s)) - target;
    let (mut lo, mut hi) = (-3.0, -0.02);
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) || glo.signum() == ghi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(1.0 + 0.5 * (lo + hi))
}

/// Estimates the coefficient of `α` for one eigenvalue index. Needs at least
/// 4 values of `α` spanning a factor of 4. The remainder exponent is read off
/// the three largest `α` when the data allow it and defaults to
/// [`DEFAULT_EXPONENT`] otherwise.
pub fn fit_linear_coefficient(results: &[SpectralResult]) -> Result<AsymptoticFit> {
    let (_, pts) = curve(results)?;
    let alphas: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let cs: Vec<f64> = pts.iter().map(|p| linear_coefficient_sequence(p.0, p.1)).collect();
    let noise: Vec<f64> = pts.iter().map(|p| p.2 / p.0.abs().max(f64::MIN_POSITIVE)).collect();
    let p = local_exponent(&alphas, &cs, &noise).unwrap_or(DEFAULT_EXPONENT);
    fit_linear_coefficient_with(results, p)
}

/// As [`fit_linear_coefficient`] with an explicit primary remainder exponent.
pub fn fit_linear_coefficient_with(results: &[SpectralResult], exponent: f64) -> Result<AsymptoticFit> {
    let (j, pts) = curve(results)?;
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 alpha values, got {}", pts.len())));
    }
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    if !(lo > 0.0) || hi < 4.0 * lo {
        return Err(Error::InsufficientData(format!("alpha window [{lo}, {hi}] must be positive and span a factor of 4")));
    }
    let alphas: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let cs: Vec<f64> = pts.iter().map(|p| linear_coefficient_sequence(p.0, p.1)).collect();
    let noise: Vec<f64> = pts.iter().map(|p| p.2 / p.0).collect();

    let (c_hat, w) = accelerate(&alphas, &cs, exponent)?;
    let mut sensitivity = vec![(exponent, c_hat)];
    let others = std::iter::once(DEFAULT_EXPONENT).chain(SENSITIVITY_EXPONENTS);
    for p in others.filter(|&p| (p - exponent).abs() > 1e-12) {
        sensitivity.push((p, accelerate(&alphas, &cs, p)?.0));
    }
    let spread = sensitivity.iter().map(|&(_, c)| (c - c_hat).abs()).fold(0.0, f64::max);
    let n = noise.len();
    let propagated = w[0].abs() * noise[n - 2] + w[1].abs() * noise[n - 1];

    // c(α) should approach its limit monotonically once α is large
    let diffs: Vec<f64> = cs.windows(2).map(|w| w[1] - w[0]).collect();
    let tol: Vec<f64> = noise.windows(2).map(|w| 2.0 * (w[0] + w[1])).collect();
    let ups = diffs.iter().zip(&tol).any(|(d, t)| *d > *t);
    let downs = diffs.iter().zip(&tol).any(|(d, t)| *d < -*t);

    Ok(AsymptoticFit {
        j,
        c_hat,
        c_err: spread + propagated,
        remainder_exponent_hat: None,
        exponent_err: None,
        alpha_window: (lo, hi),
        points_used: pts.len(),
        sensitivity,
        flagged: ups && downs,
    })
}

/// Slope of `log|E + α² + c_ref·α|` against `log α`. Points whose remainder
/// is within ten times their error estimate (or `1e-13·α²`) are dropped; the
/// fit is flagged inconclusive when fewer than 4 remain.
pub fn fit_remainder_exponent(results: &[SpectralResult], c_ref: f64) -> Result<AsymptoticFit> {
    let (j, pts) = curve(results)?;
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 alpha values, got {}", pts.len())));
    }
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    if !(lo > 0.0) {
        return Err(Error::InvalidParameter("alpha values must be positive".into()));
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &(a, e, err) in &pts {
        let rem = (e + a * a + c_ref * a).abs();
        if rem > 10.0 * err && rem > 1e-13 * a * a {
            x.push(a.ln());
            y.push(rem.ln());
        }
    }
    let base = AsymptoticFit {
        j,
        c_hat: c_ref,
        c_err: 0.0,
        remainder_exponent_hat: None,
        exponent_err: None,
        alpha_window: (lo, hi),
        points_used: x.len(),
        sensitivity: Vec::new(),
        flagged: true,
    };
    if x.len() < 4 {
        return Ok(base);
    }
    let line = least_squares_line(&x, &y)?;
    Ok(AsymptoticFit {
        remainder_exponent_hat: Some(line.slope),
        exponent_err: Some(line.slope_err),
        flagged: false,
        ..base
    })
}

/// Empirical location of the last crossing of two curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingBracket {
    /// Largest grid `α` before the last sign change; `None` when the sign
    /// never changes on the grid.
    pub lower: Option<f64>,
    /// First grid `α` from which the final sign holds.
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub j: usize,
    pub alphas: Vec<f64>,
    /// `E_j^A(α) − E_j^B(α)`.
    pub differences: Vec<f64>,
    /// Sign of each difference, `0` where it is below the combined error.
    pub signs: Vec<i8>,
    pub alpha0: Option<CrossingBracket>,
    /// Large-`α` sign of `E^A − E^B` predicted from the fitted coefficients:
    /// `−sign(c_A − c_B)`.
    pub predicted_sign: Option<i8>,
    /// Whether the final observed sign equals the prediction.
    pub agrees: Option<bool>,
    pub c_hat_a: Option<f64>,
    pub c_hat_b: Option<f64>,
    /// Every difference lies within the combined error estimates.
    pub inconclusive: bool,
}

/// Compares two eigenvalue curves on a common `α` grid.
pub fn compare_domains(a: &[SpectralResult], b: &[SpectralResult], j: usize) -> Result<CrossingReport> {
    let pick = |rs: &[SpectralResult]| -> Vec<SpectralResult> { rs.iter().filter(|r| r.j == j).cloned().collect() };
    let (ra, rb) = (pick(a), pick(b));
    if ra.is_empty() || rb.is_empty() {
        return Err(Error::InsufficientData(format!("no results for j = {j}")));
    }
    let (_, pa) = curve(&ra)?;
    let (_, pb) = curve(&rb)?;
    if pa.len() != pb.len() || pa.iter().zip(&pb).any(|(x, y)| (x.0 - y.0).abs() > 1e-12 * x.0.abs().max(1.0)) {
        return Err(Error::Precondition("curves are not on a common alpha grid".into()));
    }
    let alphas: Vec<f64> = pa.iter().map(|p| p.0).collect();
    let differences: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x.1 - y.1).collect();
    let signs: Vec<i8> = pa
        .iter()
        .zip(&pb)
        .zip(&differences)
        .map(|((x, y), d)| if d.abs() <= x.2 + y.2 { 0 } else if *d > 0.0 { 1 } else { -1 })
        .collect();
    let inconclusive = signs.iter().all(|&s| s == 0);

    let alpha0 = signs.iter().rposition(|&s| s != 0).map(|last| {
        let fin = signs[last];
        // walk back over the final run of matching (or unresolved) signs
        let mut start = last;
        while start > 0 && (signs[start - 1] == fin || signs[start - 1] == 0) {
            start -= 1;
        }
        while signs[start] == 0 {
            start += 1;
        }
        CrossingBracket { lower: if start == 0 { None } else { Some(alphas[start - 1]) }, upper: alphas[start] }
    });

    let fit = |r: &[SpectralResult]| fit_linear_coefficient(r).ok();
    let (fa, fb) = (fit(&ra), fit(&rb));
    let predicted_sign = match (&fa, &fb) {
        (Some(x), Some(y)) if x.c_hat != y.c_hat => Some(if x.c_hat > y.c_hat { -1 } else { 1 }),
        (Some(_), Some(_)) => Some(0),
        _ => None,
    };
    let final_sign = signs.iter().rev().find(|&&s| s != 0).copied().unwrap_or(0);
    let agrees = predicted_sign.map(|p| p == final_sign);
    Ok(CrossingReport {
        j,
        alphas,
        differences,
        signs,
        alpha0,
        predicted_sign,
        agrees,
        c_hat_a: fa.map(|f| f.c_hat),
        c_hat_b: fb.map(|f| f.c_hat),
        inconclusive,
    })
}

/// Fit report as written by the command-line driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub domain_id: String,
    pub j: usize,
    pub c_hat: f64,
    pub c_err: f64,
    pub exponent_hat: Option<f64>,
    pub window: [f64; 2],
    pub verdict: String,
}

impl FitReport {
    /// `target` is the geometric prediction `(ν−1)·H_max`, when known.
    pub fn from_fit(domain_id: &str, fit: &AsymptoticFit, target: Option<f64>) -> Self {
        let verdict = if fit.flagged {
            "flagged".to_string()
        } else {
            match (target, fit.remainder_exponent_hat) {
                (_, Some(_)) => "exponent-estimated".to_string(),
                (Some(t), None) if (fit.c_hat - t).abs() <= fit.c_err.max(0.05 * t.abs()) => "consistent".to_string(),
                (Some(_), None) => "inconsistent".to_string(),
                (None, None) => "estimated".to_string(),
            }
        };
        Self {
            domain_id: domain_id.to_string(),
            j: fit.j,
            c_hat: fit.c_hat,
            c_err: fit.c_err,
            exponent_hat: fit.remainder_exponent_hat,
            window: [fit.alpha_window.0, fit.alpha_window.1],
            verdict,
        }
    }
}

/// Geometric grid of `n` points from `a` to `b`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Discretization, Method};

    fn synthetic(f: impl Fn(f64) -> f64, alphas: &[f64]) -> Vec<SpectralResult> {
        alphas
            .iter()
            .map(|&a| SpectralResult {
                domain_id: "s".into(),
                alpha: a,
                j: 1,
                energy: f(a),
                method: Method::Model1D,
                disc: Discretization::Model1D { tolerance: 0.0 },
                err_est: 0.0,
                flagged: false,
            })
            .collect()
    }

    #[test]
    fn exact_model_recovered() {
        let alphas = geometric_grid(10.0, 1e4, 13);
        let rs = synthetic(|a| -a * a - 3.0 * a + a.powf(2.0 / 3.0), &alphas);
        let fit = fit_linear_coefficient(&rs).unwrap();
        assert!((fit.c_hat - 3.0).abs() < 1e-9);
        let ex = fit_remainder_exponent(&rs, 3.0).unwrap();
        assert!((ex.remainder_exponent_hat.unwrap() - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn window_requirements() {
        let rs = synthetic(|a| -a * a - a, &[10.0, 12.0, 14.0, 16.0, 18.0]);
        assert!(fit_linear_coefficient(&rs).is_err());
        let rs = synthetic(|a| -a * a - a, &[10.0, 40.0, 100.0]);
        assert!(fit_linear_coefficient(&rs).is_err());
    }

    #[test]
    fn noise_floor_is_inconclusive() {
        let alphas = geometric_grid(10.0, 160.0, 9);
        let rs = synthetic(|a| -a * a - 2.0 * a, &alphas);
        let ex = fit_remainder_exponent(&rs, 2.0).unwrap();
        assert!(ex.flagged);
        assert!(ex.remainder_exponent_hat.is_none());
    }

    #[test]
    fn identical_curves_are_inconclusive() {
        let alphas = geometric_grid(10.0, 160.0, 5);
        let rs = synthetic(|a| -a * a - a, &alphas);
        let rep = compare_domains(&rs, &rs, 1).unwrap();
        assert!(rep.differences.iter().all(|d| *d == 0.0));
        assert!(rep.inconclusive);
        assert!(rep.alpha0.is_none());
    }

    #[test]
    fn crossing_bracket() {
        let alphas = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        // difference changes sign between 4 and 8
        let a = synthetic(|x| -x * x - 2.0 * x, &alphas);
        let b = synthetic(|x| -x * x - 1.0 * x - 6.0, &alphas);
        let rep = compare_domains(&a, &b, 1).unwrap();
        assert_eq!(rep.signs, vec![1, 1, 1, -1, -1, -1, -1]);
        assert_eq!(rep.alpha0, Some(CrossingBracket { lower: Some(4.0), upper: 8.0 }));
        assert_eq!(rep.predicted_sign, Some(-1));
        assert_eq!(rep.agrees, Some(true));
    }

    #[test]
    fn line_fit_errors() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let l = least_squares_line(&x, &y).unwrap();
        assert!((l.slope - 2.0).abs() < 1e-14 && (l.intercept - 1.0).abs() < 1e-14);
        assert!(l.slope_err < 1e-12);
        assert!(least_squares_line(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
