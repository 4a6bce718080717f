//! Exponentially scaled modified Bessel functions `e^{−x}I_ν(x)` and
//! `e^{x}K_ν(x)` for real order `ν ≥ 0` and `x > 0`.
//!
//! The main path is Temme's method: `I′_ν/I_ν` from its continued fraction,
//! `K_μ, K_{μ+1}` for `|μ| ≤ 1/2` from Temme's series (`x < 2`) or Steed's
//! continued fraction (`x ≥ 2`), upward recurrence in the order for `K`, and
//! the Wronskian for `I`. The power series and the large-argument expansion
//! are exposed separately and used for cross-validation.

use std::f64::consts::PI;

const EPS: f64 = 1e-15;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 200_000;
const RESCALE: f64 = 1e250;

/// A scaled Bessel value. `underflow` is set when the scaled value is below
/// the smallest normal double and has been returned as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub value: f64,
    pub underflow: bool,
}

impl ScaledValue {
    fn new(value: f64) -> Self {
        if value != 0.0 && value.abs() < f64::MIN_POSITIVE {
            Self { value: 0.0, underflow: true }
        } else {
            Self { value, underflow: value == 0.0 }
        }
    }
}

/// All four scaled quantities `e^{−x}I_ν, e^{−x}I′_ν, e^{x}K_ν, e^{x}K_{ν+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIK {
    pub i: f64,
    pub ip: f64,
    pub k: f64,
    pub k_next: f64,
}

/// `e^{−x}I_ν(x)`.
pub fn bessel_i_scaled(order: f64, x: f64) -> ScaledValue {
    assert!(order >= 0.0 && x > 0.0, "bessel_i_scaled needs order ≥ 0 and x > 0");
    ScaledValue::new(bessel_ik_scaled(order, x).i)
}

/// `e^{x}K_ν(x)`.
pub fn bessel_k_scaled(order: f64, x: f64) -> ScaledValue {
    assert!(order >= 0.0 && x > 0.0, "bessel_k_scaled needs order ≥ 0 and x > 0");
    ScaledValue::new(bessel_ik_scaled(order, x).k)
}

/// `I_{ν+1}(x)/I_ν(x)` by the Gauss continued fraction (modified Lentz).
/// Stable for all `x > 0`; no cancellation at small `x`.
pub fn bessel_i_ratio(order: f64, x: f64) -> f64 {
    // I_{ν+1}/I_ν = 1/(b_1 + 1/(b_2 + …)), b_j = 2(ν+j)/x
    if x == 0.0 {
        return 0.0;
    }
    let tiny = 1e-300;
    let b = |j: usize| 2.0 * (order + j as f64) / x;
    let mut f = b(1);
    if f == 0.0 {
        f = tiny;
    }
    let mut c = f;
    let mut d = 0.0;
    for j in 2..MAX_ITER {
        let bj = b(j);
        d = bj + d;
        if d == 0.0 {
            d = tiny;
        }
        c = bj + 1.0 / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    1.0 / f
}

/// `K_{ν+1}(x)/K_ν(x)`.
pub fn bessel_k_ratio(order: f64, x: f64) -> f64 {
    let v = bessel_ik_scaled(order, x);
    v.k_next / v.k
}

/// Temme's method returning scaled `I_ν, I′_ν, K_ν, K_{ν+1}`.
pub fn bessel_ik_scaled(order: f64, x: f64) -> ScaledIK {
    let xnu = order;
    let nl = (xnu + 0.5) as usize;
    let xmu = xnu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // CF1 for I'_ν / I_ν.
    let mut h = (xnu * xi).max(FPMIN);
    let mut b = xi2 * xnu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    // Downward recurrence to order μ with unnormalised values; rescale to
    // keep the magnitudes finite.
    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let mut ril1 = ril;
    let mut rip1 = ripl;
    let mut fact = xnu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
        if ril.abs() > RESCALE {
            ril /= RESCALE;
            ripl /= RESCALE;
            ril1 /= RESCALE;
            rip1 /= RESCALE;
        }
    }
    let f = ripl / ril;

    let (rkmu, rk1) = if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let scale = x.exp();
        (sum * scale, sum1 * xi2 * scale)
    } else {
        // Steed's CF2, already scaled by e^{x}.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        let h = a1 * h;
        let rkmu = (PI / (2.0 * x)).sqrt() / s;
        (rkmu, rkmu * (xmu + x + 0.5 - h) * xi)
    };

    let rkmup = xmu * xi * rkmu - rk1;
    let rimu = xi / (f * rkmu - rkmup);
    let ri = rimu * ril1 / ril;
    let rip = rimu * rip1 / ril;
    let mut rkmu = rkmu;
    let mut rk1 = rk1;
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    ScaledIK { i: ri, ip: rip, k: rkmu, k_next: rk1 }
}

/// `Γ`-function combinations needed by Temme's series for `|μ| ≤ 1/2`:
/// `(1/Γ(1−μ) − 1/Γ(1+μ))/(2μ)`, `(1/Γ(1−μ) + 1/Γ(1+μ))/2`, `1/Γ(1+μ)`,
/// `1/Γ(1−μ)`, from Chebyshev expansions.
fn temme_gammas(xmu: f64) -> (f64, f64, f64, f64) {
    const C1: [f64; 7] = [
        -1.142022680371168e0,
        6.5165112670737e-3,
        3.087090173086e-4,
        -3.4706269649e-6,
        6.9437664e-9,
        3.67795e-11,
        -1.356e-13,
    ];
    const C2: [f64; 8] = [
        1.843740587300905e0,
        -7.68528408447867e-2,
        1.2719271366546e-3,
        -4.9717367042e-6,
        -3.31261198e-8,
        2.423096e-10,
        -1.702e-13,
        -1.49e-15,
    ];
    let xx = 8.0 * xmu * xmu - 1.0;
    let gam1 = chebyshev(&C1, xx);
    let gam2 = chebyshev(&C2, xx);
    (gam1, gam2, gam2 - xmu * gam1, gam2 + xmu * gam1)
}

fn chebyshev(c: &[f64], y: f64) -> f64 {
    let y2 = 2.0 * y;
    let (mut d, mut dd) = (0.0, 0.0);
    for &cj in c[1..].iter().rev() {
        let sv = d;
        d = y2 * d - dd + cj;
        dd = sv;
    }
    y * d - dd + 0.5 * c[0]
}

/// `ln Γ(z)` for `z > 0` (Lanczos, g = 7).
pub fn ln_gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        return (PI / (PI * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut a = COEF[0];
    let t = z + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `e^{−x}I_ν(x)` from the ascending power series. Accurate for
/// `x² ≲ 4(ν+1)·30`; used as a small-argument reference.
pub fn bessel_i_series_scaled(order: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..10_000 {
        let kf = k as f64;
        term *= q / (kf * (kf + order));
        sum += term;
        if term < EPS * sum {
            break;
        }
    }
    (order * (0.5 * x).ln() - ln_gamma(order + 1.0) - x).exp() * sum
}

/// Large-argument (Hankel) expansions
/// `e^{−x}I_ν(x) ≈ (2πx)^{−1/2} Σ (−1)^k a_k(ν)/x^k` and
/// `e^{x}K_ν(x) ≈ (π/2x)^{1/2} Σ a_k(ν)/x^k`, summed to the smallest term.
/// Returns `(i_scaled, k_scaled)`.
pub fn bessel_ik_asymptotic_scaled(order: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * order * order;
    let mut a = 1.0;
    let mut sum_i = 1.0;
    let mut sum_k = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        if a.abs() >= last || a == 0.0 {
            break;
        }
        last = a.abs();
        sum_k += a;
        sum_i += if k % 2 == 1 { -a } else { a };
        if a.abs() < EPS {
            break;
        }
    }
    (sum_i / (2.0 * PI * x).sqrt(), sum_k * (PI / (2.0 * x)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn half_integer_closed_forms() {
        // I_{1/2}(x) = √(2/(πx)) sinh x, K_{1/2}(x) = √(π/(2x)) e^{−x}
        let x: f64 = 1.0;
        let i = bessel_i_scaled(0.5, x).value;
        let expect = (-x).exp() * (2.0 / (PI * x)).sqrt() * x.sinh();
        assert!(rel(i, expect) < 1e-13, "{i} {expect}");
        assert!(rel(bessel_k_scaled(0.5, 1.0).value, (PI / 2.0).sqrt()) < 1e-13);
        assert!(rel(bessel_k_scaled(0.5, 10.0).value, (PI / 20.0).sqrt()) < 1e-13);
        // I_{3/2}(x) = √(2/(πx)) (cosh x − sinh x / x)
        let x: f64 = 2.0;
        let expect = (-x).exp() * (2.0 / (PI * x)).sqrt() * (x.cosh() - x.sinh() / x);
        assert!(rel(bessel_i_scaled(1.5, x).value, expect) < 1e-13);
        // K_{3/2}(x) = √(π/(2x)) e^{−x}(1 + 1/x)
        let expect = (PI / (2.0 * x)).sqrt() * (1.0 + 1.0 / x);
        assert!(rel(bessel_k_scaled(1.5, x).value, expect) < 1e-13);
    }

    #[test]
    fn i0_at_small_argument_tends_to_one() {
        let v = bessel_i_scaled(0.0, 1e-8).value;
        assert!((v - 1.0).abs() < 1e-7);
    }

    #[test]
    fn ratio_matches_value_quotient() {
        for &(nu, x) in &[(0.0, 0.3), (0.5, 5.0), (3.0, 40.0), (1.0, 150.0), (20.0, 1.5)] {
            let a = bessel_ik_scaled(nu, x).i;
            let b = bessel_ik_scaled(nu + 1.0, x).i;
            assert!(rel(bessel_i_ratio(nu, x), b / a) < 1e-12, "nu {nu} x {x}");
        }
    }

    #[test]
    fn wronskian_holds() {
        // I_ν K_{ν+1} + I_{ν+1} K_ν = 1/x, scale factors cancel
        for &(nu, x) in &[(0.0, 0.5), (0.3, 1.9), (2.5, 2.1), (7.0, 30.0), (50.0, 10.0)] {
            let v = bessel_ik_scaled(nu, x);
            let i_next = bessel_ik_scaled(nu + 1.0, x).i;
            let w = v.i * v.k_next + i_next * v.k;
            assert!(rel(w, 1.0 / x) < 1e-13, "nu {nu} x {x}: {w}");
        }
    }

    #[test]
    fn unscaled_k_decreases_in_x() {
        let mut prev = f64::INFINITY;
        for i in 1..60 {
            let x = 0.1 * i as f64;
            let k = bessel_k_scaled(1.3, x).value * (-x).exp();
            assert!(k < prev);
            prev = k;
        }
    }
}
