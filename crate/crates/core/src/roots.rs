//! Scalar root bracketing, bisection and golden-section search.

/// A sign change of `f` located on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Scans `[a, b]` on `n` equal subintervals and returns every subinterval on
/// which `f` changes sign. An exact zero at a grid node is reported as a
/// degenerate bracket `[x, x]`.
pub fn scan_sign_changes<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Vec<Bracket> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    if f_prev == 0.0 {
        out.push(Bracket { lo: a, hi: a });
    }
    for i in 1..=n {
        let x = if i == n { b } else { a + h * i as f64 };
        let fx = f(x);
        if fx == 0.0 {
            out.push(Bracket { lo: x, hi: x });
        } else if f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0) {
            out.push(Bracket { lo: x_prev, hi: x });
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

/// Bisection on a sign-change bracket until the interval is below
/// `rel_tol·|x| + abs_tol`. Returns the midpoint of the final interval.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, rel_tol: f64, abs_tol: f64) -> f64 {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    if lo == hi {
        return lo;
    }
    let mut f_lo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs() + abs_tol || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a local maximum of `f` on `[a, b]`, stopping
/// when the interval is shorter than `tol`. Returns `(x, f(x))`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // Keep the best point seen at the end of the search.
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 > best.1 { p } else { best })
}

/// Maximises a function sampled on a dense grid, then polishes the best
/// sample with golden-section search on its two neighbouring cells.
pub fn grid_then_golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, tol: f64) -> (f64, f64) {
    let n = n.max(2);
    let h = (b - a) / n as f64;
    let mut best = (a, f(a));
    for i in 1..=n {
        let x = a + h * i as f64;
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    let lo = best.0 - h;
    let hi = best.0 + h;
    let polished = golden_max(&mut f, lo, hi, tol);
    if polished.1 >= best.1 {
        polished
    } else {
        best
    }
}
