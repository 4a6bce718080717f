//! `A:B:N[:geom]` parameter grids.

use crate::{CliError, CliResult};

/// Parses `A:B:N` (linear) or `A:B:N:geom` (geometric) into `N` values from
/// `A` to `B` inclusive.
pub fn parse_alpha_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |why: &str| CliError::Config(format!("alpha grid '{s}': {why}"));
    if parts.len() != 3 && parts.len() != 4 {
        return Err(bad("expected A:B:N or A:B:N:geom"));
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad("A is not a number"))?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad("B is not a number"))?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad("N is not a positive integer"))?;
    let geom = match parts.get(3).map(|p| p.trim()) {
        None | Some("lin") => false,
        Some("geom") => true,
        Some(_) => return Err(bad("spacing must be 'geom' or 'lin'")),
    };
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < a {
        return Err(bad("need 0 ≤ A ≤ B"));
    }
    if n == 0 {
        return Err(bad("N must be at least 1"));
    }
    if n > 1 && a == b {
        return Err(bad("A = B with N > 1"));
    }
    if geom && a <= 0.0 {
        return Err(bad("geometric spacing needs A > 0"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                return b;
            }
            let t = i as f64 / (n - 1) as f64;
            if geom {
                a * (b / a).powf(t)
            } else {
                a + (b - a) * t
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_geometric() {
        assert_eq!(parse_alpha_grid("0:4:5").unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let g = parse_alpha_grid("10:160:5:geom").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[4], 160.0);
        assert!((g[2] - 40.0).abs() < 1e-12);
        assert_eq!(parse_alpha_grid("3:3:1").unwrap(), vec![3.0]);
    }

    #[test]
    fn rejects_malformed() {
        for s in ["1:2", "a:2:3", "1:2:0", "2:1:3", "0:1:3:geom", "1:2:3:log", "-1:2:3"] {
            assert!(parse_alpha_grid(s).is_err(), "{s}");
        }
    }
}
