//! Lowest eigenpairs of `A x = λ M x` by shift-invert block Krylov iteration
//! with restarted Rayleigh–Ritz.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::sparse::{CsrMatrix, SkylineCholesky};

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub count: usize,
    /// Guard vectors carried beyond `count`.
    pub extra: usize,
    /// Krylov blocks generated per restart.
    pub krylov_blocks: usize,
    pub max_restarts: usize,
    /// Relative residual target, measured against `max(|λ|, 1)`.
    pub tol: f64,
    pub seed: u64,
}

impl EigenOptions {
    pub fn new(count: usize) -> Self {
        Self { count, extra: 4, krylov_blocks: 5, max_restarts: 40, tol: 1e-8, seed: 0x5EED_2D }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A x − λ M x‖` in the lumped `M⁻¹` norm.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub restarts: usize,
    /// Shift actually used for the factorization.
    pub shift: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Factorizes `A − σM`, moving the shift down by 1% on breakdown.
pub fn factor_shifted(a: &CsrMatrix, m: &CsrMatrix, sigma: f64, perm: &[usize]) -> Result<(SkylineCholesky, f64)> {
    let mut s = sigma;
    for _ in 0..50 {
        match SkylineCholesky::factor(&a.lincomb(1.0, m, -s), perm) {
            Ok(f) => return Ok((f, s)),
            Err(Error::NotPositiveDefinite(_)) => s = if s < 0.0 { s * 1.01 } else { s - 0.01 * s.abs().max(1.0) },
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoConvergence(format!("no definite shift found below {sigma}")))
}

struct Basis<'a> {
    m: &'a CsrMatrix,
    v: Vec<Vec<f64>>,
    mv: Vec<Vec<f64>>,
}

impl<'a> Basis<'a> {
    /// `M`-orthogonalizes `w` against the basis twice and appends it unless
    /// it is numerically dependent.
    fn push(&mut self, mut w: Vec<f64>) -> bool {
        let mut mw = self.m.matvec(&w);
        let norm0 = dot(&w, &mw).max(0.0).sqrt();
        if norm0 == 0.0 || !norm0.is_finite() {
            return false;
        }
        for _ in 0..2 {
            for (v, mv) in self.v.iter().zip(&self.mv) {
                let c = dot(&w, mv);
                axpy(-c, v, &mut w);
            }
            mw = self.m.matvec(&w);
        }
        let norm = dot(&w, &mw).max(0.0).sqrt();
        if norm < 1e-10 * norm0 {
            return false;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        mw.iter_mut().for_each(|x| *x /= norm);
        self.v.push(w);
        self.mv.push(mw);
        true
    }
}

/// Lowest `opts.count` eigenpairs of the pencil `(A, M)`, `M` positive
/// definite, `A` and `M` on one pattern. `sigma` must lie below the
/// spectrum; `perm` is the fill-reducing ordering for the factorization.
pub fn lowest_eigenpairs(a: &CsrMatrix, m: &CsrMatrix, sigma: f64, perm: &[usize], opts: EigenOptions) -> Result<EigenPairs> {
    let n = a.n;
    if opts.count == 0 || opts.count > n {
        return Err(Error::InvalidParameter(format!("cannot compute {} eigenpairs of a {n}×{n} pencil", opts.count)));
    }
    let (factor, shift) = factor_shifted(a, m, sigma, perm)?;
    let lumped = m.row_sums();
    let p = (opts.count + opts.extra).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();

    let mut best: Option<EigenPairs> = None;
    for restart in 0..opts.max_restarts {
        let mut basis = Basis { m, v: Vec::new(), mv: Vec::new() };
        let mut block: Vec<usize> = Vec::new();
        for w in start.drain(..) {
            if basis.push(w) {
                block.push(basis.v.len() - 1);
            }
        }
        for _ in 0..opts.krylov_blocks {
            let mut next = Vec::new();
            for &k in &block {
                let w = factor.solve(&basis.mv[k]);
                if basis.push(w) {
                    next.push(basis.v.len() - 1);
                }
            }
            if next.is_empty() || basis.v.len() >= n {
                break;
            }
            block = next;
        }
        let k = basis.v.len();
        let av: Vec<Vec<f64>> = basis.v.iter().map(|v| a.matvec(v)).collect();
        let mut h = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let x = 0.5 * (dot(&basis.v[i], &av[j]) + dot(&basis.v[j], &av[i]));
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        let keep = p.min(k);
        let mut values = Vec::with_capacity(keep);
        let mut vectors = Vec::with_capacity(keep);
        let mut residuals = Vec::with_capacity(keep);
        for &c in order.iter().take(keep) {
            let theta = eig.eigenvalues[c];
            let mut x = vec![0.0; n];
            let mut ax = vec![0.0; n];
            let mut mx = vec![0.0; n];
            for r in 0..k {
                let y = eig.eigenvectors[(r, c)];
                axpy(y, &basis.v[r], &mut x);
                axpy(y, &av[r], &mut ax);
                axpy(y, &basis.mv[r], &mut mx);
            }
            let res = ax.iter().zip(&mx).zip(&lumped).map(|((u, w), l)| (u - theta * w).powi(2) / l).sum::<f64>().sqrt();
            values.push(theta);
            vectors.push(x);
            residuals.push(res);
        }
        let converged = (0..opts.count).all(|i| residuals[i] <= opts.tol * values[i].abs().max(1.0));
        start = vectors.clone();
        let result = EigenPairs { values, vectors, residuals, converged, restarts: restart + 1, shift };
        if converged {
            return Ok(truncate(result, opts.count));
        }
        best = Some(result);
    }
    Ok(truncate(best.expect("at least one restart"), opts.count))
}

fn truncate(mut e: EigenPairs, count: usize) -> EigenPairs {
    e.values.truncate(count);
    e.vectors.truncate(count);
    e.residuals.truncate(count);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// 1D Dirichlet Laplacian with lumped mass; eigenvalues are closed form.
    fn dirichlet_chain(n: usize) -> (CsrMatrix, CsrMatrix) {
        let h = 1.0 / (n + 1) as f64;
        let mut ta = Vec::new();
        let mut tm = Vec::new();
        for i in 0..n {
            ta.push((i, i, 2.0 / h));
            tm.push((i, i, h));
            if i + 1 < n {
                ta.push((i, i + 1, -1.0 / h));
                ta.push((i + 1, i, -1.0 / h));
                tm.push((i, i + 1, 0.0));
                tm.push((i + 1, i, 0.0));
            }
        }
        (CsrMatrix::from_triplets(n, &ta), CsrMatrix::from_triplets(n, &tm))
    }

    #[test]
    fn recovers_discrete_dirichlet_spectrum() {
        let n = 400;
        let h = 1.0 / (n + 1) as f64;
        let (a, m) = dirichlet_chain(n);
        let perm: Vec<usize> = (0..n).collect();
        let out = lowest_eigenpairs(&a, &m, -1.0, &perm, EigenOptions::new(4)).unwrap();
        assert!(out.converged);
        for (k, v) in out.values.iter().enumerate() {
            let oracle = 4.0 / (h * h) * ((k + 1) as f64 * PI * h / 2.0).sin().powi(2);
            assert!((v - oracle).abs() < 1e-8 * oracle, "{v} vs {oracle}");
        }
    }

    #[test]
    fn shift_inside_spectrum_is_moved() {
        let (a, m) = dirichlet_chain(50);
        let perm: Vec<usize> = (0..50).collect();
        let (_, s) = factor_shifted(&a, &m, 12.0, &perm).unwrap();
        assert!(s < PI * PI);
    }
}
