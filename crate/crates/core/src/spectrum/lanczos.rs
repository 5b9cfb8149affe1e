//! Thick-restart Lanczos for the lowest eigenpairs of a real symmetric
//! operator given only as a matrix-vector product.
//!
//! Every new Krylov vector is orthogonalized twice against the whole basis,
//! so the projected matrix is built from Gram-Schmidt coefficients rather
//! than a three-term recurrence. After `krylov_dim` vectors the basis is
//! compressed to the lowest `keep` Ritz vectors plus the current residual.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Operators this small are diagonalized densely.
pub const DENSE_LIMIT: usize = 512;

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Residual tolerance relative to the spectral scale max|θ|.
    pub tol: f64,
    pub n_eigen: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            n_eigen: 2,
            krylov_dim: 40,
            max_restarts: 400,
            seed: 0x5eed_1add,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// ‖A v − θ v‖ per pair.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

pub(super) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(super) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

pub(super) fn scale(alpha: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|xi| *xi *= alpha);
}

pub(super) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Two passes of classical Gram-Schmidt; returns the accumulated coefficients.
pub(super) fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeff = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeff.iter_mut().zip(basis) {
            let h = dot(v, w);
            axpy(-h, v, w);
            *c += h;
        }
    }
    coeff
}

pub(super) fn random_unit(dim: usize, rng: &mut ChaCha8Rng, basis: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        orthogonalize(basis, &mut v);
        let n = norm(&v);
        if n > 1e-8 {
            scale(1.0 / n, &mut v);
            return v;
        }
    }
}

pub(super) fn dense_eigenpairs<F>(dim: usize, apply: &F, n_eigen: usize) -> EigenPairs
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        apply(&e, &mut col);
        for i in 0..dim {
            m[(i, j)] = col[i];
        }
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = n_eigen.min(dim);
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let theta = eig.eigenvalues[idx];
        let v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        apply(&v, &mut col);
        axpy(-theta, &v, &mut col);
        residuals.push(norm(&col));
        values.push(theta);
        vectors.push(v);
    }
    EigenPairs {
        values,
        vectors,
        residuals,
        matvecs: dim,
    }
}

/// Lowest `opts.n_eigen` eigenpairs of the symmetric operator `apply`.
pub fn lowest_eigenpairs<F>(dim: usize, apply: F, opts: &LanczosOptions) -> Result<EigenPairs>
where
    F: Fn(&[f64], &mut [f64]),
{
    let nev = opts.n_eigen.max(1);
    if dim <= DENSE_LIMIT.max(opts.krylov_dim + 2) {
        return Ok(dense_eigenpairs(dim, &apply, nev));
    }
    let m = opts.krylov_dim.max(nev + 8);
    let keep = (m / 2).max(nev + 2).min(m - 2);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(random_unit(dim, &mut rng, &[]));
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut w = vec![0.0; dim];
    let mut matvecs = 0usize;
    let mut last_residual = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        let start = basis.len() - 1;
        let mut beta_last = 0.0;
        let mut residual_vec: Vec<f64> = Vec::new();
        for j in start..m {
            apply(&basis[j], &mut w);
            matvecs += 1;
            let coeff = orthogonalize(&basis, &mut w);
            for (i, &c) in coeff.iter().enumerate() {
                t[(i, j)] = c;
                t[(j, i)] = c;
            }
            let beta = norm(&w);
            let scale_est = t[(j, j)].abs().max(1.0);
            let (next, beta) = if beta <= 1e-12 * scale_est {
                // invariant subspace: continue with a fresh direction
                (random_unit(dim, &mut rng, &basis), 0.0)
            } else {
                let mut v = w.clone();
                scale(1.0 / beta, &mut v);
                (v, beta)
            };
            if j + 1 < m {
                t[(j + 1, j)] = beta;
                t[(j, j + 1)] = beta;
                basis.push(next);
            } else {
                beta_last = beta;
                residual_vec = next;
            }
        }

        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let spectral_scale = theta
            .iter()
            .fold(1.0f64, |acc, x| acc.max(x.abs()));
        let res: Vec<f64> = order
            .iter()
            .map(|&i| (beta_last * eig.eigenvectors[(m - 1, i)]).abs())
            .collect();
        last_residual = res[..nev].iter().cloned().fold(0.0, f64::max);

        let converged = last_residual <= opts.tol * spectral_scale;
        let n_ritz = if converged { nev } else { keep };
        let mut ritz: Vec<Vec<f64>> = Vec::with_capacity(n_ritz);
        for &col in order.iter().take(n_ritz) {
            let mut u = vec![0.0; dim];
            for (j, v) in basis.iter().enumerate() {
                axpy(eig.eigenvectors[(j, col)], v, &mut u);
            }
            let n = norm(&u);
            scale(1.0 / n, &mut u);
            ritz.push(u);
        }

        if converged {
            let mut residuals = Vec::with_capacity(nev);
            for (u, &th) in ritz.iter().zip(&theta) {
                apply(u, &mut w);
                matvecs += 1;
                axpy(-th, u, &mut w);
                residuals.push(norm(&w));
            }
            return Ok(EigenPairs {
                values: theta[..nev].to_vec(),
                vectors: ritz,
                residuals,
                matvecs,
            });
        }

        // thick restart: Ritz block, then the residual direction
        t.fill(0.0);
        for (i, &col) in order.iter().take(keep).enumerate() {
            t[(i, i)] = theta[i];
            let coupling = beta_last * eig.eigenvectors[(m - 1, col)];
            t[(keep, i)] = coupling;
            t[(i, keep)] = coupling;
        }
        basis = ritz;
        orthogonalize(&basis, &mut residual_vec);
        let n = norm(&residual_vec);
        if n > 1e-8 {
            scale(1.0 / n, &mut residual_vec);
        } else {
            residual_vec = random_unit(dim, &mut rng, &basis);
        }
        basis.push(residual_vec);
    }

    Err(Error::EigenNoConvergence {
        iterations: matvecs,
        residual: last_residual,
    })
}
