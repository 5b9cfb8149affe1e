//! Block Davidson with a diagonal (Jacobi) preconditioner, for operators whose
//! diagonal dominates the spectrum. Each correction is orthogonalized twice
//! against the full search space.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lanczos::{axpy, dense_eigenpairs, dot, norm, orthogonalize, random_unit, scale, EigenPairs, DENSE_LIMIT};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DavidsonOptions {
    /// Residual tolerance relative to max|diag|.
    pub tol: f64,
    pub n_eigen: usize,
    /// Ritz pairs refined per iteration.
    pub block: usize,
    pub max_subspace: usize,
    pub max_iter: usize,
    /// Seeds the fallback direction used if the search space stalls.
    pub seed: u64,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            n_eigen: 2,
            block: 2,
            max_subspace: 16,
            max_iter: 2000,
            seed: 0x5eed_1add,
        }
    }
}

struct Space {
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    /// V^T A V, grown one row and column per push.
    h: DMatrix<f64>,
}

impl Space {
    /// Orthonormalizes `t` against the space and appends it; false if nothing is left.
    fn push<F: Fn(&[f64], &mut [f64])>(&mut self, mut t: Vec<f64>, apply: &F) -> bool {
        let before = norm(&t);
        orthogonalize(&self.v, &mut t);
        let n = norm(&t);
        if !(n > 1e-10 * before.max(f64::MIN_POSITIVE)) || n == 0.0 {
            return false;
        }
        scale(1.0 / n, &mut t);
        let mut at = vec![0.0; t.len()];
        apply(&t, &mut at);
        let s = self.v.len();
        let mut h = self.h.clone().resize(s + 1, s + 1, 0.0);
        for i in 0..s {
            let x = 0.5 * (dot(&self.v[i], &at) + dot(&t, &self.av[i]));
            h[(i, s)] = x;
            h[(s, i)] = x;
        }
        h[(s, s)] = dot(&t, &at);
        self.h = h;
        self.v.push(t);
        self.av.push(at);
        true
    }

    fn from_vectors(v: Vec<Vec<f64>>, av: Vec<Vec<f64>>) -> Self {
        let s = v.len();
        let mut h = DMatrix::zeros(s, s);
        for i in 0..s {
            for j in i..s {
                let x = 0.5 * (dot(&v[i], &av[j]) + dot(&v[j], &av[i]));
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
        Self { v, av, h }
    }

    fn combine(vectors: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; vectors[0].len()];
        for (v, &c) in vectors.iter().zip(y) {
            axpy(c, v, &mut out);
        }
        out
    }
}

/// Lowest `opts.n_eigen` eigenpairs of the symmetric operator `apply` whose
/// diagonal is `diag`.
pub fn davidson_eigenpairs<F>(dim: usize, apply: F, diag: &[f64], opts: &DavidsonOptions) -> Result<EigenPairs>
where
    F: Fn(&[f64], &mut [f64]),
{
    let nev = opts.n_eigen.max(1);
    if dim <= DENSE_LIMIT {
        return Ok(dense_eigenpairs(dim, &apply, nev));
    }
    let block = opts.block.max(nev);
    let max_sub = opts.max_subspace.max(3 * block);
    let spectral_scale = diag.iter().fold(1.0f64, |acc, d| acc.max(d.abs()));
    let threshold = opts.tol * spectral_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let mut space = Space::from_vectors(Vec::new(), Vec::new());
    for &i in order.iter().take(block) {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        space.push(e, &apply);
    }
    let mut matvecs = space.v.len();
    let mut last_residual = f64::INFINITY;

    for _ in 0..opts.max_iter {
        let eig = SymmetricEigen::new(space.h.clone());
        let mut idx: Vec<usize> = (0..space.v.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let n_ritz = block.min(idx.len());
        let theta: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let ys: Vec<Vec<f64>> = idx[..n_ritz]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();

        let mut residuals = Vec::with_capacity(n_ritz);
        let mut res_vecs = Vec::with_capacity(n_ritz);
        for (y, &th) in ys.iter().zip(&theta) {
            let mut r = Space::combine(&space.av, y);
            axpy(-th, &Space::combine(&space.v, y), &mut r);
            residuals.push(norm(&r));
            res_vecs.push(r);
        }
        last_residual = residuals[..nev].iter().cloned().fold(0.0, f64::max);

        if last_residual <= threshold {
            let vectors = ys[..nev].iter().map(|y| Space::combine(&space.v, y)).collect();
            return Ok(EigenPairs {
                values: theta[..nev].to_vec(),
                vectors,
                residuals: residuals[..nev].to_vec(),
                matvecs,
            });
        }

        if space.v.len() + n_ritz > max_sub {
            let keep = (2 * block).min(idx.len());
            let mut v = Vec::with_capacity(keep);
            let mut av = Vec::with_capacity(keep);
            for &i in &idx[..keep] {
                let y: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
                v.push(Space::combine(&space.v, &y));
                av.push(Space::combine(&space.av, &y));
            }
            space = Space::from_vectors(v, av);
        }

        let mut added = 0;
        for ((r, &th), &rn) in res_vecs.into_iter().zip(&theta).zip(&residuals) {
            if rn <= threshold {
                continue;
            }
            let t: Vec<f64> = r
                .iter()
                .zip(diag)
                .map(|(&ri, &d)| {
                    let den = th - d;
                    if den.abs() < 1e-8 {
                        ri / 1e-8f64.copysign(den)
                    } else {
                        ri / den
                    }
                })
                .collect();
            if space.push(t, &apply) {
                matvecs += 1;
                added += 1;
            }
        }
        if added == 0 {
            let fresh = random_unit(dim, &mut rng, &space.v);
            space.push(fresh, &apply);
            matvecs += 1;
        }
    }

    Err(Error::EigenNoConvergence {
        iterations: matvecs,
        residual: last_residual,
    })
}
