//! Independent bit-flip readout errors, their mitigation, and post-selection
//! on the loading pre-sequence.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::full_mask;
use crate::dist::{CountTable, Origin, ProbDist};
use crate::error::{domain, Error, Result};
use crate::fit::{ols, ols_through_origin};
use crate::lattice::BasisIndex;

/// p01: ground read as Rydberg. p10: Rydberg read as ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub p01: f64,
    pub p10: f64,
}

impl Default for ReadoutModel {
    fn default() -> Self {
        Self { p01: 0.01, p10: 0.08 }
    }
}

impl ReadoutModel {
    /// Both rates in [0, 0.5).
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        for (name, p) in [("p01", p01), ("p10", p10)] {
            if !(0.0..0.5).contains(&p) {
                return Err(domain(format!("{name} must lie in [0, 0.5), got {p}")));
            }
        }
        Ok(Self { p01, p10 })
    }

    /// Any rates in [0, 1]; for degenerate channels in simulation only.
    pub fn relaxed(p01: f64, p10: f64) -> Result<Self> {
        for (name, p) in [("p01", p01), ("p10", p10)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(domain(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(Self { p01, p10 })
    }

    pub fn noiseless() -> Self {
        Self { p01: 0.0, p10: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p01 == 0.0 && self.p10 == 0.0
    }

    /// P(read | truth) for `n_atoms` independent bits.
    pub fn assignment(&self, read: BasisIndex, truth: BasisIndex, n_atoms: usize) -> f64 {
        let mask = full_mask(n_atoms);
        let n11 = (read & truth).count_ones() as i32;
        let n10 = (read & !truth & mask).count_ones() as i32;
        let n01 = (!read & truth & mask).count_ones() as i32;
        let n00 = n_atoms as i32 - n11 - n10 - n01;
        (1.0 - self.p01).powi(n00) * self.p01.powi(n10) * self.p10.powi(n01) * (1.0 - self.p10).powi(n11)
    }
}

/// Flips every bit of every shot independently.
pub fn apply_readout_noise(c: &CountTable, m: &ReadoutModel, seed: u64) -> CountTable {
    let n = c.n_atoms();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CountTable::new(n);
    for (bits, count) in c.iter() {
        for _ in 0..count {
            let mut read = bits;
            for k in 0..n {
                let p = if bits >> k & 1 == 1 { m.p10 } else { m.p01 };
                if rng.gen::<f64>() < p {
                    read ^= 1 << k;
                }
            }
            out.add(read, 1).expect("flips stay inside the register");
        }
    }
    out
}

/// Exact noisy distribution Σ_t P(r|t) p(t), applied one atom at a time on
/// a dense vector.
pub fn apply_channel(p: &ProbDist, m: &ReadoutModel) -> Result<ProbDist> {
    let n = p.n_atoms();
    if n > 26 {
        return Err(domain("dense readout channel limited to 26 atoms"));
    }
    let mut v = vec![0.0; 1usize << n];
    for (k, w) in p.iter() {
        v[k as usize] = w;
    }
    for k in 0..n {
        let stride = 1usize << k;
        for block in v.chunks_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (t0, t1) = (*a, *b);
                *a = (1.0 - m.p01) * t0 + m.p10 * t1;
                *b = m.p01 * t0 + (1.0 - m.p10) * t1;
            }
        }
    }
    ProbDist::normalized(
        n,
        v.into_iter()
            .enumerate()
            .filter(|(_, w)| *w > 0.0)
            .map(|(i, w)| (i as BasisIndex, w))
            .collect(),
        p.origin(),
    )
}

/// Mitigated weights on the observed support; entries may be negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiDist {
    pub n_atoms: usize,
    pub entries: BTreeMap<BasisIndex, f64>,
    /// ‖A x − b‖ / ‖b‖ at exit.
    pub residual: f64,
    pub iterations: usize,
}

impl QuasiDist {
    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn negative_mass(&self) -> f64 {
        -self.entries.values().filter(|&&w| w < 0.0).sum::<f64>()
    }

    pub fn support(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        self.entries.keys().copied()
    }

    /// Negatives set to 0 and the rest renormalized; returns the clipped mass.
    pub fn clip(&self) -> Result<(ProbDist, f64)> {
        let clipped = self.negative_mass();
        let kept = self
            .entries
            .iter()
            .map(|(&k, &w)| (k, w.max(0.0)))
            .collect();
        Ok((ProbDist::normalized(self.n_atoms, kept, Origin::Mitigated)?, clipped))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearMethod {
    /// Matrix-free Jacobi-preconditioned BiCGSTAB.
    Iterative,
    /// Dense LU on the reduced matrix.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct M3Options {
    pub tol: f64,
    pub max_iter: usize,
    pub method: LinearMethod,
}

impl Default for M3Options {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
            method: LinearMethod::Iterative,
        }
    }
}

/// Assignment matrix restricted to the observed support, with every column
/// rescaled to sum to one over that support.
struct ReducedAssignment<'a> {
    support: &'a [BasisIndex],
    n_atoms: usize,
    model: ReadoutModel,
    col_scale: Vec<f64>,
}

impl<'a> ReducedAssignment<'a> {
    fn new(support: &'a [BasisIndex], n_atoms: usize, model: ReadoutModel) -> Self {
        let col_scale = support
            .iter()
            .map(|&t| {
                let s: f64 = support.iter().map(|&r| model.assignment(r, t, n_atoms)).sum();
                1.0 / s
            })
            .collect();
        Self {
            support,
            n_atoms,
            model,
            col_scale,
        }
    }

    fn element(&self, i: usize, j: usize) -> f64 {
        self.model.assignment(self.support[i], self.support[j], self.n_atoms) * self.col_scale[j]
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..x.len()).map(|j| self.element(i, j) * x[j]).sum();
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.support.len()).map(|i| self.element(i, i)).collect()
    }

    fn dense(&self) -> DMatrix<f64> {
        let k = self.support.len();
        DMatrix::from_fn(k, k, |i, j| self.element(i, j))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Right-preconditioned BiCGSTAB with M = diag(A).
fn bicgstab(
    a: &ReducedAssignment,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    let n = b.len();
    let inv_d: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(&inv_d).map(|(x, d)| x * d).collect() };
    let b_norm = norm(b).max(f64::MIN_POSITIVE);

    let mut x = precond(b);
    let mut r = vec![0.0; n];
    a.apply(&x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rel = norm(&r) / b_norm;
    if rel <= tol {
        return Ok((x, rel, 0));
    }
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond(&p);
        a.apply(&p_hat, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / b_norm <= tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Ok((x, norm(&s) / b_norm, it));
        }
        let s_hat = precond(&s);
        a.apply(&s_hat, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm(&r) / b_norm;
        if rel <= tol {
            return Ok((x, rel, it));
        }
    }
    Err(Error::LinearNoConvergence {
        iterations: max_iter,
        residual: rel,
    })
}

/// Solves A x = p over the support of `p`, A being the reduced assignment
/// matrix. The output support equals the input support.
pub fn m3_mitigate_dist(p: &ProbDist, m: &ReadoutModel, opts: &M3Options) -> Result<QuasiDist> {
    let support: Vec<BasisIndex> = p.entries().keys().copied().collect();
    let b: Vec<f64> = p.entries().values().copied().collect();
    let a = ReducedAssignment::new(&support, p.n_atoms(), *m);
    let (x, residual, iterations) = match opts.method {
        LinearMethod::Iterative => bicgstab(&a, &b, opts.tol, opts.max_iter)?,
        LinearMethod::Dense => {
            let dense = a.dense();
            let rhs = DVector::from_column_slice(&b);
            let x = dense
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or_else(|| domain("reduced assignment matrix is singular"))?;
            let res = (&dense * &x - &rhs).norm() / rhs.norm();
            (x.iter().copied().collect(), res, 1)
        }
    };
    Ok(QuasiDist {
        n_atoms: p.n_atoms(),
        entries: support.into_iter().zip(x).collect(),
        residual,
        iterations,
    })
}

pub fn m3_mitigate(c: &CountTable, m: &ReadoutModel, opts: &M3Options) -> Result<QuasiDist> {
    m3_mitigate_dist(&c.to_distribution()?, m, opts)
}

/// (1 − p10)^{n_R} (1 − p01)^{N − n_R}.
pub fn depletion_factor(bits: BasisIndex, n_atoms: usize, m: &ReadoutModel) -> f64 {
    let n_r = (bits & full_mask(n_atoms)).count_ones() as i32;
    (1.0 - m.p10).powi(n_r) * (1.0 - m.p01).powi(n_atoms as i32 - n_r)
}

/// Counts divided by their depletion factors, renormalized.
pub fn depletion_mitigate(c: &CountTable, m: &ReadoutModel) -> Result<ProbDist> {
    if c.n_shots() == 0 {
        return Err(Error::EmptyDistribution);
    }
    let n = c.n_atoms();
    let weights = c
        .iter()
        .map(|(k, cnt)| (k, cnt as f64 / depletion_factor(k, n, m)))
        .collect();
    ProbDist::normalized(n, weights, Origin::Mitigated)
}

/// One measured shot. `pre_sequence[k] = 1` when atom k was loaded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub pre_sequence: Vec<u8>,
    pub post_sequence: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    pub counts: CountTable,
    pub n_total: usize,
    pub n_kept: usize,
    pub sorting_fidelity: f64,
}

/// Keeps shots whose pre-sequence is all ones. With `invert_post_sequence`
/// a post-sequence 0 is read as a Rydberg atom.
pub fn postselect(shots: &[ShotRecord], invert_post_sequence: bool) -> Result<PostSelection> {
    let first = shots
        .first()
        .ok_or_else(|| Error::InsufficientData("no shots".into()))?;
    let n = first.pre_sequence.len();
    if n == 0 || n > 63 {
        return Err(domain(format!("shots must cover 1..=63 atoms, got {n}")));
    }
    let mut counts = CountTable::new(n);
    let mut kept = 0;
    for (i, shot) in shots.iter().enumerate() {
        if shot.pre_sequence.len() != n || shot.post_sequence.len() != n {
            return Err(domain(format!(
                "shot {i}: sequence lengths {}/{} differ from {n}",
                shot.pre_sequence.len(),
                shot.post_sequence.len()
            )));
        }
        if shot.pre_sequence.iter().chain(&shot.post_sequence).any(|&b| b > 1) {
            return Err(domain(format!("shot {i}: sequences must contain only 0 and 1")));
        }
        if shot.pre_sequence.iter().all(|&b| b == 1) {
            let bits = shot
                .post_sequence
                .iter()
                .enumerate()
                .filter(|(_, &b)| (b == 1) != invert_post_sequence)
                .fold(0, |acc, (k, _)| acc | 1 << k);
            counts.add(bits, 1)?;
            kept += 1;
        }
    }
    Ok(PostSelection {
        counts,
        n_total: shots.len(),
        n_kept: kept,
        sorting_fidelity: kept as f64 / shots.len() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SortingFit {
    /// Per-atom success rate.
    pub f: f64,
    /// ln-space intercept; 0 for the fit through the origin.
    pub intercept: f64,
    pub r_squared: f64,
}

impl SortingFit {
    /// Expected fraction of kept shots for `n_atoms`.
    pub fn keep_fraction(&self, n_atoms: usize) -> f64 {
        (self.intercept + n_atoms as f64 * self.f.ln()).exp()
    }
}

/// ln(fidelity) versus atom count; `through_origin` enforces fidelity = f^N.
pub fn sorting_fidelity_fit(series: &[(usize, f64)], through_origin: bool) -> Result<SortingFit> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "sorting-fidelity fit needs 2 points, got {}",
            series.len()
        )));
    }
    if series.iter().any(|&(_, f)| !(f > 0.0 && f <= 1.0)) {
        return Err(domain("fidelities must lie in (0, 1]"));
    }
    let x: Vec<f64> = series.iter().map(|&(n, _)| n as f64).collect();
    let y: Vec<f64> = series.iter().map(|&(_, f)| f.ln()).collect();
    let fit = if through_origin {
        ols_through_origin(&x, &y)?
    } else {
        ols(&x, &y)?
    };
    Ok(SortingFit {
        f: fit.slope.exp(),
        intercept: fit.intercept,
        r_squared: fit.r_squared,
    })
}
