//! Two-leg ladder geometry and the Rydberg Hamiltonian
//!
//! H = (Ω/2) Σ_i σx_i − Δ Σ_i n_i + Σ_{i<j} V_ij n_i n_j,  V_ij = C6 / r_ij⁶.
//!
//! Units: lengths in μm, times in μs, energies and frequencies in rad/μs.
//! Atom `k = 2·rung + leg` occupies bit `k` of a basis index, so the left
//! half of the ladder is a contiguous block of low bits.

use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::spectrum::PureState;

/// Van der Waals coefficient in rad·μm⁶/μs, fixed so that R_b/a = 2.35 at
/// a = 4.1 μm gives Ω = 2π × 1.078224 MHz.
pub const DEFAULT_C6: f64 = 5_419_998.630_367_7;

/// Rung length over inter-rung spacing.
pub const DEFAULT_ASPECT_RATIO: f64 = 2.0;

/// Largest system the dense-vector code paths accept.
pub const MAX_ATOMS: usize = 26;

/// Cyclic MHz to rad/μs.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz
}

/// rad/μs to cyclic MHz.
pub fn angular_to_mhz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Computational basis index; bit `k` is the Rydberg occupation of atom `k`.
pub type BasisIndex = u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSystem {
    n_rungs: usize,
    a: f64,
    aspect_ratio: f64,
    omega: f64,
    delta: f64,
    c6: f64,
    cutoff: Option<f64>,
}

impl LadderSystem {
    /// Direct construction from drive parameters (rad/μs).
    pub fn new(n_rungs: usize, a: f64, omega: f64, delta: f64, c6: f64) -> Result<Self> {
        if n_rungs == 0 {
            return Err(domain("n_rungs must be at least 1"));
        }
        if 2 * n_rungs > 63 {
            return Err(domain(format!("{n_rungs} rungs do not fit a 64-bit basis index")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(domain(format!("lattice spacing must be positive, got {a}")));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(domain(format!("Rabi frequency must be non-negative, got {omega}")));
        }
        if !delta.is_finite() {
            return Err(domain("detuning must be finite"));
        }
        if !(c6 > 0.0 && c6.is_finite()) {
            return Err(domain(format!("C6 must be positive, got {c6}")));
        }
        Ok(Self {
            n_rungs,
            a,
            aspect_ratio: DEFAULT_ASPECT_RATIO,
            omega,
            delta,
            c6,
            cutoff: None,
        })
    }

    /// Build from dimensionless ratios; Ω follows from R_b = (C6/Ω)^{1/6}.
    pub fn from_ratios(
        n_rungs: usize,
        a: f64,
        rb_over_a: f64,
        delta_over_omega: f64,
        c6: f64,
    ) -> Result<Self> {
        if !(rb_over_a >= 1.0 && rb_over_a.is_finite()) {
            return Err(domain(format!("R_b/a must be at least 1, got {rb_over_a}")));
        }
        if !(a > 0.0) {
            return Err(domain(format!("lattice spacing must be positive, got {a}")));
        }
        if !(c6 > 0.0) {
            return Err(domain(format!("C6 must be positive, got {c6}")));
        }
        let omega = c6 / (rb_over_a * a).powi(6);
        Self::new(n_rungs, a, omega, delta_over_omega * omega, c6)
    }

    pub fn with_aspect_ratio(mut self, aspect_ratio: f64) -> Result<Self> {
        if !(aspect_ratio > 0.0 && aspect_ratio.is_finite()) {
            return Err(domain(format!("aspect ratio must be positive, got {aspect_ratio}")));
        }
        self.aspect_ratio = aspect_ratio;
        Ok(self)
    }

    /// Drop interactions between atoms farther apart than `radius` (μm).
    pub fn with_cutoff(mut self, radius: Option<f64>) -> Result<Self> {
        if let Some(r) = radius {
            if !(r > 0.0) {
                return Err(domain(format!("cutoff radius must be positive, got {r}")));
            }
        }
        self.cutoff = radius;
        Ok(self)
    }

    /// Same geometry and C6 with a different drive.
    pub fn with_drive(&self, omega: f64, delta: f64) -> Result<Self> {
        let mut out = Self::new(self.n_rungs, self.a, omega, delta, self.c6)?;
        out.aspect_ratio = self.aspect_ratio;
        out.cutoff = self.cutoff;
        Ok(out)
    }

    pub fn n_rungs(&self) -> usize {
        self.n_rungs
    }

    pub fn n_atoms(&self) -> usize {
        2 * self.n_rungs
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_atoms()
    }

    pub fn spacing(&self) -> f64 {
        self.a
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.aspect_ratio
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c6(&self) -> f64 {
        self.c6
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// R_b = (C6/Ω)^{1/6}; undefined without drive.
    pub fn blockade_radius(&self) -> Option<f64> {
        (self.omega > 0.0).then(|| (self.c6 / self.omega).powf(1.0 / 6.0))
    }

    pub fn atom_index(rung: usize, leg: usize) -> usize {
        2 * rung + leg
    }

    /// Position (x, y) in μm of atom `k`.
    pub fn position(&self, k: usize) -> (f64, f64) {
        let rung = k / 2;
        let leg = k % 2;
        (rung as f64 * self.a, leg as f64 * self.aspect_ratio * self.a)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (xi, yi) = self.position(i);
        let (xj, yj) = self.position(j);
        (xi - xj).hypot(yi - yj)
    }

    pub fn interaction_table(&self) -> InteractionTable {
        let n = self.n_atoms();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let r = self.distance(i, j);
                let vij = match self.cutoff {
                    Some(rc) if r > rc => 0.0,
                    _ => self.c6 / r.powi(6),
                };
                v[i * n + j] = vij;
                v[j * n + i] = vij;
            }
        }
        InteractionTable { n_atoms: n, v }
    }
}

/// Symmetric pairwise couplings V_ij in rad/μs; zero on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTable {
    n_atoms: usize,
    v: Vec<f64>,
}

impl InteractionTable {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.n_atoms + j]
    }

    /// Σ_{i<j} V_ij n_i n_j for the occupations encoded in `bits`.
    pub fn pair_energy(&self, bits: BasisIndex) -> f64 {
        let mut e = 0.0;
        let mut rest = bits;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut others = rest;
            while others != 0 {
                let j = others.trailing_zeros() as usize;
                others &= others - 1;
                e += self.get(i, j);
            }
        }
        e
    }

    /// Pair energies of every basis state, built by peeling the lowest set bit.
    pub fn pair_energies(&self) -> Vec<f64> {
        let n = self.n_atoms;
        let dim = 1usize << n;
        let mut out = vec![0.0; dim];
        for s in 1..dim {
            let k = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            let row = &self.v[k * n..(k + 1) * n];
            let mut add = 0.0;
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                r &= r - 1;
                add += row[j];
            }
            out[s] = out[rest] + add;
        }
        out
    }
}

/// Matrix-free Rydberg Hamiltonian: diagonal energies stored once per basis
/// state, the drive applied as one single-bit-flip pass per atom.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_atoms: usize,
    omega: f64,
    delta: f64,
    pair: Vec<f64>,
    diag: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(sys: &LadderSystem) -> Result<Self> {
        let n = sys.n_atoms();
        if n > MAX_ATOMS {
            return Err(domain(format!("{n} atoms exceed the supported maximum of {MAX_ATOMS}")));
        }
        let pair = sys.interaction_table().pair_energies();
        let diag = diagonal_from(&pair, sys.delta());
        Ok(Self {
            n_atoms: n,
            omega: sys.omega(),
            delta: sys.delta(),
            pair,
            diag,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// ⟨n|H|n⟩ for every basis state.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Interaction part Σ V n n per basis state (no detuning).
    pub fn pair_energies(&self) -> &[f64] {
        &self.pair
    }

    /// Same interactions, new drive. Reuses the pair energies.
    pub fn with_drive(&self, omega: f64, delta: f64) -> Self {
        Self {
            n_atoms: self.n_atoms,
            omega,
            delta,
            pair: self.pair.clone(),
            diag: diagonal_from(&self.pair, delta),
        }
    }

    /// y = H x on raw slices; works for real and complex amplitudes.
    pub fn apply_into<T>(&self, x: &[T], y: &mut [T])
    where
        T: Copy + AddAssign + Mul<f64, Output = T>,
    {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for ((yi, &xi), &d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = xi * d;
        }
        if self.omega == 0.0 {
            return;
        }
        let h = 0.5 * self.omega;
        for k in 0..self.n_atoms {
            let bit = 1usize << k;
            // walk blocks of 2·bit so that s has bit k clear and t = s | bit
            for base in (0..x.len()).step_by(bit << 1) {
                for s in base..base + bit {
                    let t = s | bit;
                    let xs = x[s];
                    let xt = x[t];
                    y[s] += xt * h;
                    y[t] += xs * h;
                }
            }
        }
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(psi.amplitudes(), &mut out);
        Ok(PureState::from_amplitudes_unchecked(self.n_atoms, out))
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        let h_psi = self.apply(psi)?;
        Ok(psi.inner(&h_psi).re)
    }
}

fn diagonal_from(pair: &[f64], delta: f64) -> Vec<f64> {
    pair.iter()
        .enumerate()
        .map(|(s, &e)| e - delta * (s.count_ones() as f64))
        .collect()
}

/// H·ψ for a one-off product; prefer [`Hamiltonian`] when applying repeatedly.
pub fn apply_hamiltonian(sys: &LadderSystem, psi: &PureState) -> Result<PureState> {
    Hamiltonian::new(sys)?.apply(psi)
}
