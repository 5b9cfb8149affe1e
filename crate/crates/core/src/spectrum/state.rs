use num_complex::Complex64;

use crate::dist::{Origin, ProbDist};
use crate::error::{domain, Error, Result};
use crate::lattice::BasisIndex;

/// Tolerance on Σ|c|² − 1 for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Complex amplitudes over the 2^N occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_atoms: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_atoms: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << n_atoms;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        let state = Self { n_atoms, amps };
        let norm2 = state.norm_sqr();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(domain(format!("state is not normalized: |psi|^2 = {norm2}")));
        }
        Ok(state)
    }

    pub fn from_real(n_atoms: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n_atoms, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// No normalization check; for intermediate results such as H·ψ.
    pub fn from_amplitudes_unchecked(n_atoms: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_atoms);
        Self { n_atoms, amps }
    }

    pub fn basis(n_atoms: usize, index: BasisIndex) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n_atoms];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Self { n_atoms, amps }
    }

    /// All atoms in the ground state.
    pub fn vacuum(n_atoms: usize) -> Self {
        Self::basis(n_atoms, 0)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|c| *c *= inv);
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Euclidean distance ‖self − other‖.
    pub fn distance(&self, other: &PureState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.amps.iter().all(|c| c.im == 0.0)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Exact bitstring distribution |c_n|².
    pub fn distribution(&self) -> ProbDist {
        ProbDist::from_dense(self.n_atoms, &self.probabilities(), Origin::Exact)
            .expect("a normalized state has a non-empty distribution")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_is_checked() {
        assert!(PureState::from_real(1, &[1.0, 1.0]).is_err());
        assert!(PureState::from_real(1, &[0.6, 0.8]).is_ok());
        assert!(PureState::from_real(2, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn overlaps() {
        let a = PureState::basis(2, 1);
        let b = PureState::from_real(2, &[0.0, 0.6, 0.8, 0.0]).unwrap();
        assert!((a.fidelity(&b) - 0.36).abs() < 1e-15);
        assert!((b.norm() - 1.0).abs() < 1e-15);
        let d = b.distribution();
        assert_eq!(d.len(), 2);
    }
}
