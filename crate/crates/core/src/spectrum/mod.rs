//! Ground states, reduced density matrices and von Neumann entropies.

mod davidson;
mod lanczos;
mod scan;
mod state;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub use davidson::{davidson_eigenpairs, DavidsonOptions};
pub use lanczos::{lowest_eigenpairs, EigenPairs, LanczosOptions, DENSE_LIMIT};
pub use scan::{scan_heatmap, Axis, Heatmap, Observable, ScanGrid, ScanPoint, ScanTemplate};
pub use state::{PureState, NORM_TOL};

use crate::bits::{compress, full_mask};
use crate::error::{domain, Error, Result};
use crate::infoflow::Partition;
use crate::lattice::{BasisIndex, Hamiltonian, LadderSystem};

/// Eigenvalues below this contribute nothing to an entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Two lowest levels closer than this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Jacobi-preconditioned block Davidson.
    Davidson,
    /// Thick-restart Lanczos.
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub method: EigenMethod,
    pub davidson: DavidsonOptions,
    pub lanczos: LanczosOptions,
    pub max_atoms: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::Davidson,
            davidson: DavidsonOptions::default(),
            lanczos: LanczosOptions::default(),
            max_atoms: 24,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        let mut out = Self::default();
        out.davidson.tol = tol;
        out.lanczos.tol = tol;
        out
    }

    pub fn tol(&self) -> f64 {
        match self.method {
            EigenMethod::Davidson => self.davidson.tol,
            EigenMethod::Lanczos => self.lanczos.tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// E1 − E0.
    pub gap: f64,
    pub psi: PureState,
    /// ‖Hψ − Eψ‖.
    pub residual: f64,
}

/// Lowest eigenpair of the ladder Hamiltonian with a deterministic phase:
/// the largest-magnitude amplitude is real and positive.
pub fn ground_state(sys: &LadderSystem, opts: &SolverOptions) -> Result<GroundState> {
    if sys.n_atoms() > opts.max_atoms {
        return Err(domain(format!(
            "{} atoms exceed the configured maximum of {}",
            sys.n_atoms(),
            opts.max_atoms
        )));
    }
    let ham = Hamiltonian::new(sys)?;
    ground_state_of(&ham, opts)
}

pub fn ground_state_of(ham: &Hamiltonian, opts: &SolverOptions) -> Result<GroundState> {
    let n = ham.n_atoms();
    if ham.omega() == 0.0 {
        return classical_ground_state(ham);
    }
    let apply = |x: &[f64], y: &mut [f64]| ham.apply_into(x, y);
    let pairs = match opts.method {
        EigenMethod::Davidson => davidson_eigenpairs(ham.dim(), apply, ham.diagonal(), &opts.davidson)?,
        EigenMethod::Lanczos => lowest_eigenpairs(ham.dim(), apply, &opts.lanczos)?,
    };
    let e0 = pairs.values[0];
    let e1 = pairs.values.get(1).copied().unwrap_or(f64::INFINITY);
    if e1 - e0 < DEGENERACY_GAP {
        return Err(Error::DegenerateGroundState { e0, e1 });
    }
    let mut v = pairs.vectors.into_iter().next().expect("at least one eigenvector");
    fix_phase(&mut v);
    let psi = PureState::from_real(n, &v).map_err(|_| {
        let norm: f64 = v.iter().map(|x| x * x).sum();
        domain(format!("eigenvector lost normalization: {norm}"))
    })?;
    Ok(GroundState {
        energy: e0,
        gap: e1 - e0,
        psi,
        residual: pairs.residuals[0],
    })
}

fn fix_phase(v: &mut [f64]) {
    let (mut best, mut idx) = (0.0, 0);
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Without drive the Hamiltonian is diagonal; its minimum must be unique.
fn classical_ground_state(ham: &Hamiltonian) -> Result<GroundState> {
    let diag = ham.diagonal();
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let e0 = diag[order[0]];
    let e1 = order.get(1).map(|&i| diag[i]).unwrap_or(f64::INFINITY);
    if e1 - e0 < DEGENERACY_GAP {
        return Err(Error::DegenerateGroundState { e0, e1 });
    }
    Ok(GroundState {
        energy: e0,
        gap: e1 - e0,
        psi: PureState::basis(ham.n_atoms(), order[0] as BasisIndex),
        residual: 0.0,
    })
}

/// Basis states minimizing a diagonal Hamiltonian (within `DEGENERACY_GAP`).
pub fn classical_ground_manifold(ham: &Hamiltonian) -> Vec<BasisIndex> {
    let diag = ham.diagonal();
    let e0 = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    diag.iter()
        .enumerate()
        .filter(|(_, &e)| e - e0 < DEGENERACY_GAP)
        .map(|(i, _)| i as BasisIndex)
        .collect()
}

/// ρ restricted to a set of atoms.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    region: BasisIndex,
    rho: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    /// Bit mask of the atoms kept.
    pub fn region(&self) -> BasisIndex {
        self.region
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|c| c.re).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = hermitian_eigenvalues(&self.rho);
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.iter().all(|c| c.im == 0.0) {
        let re = m.map(|c| c.re);
        let re = (&re + re.transpose()) * 0.5;
        SymmetricEigen::new(re).eigenvalues.iter().copied().collect()
    } else {
        let h = (m + m.adjoint()).map(|c| c * 0.5);
        SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
    }
}

fn check_region(n_atoms: usize, region: BasisIndex) -> Result<()> {
    let all = full_mask(n_atoms);
    if region & !all != 0 {
        return Err(domain("region contains atoms outside the system"));
    }
    if region == 0 || region == all {
        return Err(domain("region must be a non-empty proper subset of the atoms"));
    }
    Ok(())
}

/// ψ reshaped to (region) × (complement), row-major.
fn split_matrix(psi: &PureState, region: BasisIndex) -> (usize, usize, Vec<Complex64>) {
    let n = psi.n_atoms();
    let rest = full_mask(n) & !region;
    let dim_a = 1usize << region.count_ones();
    let dim_b = 1usize << rest.count_ones();
    let mut m = vec![Complex64::new(0.0, 0.0); dim_a * dim_b];
    for (s, &c) in psi.amplitudes().iter().enumerate() {
        let a = compress(s as BasisIndex, region) as usize;
        let b = compress(s as BasisIndex, rest) as usize;
        m[a * dim_b + b] = c;
    }
    (dim_a, dim_b, m)
}

/// ρ_A = Tr_{complement} |ψ⟩⟨ψ| for the atoms in `region` (bit mask).
pub fn reduced_density_matrix_mask(
    psi: &PureState,
    region: BasisIndex,
) -> Result<ReducedDensityMatrix> {
    check_region(psi.n_atoms(), region)?;
    let (dim_a, dim_b, m) = split_matrix(psi, region);
    let rho = if psi.is_real() {
        let mr = DMatrix::from_row_slice(dim_a, dim_b, &m.iter().map(|c| c.re).collect::<Vec<_>>());
        (&mr * mr.transpose()).map(|x| Complex64::new(x, 0.0))
    } else {
        let mc = DMatrix::from_row_slice(dim_a, dim_b, &m);
        &mc * mc.adjoint()
    };
    Ok(ReducedDensityMatrix { region, rho })
}

/// ρ for the atoms carrying any of `labels` in `part`.
pub fn reduced_density_matrix(
    psi: &PureState,
    part: &Partition,
    labels: &str,
) -> Result<ReducedDensityMatrix> {
    if part.n_atoms() != psi.n_atoms() {
        return Err(Error::DimensionMismatch {
            expected: psi.n_atoms(),
            got: part.n_atoms(),
        });
    }
    reduced_density_matrix_mask(psi, part.mask_of(labels)?)
}

/// −Σ λ ln λ in nats.
pub fn von_neumann_entropy(rho: &ReducedDensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.ln())
        .sum()
}

/// S^vN of `region` for a pure global state, computed on whichever side of
/// the cut has the smaller Hilbert space.
pub fn entanglement_entropy(psi: &PureState, region: BasisIndex) -> Result<f64> {
    check_region(psi.n_atoms(), region)?;
    let rest = full_mask(psi.n_atoms()) & !region;
    let side = if region.count_ones() <= rest.count_ones() {
        region
    } else {
        rest
    };
    Ok(von_neumann_entropy(&reduced_density_matrix_mask(psi, side)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DEFAULT_C6;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> PureState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut s = PureState::from_amplitudes_unchecked(n, amps);
        s.normalize();
        s
    }

    /// ρ_A[a][a'] = Σ_b ψ(a,b) ψ*(a',b) by explicit index loops.
    fn brute_force_rdm(psi: &PureState, region: BasisIndex) -> DMatrix<Complex64> {
        let n = psi.n_atoms();
        let k = region.count_ones() as usize;
        let mut rho = DMatrix::from_element(1 << k, 1 << k, Complex64::new(0.0, 0.0));
        let amps = psi.amplitudes();
        for s in 0..1usize << n {
            for t in 0..1usize << n {
                let same_rest = (s ^ t) as u64 & !region & full_mask(n) == 0;
                if same_rest {
                    let a = compress(s as u64, region) as usize;
                    let b = compress(t as u64, region) as usize;
                    rho[(a, b)] += amps[s] * amps[t].conj();
                }
            }
        }
        rho
    }

    #[test]
    fn two_atom_ground_state_matches_dense() {
        let sys = LadderSystem::new(1, 4.1, 2.0, 1.3, DEFAULT_C6).unwrap();
        let gs = ground_state(&sys, &SolverOptions::default()).unwrap();
        let v = sys.interaction_table().get(0, 1);
        let (om, de) = (sys.omega(), sys.delta());
        let h = nalgebra::DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, om / 2.0, om / 2.0, 0.0,
                om / 2.0, -de, 0.0, om / 2.0,
                om / 2.0, 0.0, -de, om / 2.0,
                0.0, om / 2.0, om / 2.0, -2.0 * de + v,
            ],
        );
        let eig = SymmetricEigen::new(h);
        let e0 = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((gs.energy - e0).abs() < 1e-10);
        assert!(gs.residual < 1e-10);
    }

    #[test]
    fn classical_ground_state_without_drive() {
        // one rung with V(2a) < Δ: |11⟩ wins
        let sys = LadderSystem::new(1, 4.1, 0.0, 30.0, DEFAULT_C6).unwrap();
        let v = sys.interaction_table().get(0, 1);
        assert!(v < 30.0);
        let gs = ground_state(&sys, &SolverOptions::default()).unwrap();
        assert!((gs.energy - (-60.0 + v)).abs() < 1e-12);
        assert_eq!(gs.psi.amplitudes()[0b11].re, 1.0);
    }

    #[test]
    fn degenerate_classical_ground_state_is_refused() {
        // Δ = 0, Ω = 0: vacuum and every single excitation share E = 0
        let sys = LadderSystem::new(2, 4.1, 0.0, 0.0, DEFAULT_C6).unwrap();
        assert!(matches!(
            ground_state(&sys, &SolverOptions::default()),
            Err(Error::DegenerateGroundState { .. })
        ));
    }

    #[test]
    fn ground_state_phase_and_variational_bound() {
        let sys = LadderSystem::from_ratios(5, 4.1, 2.35, 3.5, DEFAULT_C6).unwrap();
        let gs = ground_state(&sys, &SolverOptions::default()).unwrap();
        let amps = gs.psi.amplitudes();
        let max = amps.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let top = amps.iter().find(|c| c.norm() == max).unwrap();
        assert!(top.re > 0.0 && top.im == 0.0);
        let ham = Hamiltonian::new(&sys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(0..ham.dim());
            assert!(gs.energy <= ham.diagonal()[n]);
        }
        // stoquastic after the (−1)^popcount gauge: amplitude signs alternate
        for (s, c) in amps.iter().enumerate() {
            if c.re.abs() > 1e-9 {
                let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                assert!(c.re * sign * amps[0].re.signum() > 0.0);
            }
        }
    }

    #[test]
    fn lanczos_path_matches_dense_path() {
        let sys = LadderSystem::from_ratios(5, 4.1, 2.1, 2.0, DEFAULT_C6).unwrap();
        let ham = Hamiltonian::new(&sys).unwrap();
        let lanczos = ground_state_of(
            &ham,
            &SolverOptions {
                method: EigenMethod::Lanczos,
                ..Default::default()
            },
        )
        .unwrap();
        let davidson = ground_state_of(&ham, &SolverOptions::default()).unwrap();
        assert!((lanczos.energy - davidson.energy).abs() < 1e-9);
        assert!(lanczos.psi.fidelity(&davidson.psi) > 1.0 - 1e-9);
        let opts = LanczosOptions {
            n_eigen: 2,
            ..Default::default()
        };
        // force the dense route through a huge Krylov request
        let dense = lowest_eigenpairs(
            ham.dim(),
            |x, y| ham.apply_into(x, y),
            &LanczosOptions {
                krylov_dim: ham.dim(),
                ..opts
            },
        )
        .unwrap();
        assert!((lanczos.energy - dense.values[0]).abs() < 1e-9);
        assert!((lanczos.gap - (dense.values[1] - dense.values[0])).abs() < 1e-8);
    }

    #[test]
    fn rdm_of_product_state() {
        let psi = PureState::vacuum(4);
        let rho = reduced_density_matrix_mask(&psi, 0b0011).unwrap();
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!(von_neumann_entropy(&rho).abs() < 1e-12);
    }

    #[test]
    fn rdm_of_bell_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_real(2, &[h, 0.0, 0.0, h]).unwrap();
        let rho = reduced_density_matrix_mask(&psi, 0b01).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-15);
        assert!((von_neumann_entropy(&rho) - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn rdm_matches_brute_force_partial_trace() {
        let psi = random_state(10, 11);
        let region = 0b10_1010_1010;
        let fast = reduced_density_matrix_mask(&psi, region).unwrap();
        let slow = brute_force_rdm(&psi, region);
        let diff = (fast.matrix() - &slow).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "max deviation {diff}");
        let ev = fast.eigenvalues();
        assert!(ev.iter().all(|&l| l > -1e-12));
        assert!((fast.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rdm_rejects_trivial_regions() {
        let psi = PureState::vacuum(4);
        assert!(reduced_density_matrix_mask(&psi, 0).is_err());
        assert!(reduced_density_matrix_mask(&psi, 0b1111).is_err());
        let part = Partition::parse("AABB").unwrap();
        assert!(reduced_density_matrix(&psi, &part, "AB").is_err());
        assert!(reduced_density_matrix(&psi, &part, "A").is_ok());
    }

    #[test]
    fn entropy_symmetry_for_random_bipartitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..12 {
            let n = rng.gen_range(2..=9);
            let psi = random_state(n, 100 + trial);
            let region = rng.gen_range(1..(1u64 << n) - 1);
            let rest = full_mask(n) & !region;
            let sa = von_neumann_entropy(&reduced_density_matrix_mask(&psi, region).unwrap());
            let sb = von_neumann_entropy(&reduced_density_matrix_mask(&psi, rest).unwrap());
            assert!((sa - sb).abs() < 1e-9, "n={n} region={region:b}: {sa} vs {sb}");
        }
    }

    #[test]
    fn spectrum_entropy_floor() {
        assert_eq!(entropy_of_spectrum(&[1.0, 0.0, -1e-16]), 0.0);
        assert!((entropy_of_spectrum(&[0.5, 0.5]) - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
