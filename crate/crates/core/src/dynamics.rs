//! Piecewise-linear drive schedules and first-order Trotter evolution.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{BasisIndex, Hamiltonian, LadderSystem};
use crate::spectrum::{classical_ground_manifold, ground_state_of, PureState, SolverOptions};

pub const DEFAULT_DT: f64 = 0.02;
pub const DEFAULT_CHECKPOINT_EVERY: usize = 25;

/// Breakpoints (t in μs, value in rad/μs) joined by straight lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Schedule("need at least two breakpoints".into()));
        }
        if points[0].0 != 0.0 {
            return Err(Error::Schedule(format!("first breakpoint at t = {}, not 0", points[0].0)));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::Schedule("breakpoints must be finite".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Schedule("breakpoint times must increase strictly".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn t_end(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation, held constant outside the breakpoint range.
    pub fn eval(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let i = pts.partition_point(|p| p.0 <= t);
        if i == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (t0, v0) = pts[i - 1];
        let (t1, v1) = pts[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self.points.iter().map(|&(t, v)| (t, v * factor)).collect(),
        }
    }
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinear {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PiecewiseLinear> for Vec<(f64, f64)> {
    fn from(p: PiecewiseLinear) -> Self {
        p.points
    }
}

/// Ω(t) and Δ(t) over [0, t_final].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    pub omega: PiecewiseLinear,
    pub delta: PiecewiseLinear,
}

impl RampSchedule {
    pub fn new(omega: PiecewiseLinear, delta: PiecewiseLinear) -> Result<Self> {
        if (omega.t_end() - delta.t_end()).abs() > 1e-12 {
            return Err(Error::Schedule(format!(
                "Ω ends at {} μs but Δ ends at {} μs",
                omega.t_end(),
                delta.t_end()
            )));
        }
        if omega.points().iter().any(|p| p.1 < 0.0) {
            return Err(Error::Schedule("Ω must be non-negative".into()));
        }
        Ok(Self { omega, delta })
    }

    pub fn constant(omega: f64, delta: f64, t_final: f64) -> Result<Self> {
        Self::new(
            PiecewiseLinear::new(vec![(0.0, omega), (t_final, omega)])?,
            PiecewiseLinear::new(vec![(0.0, delta), (t_final, delta)])?,
        )
    }

    pub fn t_final(&self) -> f64 {
        self.omega.t_end()
    }

    pub fn omega_at(&self, t: f64) -> f64 {
        self.omega.eval(t)
    }

    pub fn delta_at(&self, t: f64) -> f64 {
        self.delta.eval(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Ramp4us,
    Ramp4usModified,
    Ramp12us,
}

impl ScheduleKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ramp4us" => Ok(Self::Ramp4us),
            "ramp4us_modified" => Ok(Self::Ramp4usModified),
            "ramp12us" => Ok(Self::Ramp12us),
            _ => Err(domain(format!("unknown schedule {name:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ramp4us => "ramp4us",
            Self::Ramp4usModified => "ramp4us_modified",
            Self::Ramp12us => "ramp12us",
        }
    }
}

/// The tabulated trapezoidal ramps.
pub fn schedule_standard(kind: ScheduleKind, omega_max: f64, delta_max: f64) -> Result<RampSchedule> {
    if !(omega_max > 0.0 && delta_max > 0.0) {
        return Err(domain("schedule maxima must be positive"));
    }
    let (rise, hold_end, t_final, delta_start) = match kind {
        ScheduleKind::Ramp4us => (0.5, 3.95, 4.0, -delta_max),
        ScheduleKind::Ramp4usModified => (1.0, 3.95, 4.0, -0.5 * delta_max),
        ScheduleKind::Ramp12us => (0.5, 11.95, 12.0, -delta_max),
    };
    RampSchedule::new(
        PiecewiseLinear::new(vec![
            (0.0, 0.0),
            (rise, omega_max),
            (hold_end, omega_max),
            (t_final, 0.0),
        ])?,
        PiecewiseLinear::new(vec![
            (0.0, delta_start),
            (rise, delta_start),
            (hold_end, delta_max),
            (t_final, delta_max),
        ])?,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    /// |⟨ψ_GS(t)|ψ(t)⟩|²; for Ω(t) = 0 the weight on the classical ground manifold.
    pub fidelity: Option<f64>,
    pub norm: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub psi_final: PureState,
    pub checkpoints: Vec<Checkpoint>,
    pub dt: f64,
    pub n_steps: usize,
}

/// exp(−i θ σ_x) on atom `k`.
pub(crate) fn rotate_atom(amps: &mut [Complex64], k: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    let stride = 1usize << k;
    let mis = Complex64::new(0.0, -s);
    for block in amps.chunks_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x * c + y * mis;
            *b = y * c + x * mis;
        }
    }
}

fn diagonal_phase(amps: &mut [Complex64], pair: &[f64], delta: f64, dt: f64) {
    amps.par_iter_mut().enumerate().for_each(|(s, a)| {
        let e = pair[s] - delta * (s as BasisIndex).count_ones() as f64;
        let (sn, cs) = (-e * dt).sin_cos();
        *a *= Complex64::new(cs, sn);
    });
}

/// One first-order step at drive (Ω, Δ): diagonal phase, then the Rabi rotations.
fn trotter_step(amps: &mut [Complex64], n_atoms: usize, pair: &[f64], omega: f64, delta: f64, dt: f64) {
    diagonal_phase(amps, pair, delta, dt);
    if omega != 0.0 {
        let theta = 0.5 * omega * dt;
        for k in 0..n_atoms {
            rotate_atom(amps, k, theta);
        }
    }
}

fn instantaneous_fidelity(
    base: &Hamiltonian,
    psi: &PureState,
    omega: f64,
    delta: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    let ham = base.with_drive(omega, delta);
    if omega == 0.0 {
        let amps = psi.amplitudes();
        return Ok(classical_ground_manifold(&ham)
            .into_iter()
            .map(|s| amps[s as usize].norm_sqr())
            .sum());
    }
    let gs = ground_state_of(&ham, opts)?;
    Ok(gs.psi.fidelity(psi))
}

fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain(format!("time step must be positive, got {dt}")));
    }
    let n = (t_final / dt).round();
    if n < 1.0 || (n * dt - t_final).abs() > 1e-9 * t_final.max(1.0) {
        return Err(Error::Schedule(format!(
            "dt = {dt} μs does not divide t_final = {t_final} μs"
        )));
    }
    Ok(n as usize)
}

/// Evolves `psi0` under H(t) built from the geometry and C6 of `template`.
/// A `checkpoint_every` of 0 records only the initial and final states.
pub fn trotter_evolve(
    template: &LadderSystem,
    sched: &RampSchedule,
    dt: f64,
    psi0: &PureState,
    checkpoint_every: usize,
    opts: &SolverOptions,
) -> Result<EvolutionResult> {
    if psi0.n_atoms() != template.n_atoms() {
        return Err(Error::DimensionMismatch {
            expected: template.n_atoms(),
            got: psi0.n_atoms(),
        });
    }
    let n_steps = step_count(sched.t_final(), dt)?;
    let base = Hamiltonian::new(template)?;
    let pair = base.pair_energies().to_vec();
    let n_atoms = template.n_atoms();
    let mut amps = psi0.amplitudes().to_vec();
    let mut checkpoints = Vec::new();

    let record = |step: usize, amps: &[Complex64], checkpoints: &mut Vec<Checkpoint>| {
        let t = step as f64 * dt;
        let psi = PureState::from_amplitudes_unchecked(n_atoms, amps.to_vec());
        let norm = psi.norm();
        let (fidelity, error) =
            match instantaneous_fidelity(&base, &psi, sched.omega_at(t), sched.delta_at(t), opts) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
        checkpoints.push(Checkpoint {
            t,
            fidelity,
            norm,
            error,
        });
    };

    record(0, &amps, &mut checkpoints);
    for j in 0..n_steps {
        let t = j as f64 * dt;
        trotter_step(&mut amps, n_atoms, &pair, sched.omega_at(t), sched.delta_at(t), dt);
        let done = j + 1;
        if done == n_steps || (checkpoint_every > 0 && done % checkpoint_every == 0) {
            record(done, &amps, &mut checkpoints);
        }
    }
    Ok(EvolutionResult {
        psi_final: PureState::from_amplitudes_unchecked(n_atoms, amps),
        checkpoints,
        dt,
        n_steps,
    })
}

/// Ω ramped linearly from its value in `sys` to 0 over `ramp_time`, with Δ
/// and the interactions held. The step is shrunk so it divides `ramp_time`.
pub fn rampdown_evolve(sys: &LadderSystem, psi_gs: &PureState, ramp_time: f64, dt: f64) -> Result<PureState> {
    if psi_gs.n_atoms() != sys.n_atoms() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_atoms(),
            got: psi_gs.n_atoms(),
        });
    }
    if !(ramp_time >= 0.0) || !(dt > 0.0) {
        return Err(domain("ramp time must be non-negative and dt positive"));
    }
    if ramp_time == 0.0 {
        return Ok(psi_gs.clone());
    }
    let n_steps = (ramp_time / dt).ceil().max(1.0) as usize;
    let step = ramp_time / n_steps as f64;
    let ham = Hamiltonian::new(sys)?;
    let pair = ham.pair_energies();
    let mut amps = psi_gs.amplitudes().to_vec();
    let omega0 = sys.omega();
    for j in 0..n_steps {
        let t = j as f64 * step;
        let omega = omega0 * (1.0 - t / ramp_time);
        trotter_step(&mut amps, sys.n_atoms(), pair, omega, sys.delta(), step);
    }
    Ok(PureState::from_amplitudes_unchecked(sys.n_atoms(), amps))
}
