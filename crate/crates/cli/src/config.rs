//! Run configuration, loaded from TOML or JSON and written back next to every
//! set of outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rydladder::dist::Binning;
use rydladder::dynamics::{DEFAULT_CHECKPOINT_EVERY, DEFAULT_DT};
use rydladder::infoflow::{EstimatorConfig, Partition};
use rydladder::lattice::{LadderSystem, DEFAULT_ASPECT_RATIO, DEFAULT_C6};
use rydladder::noise::{M3Options, ReadoutModel};
use rydladder::spectrum::{Axis, ScanGrid, SolverOptions};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub n_rungs: usize,
    /// μm.
    pub a: f64,
    pub rb_over_a: f64,
    pub delta_over_omega: f64,
    /// rad/μs; overrides the ratio form together with `delta`.
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    /// rad·μm⁶/μs.
    pub c6: f64,
    pub aspect_ratio: f64,
    /// μm.
    pub cutoff: Option<f64>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_rungs: 6,
            a: 4.1,
            rb_over_a: 2.35,
            delta_over_omega: 3.5,
            omega: None,
            delta: None,
            c6: DEFAULT_C6,
            aspect_ratio: DEFAULT_ASPECT_RATIO,
            cutoff: None,
        }
    }
}

impl SystemConfig {
    pub fn build(&self) -> CliResult<LadderSystem> {
        self.build_sized(self.n_rungs, self.rb_over_a)
    }

    /// Same parameters with a different size and blockade ratio.
    pub fn build_sized(&self, n_rungs: usize, rb_over_a: f64) -> CliResult<LadderSystem> {
        let sys = match (self.omega, self.delta) {
            (Some(omega), Some(delta)) => LadderSystem::new(n_rungs, self.a, omega, delta, self.c6)?,
            (None, None) => {
                LadderSystem::from_ratios(n_rungs, self.a, rb_over_a, self.delta_over_omega, self.c6)?
            }
            _ => {
                return Err(CliError::Config(
                    "system.omega and system.delta must be given together".into(),
                ))
            }
        };
        Ok(sys.with_aspect_ratio(self.aspect_ratio)?.with_cutoff(self.cutoff)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub log10_lo: f64,
    pub log10_hi: f64,
    pub n_bins: usize,
    pub fit_lo: f64,
    pub fit_hi: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        let wide = Binning::wide();
        Self {
            log10_lo: wide.log10_lo,
            log10_hi: wide.log10_hi,
            n_bins: wide.n_bins,
            fit_lo: 1e-8,
            fit_hi: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub schedule: String,
    /// JSON with `omega` and `delta` breakpoint lists in (μs, MHz).
    pub schedule_file: Option<PathBuf>,
    pub dt: f64,
    pub checkpoint_every: usize,
    pub rampdown_times: Vec<f64>,
    pub rampdown_dt: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            schedule: "ramp4us".into(),
            schedule_file: None,
            dt: DEFAULT_DT,
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            rampdown_times: vec![0.05, 0.5],
            rampdown_dt: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub delta_over_omega: Axis,
    pub rb_over_a: Axis,
    pub observables: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let grid = ScanGrid::default();
        Self {
            delta_over_omega: grid.delta_over_omega,
            rb_over_a: grid.rb_over_a,
            observables: vec!["svn".into(), "mutual_information".into(), "ratio".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxProbConfig {
    pub min_rungs: usize,
    pub max_rungs: usize,
    pub rb_over_a: Vec<f64>,
}

impl Default for MaxProbConfig {
    fn default() -> Self {
        Self {
            min_rungs: 4,
            max_rungs: 10,
            rb_over_a: vec![2.0, 2.35, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub solver_tol: f64,
    /// Two-class labels; the half cut when absent.
    pub partition: Option<String>,
    /// Four-class labels; see `default_wm_partition` when absent.
    pub wm_partition: Option<String>,
    pub n_shots: u64,
    /// Reading post_sequence 0 as Rydberg. Absent: on for task-result JSON,
    /// off for NDJSON shot files.
    pub invert_post_sequence: Option<bool>,
    pub system: SystemConfig,
    pub estimator: EstimatorConfig,
    pub density: DensityConfig,
    pub readout: ReadoutModel,
    pub m3: M3Options,
    pub dynamics: DynamicsConfig,
    pub scan: ScanConfig,
    pub maxprob: MaxProbConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("out"),
            solver_tol: 1e-10,
            partition: None,
            wm_partition: None,
            n_shots: 4405,
            invert_post_sequence: None,
            system: SystemConfig::default(),
            estimator: EstimatorConfig::default(),
            density: DensityConfig::default(),
            readout: ReadoutModel::default(),
            m3: M3Options::default(),
            dynamics: DynamicsConfig::default(),
            scan: ScanConfig::default(),
            maxprob: MaxProbConfig::default(),
        }
    }
}

/// Outer rungs D, inner rungs split into contiguous A, B, C blocks
/// ("DDAABBCCDD" at 5 rungs).
pub fn default_wm_partition(n_rungs: usize) -> CliResult<String> {
    if n_rungs < 5 {
        return Err(CliError::Config(format!(
            "the default weak-monotonicity partition needs 5 rungs, got {n_rungs}; set wm_partition"
        )));
    }
    let inner = n_rungs - 2;
    let labels: String = (0..n_rungs)
        .map(|r| {
            if r == 0 || r + 1 == n_rungs {
                'D'
            } else {
                ['A', 'B', 'C'][(r - 1) * 3 / inner]
            }
        })
        .flat_map(|c| [c, c])
        .collect();
    Ok(labels)
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| e.to_string()),
            _ => toml::from_str(&text).map_err(|e| e.to_string()),
        };
        let cfg: RunConfig =
            parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        ReadoutModel::new(self.readout.p01, self.readout.p10)?;
        self.system.build()?;
        self.partition()?;
        if self.n_shots == 0 {
            return Err(CliError::Config("n_shots must be positive".into()));
        }
        if !(self.density.fit_lo > 0.0 && self.density.fit_lo < self.density.fit_hi) {
            return Err(CliError::Config("density fit window must satisfy 0 < lo < hi".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions::with_tol(self.solver_tol)
    }

    pub fn partition(&self) -> CliResult<Partition> {
        let part = match &self.partition {
            Some(text) => Partition::parse(text)?,
            None => Partition::half_cut(self.system.n_rungs)?,
        };
        if part.n_atoms() != 2 * self.system.n_rungs {
            return Err(CliError::Config(format!(
                "partition covers {} atoms, system has {}",
                part.n_atoms(),
                2 * self.system.n_rungs
            )));
        }
        part.bipartition()?;
        Ok(part)
    }

    pub fn wm_partition(&self) -> CliResult<Partition> {
        let text = match &self.wm_partition {
            Some(t) => t.clone(),
            None => default_wm_partition(self.system.n_rungs)?,
        };
        let part = Partition::parse(&text)?;
        part.quadripartition()?;
        Ok(part)
    }

    pub fn binning(&self) -> CliResult<Binning> {
        Ok(Binning::new(self.density.log10_lo, self.density.log10_hi, self.density.n_bins)?)
    }
}
