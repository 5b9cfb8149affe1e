//! Ground-state observables over a (Δ/Ω, R_b/a) grid.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{entanglement_entropy, ground_state, SolverOptions};
use crate::error::{domain, Result};
use crate::infoflow::{bipartite_entropies, weak_monotonicity_mi, weak_monotonicity_vn, Partition};
use crate::lattice::{LadderSystem, DEFAULT_ASPECT_RATIO, DEFAULT_C6};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// S^vN of region A of the bipartition.
    Svn,
    /// Unfiltered I^X of the bipartition.
    MutualInformation,
    /// I^X / S^vN.
    Ratio,
    /// S^X_{A|B}.
    ConditionalEntropy,
    /// Needs the four-class partition.
    WeakMonotonicityVn,
    WeakMonotonicityMi,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::Svn => "svn",
            Observable::MutualInformation => "mutual_information",
            Observable::Ratio => "ratio",
            Observable::ConditionalEntropy => "conditional_entropy",
            Observable::WeakMonotonicityVn => "weak_monotonicity_vn",
            Observable::WeakMonotonicityMi => "weak_monotonicity_mi",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let all = [
            Observable::Svn,
            Observable::MutualInformation,
            Observable::Ratio,
            Observable::ConditionalEntropy,
            Observable::WeakMonotonicityVn,
            Observable::WeakMonotonicityMi,
        ];
        all.into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| domain(format!("unknown observable {name:?}")))
    }
}

/// Inclusive linear axis; one point means the single value `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub delta_over_omega: Axis,
    pub rb_over_a: Axis,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            delta_over_omega: Axis { lo: 0.0, hi: 5.0, n: 11 },
            rb_over_a: Axis { lo: 1.0, hi: 3.5, n: 11 },
        }
    }
}

/// Everything about the system except the two scanned ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTemplate {
    pub n_rungs: usize,
    pub a: f64,
    pub c6: f64,
    pub aspect_ratio: f64,
    /// Two-class labels; defaults to the half cut.
    pub partition: Option<String>,
    /// Four-class labels for the weak-monotonicity observables.
    pub wm_partition: Option<String>,
}

impl ScanTemplate {
    pub fn new(n_rungs: usize, a: f64) -> Self {
        Self {
            n_rungs,
            a,
            c6: DEFAULT_C6,
            aspect_ratio: DEFAULT_ASPECT_RATIO,
            partition: None,
            wm_partition: None,
        }
    }

    pub fn system(&self, rb_over_a: f64, delta_over_omega: f64) -> Result<LadderSystem> {
        LadderSystem::from_ratios(self.n_rungs, self.a, rb_over_a, delta_over_omega, self.c6)?
            .with_aspect_ratio(self.aspect_ratio)
    }

    fn bipartition(&self) -> Result<Partition> {
        match &self.partition {
            Some(text) => Partition::parse(text),
            None => Partition::half_cut(self.n_rungs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub delta_over_omega: f64,
    pub rb_over_a: f64,
    /// One value per requested observable; NaN where `error` is set.
    pub values: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub delta_values: Vec<f64>,
    pub rb_values: Vec<f64>,
    pub observables: Vec<Observable>,
    /// Row-major: Δ/Ω outer, R_b/a inner.
    pub points: Vec<ScanPoint>,
}

impl Heatmap {
    pub fn get(&self, i_delta: usize, i_rb: usize) -> &ScanPoint {
        &self.points[i_delta * self.rb_values.len() + i_rb]
    }

    pub fn failures(&self) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(|p| p.error.is_some())
    }

    /// Header row of R_b/a values, first column Δ/Ω.
    pub fn to_csv(&self, observable: Observable) -> Option<String> {
        let k = self.observables.iter().position(|&o| o == observable)?;
        let mut out = String::from("delta_over_omega");
        for rb in &self.rb_values {
            write!(out, ",{rb}").unwrap();
        }
        out.push('\n');
        for (i, d) in self.delta_values.iter().enumerate() {
            write!(out, "{d}").unwrap();
            for j in 0..self.rb_values.len() {
                write!(out, ",{:.6e}", self.get(i, j).values[k]).unwrap();
            }
            out.push('\n');
        }
        Some(out)
    }
}

fn evaluate(
    template: &ScanTemplate,
    observables: &[Observable],
    opts: &SolverOptions,
    delta_over_omega: f64,
    rb_over_a: f64,
) -> Result<Vec<f64>> {
    let sys = template.system(rb_over_a, delta_over_omega)?;
    let gs = ground_state(&sys, opts)?;
    let part = template.bipartition()?;
    let (mask_a, _) = part.bipartition()?;
    let needs_dist = observables.iter().any(|o| {
        matches!(
            o,
            Observable::MutualInformation
                | Observable::Ratio
                | Observable::ConditionalEntropy
                | Observable::WeakMonotonicityMi
        )
    });
    let dist = needs_dist.then(|| gs.psi.distribution());
    let ent = match &dist {
        Some(d) => Some(bipartite_entropies(d, &part)?),
        None => None,
    };
    let svn = entanglement_entropy(&gs.psi, mask_a)?;
    let wm_part = || -> Result<Partition> {
        let text = template
            .wm_partition
            .as_deref()
            .ok_or_else(|| domain("weak-monotonicity observables need a four-class partition"))?;
        Partition::parse(text)
    };
    observables
        .iter()
        .map(|o| {
            Ok(match o {
                Observable::Svn => svn,
                Observable::MutualInformation => ent.unwrap().mutual_information(),
                Observable::Ratio => {
                    let i = ent.unwrap().mutual_information();
                    if svn > 0.0 {
                        i / svn
                    } else {
                        f64::NAN
                    }
                }
                Observable::ConditionalEntropy => ent.unwrap().conditional_entropy(),
                Observable::WeakMonotonicityVn => weak_monotonicity_vn(&gs.psi, &wm_part()?)?,
                Observable::WeakMonotonicityMi => {
                    weak_monotonicity_mi(dist.as_ref().unwrap(), &wm_part()?)?
                }
            })
        })
        .collect()
}

/// Evaluates every grid point independently; failures are recorded on the
/// point instead of aborting the scan.
pub fn scan_heatmap(
    grid: &ScanGrid,
    template: &ScanTemplate,
    observables: &[Observable],
    opts: &SolverOptions,
) -> Result<Heatmap> {
    if observables.is_empty() {
        return Err(domain("no observables requested"));
    }
    let delta_values = grid.delta_over_omega.values();
    let rb_values = grid.rb_over_a.values();
    if delta_values.is_empty() || rb_values.is_empty() {
        return Err(domain("scan grid needs at least one point per axis"));
    }
    // template errors are configuration errors, not per-point failures
    template.bipartition()?.bipartition()?;
    let coords: Vec<(f64, f64)> = delta_values
        .iter()
        .flat_map(|&d| rb_values.iter().map(move |&r| (d, r)))
        .collect();
    let points = coords
        .par_iter()
        .map(|&(d, r)| match evaluate(template, observables, opts, d, r) {
            Ok(values) => ScanPoint {
                delta_over_omega: d,
                rb_over_a: r,
                values,
                error: None,
            },
            Err(e) => ScanPoint {
                delta_over_omega: d,
                rb_over_a: r,
                values: vec![f64::NAN; observables.len()],
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(Heatmap {
        delta_values,
        rb_values,
        observables: observables.to_vec(),
        points,
    })
}
