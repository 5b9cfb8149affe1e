//! Bitstring distributions, shot tables, resampling, cumulative curves,
//! log-binned densities and the volume-scaling fits.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::full_mask;
use crate::error::{domain, Error, Result};
use crate::fit::{ols, LinearFit};
use crate::lattice::{BasisIndex, LadderSystem};
use crate::spectrum::{ground_state, SolverOptions};

/// Allowed |Σp − 1|.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Exact,
    Sampled { n_shots: u64 },
    Mitigated,
}

/// Normalized distribution over bitstrings; only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    n_atoms: usize,
    entries: BTreeMap<BasisIndex, f64>,
    origin: Origin,
}

impl ProbDist {
    /// Validating constructor. Zero entries are dropped.
    pub fn new(n_atoms: usize, entries: BTreeMap<BasisIndex, f64>, origin: Origin) -> Result<Self> {
        let mask = full_mask(n_atoms);
        let mut total = 0.0;
        for (&bits, &p) in &entries {
            if bits & !mask != 0 {
                return Err(domain(format!("bitstring {bits:#x} exceeds {n_atoms} atoms")));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(domain(format!("invalid probability {p}")));
            }
            total += p;
        }
        let entries: BTreeMap<_, _> = entries.into_iter().filter(|&(_, p)| p > 0.0).collect();
        if entries.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self {
            n_atoms,
            entries,
            origin,
        })
    }

    /// Normalizes non-negative weights.
    pub fn normalized(
        n_atoms: usize,
        weights: BTreeMap<BasisIndex, f64>,
        origin: Origin,
    ) -> Result<Self> {
        if weights.values().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(domain("weights must be finite and non-negative"));
        }
        let total: f64 = weights.values().sum();
        if total <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let entries = weights
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(k, w)| (k, w / total))
            .collect();
        Self::new(n_atoms, entries, origin)
    }

    /// From a dense vector indexed by basis state.
    pub fn from_dense(n_atoms: usize, probs: &[f64], origin: Origin) -> Result<Self> {
        if probs.len() != 1usize << n_atoms {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n_atoms,
                got: probs.len(),
            });
        }
        let entries = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i as BasisIndex, p))
            .collect();
        Self::new(n_atoms, entries, origin)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn get(&self, bits: BasisIndex) -> f64 {
        self.entries.get(&bits).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> &BTreeMap<BasisIndex, f64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisIndex, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn max_probability(&self) -> f64 {
        self.entries.values().cloned().fold(0.0, f64::max)
    }

    pub fn min_probability(&self) -> f64 {
        self.entries.values().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Entries sorted by decreasing probability (ties by bitstring).
    pub fn ranked(&self) -> Vec<(BasisIndex, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// ½ Σ |p − q| over the union of supports.
    pub fn total_variation(&self, other: &ProbDist) -> f64 {
        let mut sum = 0.0;
        for (&k, &p) in &self.entries {
            sum += (p - other.get(k)).abs();
        }
        for (&k, &q) in &other.entries {
            if !self.entries.contains_key(&k) {
                sum += q;
            }
        }
        0.5 * sum
    }
}

/// Aggregated shot counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountTable {
    n_atoms: usize,
    counts: BTreeMap<BasisIndex, u64>,
}

impl CountTable {
    pub fn new(n_atoms: usize) -> Self {
        Self {
            n_atoms,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_counts(n_atoms: usize, counts: impl IntoIterator<Item = (BasisIndex, u64)>) -> Result<Self> {
        let mut table = Self::new(n_atoms);
        for (bits, c) in counts {
            table.add(bits, c)?;
        }
        Ok(table)
    }

    pub fn add(&mut self, bits: BasisIndex, count: u64) -> Result<()> {
        if bits & !full_mask(self.n_atoms) != 0 {
            return Err(domain(format!("bitstring {bits:#x} exceeds {} atoms", self.n_atoms)));
        }
        if count > 0 {
            *self.counts.entry(bits).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// N_sh.
    pub fn n_shots(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, bits: BasisIndex) -> u64 {
        self.counts.get(&bits).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisIndex, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// p = N_n / N_sh.
    pub fn to_distribution(&self) -> Result<ProbDist> {
        counts_to_probdist(self)
    }
}

pub fn counts_to_probdist(c: &CountTable) -> Result<ProbDist> {
    let n_shots = c.n_shots();
    if n_shots == 0 {
        return Err(Error::EmptyDistribution);
    }
    let total = n_shots as f64;
    let entries = c.iter().map(|(k, n)| (k, n as f64 / total)).collect();
    ProbDist::new(c.n_atoms(), entries, Origin::Sampled { n_shots })
}

/// `n_shots` independent draws by inverting the cumulative intervals of `p`
/// (bitstring order) with a ChaCha stream seeded by `seed`.
pub fn sample(p: &ProbDist, n_shots: u64, seed: u64) -> CountTable {
    let mut table = CountTable::new(p.n_atoms());
    if n_shots == 0 {
        return table;
    }
    let keys: Vec<BasisIndex> = p.entries.keys().copied().collect();
    let mut cdf = Vec::with_capacity(keys.len());
    let mut acc = 0.0;
    for &v in p.entries.values() {
        acc += v;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; keys.len()];
    for _ in 0..n_shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(keys.len() - 1);
        counts[idx] += 1;
    }
    for (k, c) in keys.into_iter().zip(counts) {
        if c > 0 {
            table.counts.insert(k, c);
        }
    }
    table
}

/// Σ(p_Λ) = Σ_{p_n ≤ p_Λ} p_n as a right-continuous step curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve {
    /// (p_Λ, Σ(p_Λ)) at every distinct probability, ascending.
    pub points: Vec<(f64, f64)>,
}

impl CumulativeCurve {
    pub fn at(&self, p_lambda: f64) -> f64 {
        let idx = self.points.partition_point(|&(p, _)| p <= p_lambda);
        if idx == 0 {
            0.0
        } else {
            self.points[idx - 1].1
        }
    }

    /// sup_p |Σ_self(p) − Σ_other(p)|; both curves are constant between
    /// breakpoints, so checking the union of breakpoints is exact.
    pub fn sup_distance(&self, other: &CumulativeCurve) -> f64 {
        self.points
            .iter()
            .chain(&other.points)
            .map(|&(p, _)| (self.at(p) - other.at(p)).abs())
            .fold(0.0, f64::max)
    }

    /// max over `grid` of |Σ_self − Σ_other|, i.e. the curves as plotted on
    /// a fixed axis.
    pub fn sup_distance_on(&self, other: &CumulativeCurve, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&p| (self.at(p) - other.at(p)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn cumulative(p: &ProbDist) -> CumulativeCurve {
    let mut probs: Vec<f64> = p.entries.values().copied().collect();
    probs.sort_by(f64::total_cmp);
    let total: f64 = probs.iter().sum();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut acc = 0.0;
    for v in probs {
        acc += v;
        match points.last_mut() {
            // ties enter together at their shared threshold
            Some(last) if last.0 == v => last.1 = acc / total,
            _ => points.push((v, acc / total)),
        }
    }
    if let Some(last) = points.last_mut() {
        last.1 = 1.0;
    }
    CumulativeCurve { points }
}

/// Equal-width bins in log10 p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub log10_lo: f64,
    pub log10_hi: f64,
    pub n_bins: usize,
}

impl Binning {
    pub fn new(log10_lo: f64, log10_hi: f64, n_bins: usize) -> Result<Self> {
        if !(log10_lo < log10_hi) || n_bins < 2 {
            return Err(domain(format!(
                "binning needs lo < hi and at least 2 bins, got [{log10_lo}, {log10_hi}] x {n_bins}"
            )));
        }
        Ok(Self {
            log10_lo,
            log10_hi,
            n_bins,
        })
    }

    /// 50 bins over [1e-26, 1e-1].
    pub fn wide() -> Self {
        Self {
            log10_lo: -26.0,
            log10_hi: -1.0,
            n_bins: 50,
        }
    }

    /// Bins 0.1 decade wide starting at `log10_lo`.
    pub fn tenth_decades(log10_lo: f64, n_bins: usize) -> Result<Self> {
        Self::new(log10_lo, log10_lo + 0.1 * n_bins as f64, n_bins)
    }

    pub fn width(&self) -> f64 {
        (self.log10_hi - self.log10_lo) / self.n_bins as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    pub p_center: f64,
    pub delta_p: f64,
    pub count: u64,
    /// Σ p over the bitstrings in the bin.
    pub weight: f64,
    /// 𝒩(p) = count / Δp.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub binning: Binning,
    pub bins: Vec<DensityBin>,
}

impl DensityEstimate {
    /// Σ(p_Λ) rebuilt from bins whose upper edge lies at or below p_Λ,
    /// treating every bitstring in a bin as sitting at the bin center.
    pub fn cumulative_from_bins(&self, p_lambda: f64) -> f64 {
        let half = 0.5 * self.binning.width();
        self.bins
            .iter()
            .filter(|b| 10f64.powf(b.p_center.log10() + half) <= p_lambda * (1.0 + 1e-12))
            .map(|b| b.count as f64 * b.p_center)
            .sum()
    }

    pub fn total_count(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Histogram of bitstring probabilities on a log10 grid.
pub fn density_of_probability(p: &ProbDist, binning: Binning) -> DensityEstimate {
    let w = binning.width();
    let mut counts = vec![0u64; binning.n_bins];
    let mut weights = vec![0.0; binning.n_bins];
    for &v in p.entries.values() {
        let x = (v.log10() - binning.log10_lo) / w;
        if x >= 0.0 && x < binning.n_bins as f64 {
            let i = x.floor() as usize;
            counts[i] += 1;
            weights[i] += v;
        }
    }
    let bins = (0..binning.n_bins)
        .map(|i| {
            let center = binning.log10_lo + (i as f64 + 0.5) * w;
            let delta_p = 10f64.powf(center + 0.5 * w) - 10f64.powf(center - 0.5 * w);
            DensityBin {
                p_center: 10f64.powf(center),
                delta_p,
                count: counts[i],
                weight: weights[i],
                density: counts[i] as f64 / delta_p,
            }
        })
        .collect();
    DensityEstimate { binning, bins }
}

/// 𝒩(p) ≃ C p^{−1−ζ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub c: f64,
    pub zeta: f64,
    pub r_squared: f64,
    pub n_bins: usize,
    pub p_range: (f64, f64),
}

/// Log-space least squares over nonempty bins with centers in `p_range`.
pub fn power_law_fit(d: &DensityEstimate, p_range: (f64, f64)) -> Result<PowerLawFit> {
    let (lo, hi) = p_range;
    let (x, y): (Vec<f64>, Vec<f64>) = d
        .bins
        .iter()
        .filter(|b| b.count > 0 && b.p_center >= lo && b.p_center <= hi)
        .map(|b| (b.p_center.log10(), b.density.log10()))
        .unzip();
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs 3 nonempty bins, found {}",
            x.len()
        )));
    }
    let fit = ols(&x, &y)?;
    Ok(PowerLawFit {
        c: 10f64.powf(fit.intercept),
        zeta: -1.0 - fit.slope,
        r_squared: fit.r_squared,
        n_bins: x.len(),
        p_range,
    })
}

/// Largest ground-state bitstring probability per system, keyed by rung count.
pub fn max_prob_series(systems: &[LadderSystem], opts: &SolverOptions) -> Result<Vec<(usize, f64)>> {
    systems
        .iter()
        .map(|sys| {
            let gs = ground_state(sys, opts)?;
            let pmax = gs.psi.probabilities().into_iter().fold(0.0, f64::max);
            Ok((sys.n_rungs(), pmax))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    All,
    /// N_s mod 3 equal to the payload.
    Mod3(u8),
}

impl SizeClass {
    pub fn contains(&self, n_rungs: usize) -> bool {
        match *self {
            SizeClass::All => true,
            SizeClass::Mod3(r) => n_rungs % 3 == r as usize,
        }
    }
}

/// P_max(N_s) = A e^{−k N_s}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub a: f64,
    pub k: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl ExpFit {
    pub fn predict(&self, n_rungs: f64) -> f64 {
        self.a * (-self.k * n_rungs).exp()
    }
}

/// Least squares on ln P_max versus N_s over the sizes in `class`.
pub fn exp_decay_fit(series: &[(usize, f64)], class: SizeClass) -> Result<ExpFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = series
        .iter()
        .filter(|(n, p)| class.contains(*n) && *p > 0.0)
        .map(|&(n, p)| (n as f64, p.ln()))
        .unzip();
    if x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "exponential fit needs 2 sizes in {class:?}, found {}",
            x.len()
        )));
    }
    let LinearFit {
        slope,
        intercept,
        r_squared,
        n_points,
    } = ols(&x, &y)?;
    Ok(ExpFit {
        a: intercept.exp(),
        k: -slope,
        r_squared,
        n_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(u64, f64)], n: usize) -> ProbDist {
        ProbDist::new(n, pairs.iter().copied().collect(), Origin::Exact).unwrap()
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(ProbDist::new(2, [(0, 0.5), (1, 0.4)].into_iter().collect(), Origin::Exact).is_err());
        assert!(ProbDist::new(1, [(0, 0.5), (2, 0.5)].into_iter().collect(), Origin::Exact).is_err());
        assert!(ProbDist::new(1, [(0, 1.5), (1, -0.5)].into_iter().collect(), Origin::Exact).is_err());
        assert!(matches!(
            ProbDist::new(1, BTreeMap::new(), Origin::Exact),
            Err(Error::EmptyDistribution)
        ));
        let d = dist(&[(0, 1.0), (1, 0.0)], 1);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn counts_to_probabilities() {
        let one = CountTable::from_counts(2, [(0b10, 1)]).unwrap();
        let d = counts_to_probdist(&one).unwrap();
        assert_eq!(d.get(0b10), 1.0);
        assert_eq!(d.origin(), Origin::Sampled { n_shots: 1 });

        let t = CountTable::from_counts(2, [(0b00, 730), (0b11, 270)]).unwrap();
        let d = t.to_distribution().unwrap();
        assert_eq!(d.get(0b00), 0.73);
        assert_eq!(d.get(0b11), 0.27);

        assert!(matches!(
            counts_to_probdist(&CountTable::new(3)),
            Err(Error::EmptyDistribution)
        ));
    }

    #[test]
    fn sampling_edge_cases() {
        let d = dist(&[(5, 1.0)], 3);
        assert!(sample(&d, 0, 1).is_empty());
        let t = sample(&d, 100, 1);
        assert_eq!(t.get(5), 100);
        assert_eq!(t.n_shots(), 100);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = dist(&[(0, 0.5), (1, 0.3), (2, 0.2)], 2);
        assert_eq!(sample(&d, 1000, 42), sample(&d, 1000, 42));
        assert_ne!(sample(&d, 1000, 42), sample(&d, 1000, 43));
        let t = sample(&d, 100_000, 9);
        for (k, p) in d.iter() {
            let n = 100_000.0;
            let sigma = (n * p * (1.0 - p)).sqrt();
            assert!((t.get(k) as f64 - n * p).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn cumulative_examples() {
        let d = dist(&[(0, 0.5), (1, 0.3), (2, 0.2)], 2);
        let c = cumulative(&d);
        assert!((c.at(0.3) - 0.5).abs() < 1e-15);
        assert_eq!(c.at(0.5), 1.0);
        assert_eq!(c.at(0.9), 1.0);
        assert_eq!(c.at(0.1), 0.0);
    }

    #[test]
    fn cumulative_groups_ties() {
        let d = dist(&[(0, 0.25), (1, 0.25), (2, 0.25), (3, 0.25)], 2);
        let c = cumulative(&d);
        assert_eq!(c.points, vec![(0.25, 1.0)]);
        assert_eq!(c.at(0.2499), 0.0);
    }

    #[test]
    fn sup_distance_of_identical_curves_is_zero() {
        let d = dist(&[(0, 0.5), (1, 0.3), (2, 0.2)], 2);
        let c = cumulative(&d);
        assert_eq!(c.sup_distance(&c), 0.0);
        let e = dist(&[(0, 0.5), (1, 0.5)], 2);
        assert!((c.sup_distance(&cumulative(&e)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_single_entry_and_uniform() {
        let d = dist(&[(3, 1.0)], 2);
        let est = density_of_probability(&d, Binning::new(-3.0, 0.5, 7).unwrap());
        assert_eq!(est.total_count(), 1);
        assert_eq!(est.bins.iter().filter(|b| b.count > 0).count(), 1);

        let k = 6;
        let p = 1.0 / (1u64 << k) as f64;
        let u = ProbDist::from_dense(k, &vec![p; 1 << k], Origin::Exact).unwrap();
        let est = density_of_probability(&u, Binning::wide());
        let occupied: Vec<_> = est.bins.iter().filter(|b| b.count > 0).collect();
        assert_eq!(occupied.len(), 1);
        assert_eq!(occupied[0].count, 1 << k);
    }

    #[test]
    fn density_bin_width_formula() {
        let b = Binning::tenth_decades(-5.0, 17).unwrap();
        let d = dist(&[(0, 1.0)], 1);
        let est = density_of_probability(&d, b);
        let bin = est.bins[3];
        let lc = bin.p_center.log10();
        let expected = 10f64.powf(lc + 0.05) - 10f64.powf(lc - 0.05);
        assert!(((bin.delta_p - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn power_law_noiseless_recovery() {
        let binning = Binning::new(-8.0, -1.0, 28).unwrap();
        let zeta = 0.5;
        let c = 3.0;
        let bins = (0..binning.n_bins)
            .map(|i| {
                let center = 10f64.powf(binning.log10_lo + (i as f64 + 0.5) * binning.width());
                DensityBin {
                    p_center: center,
                    delta_p: 1.0,
                    count: 1,
                    weight: center,
                    density: c * center.powf(-1.0 - zeta),
                }
            })
            .collect();
        let est = DensityEstimate { binning, bins };
        let fit = power_law_fit(&est, (1e-9, 1.0)).unwrap();
        assert!((fit.zeta - zeta).abs() < 1e-6);
        assert!(((fit.c - c) / c).abs() < 1e-6);
    }

    #[test]
    fn power_law_rejects_degenerate_histogram() {
        let k = 4;
        let u = ProbDist::from_dense(k, &vec![1.0 / 16.0; 16], Origin::Exact).unwrap();
        let est = density_of_probability(&u, Binning::wide());
        assert!(matches!(
            power_law_fit(&est, (1e-30, 1.0)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn exp_fit_recovery_and_two_point_solution() {
        let series: Vec<(usize, f64)> = (4..12).map(|n| (n, 0.5 * (-0.1 * n as f64).exp())).collect();
        let fit = exp_decay_fit(&series, SizeClass::All).unwrap();
        assert!((fit.a - 0.5).abs() < 1e-12 && (fit.k - 0.1).abs() < 1e-12);

        let two = [(5usize, 0.3), (8usize, 0.1)];
        let fit = exp_decay_fit(&two, SizeClass::All).unwrap();
        let k = (0.3f64 / 0.1).ln() / 3.0;
        let a = 0.3 * (k * 5.0).exp();
        assert!((fit.k - k).abs() < 1e-12 && ((fit.a - a) / a).abs() < 1e-12);

        assert!(exp_decay_fit(&two, SizeClass::Mod3(0)).is_err());
        let fit = exp_decay_fit(&series, SizeClass::Mod3(1)).unwrap();
        assert_eq!(fit.n_points, 3);
    }

    #[test]
    fn classical_limit_has_unit_max_probability() {
        let sys = LadderSystem::new(1, 4.1, 0.0, 30.0, crate::lattice::DEFAULT_C6).unwrap();
        let series = max_prob_series(&[sys], &SolverOptions::default()).unwrap();
        assert_eq!(series, vec![(1, 1.0)]);
    }

    #[test]
    fn total_variation() {
        let a = dist(&[(0, 0.5), (1, 0.5)], 1);
        let b = dist(&[(0, 1.0)], 1);
        assert!((a.total_variation(&b) - 0.5).abs() < 1e-15);
        assert_eq!(a.total_variation(&a), 0.0);
    }
}
