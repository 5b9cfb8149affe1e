//! Shannon entropies of bitstring distributions, mutual information,
//! filtration by a probability threshold and the filtered estimator of the
//! half-cut entanglement entropy.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{compress, full_mask};
use crate::dist::ProbDist;
use crate::error::{domain, Error, Result};
use crate::fit::{fit_sigmoid, Sigmoid, SigmoidFit};
use crate::lattice::BasisIndex;
use crate::spectrum::{entanglement_entropy, PureState};

/// One region label per atom, rung-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<char>,
    classes: Vec<char>,
}

impl Partition {
    pub fn parse(text: &str) -> Result<Self> {
        let labels: Vec<char> = text.trim().chars().collect();
        if labels.is_empty() || labels.len() > 63 {
            return Err(Error::Partition(format!(
                "need 1..=63 labels, got {}",
                labels.len()
            )));
        }
        if let Some(c) = labels.iter().find(|c| !c.is_ascii_alphanumeric()) {
            return Err(Error::Partition(format!("invalid label {c:?}")));
        }
        let mut classes = labels.clone();
        classes.sort_unstable();
        classes.dedup();
        Ok(Self { labels, classes })
    }

    /// Left half of the rungs labelled A, right half B. Odd rung counts put
    /// the middle rung in B.
    pub fn half_cut(n_rungs: usize) -> Result<Self> {
        if n_rungs < 2 {
            return Err(Error::Partition("a half cut needs at least 2 rungs".into()));
        }
        let left = 2 * (n_rungs / 2);
        let text: String = (0..2 * n_rungs).map(|k| if k < left { 'A' } else { 'B' }).collect();
        Self::parse(&text)
    }

    pub fn n_atoms(&self) -> usize {
        self.labels.len()
    }

    /// Distinct labels, sorted.
    pub fn classes(&self) -> &[char] {
        &self.classes
    }

    pub fn labels(&self) -> String {
        self.labels.iter().collect()
    }

    pub fn class_mask(&self, label: char) -> BasisIndex {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == label)
            .fold(0, |m, (k, _)| m | 1 << k)
    }

    /// Union of the atoms carrying any label in `labels`.
    pub fn mask_of(&self, labels: &str) -> Result<BasisIndex> {
        if labels.is_empty() {
            return Err(Error::Partition("empty region".into()));
        }
        let mut mask = 0;
        for c in labels.chars() {
            if !self.classes.contains(&c) {
                return Err(Error::Partition(format!(
                    "label {c:?} not present in {:?}",
                    self.labels()
                )));
            }
            mask |= self.class_mask(c);
        }
        Ok(mask)
    }

    /// (A, B) masks of a two-class partition; the alphabetically first class is A.
    pub fn bipartition(&self) -> Result<(BasisIndex, BasisIndex)> {
        if self.classes.len() != 2 {
            return Err(Error::Partition(format!(
                "expected 2 classes, found {}",
                self.classes.len()
            )));
        }
        Ok((self.class_mask(self.classes[0]), self.class_mask(self.classes[1])))
    }

    /// A, B, C, D masks of a four-class partition, in label order.
    pub fn quadripartition(&self) -> Result<[BasisIndex; 4]> {
        if self.classes.len() != 4 {
            return Err(Error::Partition(format!(
                "expected 4 classes, found {}",
                self.classes.len()
            )));
        }
        Ok([0, 1, 2, 3].map(|i| self.class_mask(self.classes[i])))
    }

    /// Swaps the labels of a two-class partition.
    pub fn swapped(&self) -> Result<Self> {
        self.bipartition()?;
        let (a, b) = (self.classes[0], self.classes[1]);
        let text: String = self
            .labels
            .iter()
            .map(|&c| if c == a { b } else { a })
            .collect();
        Self::parse(&text)
    }

    fn check(&self, p: &ProbDist) -> Result<()> {
        if self.n_atoms() != p.n_atoms() {
            return Err(Error::DimensionMismatch {
                expected: p.n_atoms(),
                got: self.n_atoms(),
            });
        }
        Ok(())
    }
}

fn entropy_of_weights(weights: impl Iterator<Item = f64>) -> f64 {
    let mut total = 0.0;
    let mut plogp = 0.0;
    for w in weights.filter(|&w| w > 0.0) {
        total += w;
        plogp += w * w.ln();
    }
    if total <= 0.0 {
        return 0.0;
    }
    // −Σ (w/Z) ln(w/Z) = ln Z − Σ w ln w / Z
    (total.ln() - plogp / total).max(0.0)
}

/// −Σ p ln p in nats.
pub fn shannon_entropy(p: &ProbDist) -> f64 {
    entropy_of_weights(p.iter().map(|(_, v)| v))
}

/// Marginal over the atoms in `mask`, re-indexed onto the low bits.
pub fn marginal_mask(p: &ProbDist, mask: BasisIndex) -> Result<ProbDist> {
    if mask == 0 {
        return Err(Error::Partition("empty region".into()));
    }
    if mask & !full_mask(p.n_atoms()) != 0 {
        return Err(domain("region contains atoms outside the system"));
    }
    let mut acc: HashMap<BasisIndex, f64> = HashMap::new();
    for (k, v) in p.iter() {
        *acc.entry(compress(k, mask)).or_insert(0.0) += v;
    }
    ProbDist::normalized(mask.count_ones() as usize, acc.into_iter().collect(), p.origin())
}

pub fn marginal(p: &ProbDist, part: &Partition, region: &str) -> Result<ProbDist> {
    part.check(p)?;
    marginal_mask(p, part.mask_of(region)?)
}

/// Shannon entropy of the marginal on `mask`.
pub fn region_entropy(p: &ProbDist, mask: BasisIndex) -> f64 {
    if mask & full_mask(p.n_atoms()) == full_mask(p.n_atoms()) {
        return shannon_entropy(p);
    }
    let mut acc: HashMap<BasisIndex, f64> = HashMap::new();
    for (k, v) in p.iter() {
        *acc.entry(k & mask).or_insert(0.0) += v;
    }
    entropy_of_weights(acc.into_values())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteEntropies {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
}

impl BipartiteEntropies {
    /// S_A + S_B − S_AB.
    pub fn mutual_information(&self) -> f64 {
        self.s_a + self.s_b - self.s_ab
    }

    /// S_AB − S_B.
    pub fn conditional_entropy(&self) -> f64 {
        self.s_ab - self.s_b
    }
}

pub fn bipartite_entropies(p: &ProbDist, part: &Partition) -> Result<BipartiteEntropies> {
    part.check(p)?;
    let (a, b) = part.bipartition()?;
    Ok(BipartiteEntropies {
        s_a: region_entropy(p, a),
        s_b: region_entropy(p, b),
        s_ab: shannon_entropy(p),
    })
}

pub fn mutual_information(p: &ProbDist, part: &Partition) -> Result<f64> {
    Ok(bipartite_entropies(p, part)?.mutual_information())
}

/// I between two disjoint atom sets.
pub fn mutual_information_masks(p: &ProbDist, a: BasisIndex, b: BasisIndex) -> Result<f64> {
    if a & b != 0 || a == 0 || b == 0 {
        return Err(Error::Partition("regions must be non-empty and disjoint".into()));
    }
    Ok(region_entropy(p, a) + region_entropy(p, b) - region_entropy(p, a | b))
}

pub fn conditional_entropy(p: &ProbDist, part: &Partition) -> Result<f64> {
    Ok(bipartite_entropies(p, part)?.conditional_entropy())
}

/// Drops entries with p < p_min and renormalizes.
pub fn filter(p: &ProbDist, p_min: f64) -> Result<ProbDist> {
    if !(0.0..1.0).contains(&p_min) {
        return Err(domain(format!("p_min must lie in [0, 1), got {p_min}")));
    }
    let kept: Vec<(BasisIndex, f64)> = p.iter().filter(|&(_, v)| v >= p_min).collect();
    if kept.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    ProbDist::normalized(p.n_atoms(), kept.into_iter().collect(), p.origin())
}

/// Filtered entropies along a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationCurve {
    pub thresholds: Vec<f64>,
    pub i_ab: Vec<f64>,
    pub s_cond: Vec<f64>,
    pub survivors: Vec<usize>,
    /// False where the threshold removes every entry.
    pub valid: Vec<bool>,
    pub unfiltered_i: f64,
    pub unfiltered_s_cond: f64,
}

impl FiltrationCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// (log10 p_min, s_cond) over valid, strictly positive thresholds.
    fn log_points(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.len())
            .filter(|&i| self.valid[i] && self.thresholds[i] > 0.0)
            .map(|i| (self.thresholds[i].log10(), self.s_cond[i]))
            .unzip()
    }
}

/// Group index of every entry under a mask, remapped onto 0..n_groups.
fn group_ids(keys: &[BasisIndex], mask: BasisIndex) -> (Vec<u32>, usize) {
    let masked: Vec<BasisIndex> = keys.iter().map(|k| k & mask).collect();
    let mut uniq = masked.clone();
    uniq.sort_unstable();
    uniq.dedup();
    let ids = masked
        .iter()
        .map(|m| uniq.binary_search(m).expect("present") as u32)
        .collect();
    (ids, uniq.len())
}

fn prefix_entropy(values: &[f64], ids: &[u32], n_groups: usize, len: usize) -> f64 {
    let mut acc = vec![0.0; n_groups];
    for i in 0..len {
        acc[ids[i] as usize] += values[i];
    }
    entropy_of_weights(acc.into_iter())
}

pub fn filtration_curve(p: &ProbDist, part: &Partition, grid: &[f64]) -> Result<FiltrationCurve> {
    part.check(p)?;
    let (a, b) = part.bipartition()?;
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("threshold grid must be sorted ascending"));
    }
    if grid.iter().any(|t| !(0.0..1.0).contains(t)) {
        return Err(domain("thresholds must lie in [0, 1)"));
    }
    // descending order: every filtered set is a prefix
    let ranked = p.ranked();
    let keys: Vec<BasisIndex> = ranked.iter().map(|e| e.0).collect();
    let values: Vec<f64> = ranked.iter().map(|e| e.1).collect();
    let (ids_a, na) = group_ids(&keys, a);
    let (ids_b, nb) = group_ids(&keys, b);

    let point = |len: usize| -> (f64, f64) {
        let s_ab = entropy_of_weights(values[..len].iter().copied());
        let s_a = prefix_entropy(&values, &ids_a, na, len);
        let s_b = prefix_entropy(&values, &ids_b, nb, len);
        (s_a + s_b - s_ab, s_ab - s_b)
    };
    let (unfiltered_i, unfiltered_s_cond) = point(values.len());

    let rows: Vec<(f64, f64, usize, bool)> = grid
        .par_iter()
        .map(|&t| {
            let len = values.partition_point(|&v| v >= t);
            if len == 0 {
                (f64::NAN, f64::NAN, 0, false)
            } else {
                let (i, s) = point(len);
                (i, s, len, true)
            }
        })
        .collect();

    Ok(FiltrationCurve {
        thresholds: grid.to_vec(),
        i_ab: rows.iter().map(|r| r.0).collect(),
        s_cond: rows.iter().map(|r| r.1).collect(),
        survivors: rows.iter().map(|r| r.2).collect(),
        valid: rows.iter().map(|r| r.3).collect(),
        unfiltered_i,
        unfiltered_s_cond,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidThreshold {
    pub p_star: f64,
    pub fit: SigmoidFit,
}

/// Inflection of a shifted-tanh fit to s_cond versus log10 p_min.
pub fn sigmoid_inflection(curve: &FiltrationCurve, free_offset: bool) -> Result<SigmoidThreshold> {
    let (x, y) = curve.log_points();
    if x.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "sigmoid fit needs 5 valid thresholds, found {}",
            x.len()
        )));
    }
    let (x_lo, x_hi) = (x[0], x[x.len() - 1]);
    let level = y.iter().cloned().fold(0.0, f64::max);
    if level <= 0.0 {
        return Err(Error::FitFailed("conditional entropy is zero on the grid".into()));
    }
    let center = x
        .iter()
        .zip(&y)
        .find(|(_, &v)| v <= 0.5 * level)
        .map(|(&xi, _)| xi)
        .unwrap_or(0.5 * (x_lo + x_hi));
    let start = Sigmoid {
        offset: 0.0,
        level,
        center,
        width: (x_hi - x_lo) / 10.0,
    };
    let fit = fit_sigmoid(&x, &y, start, free_offset);
    let c = fit.curve;
    if !fit.converged {
        return Err(Error::FitFailed("sigmoid fit did not converge".into()));
    }
    if !(c.width > 0.0 && c.level > 0.0 && c.center >= x_lo && c.center <= x_hi) {
        return Err(Error::FitFailed(format!(
            "unphysical sigmoid: level {}, center {}, width {}",
            c.level, c.center, c.width
        )));
    }
    Ok(SigmoidThreshold {
        p_star: 10f64.powf(c.center),
        fit,
    })
}

/// First threshold where s_cond falls to half its unfiltered value,
/// interpolated linearly in log10 p_min.
pub fn mid_height_threshold(curve: &FiltrationCurve) -> Result<f64> {
    let s0 = curve.unfiltered_s_cond;
    if s0 <= 0.0 {
        return Err(Error::NoHalfCrossing);
    }
    let half = 0.5 * s0;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..curve.len() {
        if !curve.valid[i] {
            continue;
        }
        let (t, s) = (curve.thresholds[i], curve.s_cond[i]);
        if s <= half {
            return Ok(match prev {
                Some((tp, sp)) if tp > 0.0 && sp > s => {
                    let (xp, x) = (tp.log10(), t.log10());
                    10f64.powf(xp + (half - sp) * (x - xp) / (s - sp))
                }
                _ => t,
            });
        }
        prev = Some((t, s));
    }
    Err(Error::NoHalfCrossing)
}

/// Logarithmic threshold grid ending at the largest observed probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub log10_lo: f64,
    pub n_points: usize,
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        Self {
            log10_lo: -4.5,
            n_points: 60,
        }
    }
}

impl ThresholdGrid {
    pub fn thresholds(&self, max_p: f64) -> Result<Vec<f64>> {
        let hi = max_p.log10();
        if self.n_points < 2 || !(self.log10_lo < hi) {
            return Err(domain(format!(
                "threshold grid [1e{}, {max_p}] with {} points is empty",
                self.log10_lo, self.n_points
            )));
        }
        let step = (hi - self.log10_lo) / (self.n_points - 1) as f64;
        Ok((0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    max_p
                } else {
                    10f64.powf(self.log10_lo + i as f64 * step)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    /// Unfiltered I below this (nats) is returned as is.
    pub eps_small: f64,
    /// Minimum relative gain of I(p*) over the unfiltered I.
    pub eps_gain: f64,
    pub grid: ThresholdGrid,
    /// Fit the lower asymptote of the sigmoid instead of pinning it at 0.
    pub free_offset: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            eps_small: 0.05,
            eps_gain: 0.05,
            grid: ThresholdGrid::default(),
            free_offset: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Unfiltered,
    Sigmoid,
    MidHeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub method: EstimateMethod,
    pub p_star: Option<f64>,
    /// Which threshold rule produced `p_star`.
    pub threshold_method: Option<EstimateMethod>,
    pub i_unfiltered: f64,
    pub i_at_p_star: Option<f64>,
    #[serde(skip)]
    pub curve: Option<FiltrationCurve>,
}

pub fn estimate_entanglement(p: &ProbDist, part: &Partition, cfg: &EstimatorConfig) -> Result<Estimate> {
    let i0 = mutual_information(p, part)?;
    let unfiltered = Estimate {
        estimate: i0,
        method: EstimateMethod::Unfiltered,
        p_star: None,
        threshold_method: None,
        i_unfiltered: i0,
        i_at_p_star: None,
        curve: None,
    };
    if i0 < cfg.eps_small {
        return Ok(unfiltered);
    }
    let grid = cfg.grid.thresholds(p.max_probability())?;
    let curve = filtration_curve(p, part, &grid)?;
    let (p_star, how) = match sigmoid_inflection(&curve, cfg.free_offset) {
        Ok(s) => (s.p_star, EstimateMethod::Sigmoid),
        Err(_) => (mid_height_threshold(&curve)?, EstimateMethod::MidHeight),
    };
    let i_star = mutual_information(&filter(p, p_star)?, part)?;
    let gain = (i_star - i0) / i0;
    let (estimate, method) = if gain < cfg.eps_gain {
        (i0, EstimateMethod::Unfiltered)
    } else {
        (i_star, how)
    };
    Ok(Estimate {
        estimate,
        method,
        p_star: Some(p_star),
        threshold_method: Some(how),
        i_unfiltered: i0,
        i_at_p_star: Some(i_star),
        curve: Some(curve),
    })
}

/// S_AB + S_BC − S_A − S_C from reduced density matrices.
pub fn weak_monotonicity_vn(psi: &PureState, part: &Partition) -> Result<f64> {
    if part.n_atoms() != psi.n_atoms() {
        return Err(Error::DimensionMismatch {
            expected: psi.n_atoms(),
            got: part.n_atoms(),
        });
    }
    let [a, b, c, _] = part.quadripartition()?;
    Ok(entanglement_entropy(psi, a | b)? + entanglement_entropy(psi, b | c)?
        - entanglement_entropy(psi, a)?
        - entanglement_entropy(psi, c)?)
}

/// S_AB + S_CD + S_BC + S_AD − S_A − S_BCD − S_C − S_ABD of the bitstring
/// distribution.
pub fn weak_monotonicity_mi(p: &ProbDist, part: &Partition) -> Result<f64> {
    part.check(p)?;
    let [a, b, c, d] = part.quadripartition()?;
    let s = |m| region_entropy(p, m);
    Ok(s(a | b) + s(c | d) + s(b | c) + s(a | d) - s(a) - s(b | c | d) - s(c) - s(a | b | d))
}

/// Same quantity written as I_{AB,CD} + I_{BC,AD} − I_{A,BCD} − I_{C,ABD}.
pub fn weak_monotonicity_mi_grouped(p: &ProbDist, part: &Partition) -> Result<f64> {
    part.check(p)?;
    let [a, b, c, d] = part.quadripartition()?;
    let i = |x, y| mutual_information_masks(p, x, y);
    Ok(i(a | b, c | d)? + i(b | c, a | d)? - i(a, b | c | d)? - i(c, a | b | d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Origin;
    use crate::bits::parse_bitstring;

    fn dist(pairs: &[(&str, f64)]) -> ProbDist {
        let n = pairs[0].0.len();
        let entries = pairs
            .iter()
            .map(|(s, p)| (parse_bitstring(s).unwrap().0, *p))
            .collect();
        ProbDist::new(n, entries, Origin::Exact).unwrap()
    }

    #[test]
    fn partition_parsing() {
        let p = Partition::parse("DDAABBCCDD").unwrap();
        assert_eq!(p.n_atoms(), 10);
        assert_eq!(p.classes(), &['A', 'B', 'C', 'D']);
        assert_eq!(p.class_mask('D'), 0b11_0000_0011);
        assert_eq!(p.mask_of("AB").unwrap(), 0b00_0011_1100);
        assert!(p.mask_of("E").is_err());
        assert!(Partition::parse("").is_err());
        assert!(Partition::parse("A-B").is_err());
        assert!(p.bipartition().is_err());
        assert_eq!(Partition::half_cut(3).unwrap().labels(), "AABBBB");
        assert_eq!(Partition::half_cut(6).unwrap().labels(), "AAAAAABBBBBB");
    }

    #[test]
    fn shannon_examples() {
        let u = dist(&[("00", 0.25), ("01", 0.25), ("10", 0.25), ("11", 0.25)]);
        assert!((shannon_entropy(&u) - 4f64.ln()).abs() < 1e-14);
        assert_eq!(shannon_entropy(&dist(&[("01", 1.0)])), 0.0);
        let d = dist(&[("00", 0.5), ("01", 0.25), ("10", 0.25)]);
        let expected = 0.5 * 2f64.ln() + 0.5 * 4f64.ln();
        assert!((shannon_entropy(&d) - expected).abs() < 1e-14);
        assert!((expected - 1.0397).abs() < 1e-4);
    }

    #[test]
    fn marginal_examples() {
        let d = dist(&[("00", 0.5), ("11", 0.5)]);
        let part = Partition::parse("AB").unwrap();
        let m = marginal(&d, &part, "A").unwrap();
        assert_eq!(m.get(0), 0.5);
        assert_eq!(m.get(1), 0.5);
        assert!(marginal(&d, &part, "").is_err());
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let qa = [0.7, 0.3];
        let qb = [0.1, 0.2, 0.3, 0.4];
        let mut entries = std::collections::BTreeMap::new();
        for (i, a) in qa.iter().enumerate() {
            for (j, b) in qb.iter().enumerate() {
                entries.insert((i | j << 1) as u64, a * b);
            }
        }
        let p = ProbDist::new(3, entries, Origin::Exact).unwrap();
        let part = Partition::parse("ABB").unwrap();
        let ma = marginal(&p, &part, "A").unwrap();
        assert!((ma.get(0) - 0.7).abs() < 1e-15 && (ma.get(1) - 0.3).abs() < 1e-15);
        let mb = marginal(&p, &part, "B").unwrap();
        for (j, b) in qb.iter().enumerate() {
            assert!((mb.get(j as u64) - b).abs() < 1e-15);
        }
        assert!(mutual_information(&p, &part).unwrap().abs() < 1e-14);
        let sa = shannon_entropy(&ma);
        assert!((conditional_entropy(&p, &part).unwrap() - sa).abs() < 1e-14);
    }

    #[test]
    fn mutual_information_and_conditional_examples() {
        let part = Partition::parse("AB").unwrap();
        let bell = dist(&[("00", 0.5), ("11", 0.5)]);
        assert!((mutual_information(&bell, &part).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!(conditional_entropy(&bell, &part).unwrap().abs() < 1e-14);

        let d = dist(&[("00", 0.4), ("01", 0.1), ("10", 0.1), ("11", 0.4)]);
        let s_ab = -(2.0 * 0.4 * 0.4f64.ln() + 2.0 * 0.1 * 0.1f64.ln());
        let expected = s_ab - 2f64.ln();
        let got = conditional_entropy(&d, &part).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 0.50040).abs() < 1e-5);
    }

    #[test]
    fn filter_examples() {
        let d = dist(&[("00", 0.5), ("01", 0.3), ("10", 0.2)]);
        assert_eq!(filter(&d, 0.0).unwrap(), d);
        let f = filter(&d, 0.25).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f.get(0) - 0.625).abs() < 1e-15);
        assert!((f.get(2) - 0.375).abs() < 1e-15);
        assert!(matches!(filter(&d, 0.6), Err(Error::EmptyDistribution)));
        assert!(filter(&d, 1.0).is_err());
        // filtering at the smallest probability keeps everything
        assert_eq!(filter(&d, 0.2).unwrap(), d);
    }

    #[test]
    fn filtration_curve_basics() {
        let part = Partition::parse("AB").unwrap();
        let d = dist(&[("00", 0.4), ("01", 0.1), ("10", 0.1), ("11", 0.4)]);
        let c = filtration_curve(&d, &part, &[0.0, 0.05, 0.2, 0.5]).unwrap();
        assert_eq!(c.survivors, vec![4, 4, 2, 0]);
        assert_eq!(c.valid, vec![true, true, true, false]);
        assert!((c.i_ab[0] - mutual_information(&d, &part).unwrap()).abs() < 1e-14);
        assert!((c.i_ab[2] - 2f64.ln()).abs() < 1e-14);
        assert!(c.s_cond[2].abs() < 1e-14);
        assert!(filtration_curve(&d, &part, &[0.2, 0.1]).is_err());
    }

    fn tanh_curve(x0: f64) -> FiltrationCurve {
        let truth = Sigmoid {
            offset: 0.0,
            level: 0.9,
            center: x0,
            width: 0.3,
        };
        let x: Vec<f64> = (0..60).map(|i| -5.0 + 4.5 * i as f64 / 59.0).collect();
        FiltrationCurve {
            thresholds: x.iter().map(|v| 10f64.powf(*v)).collect(),
            i_ab: vec![0.0; 60],
            s_cond: x.iter().map(|&v| truth.eval(v)).collect(),
            survivors: vec![1; 60],
            valid: vec![true; 60],
            unfiltered_i: 0.0,
            unfiltered_s_cond: 0.9,
        }
    }

    #[test]
    fn sigmoid_and_mid_height_on_synthetic_tanh() {
        let c = tanh_curve(-2.0);
        let s = sigmoid_inflection(&c, false).unwrap();
        assert!(((s.p_star - 1e-2) / 1e-2).abs() < 1e-6);
        let m = mid_height_threshold(&c).unwrap();
        let step = 4.5 / 59.0;
        assert!((m.log10() - s.p_star.log10()).abs() <= step);
    }

    #[test]
    fn mid_height_rejects_flat_curve() {
        let mut c = tanh_curve(-2.0);
        c.s_cond.iter_mut().for_each(|v| *v = 0.0);
        c.unfiltered_s_cond = 0.0;
        assert!(matches!(mid_height_threshold(&c), Err(Error::NoHalfCrossing)));
        assert!(sigmoid_inflection(&c, false).is_err());
    }

    #[test]
    fn estimate_of_product_is_unfiltered_zero() {
        let part = Partition::parse("AB").unwrap();
        let d = dist(&[("00", 0.28), ("01", 0.12), ("10", 0.42), ("11", 0.18)]);
        let e = estimate_entanglement(&d, &part, &EstimatorConfig::default()).unwrap();
        assert_eq!(e.method, EstimateMethod::Unfiltered);
        assert!(e.estimate.abs() < 1e-12);
    }

    #[test]
    fn threshold_grid_ends_at_max() {
        let g = ThresholdGrid {
            log10_lo: -4.0,
            n_points: 5,
        }
        .thresholds(0.01)
        .unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert_eq!(g[4], 0.01);
        assert!(ThresholdGrid::default().thresholds(1e-5).is_err());
    }

    #[test]
    fn weak_monotonicity_of_product_states() {
        let part = Partition::parse("ABCD").unwrap();
        let psi = PureState::basis(4, 0b0101);
        assert!(weak_monotonicity_vn(&psi, &part).unwrap().abs() < 1e-12);
        let p = psi.distribution();
        assert!(weak_monotonicity_mi(&p, &part).unwrap().abs() < 1e-12);
    }

    #[test]
    fn weak_monotonicity_with_internal_bell_pair() {
        let part = Partition::parse("AABC DD".replace(' ', "").as_str()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![0.0; 64];
        amps[0] = h;
        amps[0b11] = h;
        let psi = PureState::from_real(6, &amps).unwrap();
        assert!(weak_monotonicity_vn(&psi, &part).unwrap().abs() < 1e-12);
    }

    #[test]
    fn swapped_partition() {
        let p = Partition::parse("AABB").unwrap();
        assert_eq!(p.swapped().unwrap().labels(), "BBAA");
    }
}
