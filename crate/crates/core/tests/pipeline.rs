use rydladder::dist::{sample, Binning, density_of_probability, power_law_fit};
use rydladder::infoflow::{estimate_entanglement, EstimateMethod, EstimatorConfig, Partition};
use rydladder::lattice::{LadderSystem, DEFAULT_C6};
use rydladder::noise::{
    apply_channel, apply_readout_noise, depletion_factor, depletion_mitigate, m3_mitigate,
    postselect, M3Options, ReadoutModel, ShotRecord,
};
use rydladder::spectrum::{entanglement_entropy, ground_state, SolverOptions};

fn six_rungs() -> LadderSystem {
    LadderSystem::from_ratios(6, 4.1, 2.35, 3.5, DEFAULT_C6).unwrap()
}

#[test]
fn exact_estimate_brackets_entropy() {
    let gs = ground_state(&six_rungs(), &SolverOptions::default()).unwrap();
    let part = Partition::half_cut(6).unwrap();
    let s = entanglement_entropy(&gs.psi, part.bipartition().unwrap().0).unwrap();
    let est = estimate_entanglement(&gs.psi.distribution(), &part, &EstimatorConfig::default()).unwrap();
    assert_eq!(est.method, EstimateMethod::Sigmoid);
    assert!(est.i_unfiltered <= s + 1e-9);
    assert!((est.estimate - 0.85).abs() < 0.03, "{}", est.estimate);
}

#[test]
fn depletion_approximates_channel_for_dominant_strings() {
    let p = ground_state(&six_rungs(), &SolverOptions::default()).unwrap().psi.distribution();
    let m = ReadoutModel::default();
    let noisy = apply_channel(&p, &m).unwrap();
    let ranked = p.ranked();
    // the six leading strings have no more probable neighbour one decay away
    for &(k, v) in &ranked[..6] {
        let approx = v * depletion_factor(k, 12, &m);
        let rel = (noisy.get(k) - approx).abs() / noisy.get(k);
        assert!(rel < 0.05, "{k:012b}: {rel}");
    }
    // ranks 7 to 10 gain decay inflow from the leading strings
    for &(k, v) in &ranked[6..10] {
        assert!(noisy.get(k) > 1.3 * v * depletion_factor(k, 12, &m));
    }
}

#[test]
fn mitigation_has_small_effect_on_filtered_estimate() {
    let p = ground_state(&six_rungs(), &SolverOptions::default()).unwrap().psi.distribution();
    let part = Partition::half_cut(6).unwrap();
    let cfg = EstimatorConfig::default();
    let m = ReadoutModel::default();
    let noisy = apply_readout_noise(&sample(&p, 4405, 3), &m, 4);
    let raw = estimate_entanglement(&noisy.to_distribution().unwrap(), &part, &cfg).unwrap();
    let (m3, _) = m3_mitigate(&noisy, &m, &M3Options::default()).unwrap().clip().unwrap();
    let m3 = estimate_entanglement(&m3, &part, &cfg).unwrap();
    let dep = estimate_entanglement(&depletion_mitigate(&noisy, &m).unwrap(), &part, &cfg).unwrap();
    assert!((raw.estimate - m3.estimate).abs() < 0.05, "{} {}", raw.estimate, m3.estimate);
    assert!((raw.estimate - dep.estimate).abs() < 0.05, "{} {}", raw.estimate, dep.estimate);
}

#[test]
fn density_power_law_exponent_in_range() {
    let p = ground_state(&six_rungs(), &SolverOptions::default()).unwrap().psi.distribution();
    let d = density_of_probability(&p, Binning::wide());
    let fit = power_law_fit(&d, (1e-8, 1e-2)).unwrap();
    assert!((0.0..=0.5).contains(&fit.zeta), "zeta {}", fit.zeta);
    let direct: f64 = p.iter().filter(|(_, w)| *w <= 1e-3).map(|(_, w)| w).sum();
    let from_bins = d.cumulative_from_bins(1e-3);
    assert!((from_bins - direct).abs() <= 0.15 * direct, "{from_bins} vs {direct}");
}

#[test]
fn postselection_then_mitigation() {
    let shots: Vec<ShotRecord> = (0..100)
        .map(|i| ShotRecord {
            pre_sequence: if i % 4 == 0 { vec![1, 0, 1, 1] } else { vec![1; 4] },
            post_sequence: if i % 2 == 0 { vec![0, 1, 1, 0] } else { vec![1, 0, 0, 1] },
        })
        .collect();
    let ps = postselect(&shots, true).unwrap();
    assert_eq!(ps.n_kept, 75);
    assert_eq!(ps.counts.get(0b0110) + ps.counts.get(0b1001), 75);
    let q = m3_mitigate(&ps.counts, &ReadoutModel::default(), &M3Options::default()).unwrap();
    assert_eq!(q.support().count(), 2);
}
