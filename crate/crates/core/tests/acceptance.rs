//! Acceptance checks. One PASS/FAIL line per criterion, with the measured
//! numbers. Exits 0 unless ACCEPTANCE_STRICT=1 is set and something failed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rydladder::dist::{cumulative, exp_decay_fit, max_prob_series, sample, SizeClass};
use rydladder::dynamics::{
    rampdown_evolve, schedule_standard, trotter_evolve, ScheduleKind, DEFAULT_DT,
};
use rydladder::infoflow::{
    bipartite_entropies, filter, filtration_curve, marginal_mask, mutual_information,
    mutual_information_masks, sigmoid_inflection, weak_monotonicity_mi, weak_monotonicity_mi_grouped, weak_monotonicity_vn,
    EstimatorConfig, Partition,
};
use rydladder::lattice::{LadderSystem, DEFAULT_C6};
use rydladder::noise::{
    apply_readout_noise, depletion_factor, m3_mitigate, sorting_fidelity_fit, ReadoutModel,
    SortingFit,
};
use rydladder::spectrum::{entanglement_entropy, ground_state, PureState, SolverOptions};

const A: f64 = 4.1;

fn reference(n_rungs: usize, rb: f64, d: f64) -> LadderSystem {
    LadderSystem::from_ratios(n_rungs, A, rb, d, DEFAULT_C6).unwrap()
}

fn gs(sys: &LadderSystem) -> PureState {
    ground_state(sys, &SolverOptions::default()).unwrap().psi
}

fn half_mask(n_rungs: usize) -> u64 {
    Partition::half_cut(n_rungs).unwrap().bipartition().unwrap().0
}

struct Report {
    failed: Vec<&'static str>,
    total: usize,
}

impl Report {
    fn line(&mut self, id: &'static str, pass: bool, detail: String) {
        self.total += 1;
        if !pass {
            self.failed.push(id);
        }
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

struct Sub(Vec<(bool, String)>);

impl Sub {
    fn add(&mut self, pass: bool, text: String) {
        self.0.push((pass, text));
    }
    fn pass(&self) -> bool {
        self.0.iter().all(|(p, _)| *p)
    }
    fn detail(&self) -> String {
        self.0
            .iter()
            .map(|(p, t)| format!("[{}] {t}", if *p { "ok" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn criterion_1(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let start = Instant::now();
    for (n, expected) in [(6, 0.8441), (8, 0.7769), (10, 1.2455)] {
        let psi = gs(&reference(n, 2.35, 3.5));
        let s = entanglement_entropy(&psi, half_mask(n)).unwrap();
        sub.add((s - expected).abs() <= 5e-4, format!("{n} rungs S={s:.5} (target {expected})"));
    }
    let secs = start.elapsed().as_secs_f64();
    sub.add(secs < 300.0, format!("{secs:.1} s"));
    r.line("criterion 1 exact entanglement entropies", sub.pass(), sub.detail());
}

fn criterion_2(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let cfg = EstimatorConfig::default();
    // (rungs, p*, σ(p*), I)
    for (n, p_ref, sigma, i_ref) in [
        (6, 1.09e-2, 0.06e-2, 0.85),
        (8, 1.01e-2, 0.08e-2, 0.749),
        (10, 5.01e-3, 0.36e-3, 1.26),
    ] {
        let p = gs(&reference(n, 2.35, 3.5)).distribution();
        let part = Partition::half_cut(n).unwrap();
        let grid = cfg.grid.thresholds(p.max_probability()).unwrap();
        let curve = filtration_curve(&p, &part, &grid).unwrap();
        match sigmoid_inflection(&curve, cfg.free_offset) {
            Ok(s) => {
                let i = mutual_information(&filter(&p, s.p_star).unwrap(), &part).unwrap();
                let ok = (s.p_star - p_ref).abs() <= 2.0 * sigma && (i - i_ref).abs() <= 0.03;
                sub.add(ok, format!("{n} rungs p*={:.3e} I={i:.4} (target {p_ref:.2e}, {i_ref})", s.p_star));
            }
            Err(e) => sub.add(false, format!("{n} rungs sigmoid fit failed: {e}")),
        }
    }
    r.line("criterion 2 filtered estimator thresholds", sub.pass(), sub.detail());
}

fn criterion_3(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let truth = gs(&reference(6, 2.35, 3.5)).distribution();
    let model = ReadoutModel::default();
    let mut support_exact = true;
    let mut tvs = Vec::new();
    for seed in 0..5u64 {
        let clean = sample(&truth, 4405, seed);
        let noisy = apply_readout_noise(&clean, &model, 1000 + seed);
        let q = m3_mitigate(&noisy, &model, &Default::default()).unwrap();
        support_exact &= q.support().eq(noisy.iter().map(|(k, _)| k));
        let (mitigated, _) = q.clip().unwrap();
        let tv_noisy = truth.total_variation(&noisy.to_distribution().unwrap());
        let tv_mit = truth.total_variation(&mitigated);
        tvs.push((tv_mit < tv_noisy, format!("{tv_mit:.3}<{tv_noisy:.3}")));
    }
    let texts: Vec<_> = tvs.iter().map(|(_, t)| t.as_str()).collect();
    sub.add(tvs.iter().all(|(p, _)| *p), format!("TV mitigated<noisy {}", texts.join(" ")));
    sub.add(support_exact, "support preserved".into());
    let f4 = depletion_factor(0b1111, 12, &model);
    let f3 = depletion_factor(0b0111, 12, &model);
    sub.add(
        format!("{f4:.2}") == "0.66" && format!("{f3:.2}") == "0.71",
        format!("depletion {f4:.4} {f3:.4}"),
    );
    r.line("criterion 3 readout pipeline", sub.pass(), sub.detail());
}

fn criterion_4(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let sys = reference(5, 2.35, 3.5);
    let target = gs(&sys);
    let psi0 = PureState::vacuum(sys.n_atoms());
    let run = |kind| {
        let sched = schedule_standard(kind, sys.omega(), sys.delta()).unwrap();
        trotter_evolve(&sys, &sched, DEFAULT_DT, &psi0, 0, &SolverOptions::default())
            .unwrap()
            .psi_final
    };
    let short = run(ScheduleKind::Ramp4us);
    let modified = run(ScheduleKind::Ramp4usModified);
    let long = run(ScheduleKind::Ramp12us);
    let (f4, f12) = (short.fidelity(&target), long.fidelity(&target));
    sub.add(f12 > f4, format!("fidelity 12us {f12:.3} > 4us {f4:.3}"));
    let tv = short.distribution().total_variation(&modified.distribution());
    sub.add(tv < 0.05, format!("TV(4us, 4us modified) {tv:.4} < 0.05"));

    let sys6 = reference(6, 2.35, 3.5);
    let psi6 = gs(&sys6);
    let p6 = psi6.distribution();
    let tv_after = |t| {
        rampdown_evolve(&sys6, &psi6, t, 0.001)
            .unwrap()
            .distribution()
            .total_variation(&p6)
    };
    let (fast, slow) = (tv_after(0.05), tv_after(0.5));
    sub.add(fast < slow, format!("rampdown TV fast {fast:.4} < slow {slow:.4}"));
    r.line("criterion 4 ramp studies", sub.pass(), sub.detail());
}

/// Each point lies closer in ln P to its own class fit than to the others.
fn classes_distinguishable(series: &[(usize, f64)]) -> (bool, String) {
    let fits: Vec<_> = (0..3u8)
        .map(|c| exp_decay_fit(series, SizeClass::Mod3(c)).unwrap())
        .collect();
    let mut ok = true;
    for &(n, p) in series {
        let own = (n % 3) as usize;
        let dist = |c: usize| (fits[c].predict(n as f64).ln() - p.ln()).abs();
        ok &= (0..3).filter(|&c| c != own).all(|c| dist(own) < dist(c));
    }
    let text = fits
        .iter()
        .enumerate()
        .map(|(c, f)| format!("mod{c}: A={:.3} k={:.3}", f.a, f.k))
        .collect::<Vec<_>>()
        .join(", ");
    (ok, text)
}

fn criterion_5(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let opts = SolverOptions::default();
    let systems: Vec<_> = (4..=10).map(|n| reference(n, 2.0, 3.5)).collect();
    let series = max_prob_series(&systems, &opts).unwrap();
    let monotone = series.windows(2).all(|w| w[1].1 < w[0].1);
    sub.add(monotone, "P_max decreasing at R_b/a=2.0".into());
    let fit = exp_decay_fit(&series, SizeClass::All).unwrap();
    sub.add(fit.r_squared >= 0.9, format!("R2={:.4}", fit.r_squared));
    sub.add(
        (fit.k - 0.364).abs() <= 0.3 * 0.364,
        format!("k={:.4} A={:.3} (target k 0.364)", fit.k, fit.a),
    );
    let systems: Vec<_> = (4..=10).map(|n| reference(n, 2.35, 3.5)).collect();
    let series = max_prob_series(&systems, &opts).unwrap();
    let (ok, text) = classes_distinguishable(&series);
    sub.add(ok, format!("mod-3 classes at R_b/a=2.35 {text}"));
    r.line("criterion 5 volume scaling", sub.pass(), sub.detail());
}

fn criterion_6(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut bound_ok, mut marg_ok) = (true, true);
    let (mut worst_bound, mut worst_marg) = (f64::NEG_INFINITY, 0.0f64);
    let n_systems = 120;
    for i in 0..n_systems {
        let n = 1 + i % 6;
        let rb = rng.gen_range(1.0..3.5);
        let d = rng.gen_range(-1.0..5.0);
        let sys = reference(n, rb, d);
        let psi = gs(&sys);
        let p = psi.distribution();
        let mask = if n >= 2 { half_mask(n) } else { 0b01 };
        let s_vn = entanglement_entropy(&psi, mask).unwrap();
        let full = (1u64 << sys.n_atoms()) - 1;
        let i_x = mutual_information_masks(&p, mask, full & !mask).unwrap();
        worst_bound = worst_bound.max(i_x - s_vn);
        bound_ok &= i_x >= -1e-12 && i_x <= s_vn + 1e-9;
        for m in [mask, full & !mask] {
            let marg = marginal_mask(&p, m).unwrap();
            let total: f64 = marg.iter().map(|(_, w)| w).sum();
            worst_marg = worst_marg.max((total - 1.0).abs());
            marg_ok &= (total - 1.0).abs() <= 1e-12;
        }
        if n >= 2 {
            let part = Partition::half_cut(n).unwrap();
            let e = bipartite_entropies(&p, &part).unwrap();
            marg_ok &= (e.mutual_information() - i_x).abs() <= 1e-12;
        }
    }
    sub.add(bound_ok, format!("0<=I<=S over {n_systems} systems (max I-S {worst_bound:.2e})"));
    sub.add(marg_ok, format!("marginal sums (max dev {worst_marg:.1e})"));

    let part = Partition::parse("DDAABBCCDD").unwrap();
    let (mut wm_min, mut ident_max) = (f64::INFINITY, 0.0f64);
    for i in 0..5 {
        for j in 0..5 {
            let d = i as f64 * 1.25;
            let rb = 1.0 + j as f64 * 0.625;
            let psi = gs(&reference(5, rb, d));
            wm_min = wm_min.min(weak_monotonicity_vn(&psi, &part).unwrap());
            let p = psi.distribution();
            let diff = weak_monotonicity_mi(&p, &part).unwrap()
                - weak_monotonicity_mi_grouped(&p, &part).unwrap();
            ident_max = ident_max.max(diff.abs());
        }
    }
    sub.add(wm_min >= -1e-9, format!("weak monotonicity min {wm_min:.3e}"));
    sub.add(ident_max <= 1e-12, format!("grouping identity max dev {ident_max:.1e}"));
    r.line("criterion 6 information-theory invariants", sub.pass(), sub.detail());
}

fn criterion_7(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let truth = gs(&reference(6, 2.35, 3.5)).distribution();
    let shots = 10_000u64;
    let mut worst = 0.0f64;
    for seed in 0..3 {
        let c = sample(&truth, shots, 70 + seed);
        for (k, p) in truth.iter() {
            let mean = shots as f64 * p;
            let sigma = (mean * (1.0 - p)).sqrt();
            worst = worst.max((c.get(k) as f64 - mean).abs() / sigma);
        }
    }
    sub.add(worst <= 5.0, format!("max |count-np|/sigma {worst:.2}"));
    // mean over the seed family of the band check; the grid variant is a diagnostic
    let exact = cumulative(&truth);
    let grid: Vec<f64> = (0..=60).map(|i| 10f64.powf(-6.0 + 0.1 * i as f64)).collect();
    let dist_at = |n: u64| {
        let (mut sup, mut on_grid) = (0.0, 0.0);
        for seed in 0..3 {
            let c = cumulative(&sample(&truth, n, 70 + seed).to_distribution().unwrap());
            sup += c.sup_distance(&exact) / 3.0;
            on_grid += c.sup_distance_on(&exact, &grid) / 3.0;
        }
        (sup, on_grid)
    };
    let (lo, hi) = (dist_at(1_000), dist_at(100_000));
    sub.add(
        hi.0 < lo.0,
        format!(
            "sup distance 1e3 {:.4} -> 1e5 {:.4} (tenth-decade grid: {:.4} -> {:.4})",
            lo.0, hi.0, lo.1, hi.1
        ),
    );
    r.line("criterion 7 sampling statistics", sub.pass(), sub.detail());
}

fn criterion_8(r: &mut Report) {
    let mut sub = Sub(Vec::new());
    let table = [730, 763, 734, 694, 686, 661, 562];
    let series: Vec<(usize, f64)> = table
        .iter()
        .enumerate()
        .map(|(i, &kept)| (12 + 4 * i, kept as f64 / 1000.0))
        .collect();
    let fit = sorting_fidelity_fit(&series, true).unwrap();
    sub.add((fit.f - 0.985).abs() <= 0.005, format!("f={:.5}", fit.f));
    let keep = SortingFit { f: 0.995, intercept: 0.0, r_squared: 1.0 }.keep_fraction(400);
    sub.add((0.13..=0.14).contains(&keep), format!("keep fraction at 400 atoms {keep:.4}"));
    r.line("criterion 8 sorting fidelity", sub.pass(), sub.detail());
}

fn main() {
    let mut r = Report { failed: Vec::new(), total: 0 };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    println!(
        "acceptance: {}/{} criteria passed{}",
        r.total - r.failed.len(),
        r.total,
        if r.failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {}", r.failed.join(", "))
        }
    );
    if !r.failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").as_deref() == Ok("1") {
        std::process::exit(1);
    }
}
