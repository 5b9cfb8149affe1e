use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use rydladder::bits::format_bitstring;
use rydladder::dist::{
    cumulative, density_of_probability, exp_decay_fit, max_prob_series, power_law_fit, sample,
    CountTable, ProbDist, SizeClass,
};
use rydladder::dynamics::{
    rampdown_evolve, schedule_standard, trotter_evolve, PiecewiseLinear, RampSchedule, ScheduleKind,
};
use rydladder::infoflow::{
    bipartite_entropies, estimate_entanglement, filter, filtration_curve, weak_monotonicity_mi,
    weak_monotonicity_vn, Estimate,
};
use rydladder::lattice::mhz_to_angular;
use rydladder::noise::{depletion_mitigate, m3_mitigate, postselect, ReadoutModel};
use rydladder::spectrum::{
    entanglement_entropy, ground_state, scan_heatmap, GroundState, Observable, PureState, ScanGrid,
    ScanTemplate,
};

use crate::config::{default_wm_partition, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io::{is_shot_file, prob, read_shots, read_table, summary, Input, Output, ShotFormat};

pub fn exact_ground_state(cfg: &RunConfig) -> CliResult<GroundState> {
    Ok(ground_state(&cfg.system.build()?, &cfg.solver())?)
}

/// Post-selected counts from a shot file.
pub fn shots_to_counts(cfg: &RunConfig, path: &Path) -> CliResult<(CountTable, serde_json::Value)> {
    let (shots, format) = read_shots(path)?;
    let invert = cfg
        .invert_post_sequence
        .unwrap_or(format == ShotFormat::TaskResult);
    let ps = postselect(&shots, invert).map_err(|e| CliError::Data(e.to_string()))?;
    let info = json!({
        "format": match format { ShotFormat::Ndjson => "ndjson", ShotFormat::TaskResult => "task_result" },
        "invert_post_sequence": invert,
        "n_total": ps.n_total,
        "n_kept": ps.n_kept,
        "sorting_fidelity": ps.sorting_fidelity,
    });
    Ok((ps.counts, info))
}

/// The exact ground-state distribution when `path` is absent.
pub fn load_input(cfg: &RunConfig, path: Option<&Path>) -> CliResult<Input> {
    match path {
        None => Ok(Input::Dist(exact_ground_state(cfg)?.psi.distribution())),
        Some(p) if is_shot_file(p) => Ok(Input::Counts(shots_to_counts(cfg, p)?.0)),
        Some(p) => read_table(p),
    }
}

fn check_atoms(cfg: &RunConfig, n_atoms: usize) -> CliResult<()> {
    let expected = 2 * cfg.system.n_rungs;
    if n_atoms != expected {
        return Err(CliError::Data(format!(
            "input has {n_atoms} atoms but the configured system has {expected}; set system.n_rungs"
        )));
    }
    Ok(())
}

pub fn groundstate(cfg: &RunConfig, out: &Output) -> CliResult<()> {
    let gs = exact_ground_state(cfg)?;
    let part = cfg.partition()?;
    let (mask_a, _) = part.bipartition()?;
    let p = gs.psi.distribution();
    let e = bipartite_entropies(&p, &part)?;
    out.probdist("probdist.csv", &p)?;
    out.json(
        "entropies.json",
        &json!({
            "partition": part.labels(),
            "energy": gs.energy,
            "gap": gs.gap,
            "residual": gs.residual,
            "s_vn": entanglement_entropy(&gs.psi, mask_a)?,
            "i_x": e.mutual_information(),
            "s_a": e.s_a,
            "s_b": e.s_b,
            "s_ab": e.s_ab,
        }),
    )
}

pub fn sample_cmd(cfg: &RunConfig, input: Option<&Path>, out: &Output) -> CliResult<()> {
    let p = load_input(cfg, input)?.distribution()?;
    let c = sample(&p, cfg.n_shots, cfg.seed);
    out.counts("counts.csv", &c)?;
    out.json(
        "sample.json",
        &json!({ "n_shots": c.n_shots(), "seed": cfg.seed, "distinct": c.len() }),
    )
}

pub fn ingest(cfg: &RunConfig, input: &Path, out: &Output) -> CliResult<()> {
    let (counts, info) = shots_to_counts(cfg, input)?;
    out.counts("counts.csv", &counts)?;
    out.json("postselection.json", &info)
}

#[derive(Serialize)]
struct ReportRow {
    method: &'static str,
    estimate: f64,
    chosen: String,
    p_star: Option<f64>,
    i_at_p_star: Option<f64>,
    i_unfiltered: f64,
    clipped_mass: Option<f64>,
}

fn row(method: &'static str, e: &Estimate, clipped: Option<f64>) -> ReportRow {
    ReportRow {
        method,
        estimate: e.estimate,
        chosen: format!("{:?}", e.method).to_lowercase(),
        p_star: e.p_star,
        i_at_p_star: e.i_at_p_star,
        i_unfiltered: e.i_unfiltered,
        clipped_mass: clipped,
    }
}

/// Estimates for one input; the report file name is `name`.
pub fn estimate_into(cfg: &RunConfig, input: &Input, mitigate: bool, out: &Output, name: &str) -> CliResult<()> {
    let part = cfg.partition()?;
    let p = input.distribution()?;
    check_atoms(cfg, p.n_atoms())?;
    let raw = estimate_entanglement(&p, &part, &cfg.estimator)?;
    let mut rows = vec![row("raw", &raw, None)];
    if let (Input::Counts(c), true) = (input, mitigate) {
        let (m3, clipped) = m3_mitigate(c, &cfg.readout, &cfg.m3)?.clip()?;
        rows.push(row("mitigated_m3", &estimate_entanglement(&m3, &part, &cfg.estimator)?, Some(clipped)));
        let dep = depletion_mitigate(c, &cfg.readout)?;
        rows.push(row("mitigated_depletion", &estimate_entanglement(&dep, &part, &cfg.estimator)?, None));
    }
    let grid = cfg.estimator.grid.thresholds(p.max_probability())?;
    let curve = filtration_curve(&p, &part, &grid)?;
    let stem = name.trim_end_matches(".json");
    out.csv(
        &format!("{stem}_filtration.csv"),
        "p_min,i_ab,s_cond,survivors",
        (0..curve.len()).filter(|&i| curve.valid[i]).map(|i| {
            format!(
                "{},{},{},{}",
                prob(curve.thresholds[i]),
                summary(curve.i_ab[i]),
                summary(curve.s_cond[i]),
                curve.survivors[i]
            )
        }),
    )?;
    out.json(name, &json!({ "partition": part.labels(), "rows": rows }))
}

pub fn estimate(cfg: &RunConfig, input: Option<&Path>, mitigate: bool, out: &Output) -> CliResult<()> {
    let input = load_input(cfg, input)?;
    estimate_into(cfg, &input, mitigate, out, "report.json")
}

pub fn write_cumulative(out: &Output, name: &str, p: &ProbDist) -> CliResult<()> {
    let c = cumulative(p);
    out.csv(
        name,
        "p_lambda,sigma",
        c.points.iter().map(|&(x, s)| format!("{},{}", prob(x), prob(s))),
    )
}

pub fn cumulative_cmd(
    cfg: &RunConfig,
    input: Option<&Path>,
    resample: Option<u64>,
    repeats: usize,
    out: &Output,
) -> CliResult<()> {
    let p = load_input(cfg, input)?.distribution()?;
    write_cumulative(out, "cumulative.csv", &p)?;
    let Some(n_shots) = resample else {
        return Ok(());
    };
    let exact = cumulative(&p);
    let grid: Vec<f64> = (0..=60).map(|i| 10f64.powf(-6.0 + 0.1 * i as f64)).collect();
    let mut runs = Vec::new();
    for i in 0..repeats {
        let seed = cfg.seed + i as u64;
        let d = sample(&p, n_shots, seed).to_distribution()?;
        write_cumulative(out, &format!("cumulative_resample_{i}.csv"), &d)?;
        let c = cumulative(&d);
        runs.push(json!({
            "seed": seed,
            "sup_distance": c.sup_distance(&exact),
            "grid_sup_distance": c.sup_distance_on(&exact, &grid),
        }));
    }
    out.json("cumulative.json", &json!({ "n_shots": n_shots, "resamples": runs }))
}

pub fn density(cfg: &RunConfig, input: Option<&Path>, out: &Output) -> CliResult<()> {
    let p = load_input(cfg, input)?.distribution()?;
    let d = density_of_probability(&p, cfg.binning()?);
    out.csv(
        "density.csv",
        "p_center,delta_p,count,density",
        d.bins.iter().map(|b| {
            format!("{},{},{},{}", prob(b.p_center), prob(b.delta_p), b.count, summary(b.density))
        }),
    )?;
    let window = (cfg.density.fit_lo, cfg.density.fit_hi);
    let fit = power_law_fit(&d, window)?;
    out.json(
        "powerlaw.json",
        &json!({ "c": fit.c, "zeta": fit.zeta, "r_squared": fit.r_squared, "n_bins": fit.n_bins, "fit_window": window }),
    )
}

pub fn maxprob(cfg: &RunConfig, out: &Output) -> CliResult<Vec<(f64, Vec<(usize, f64)>)>> {
    let m = &cfg.maxprob;
    if m.min_rungs < 1 || m.min_rungs > m.max_rungs {
        return Err(CliError::Config("maxprob size range is empty".into()));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut all = Vec::new();
    for &rb in &m.rb_over_a {
        let systems = (m.min_rungs..=m.max_rungs)
            .map(|n| cfg.system.build_sized(n, rb))
            .collect::<CliResult<Vec<_>>>()?;
        let series = max_prob_series(&systems, &cfg.solver())?;
        rows.extend(series.iter().map(|&(n, pm)| format!("{rb},{n},{}", prob(pm))));
        let mut classes = vec![json!({ "class": "all", "fit": exp_decay_fit(&series, SizeClass::All)? })];
        for r in 0..3u8 {
            if let Ok(f) = exp_decay_fit(&series, SizeClass::Mod3(r)) {
                classes.push(json!({ "class": format!("mod3={r}"), "fit": f }));
            }
        }
        fits.push(json!({ "rb_over_a": rb, "series": series, "fits": classes }));
        all.push((rb, series));
    }
    out.csv("maxprob.csv", "rb_over_a,n_rungs,p_max", rows)?;
    out.json("fits.json", &fits)?;
    Ok(all)
}

#[derive(Deserialize)]
struct ScheduleFile {
    omega: Vec<(f64, f64)>,
    delta: Vec<(f64, f64)>,
}

/// Breakpoints in (μs, MHz), converted to rad/μs.
pub fn load_schedule(path: &Path) -> CliResult<RampSchedule> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let file: ScheduleFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let conv = |pts: Vec<(f64, f64)>| -> CliResult<PiecewiseLinear> {
        Ok(PiecewiseLinear::new(
            pts.into_iter().map(|(t, f)| (t, mhz_to_angular(f))).collect(),
        )?)
    };
    Ok(RampSchedule::new(conv(file.omega)?, conv(file.delta)?)?)
}

pub struct EvolveSummary {
    pub final_state: PureState,
    pub final_fidelity: f64,
}

pub fn evolve(cfg: &RunConfig, out: &Output, name: &str) -> CliResult<EvolveSummary> {
    let sys = cfg.system.build()?;
    let sched = match &cfg.dynamics.schedule_file {
        Some(path) => load_schedule(path)?,
        None => schedule_standard(
            ScheduleKind::parse(&cfg.dynamics.schedule)?,
            sys.omega(),
            sys.delta(),
        )?,
    };
    let psi0 = PureState::vacuum(sys.n_atoms());
    let opts = cfg.solver();
    let res = trotter_evolve(&sys, &sched, cfg.dynamics.dt, &psi0, cfg.dynamics.checkpoint_every, &opts)?;
    let target = ground_state(&sys, &opts)?;
    let fidelity = res.psi_final.fidelity(&target.psi);
    let p_final = res.psi_final.distribution();
    out.csv(
        &format!("{name}_checkpoints.csv"),
        "t,fidelity,norm",
        res.checkpoints.iter().map(|c| {
            format!(
                "{},{},{}",
                summary(c.t),
                c.fidelity.map(summary).unwrap_or_else(|| "nan".into()),
                summary(c.norm)
            )
        }),
    )?;
    out.probdist(&format!("{name}_final.csv"), &p_final)?;
    out.json(
        &format!("{name}.json"),
        &json!({
            "schedule": cfg.dynamics.schedule_file.as_ref().map(|p| p.display().to_string())
                .unwrap_or_else(|| cfg.dynamics.schedule.clone()),
            "dt": res.dt,
            "n_steps": res.n_steps,
            "final_fidelity": fidelity,
            "tv_to_ground_state": p_final.total_variation(&target.psi.distribution()),
            "checkpoint_errors": res.checkpoints.iter().filter_map(|c| c.error.clone()).collect::<Vec<_>>(),
        }),
    )?;
    Ok(EvolveSummary {
        final_state: res.psi_final,
        final_fidelity: fidelity,
    })
}

pub fn rampdown(cfg: &RunConfig, out: &Output) -> CliResult<Vec<(f64, f64)>> {
    let sys = cfg.system.build()?;
    let gs = ground_state(&sys, &cfg.solver())?;
    let p0 = gs.psi.distribution();
    let mut tvs = Vec::new();
    for (i, &t) in cfg.dynamics.rampdown_times.iter().enumerate() {
        let psi = rampdown_evolve(&sys, &gs.psi, t, cfg.dynamics.rampdown_dt)?;
        let p = psi.distribution();
        out.probdist(&format!("rampdown_{i}.csv"), &p)?;
        tvs.push((t, p.total_variation(&p0)));
    }
    out.json(
        "rampdown.json",
        &json!({
            "dt": cfg.dynamics.rampdown_dt,
            "runs": tvs.iter().map(|&(t, tv)| json!({ "ramp_time": t, "tv_to_ground_state": tv })).collect::<Vec<_>>(),
        }),
    )?;
    Ok(tvs)
}

pub fn mitigate(cfg: &RunConfig, input: &Path, out: &Output) -> CliResult<()> {
    let counts = match load_input(cfg, Some(input))? {
        Input::Counts(c) => c,
        Input::Dist(_) => {
            return Err(CliError::Data("mitigation needs counts or shots, not probabilities".into()))
        }
    };
    let model = ReadoutModel::new(cfg.readout.p01, cfg.readout.p10)?;
    let q = m3_mitigate(&counts, &model, &cfg.m3)?;
    let n = counts.n_atoms();
    out.csv(
        "mitigated_m3_quasi.csv",
        "bitstring,quasi_probability",
        q.entries.iter().map(|(&k, &v)| format!("{},{}", format_bitstring(k, n), prob(v))),
    )?;
    let (clipped, clipped_mass) = q.clip()?;
    out.probdist("mitigated_m3.csv", &clipped)?;
    out.probdist("mitigated_depletion.csv", &depletion_mitigate(&counts, &model)?)?;
    out.json(
        "mitigation.json",
        &json!({
            "support_size": q.entries.len(),
            "residual": q.residual,
            "iterations": q.iterations,
            "clipped_mass": clipped_mass,
            "negative_entries": q.entries.values().filter(|&&v| v < 0.0).count(),
        }),
    )
}

/// Weak-monotonicity combination under filtration; the quantum value when
/// the exact state is available.
pub fn weakmono(cfg: &RunConfig, input: Option<&Path>, out: &Output) -> CliResult<serde_json::Value> {
    let part = cfg.wm_partition()?;
    let (p, vn) = match input {
        None => {
            let gs = exact_ground_state(cfg)?;
            let vn = weak_monotonicity_vn(&gs.psi, &part)?;
            (gs.psi.distribution(), Some(vn))
        }
        Some(path) => (load_input(cfg, Some(path))?.distribution()?, None),
    };
    let grid = cfg.estimator.grid.thresholds(p.max_probability())?;
    let mut rows = Vec::new();
    for &p_min in &grid {
        let f = filter(&p, p_min)?;
        if f.is_empty() {
            continue;
        }
        rows.push(format!("{},{},{}", prob(p_min), summary(weak_monotonicity_mi(&f, &part)?), f.len()));
    }
    out.csv("weakmono_curve.csv", "p_min,wm_mi,survivors", rows)?;
    let value = json!({
        "partition": part.labels(),
        "wm_vn": vn,
        "wm_mi_unfiltered": weak_monotonicity_mi(&p, &part)?,
    });
    out.json("weakmono.json", &value)?;
    Ok(value)
}

pub fn scan(cfg: &RunConfig, out: &Output) -> CliResult<()> {
    let s = &cfg.system;
    let template = ScanTemplate {
        n_rungs: s.n_rungs,
        a: s.a,
        c6: s.c6,
        aspect_ratio: s.aspect_ratio,
        partition: cfg.partition.clone(),
        wm_partition: match &cfg.wm_partition {
            Some(t) => Some(t.clone()),
            None => default_wm_partition(s.n_rungs).ok(),
        },
    };
    let observables = cfg
        .scan
        .observables
        .iter()
        .map(|o| Observable::parse(o))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = ScanGrid {
        delta_over_omega: cfg.scan.delta_over_omega,
        rb_over_a: cfg.scan.rb_over_a,
    };
    let map = scan_heatmap(&grid, &template, &observables, &cfg.solver())?;
    for o in &observables {
        let text = map.to_csv(*o).expect("observable was scanned");
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default().to_string();
        out.csv(&format!("heatmap_{}.csv", o.name()), &header, lines.map(str::to_string))?;
    }
    let failures: Vec<_> = map
        .failures()
        .map(|p| json!({ "delta_over_omega": p.delta_over_omega, "rb_over_a": p.rb_over_a, "error": p.error }))
        .collect();
    out.json("scan.json", &json!({ "points": map.points.len(), "failures": failures }))
}
