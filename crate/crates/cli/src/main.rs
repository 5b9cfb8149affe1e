mod commands;
mod config;
mod error;
mod io;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rydladder::spectrum::Axis;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::io::Output;

#[derive(Parser)]
#[command(name = "rydladder", version, about = "Rydberg-ladder ground states, sampling and filtered entanglement estimates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML or JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    n_rungs: Option<usize>,
    #[arg(long, global = true)]
    rb_over_a: Option<f64>,
    #[arg(long, global = true)]
    delta_over_omega: Option<f64>,
    /// Two-class labels, one per atom, e.g. AAAAAABBBBBB.
    #[arg(long, global = true)]
    partition: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact ground state: probdist.csv and entropies.json.
    Groundstate,
    /// Draw shots from a distribution (the exact one by default).
    Sample {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Post-select a shot file into a count table.
    Ingest {
        input: PathBuf,
        #[arg(long, overrides_with = "no_invert_post_sequence")]
        invert_post_sequence: bool,
        #[arg(long)]
        no_invert_post_sequence: bool,
    },
    /// Filtered mutual-information estimate, raw and readout-mitigated.
    Estimate {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Skip the mitigated rows for count inputs.
        #[arg(long)]
        no_mitigate: bool,
    },
    /// Cumulative probability curve, optionally against resampled curves.
    Cumulative {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Shots per resample.
        #[arg(long)]
        resample: Option<u64>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
    /// Log-binned density of probability and its power-law fit.
    Density {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Largest probability versus ladder size with exponential fits.
    Maxprob,
    /// Trotterized ramp from the vacuum.
    Evolve {
        /// ramp4us, ramp4us_modified or ramp12us.
        #[arg(long)]
        schedule: Option<String>,
        /// JSON breakpoints in (μs, MHz).
        #[arg(long)]
        schedule_file: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Linear ramp of Ω to zero starting from the ground state.
    Rampdown {
        /// Comma-separated ramp times in μs.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Readout-error mitigation of a count table or shot file.
    Mitigate { input: PathBuf },
    /// Weak-monotonicity combinations on a four-class partition.
    Weakmono {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        wm_partition: Option<String>,
    },
    /// Ground-state observables over a (Δ/Ω, R_b/a) grid.
    Scan {
        /// lo:hi:n
        #[arg(long, value_parser = parse_axis)]
        delta_range: Option<Axis>,
        /// lo:hi:n
        #[arg(long, value_parser = parse_axis)]
        rb_range: Option<Axis>,
        #[arg(long, value_delimiter = ',')]
        observables: Option<Vec<String>>,
    },
    /// Regenerate one figure or table at desk scale.
    Reproduce {
        /// fig3, fig4, fig5, fig6, fig8, fig9, tables2-4 or fig11.
        id: String,
    },
}

fn parse_axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected lo:hi:n, got {text:?}"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok(Axis {
        lo: num(lo)?,
        hi: num(hi)?,
        n: n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
    })
}

fn resolve(g: &Global, command: &Command) -> CliResult<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(o) = &g.out {
        cfg.out = o.clone();
    }
    if let Some(n) = g.n_rungs {
        cfg.system.n_rungs = n;
    }
    if let Some(r) = g.rb_over_a {
        cfg.system.rb_over_a = r;
    }
    if let Some(d) = g.delta_over_omega {
        cfg.system.delta_over_omega = d;
    }
    if let Some(p) = &g.partition {
        cfg.partition = Some(p.clone());
    }
    match command {
        Command::Sample { shots: Some(n), .. } => cfg.n_shots = *n,
        Command::Ingest {
            invert_post_sequence,
            no_invert_post_sequence,
            ..
        } => {
            if *invert_post_sequence {
                cfg.invert_post_sequence = Some(true);
            } else if *no_invert_post_sequence {
                cfg.invert_post_sequence = Some(false);
            }
        }
        Command::Evolve {
            schedule,
            schedule_file,
            dt,
        } => {
            if let Some(s) = schedule {
                cfg.dynamics.schedule = s.clone();
            }
            if schedule_file.is_some() {
                cfg.dynamics.schedule_file = schedule_file.clone();
            }
            if let Some(dt) = dt {
                cfg.dynamics.dt = *dt;
            }
        }
        Command::Rampdown { times, dt } => {
            if let Some(t) = times {
                cfg.dynamics.rampdown_times = t.clone();
            }
            if let Some(dt) = dt {
                cfg.dynamics.rampdown_dt = *dt;
            }
        }
        Command::Weakmono {
            wm_partition: Some(p),
            ..
        } => cfg.wm_partition = Some(p.clone()),
        Command::Scan {
            delta_range,
            rb_range,
            observables,
        } => {
            if let Some(a) = delta_range {
                cfg.scan.delta_over_omega = *a;
            }
            if let Some(a) = rb_range {
                cfg.scan.rb_over_a = *a;
            }
            if let Some(o) = observables {
                cfg.scan.observables = o.clone();
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Groundstate => "groundstate",
        Command::Sample { .. } => "sample",
        Command::Ingest { .. } => "ingest",
        Command::Estimate { .. } => "estimate",
        Command::Cumulative { .. } => "cumulative",
        Command::Density { .. } => "density",
        Command::Maxprob => "maxprob",
        Command::Evolve { .. } => "evolve",
        Command::Rampdown { .. } => "rampdown",
        Command::Mitigate { .. } => "mitigate",
        Command::Weakmono { .. } => "weakmono",
        Command::Scan { .. } => "scan",
        Command::Reproduce { .. } => "reproduce",
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = resolve(&cli.global, &cli.command)?;
    if let Command::Reproduce { id } = &cli.command {
        reproduce::check_id(id)?;
    }
    let out = Output::new(&cfg.out, name(&cli.command), &cfg)?;
    match &cli.command {
        Command::Groundstate => commands::groundstate(&cfg, &out),
        Command::Sample { input, .. } => commands::sample_cmd(&cfg, input.as_deref(), &out),
        Command::Ingest { input, .. } => commands::ingest(&cfg, input, &out),
        Command::Estimate { input, no_mitigate } => {
            commands::estimate(&cfg, input.as_deref(), !no_mitigate, &out)
        }
        Command::Cumulative {
            input,
            resample,
            repeats,
        } => commands::cumulative_cmd(&cfg, input.as_deref(), *resample, *repeats, &out),
        Command::Density { input } => commands::density(&cfg, input.as_deref(), &out),
        Command::Maxprob => commands::maxprob(&cfg, &out).map(|_| ()),
        Command::Evolve { .. } => commands::evolve(&cfg, &out, "evolve").map(|_| ()),
        Command::Rampdown { .. } => commands::rampdown(&cfg, &out).map(|_| ()),
        Command::Mitigate { input } => commands::mitigate(&cfg, input, &out),
        Command::Weakmono { input, .. } => commands::weakmono(&cfg, input.as_deref(), &out).map(|_| ()),
        Command::Scan { .. } => commands::scan(&cfg, &out),
        Command::Reproduce { id } => {
            let pass = reproduce::run(&cfg, id, &out)?;
            println!("{id}: {}", if pass { "PASS" } else { "FAIL" });
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rydladder: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
