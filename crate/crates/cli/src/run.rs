//! Subcommand planning and execution. Planning resolves and validates
//! everything a subcommand needs before anything touches the run directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gevrey_beam::analyticity::{
    continuation_constant, fit_lemma_constant, modified_energy, sigma_drift_sweep,
    track_radius_over_time, FitPolicy, TrackSetup,
};
use gevrey_beam::lab::{verify_lemmas, FieldSampler};
use gevrey_beam::solver::{integrate, IntegrateOptions, State};
use gevrey_beam::SpectralField;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cli::{Cli, Command, FieldChoice};
use crate::config::{CorpusSection, RunConfig};
use crate::error::{exit, CliError, ConfigError};
use crate::output::{num, opt_num, write_manifest, RunOutputs, Schema, MANIFEST_VERSION};

const DEFAULT_LEMMA_SAMPLES: u64 = 1_000_000;

struct Corpus {
    sampler: FieldSampler,
    settings: CorpusSection,
    seed: u64,
}

impl Corpus {
    fn fit(&self, p: u32) -> Result<f64, CliError> {
        Ok(fit_lemma_constant(
            &self.sampler,
            self.settings.sigma,
            p,
            self.settings.samples,
            self.seed,
        )?)
    }
}

enum Plan {
    Simulate {
        state: State,
        opts: IntegrateOptions,
    },
    TrackRadius {
        state: State,
        opts: IntegrateOptions,
        policy: FitPolicy,
        sigma0: f64,
        corpus: Corpus,
    },
    SweepSigma {
        state: State,
        opts: IntegrateOptions,
        sigmas: Vec<f64>,
        delta: f64,
    },
    VerifyLemmas {
        samples: u64,
        seed: u64,
    },
    FitLowerBound {
        state: State,
        sigma0: f64,
        corpus: Corpus,
        times: Vec<f64>,
        observed: Option<Vec<Option<f64>>>,
    },
    DumpSpectrum {
        field: SpectralField,
    },
}

/// What a finished subcommand hands back: files to write, lines for the
/// terminal and the exit code.
pub struct Outcome {
    pub outputs: RunOutputs,
    pub summary: Vec<String>,
    pub exit_code: i32,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn cfg(path: &str, message: impl ToString) -> CliError {
    CliError::Config(ConfigError {
        path: path.into(),
        message: message.to_string(),
    })
}

/// Applies flag overrides to the parsed config.
fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if matches!(cli.command, Command::VerifyLemmas) => RunConfig::default(),
        None => return Err(usage(format!("{} needs --config", cli.command.name()))),
    };
    if let Some(seed) = cli.seed {
        config.seeds.base = seed;
    }
    if let Some(n) = cli.samples {
        if let Some(corpus) = config.analyticity.as_mut().and_then(|a| a.corpus.as_mut()) {
            corpus.samples = usize::try_from(n).map_err(|_| usage("--samples too large"))?;
        }
        if let Some(l) = config.lemmas.as_mut() {
            l.samples = n;
        }
    }
    Ok(config)
}

fn corpus(config: &RunConfig) -> Result<Corpus, CliError> {
    let (sampler, settings) = config.corpus()?;
    Ok(Corpus {
        sampler,
        settings,
        seed: config.seeds.base,
    })
}

/// Output times `0, stride·dt, …, T` (with `T` always included).
fn output_times(opts: &IntegrateOptions) -> Vec<f64> {
    let steps = (opts.t_final / opts.dt).round() as usize;
    let mut times: Vec<f64> = (0..=steps)
        .step_by(opts.output_stride)
        .map(|i| i as f64 * opts.dt)
        .collect();
    if !steps.is_multiple_of(opts.output_stride) {
        times.push(steps as f64 * opts.dt);
    }
    times
}

fn read_radius_csv(path: &Path) -> Result<(Vec<f64>, Vec<Option<f64>>), CliError> {
    let bad = |m: String| usage(format!("--radius {}: {m}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column {name}")))
    };
    let (ti, si) = (col("time")?, col("sigma_est")?);
    let (mut times, mut est) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let t: f64 = rec[ti].parse().map_err(|_| bad(format!("bad time {}", &rec[ti])))?;
        times.push(t);
        est.push(rec[si].parse::<f64>().ok());
    }
    if times.is_empty() {
        return Err(bad("no rows".into()));
    }
    Ok((times, est))
}

fn plan(cli: &Cli, config: &RunConfig) -> Result<Plan, CliError> {
    Ok(match &cli.command {
        Command::Simulate => Plan::Simulate {
            state: config.initial_state()?,
            opts: config.integrate_options()?,
        },
        Command::TrackRadius => Plan::TrackRadius {
            state: config.initial_state()?,
            opts: config.integrate_options()?,
            policy: config.fit_policy()?,
            sigma0: config.sigma0()?,
            corpus: corpus(config)?,
        },
        Command::SweepSigma => {
            let opts = config.integrate_options()?;
            let (sigmas, delta) = config.sweep()?;
            if delta > opts.t_final * (1.0 + 1e-12) {
                return Err(cfg("analyticity.delta", "must not exceed scheme.t_final"));
            }
            Plan::SweepSigma {
                state: config.initial_state()?,
                opts,
                sigmas,
                delta,
            }
        }
        Command::VerifyLemmas => Plan::VerifyLemmas {
            samples: cli
                .samples
                .or(config.lemma_samples())
                .unwrap_or(DEFAULT_LEMMA_SAMPLES),
            seed: config.seeds.base,
        },
        Command::FitLowerBound { radius } => {
            let state = config.initial_state()?;
            let sigma0 = config.sigma0()?;
            let corpus = corpus(config)?;
            let (times, observed) = match radius {
                Some(path) => {
                    let (t, s) = read_radius_csv(path)?;
                    (t, Some(s))
                }
                None => (output_times(&config.integrate_options()?), None),
            };
            Plan::FitLowerBound {
                state,
                sigma0,
                corpus,
                times,
                observed,
            }
        }
        Command::DumpSpectrum { field } => {
            let grid = config.grid()?;
            let (u0, u1) = config.initial_data(&grid)?;
            let (data, path) = match field {
                FieldChoice::U0 => (u0, "data.u0"),
                FieldChoice::U1 => (u1, "data.u1"),
            };
            Plan::DumpSpectrum {
                field: data.build(&grid).map_err(|e| cfg(path, e))?,
            }
        }
    })
}

fn bool_str(b: bool) -> String {
    b.to_string()
}

fn execute(plan: Plan) -> Result<Outcome, CliError> {
    let mut out = RunOutputs::default();
    let mut summary = Vec::new();
    let mut exit_code = exit::OK;
    match plan {
        Plan::Simulate { state, opts } => {
            let traj = integrate(&state, &opts)?;
            out.csv(
                &Schema::energy(),
                traj.energies.iter().map(|e| {
                    vec![
                        num(e.time),
                        num(e.kinetic),
                        num(e.bending),
                        num(e.mass),
                        num(e.potential),
                        num(e.total),
                    ]
                }),
            )?;
            let drift = traj.max_relative_drift();
            out.report(
                "simulate",
                &json!({
                    "t_final": traj.last().time,
                    "outputs": traj.states.len(),
                    "energy_initial": traj.energies[0].total,
                    "max_relative_drift": drift,
                    "warnings": traj.warnings,
                }),
            )?;
            summary.push(format!(
                "simulate: t = {}, {} outputs, max relative energy drift {drift:.3e}",
                traj.last().time,
                traj.states.len()
            ));
        }
        Plan::TrackRadius {
            state,
            opts,
            policy,
            sigma0,
            corpus,
        } => {
            let c_fit = corpus.fit(state.params.p)?;
            let track = track_radius_over_time(&TrackSetup {
                initial: state,
                integrate: opts,
                policy,
                sigma0,
                c_fit,
            })?;
            out.csv(
                &Schema::radius(),
                track.samples.iter().map(|s| match &s.estimate {
                    Some(e) => vec![
                        num(s.time),
                        num(e.sigma_est),
                        num(e.residual),
                        e.n_modes_used.to_string(),
                        bool_str(e.capped),
                    ],
                    None => vec![num(s.time), String::new(), String::new(), "0".into(), String::new()],
                }),
            )?;
            for s in &track.samples {
                out.report(
                    "radius_sample",
                    &json!({
                        "time": s.time,
                        "sigma_est": s.estimate.map(|e| e.sigma_est),
                        "sigma_cap": s.estimate.map(|e| e.sigma_cap),
                        "fit_window": s.estimate.map(|e| [e.fit_window.0, e.fit_window.1]),
                        "lower_bound": s.lower_bound,
                        "error": s.error,
                    }),
                )?;
            }
            let (c_pow, gamma) = track.power_law.unzip();
            out.report(
                "track_summary",
                &json!({
                    "sigma0": track.sigma0,
                    "e0": track.e0,
                    "c_fit": track.c_fit,
                    "c_fit_samples": corpus.settings.samples,
                    "c_hat": track.c_hat,
                    "power_law_c": c_pow,
                    "power_law_gamma": gamma,
                    "checkpoints": track.samples.len(),
                    "verdict": track.verdict,
                }),
            )?;
            summary.push(format!(
                "fitted: C_fit = {:.4e}, c_hat = {:.4}, power law c = {}, gamma = {}",
                track.c_fit,
                track.c_hat,
                opt_num(c_pow),
                opt_num(gamma)
            ));
            summary.push(format!(
                "verdict: {} (sigma_est >= min(sigma0, c_hat t^-1/2) at {} checkpoints, sigma0 = {})",
                if track.verdict { "PASS" } else { "FAIL" },
                track.samples.len(),
                track.sigma0
            ));
        }
        Plan::SweepSigma {
            state,
            opts,
            sigmas,
            delta,
        } => {
            let traj = integrate(&state, &opts)?;
            let table = sigma_drift_sweep(&traj.states, &sigmas, delta)?;
            out.csv(
                &Schema::drift(),
                table
                    .rows
                    .iter()
                    .map(|r| vec![num(r.sigma), num(r.delta), num(r.sup_drift), num(r.ratio)]),
            )?;
            for r in table.rows.iter().filter(|r| r.error.is_some()) {
                out.report("drift_row_error", r)?;
            }
            let spread = table.ratio_spread();
            out.report(
                "drift_summary",
                &json!({
                    "delta": delta,
                    "slope": table.slope,
                    "ratio_spread": spread,
                    "checkpoints": table.checkpoints,
                    "rows": table.rows.len(),
                    "invalid_rows": table.rows.iter().filter(|r| !r.is_valid()).count(),
                }),
            )?;
            summary.push(format!(
                "sweep-sigma: slope {} over {} rows, ratio max/min {}",
                opt_num(table.slope),
                table.rows.len(),
                opt_num(spread)
            ));
        }
        Plan::VerifyLemmas { samples, seed } => {
            let reports = verify_lemmas(samples, seed);
            let failed = reports.iter().filter(|r| !r.passed()).count();
            for r in &reports {
                out.report("check", r)?;
                summary.push(format!(
                    "{}: {} samples, {} violations, worst margin {:.3e}",
                    r.check_name, r.samples, r.violations, r.worst_margin
                ));
            }
            if failed > 0 {
                exit_code = exit::LEMMA_VIOLATION;
                summary.push(format!("{failed} check(s) violated"));
            }
        }
        Plan::FitLowerBound {
            state,
            sigma0,
            corpus,
            times,
            observed,
        } => {
            let p = state.params.p;
            let c_fit = corpus.fit(p)?;
            let e0 = modified_energy(&state, sigma0)?.value;
            let c_hat = continuation_constant(e0, c_fit, p);
            let bound = |t: f64| if t > 0.0 { sigma0.min(c_hat / t.sqrt()) } else { sigma0 };
            let mut all_hold = true;
            let rows: Vec<Vec<String>> = times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let lb = bound(t);
                    let est = observed.as_ref().and_then(|o| o[i]);
                    let holds = est.map(|s| s >= lb);
                    all_hold &= holds.unwrap_or(true);
                    vec![
                        num(t),
                        num(lb),
                        opt_num(est),
                        holds.map(bool_str).unwrap_or_default(),
                    ]
                })
                .collect();
            out.csv(&Schema::lower_bound(), rows)?;
            let verdict = observed.as_ref().map(|_| all_hold);
            out.report(
                "lower_bound",
                &json!({
                    "p": p,
                    "sigma0": sigma0,
                    "e0": e0,
                    "c_fit": c_fit,
                    "c_fit_samples": corpus.settings.samples,
                    "c_fit_sigma": corpus.settings.sigma,
                    "c_hat": c_hat,
                    "verdict": verdict,
                }),
            )?;
            summary.push(format!("fitted: C_fit = {c_fit:.4e}, E0 = {e0:.4e}, c_hat = {c_hat:.4}"));
            if let Some(v) = verdict {
                summary.push(format!("verdict: {}", if v { "PASS" } else { "FAIL" }));
            }
        }
        Plan::DumpSpectrum { field } => {
            let grid = *field.grid();
            let dim = grid.dim();
            let rows: Vec<Vec<String>> = field
                .coeffs()
                .iter()
                .enumerate()
                .map(|(flat, c)| {
                    let k = grid.wavevector(flat);
                    let a = c.norm();
                    let mut row: Vec<String> = k[..dim].iter().map(|k| k.to_string()).collect();
                    row.push(num(a));
                    row.push(num(a.ln()));
                    row
                })
                .collect();
            out.csv(&Schema::spectrum(dim), rows)?;
            let nonzero = field.coeffs().iter().filter(|c| c.norm() > 0.0).count();
            out.report(
                "spectrum",
                &json!({"modes": field.coeffs().len(), "nonzero": nonzero, "max_abs": field.max_abs()}),
            )?;
            summary.push(format!("dump-spectrum: {nonzero} nonzero of {} modes", field.coeffs().len()));
        }
    }
    Ok(Outcome {
        outputs: out,
        summary,
        exit_code,
    })
}

#[allow(clippy::too_many_arguments)]
fn manifest(cli: &Cli, config: &RunConfig, status: &str, exit_code: i32, error: Option<String>, files: &[String], schemas: Value, wall: f64) -> Value {
    let hash = Sha256::digest(config.to_toml().as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "manifest_version": MANIFEST_VERSION,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config_path": cli.config.as_ref().map(|p| p.display().to_string()),
        "config_sha256": hex,
        "config": config,
        "seed": config.seeds.base,
        "threads": rayon::current_num_threads(),
        "status": status,
        "exit_code": exit_code,
        "error": error,
        "files": files,
        "schemas": schemas,
        "wall_time_s": wall,
    })
}

fn out_dir(cli: &Cli, config: &RunConfig) -> Result<PathBuf, CliError> {
    cli.out
        .clone()
        .or_else(|| config.output_dir().map(Path::to_path_buf))
        .ok_or_else(|| usage("no run directory: pass --out or set output.dir"))
}

/// Runs one invocation end to end and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let prepared = resolve_config(cli).and_then(|config| {
        let dir = out_dir(cli, &config)?;
        let plan = plan(cli, &config)?;
        Ok((config, dir, plan))
    });
    let (config, dir, plan) = match prepared {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let result = execute(plan);
    let wall = start.elapsed().as_secs_f64();
    let (code, status, error, files, schemas) = match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if let Err(e) = outcome.outputs.write(&dir) {
                eprintln!("error: {e}");
                return exit::RUNTIME;
            }
            let status = if outcome.exit_code == exit::LEMMA_VIOLATION { "lemma_violation" } else { "ok" };
            (outcome.exit_code, status, None, outcome.outputs.file_names(), outcome.outputs.schemas())
        }
        Err(e) => {
            eprintln!("error: {e}");
            (exit::RUNTIME, "error", Some(e.to_string()), Vec::new(), json!({}))
        }
    };
    let m = manifest(cli, &config, status, code, error, &files, schemas, wall);
    if let Err(e) = write_manifest(&dir, &m) {
        eprintln!("error: {e}");
        return exit::RUNTIME;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use gevrey_beam::solver::Scheme;

    #[test]
    fn output_times_include_the_end() {
        let mut o = IntegrateOptions::strang(1.0, 0.1);
        o.output_stride = 3;
        let t = output_times(&o);
        assert_eq!(t.len(), 5);
        assert!((t[3] - 0.9).abs() < 1e-12 && (t[4] - 1.0).abs() < 1e-12);
        o.scheme = Scheme::Yoshida4;
        o.output_stride = 5;
        assert_eq!(output_times(&o).len(), 3);
    }
}
