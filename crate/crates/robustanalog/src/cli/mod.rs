//! Command-line front end.
//!
//! Four subcommands: `run` executes every (method, seed) pair of an
//! experiment config, `sweep-corners` repeats the multi-task run over
//! growing Monte Carlo corner sets, `report` aggregates summary files,
//! and `validate-config` checks a config without running anything.
//!
//! Exit codes: 0 on success, 1 when a run or report fails at runtime,
//! 2 for usage or configuration errors.

pub mod config;
mod report;
mod svg;

pub use config::{
    BenchmarkChoice, ExperimentConfig, MethodChoice, SyntheticSpec, CONFIG_SCHEMA,
};

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{run_es, run_single_task_ddpg, EsConfig};
use crate::env::{
    build_corner_set, ota2_constraints, ota2_design_space, Benchmark, CornerSpec,
    Ota2Constants, Surrogate,
};
use crate::orchestrator::{
    load_checkpoint, read_trace, run_to_completion, save_checkpoint, write_trace_line,
    Method, Orchestrator, RunConfig, RunResult, RunStatus, TraceEvent, TraceRecord,
};
use crate::seeding::derive_seed;
use crate::{Error, Result};

pub const OUTPUT_ENV_VAR: &str = "ROBUSTANALOG_OUT";

const USAGE: &str = "\
usage: robustanalog <command> [options]

commands:
  run              --config <file> [--output <dir>] [--method <name>]
                   [--seed <n>] [--checkpoint-every <episodes>] [--svg]
  run              --resume <checkpoint> [--output <dir>] [--svg]
  sweep-corners    --config <file> [--counts <a,b,c>] [--corner-seed <n>]
                   [--output <dir>]
  report           --input <dir>
  validate-config  --config <file>

The output directory is taken from --output, then $ROBUSTANALOG_OUT, then
the config's experiment.output_dir, then ./results.";

/// One run's summary file: the result plus wall-clock time, which lives
/// here and never in the trace so traces stay byte-reproducible.
#[derive(Serialize, Deserialize)]
pub struct RunSummaryFile {
    #[serde(flatten)]
    pub result: RunResult,
    pub wall_clock_seconds: f64,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: format!("{}\n\n{USAGE}", message.into()),
        }
    }

    fn config(error: Error) -> Failure {
        Failure {
            code: 2,
            message: error.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Failure {
        Failure {
            code: 1,
            message: error.to_string(),
        }
    }
}

pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(args: &[String]) -> std::result::Result<(), Failure> {
    let Some(command) = args.first() else {
        return Err(Failure::usage("no command given"));
    };
    let flags = parse_flags(&args[1..])?;
    match command.as_str() {
        "run" => cmd_run(&flags),
        "sweep-corners" => cmd_sweep(&flags),
        "report" => report::cmd_report(&flags),
        "validate-config" => cmd_validate(&flags),
        other => Err(Failure::usage(format!("unknown command '{other}'"))),
    }
}

pub(crate) struct Flags {
    pairs: Vec<(String, String)>,
    svg: bool,
}

impl Flags {
    pub(crate) fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find_map(|(k, v)| (k == name).then_some(v.as_str()))
    }

    fn require(&self, name: &str) -> std::result::Result<&str, Failure> {
        self.get(name)
            .ok_or_else(|| Failure::usage(format!("missing required flag --{name}")))
    }
}

fn parse_flags(args: &[String]) -> std::result::Result<Flags, Failure> {
    const VALUED: [&str; 8] = [
        "config",
        "output",
        "method",
        "seed",
        "checkpoint-every",
        "resume",
        "counts",
        "corner-seed",
    ];
    let mut flags = Flags {
        pairs: Vec::new(),
        svg: false,
    };
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let Some(name) = arg.strip_prefix("--") else {
            return Err(Failure::usage(format!("unexpected argument '{arg}'")));
        };
        if name == "svg" {
            flags.svg = true;
            i += 1;
            continue;
        }
        if name == "input" || VALUED.contains(&name) {
            let Some(value) = args.get(i + 1) else {
                return Err(Failure::usage(format!("flag --{name} needs a value")));
            };
            flags.pairs.push((name.to_string(), value.clone()));
            i += 2;
            continue;
        }
        return Err(Failure::usage(format!("unknown flag --{name}")));
    }
    Ok(flags)
}

fn cmd_validate(flags: &Flags) -> std::result::Result<(), Failure> {
    let path = PathBuf::from(flags.require("config")?);
    let config = ExperimentConfig::load(&path).map_err(Failure::config)?;
    let benchmark = config.benchmark.build().map_err(Failure::config)?;
    println!("config ok: {}", path.display());
    println!(
        "  benchmark   {} ({} corners, {} parameters, {} constraints)",
        benchmark.id,
        benchmark.corner_count(),
        benchmark.space.dimension(),
        benchmark.constraints.len()
    );
    println!(
        "  methods     {}",
        config
            .methods
            .iter()
            .map(|m| m.label())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "  seeds       {}",
        config
            .seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "  budget      {} simulations, {} iterations",
        config.run.budget.max_simulations, config.run.budget.max_iterations
    );
    Ok(())
}

fn output_root(flags: &Flags, config: Option<&ExperimentConfig>) -> PathBuf {
    if let Some(dir) = flags.get("output") {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = std::env::var(OUTPUT_ENV_VAR) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    if let Some(dir) = config.and_then(|c| c.output_dir.clone()) {
        return dir;
    }
    PathBuf::from("results")
}

fn trace_path(dir: &Path, method: &str, seed: u64) -> PathBuf {
    dir.join(format!("{method}-seed{seed}.trace.jsonl"))
}

fn summary_path(dir: &Path, method: &str, seed: u64) -> PathBuf {
    dir.join(format!("{method}-seed{seed}.summary.json"))
}

fn write_summary(path: &Path, result: &RunResult, wall_clock_seconds: f64) -> Result<()> {
    let file = RunSummaryFile {
        result: result.clone(),
        wall_clock_seconds,
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Execute one (method, seed) run, writing its trace as it goes.
fn execute_run(
    method: MethodChoice,
    benchmark: Benchmark,
    run_template: &RunConfig,
    es_template: &EsConfig,
    seed: u64,
    trace_out: &mut impl std::io::Write,
    checkpoint: Option<(u64, &Path)>,
) -> Result<RunResult> {
    let mut run_config = run_template.clone();
    run_config.seed = seed;
    match method {
        MethodChoice::RobustAnalog | MethodChoice::MtlNoPrune => {
            let kind = if method == MethodChoice::RobustAnalog {
                Method::RobustAnalog
            } else {
                Method::MtlNoPrune
            };
            let mut orchestrator = Orchestrator::new(kind, benchmark, run_config)?;
            match checkpoint {
                None => run_to_completion(&mut orchestrator, trace_out),
                Some((every, path)) => {
                    run_with_checkpoints(&mut orchestrator, trace_out, every, path)
                }
            }
        }
        MethodChoice::SingleDdpg => run_single_task_ddpg(benchmark, run_config, trace_out),
        MethodChoice::Es => {
            let mut es_config = es_template.clone();
            es_config.seed = seed;
            es_config.budget = run_config.budget;
            run_es(benchmark, es_config, trace_out)
        }
    }
}

fn run_with_checkpoints(
    orchestrator: &mut Orchestrator,
    trace_out: &mut impl std::io::Write,
    every: u64,
    path: &Path,
) -> Result<RunResult> {
    let mut steps = 0u64;
    while orchestrator.status() == RunStatus::Running {
        for record in orchestrator.step()? {
            write_trace_line(trace_out, &record)?;
        }
        steps += 1;
        if steps % every == 0 {
            save_checkpoint(path, orchestrator)?;
        }
    }
    write_trace_line(trace_out, &orchestrator.summary_record())?;
    save_checkpoint(path, orchestrator)?;
    Ok(orchestrator.result())
}

fn cmd_run(flags: &Flags) -> std::result::Result<(), Failure> {
    if let Some(checkpoint) = flags.get("resume") {
        return cmd_resume(flags, Path::new(checkpoint));
    }
    let config_path = PathBuf::from(flags.require("config")?);
    let config = ExperimentConfig::load(&config_path).map_err(Failure::config)?;
    let benchmark = config.benchmark.build().map_err(Failure::config)?;

    let methods: Vec<MethodChoice> = match flags.get("method") {
        Some(name) => vec![MethodChoice::parse(name).map_err(Failure::config)?],
        None => config.methods.clone(),
    };
    let seeds: Vec<u64> = match flags.get("seed") {
        Some(s) => vec![s
            .parse()
            .map_err(|_| Failure::usage(format!("bad --seed '{s}'")))?],
        None => config.seeds.clone(),
    };
    let checkpoint_every: Option<u64> = match flags.get("checkpoint-every") {
        Some(s) => Some(
            s.parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::usage(format!("bad --checkpoint-every '{s}'")))?,
        ),
        None => None,
    };

    let out_dir = output_root(flags, Some(&config)).join(&benchmark.id);
    fs::create_dir_all(&out_dir).map_err(|e| Failure::from(Error::from(e)))?;

    println!(
        "benchmark {} ({} corners), {} method(s) x {} seed(s) -> {}",
        benchmark.id,
        benchmark.corner_count(),
        methods.len(),
        seeds.len(),
        out_dir.display()
    );
    for &method in &methods {
        for &seed in &seeds {
            let label = method.label();
            let t_path = trace_path(&out_dir, label, seed);
            let mut trace = fs::File::create(&t_path).map_err(Error::from)?;
            let ckpt_path = out_dir.join(format!("{label}-seed{seed}.ckpt"));
            let ckpt = checkpoint_every
                .filter(|_| {
                    matches!(
                        method,
                        MethodChoice::RobustAnalog | MethodChoice::MtlNoPrune
                    )
                })
                .map(|every| (every, ckpt_path.as_path()));
            let started = Instant::now();
            let result = execute_run(
                method,
                benchmark.clone(),
                &config.run,
                &config.es,
                seed,
                &mut trace,
                ckpt,
            )?;
            trace.flush().map_err(Error::from)?;
            let elapsed = started.elapsed().as_secs_f64();
            write_summary(&summary_path(&out_dir, label, seed), &result, elapsed)?;
            println!(
                "  {label} seed {seed}: {} in {} simulations ({} episodes, {:.1}s)",
                if result.solved { "solved" } else { "unsolved" },
                result.simulations,
                result.episodes,
                elapsed
            );
        }
    }

    refresh_curves(&out_dir, flags.svg)?;
    Ok(())
}

fn cmd_resume(flags: &Flags, checkpoint: &Path) -> std::result::Result<(), Failure> {
    let mut orchestrator = load_checkpoint(checkpoint, None).map_err(Failure::config)?;
    if orchestrator.status() != RunStatus::Running {
        return Err(Failure::config(Error::Checkpoint {
            message: "checkpointed run already finished".to_string(),
        }));
    }
    let method = orchestrator.method().label().to_string();
    let seed = orchestrator.config().seed;
    let benchmark_id = orchestrator.benchmark().id.clone();
    let out_dir = output_root(flags, None).join(&benchmark_id);
    fs::create_dir_all(&out_dir).map_err(Error::from)?;
    let t_path = trace_path(&out_dir, &method, seed);
    if !t_path.exists() {
        return Err(Failure::config(Error::Checkpoint {
            message: format!("no trace to continue at {}", t_path.display()),
        }));
    }
    let mut trace = fs::OpenOptions::new()
        .append(true)
        .open(&t_path)
        .map_err(Error::from)?;
    println!(
        "resuming {method} seed {seed} on {benchmark_id} at {} simulations",
        orchestrator.simulations()
    );
    let started = Instant::now();
    let result = run_to_completion(&mut orchestrator, &mut trace)?;
    trace.flush().map_err(Error::from)?;
    write_summary(
        &summary_path(&out_dir, &method, seed),
        &result,
        started.elapsed().as_secs_f64(),
    )?;
    println!(
        "  {method} seed {seed}: {} in {} simulations",
        if result.solved { "solved" } else { "unsolved" },
        result.simulations
    );
    refresh_curves(&out_dir, flags.svg)?;
    Ok(())
}

fn cmd_sweep(flags: &Flags) -> std::result::Result<(), Failure> {
    let config_path = PathBuf::from(flags.require("config")?);
    let config = ExperimentConfig::load(&config_path).map_err(Failure::config)?;
    let counts: Vec<usize> = match flags.get("counts") {
        Some(list) => list
            .split(',')
            .map(|c| c.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Failure::usage(format!("bad --counts '{list}'")))?,
        None => vec![20, 40, 80, 100, 150],
    };
    if counts.is_empty() {
        return Err(Failure::usage("--counts is empty"));
    }
    let corner_seed: u64 = match flags.get("corner-seed") {
        Some(s) => s
            .parse()
            .map_err(|_| Failure::usage(format!("bad --corner-seed '{s}'")))?,
        None => 1,
    };

    let out_root = output_root(flags, Some(&config));
    let mut rows = Vec::new();
    for &count in &counts {
        let benchmark = sweep_benchmark(&config, count, corner_seed).map_err(Failure::config)?;
        let dir = out_root.join(&benchmark.id);
        fs::create_dir_all(&dir).map_err(Error::from)?;
        println!(
            "corner count {count} -> {} ({} corners)",
            benchmark.id,
            benchmark.corner_count()
        );
        for &seed in &config.seeds {
            let t_path = trace_path(&dir, "robustanalog", seed);
            let mut trace = fs::File::create(&t_path).map_err(Error::from)?;
            let started = Instant::now();
            let result = execute_run(
                MethodChoice::RobustAnalog,
                benchmark.clone(),
                &config.run,
                &config.es,
                seed,
                &mut trace,
                None,
            )?;
            trace.flush().map_err(Error::from)?;
            write_summary(
                &summary_path(&dir, "robustanalog", seed),
                &result,
                started.elapsed().as_secs_f64(),
            )?;
            println!(
                "  seed {seed}: {} in {} simulations",
                if result.solved { "solved" } else { "unsolved" },
                result.simulations
            );
            rows.push((count, benchmark.corner_count(), seed, result));
        }
        refresh_curves(&dir, flags.svg)?;
    }

    let csv_path = out_root.join("sweep.csv");
    let mut csv = String::from("requested_corners,corners,seed,simulations,solved\n");
    for (count, corners, seed, result) in &rows {
        csv.push_str(&format!(
            "{count},{corners},{seed},{},{}\n",
            result.simulations, result.solved
        ));
    }
    fs::write(&csv_path, csv).map_err(Error::from)?;

    println!("\ncorner sweep ({}):", csv_path.display());
    let mut medians = Vec::new();
    for &count in &counts {
        let sims: Vec<u64> = rows
            .iter()
            .filter(|(c, _, _, _)| *c == count)
            .map(|(_, _, _, r)| r.simulations)
            .collect();
        let solved = rows
            .iter()
            .filter(|(c, _, _, r)| *c == count && r.solved)
            .count();
        let med = report::median(&sims);
        medians.push(med);
        println!(
            "  {count:>4} corners: median {med:.0} simulations, {solved}/{} solved",
            sims.len()
        );
    }
    if medians.len() >= 2 && medians[0] > 0.0 {
        let growth = medians.last().unwrap() / medians[0];
        println!(
            "  growth {:.2}x from {} to {} corners",
            growth,
            counts[0],
            counts.last().unwrap()
        );
    }
    Ok(())
}

/// Benchmark variant with a Monte Carlo corner set of the requested size.
/// Counts drawn from one seed share their prefix, so bigger sweeps extend
/// smaller ones instead of resampling them.
fn sweep_benchmark(
    config: &ExperimentConfig,
    count: usize,
    corner_seed: u64,
) -> Result<Benchmark> {
    if count == 0 {
        return Err(Error::config("corner count must be positive"));
    }
    match &config.benchmark {
        BenchmarkChoice::Synthetic(spec) => spec.build(count),
        BenchmarkChoice::Ota2 => {
            let spec = CornerSpec::MonteCarlo {
                count,
                voltage_range: (1.0, 1.2),
                temperature_range: (0.0, 100.0),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(corner_seed, "corners"));
            let corners = build_corner_set(&spec, &mut rng)?;
            let n = corners.len();
            Benchmark::assemble(
                &format!("ota2-mc{n}"),
                ota2_design_space(),
                ota2_constraints(),
                corners,
                (1.0, 1.2),
                (0.0, 100.0),
                Surrogate::Ota2(Ota2Constants::builtin()),
            )
        }
        BenchmarkChoice::File(_) => Err(Error::config(
            "sweep-corners needs benchmark 'ota2' or 'synthetic', not a file",
        )),
    }
}

/// Rebuild the aggregate learning curve (and optional plot) for one
/// benchmark output directory from the traces it holds.
fn refresh_curves(dir: &Path, render_svg: bool) -> Result<()> {
    let mut curves: Vec<(String, u64, Vec<(u64, f64)>, Option<(u64, f64, bool)>)> = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| {
            n.to_string_lossy().ends_with(".trace.jsonl")
        }))
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path)?;
        let records = read_trace(&text)?;
        let Some(first) = records.first() else {
            continue;
        };
        let method = first.method.clone();
        let seed = first.seed;
        let points = curve_points(&method, &records);
        let fin = records.iter().rev().find_map(|r| match &r.event {
            TraceEvent::Summary {
                simulations,
                solved,
                ..
            } => {
                let best = points
                    .iter()
                    .map(|&(_, v)| v)
                    .fold(f64::NEG_INFINITY, f64::max);
                Some((*simulations, best, *solved))
            }
            _ => None,
        });
        curves.push((method, seed, points, fin));
    }
    if curves.is_empty() {
        return Ok(());
    }

    let mut csv = String::from("kind,method,benchmark,seed,simulations,min_reward,solved\n");
    let benchmark = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    for (method, seed, points, fin) in &curves {
        for (sims, reward) in points {
            csv.push_str(&format!("curve,{method},{benchmark},{seed},{sims},{reward},\n"));
        }
        if let Some((sims, best, solved)) = fin {
            let best_cell = if best.is_finite() {
                best.to_string()
            } else {
                String::new()
            };
            csv.push_str(&format!(
                "final,{method},{benchmark},{seed},{sims},{best_cell},{solved}\n"
            ));
        }
    }
    fs::write(dir.join("learning_curve.csv"), csv)?;

    if render_svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = curves
            .iter()
            .filter(|(_, _, points, _)| !points.is_empty())
            .map(|(method, seed, points, _)| {
                (
                    format!("{method} seed {seed}"),
                    points
                        .iter()
                        .map(|&(s, r)| (s as f64, r))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        if !series.is_empty() {
            fs::write(
                dir.join("learning_curve.svg"),
                svg::learning_curve_svg(&series),
            )?;
        }
    }
    Ok(())
}

/// Full-corner-set greedy quality over time. Which record carries that
/// information depends on the method.
fn curve_points(method: &str, records: &[TraceRecord]) -> Vec<(u64, f64)> {
    records
        .iter()
        .filter_map(|r| match (&r.event, method) {
            (
              TraceEvent::FullCheck {
                    simulations,
                    min_reward,
                    ..
                },
                "robustanalog" | "single-ddpg" | "mtl-noprune",
            ) => Some((*simulations, *min_reward)),
            (
                TraceEvent::Eval {
                    simulations,
                    min_reward,
                    ..
                },
                "mtl-noprune",
            ) => Some((*simulations, *min_reward)),
            (
                TraceEvent::Episode {
                    simulations,
                    min_reward,
                    ..
                },
                "es",
            ) => Some((*simulations, *min_reward)),
            _ => None,
        })
        .collect()
}
