//! Experiment configuration files.
//!
//! Same key-value format as benchmark definitions: a top-level `schema`,
//! then sections. Only `[experiment]` is required; every other section
//! overrides defaults field by field.
//!
//! ```text
//! schema = 1
//!
//! [experiment]
//! methods = robustanalog es
//! benchmark = ota2
//! seeds = 2024 2025 2026
//!
//! [budget]
//! max_simulations = 100000
//! ```

use std::path::{Path, PathBuf};

use crate::agent::Baseline;
use crate::baselines::EsConfig;
use crate::env::{generate_synthetic_benchmark, ota2_benchmark, Benchmark, CornerSpec};
use crate::kv;
use crate::orchestrator::RunConfig;
use crate::{Error, Result};

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    RobustAnalog,
    MtlNoPrune,
    SingleDdpg,
    Es,
}

impl MethodChoice {
    pub const ALL: [MethodChoice; 4] = [
        MethodChoice::RobustAnalog,
        MethodChoice::MtlNoPrune,
        MethodChoice::SingleDdpg,
        MethodChoice::Es,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MethodChoice::RobustAnalog => "robustanalog",
            MethodChoice::MtlNoPrune => "mtl-noprune",
            MethodChoice::SingleDdpg => "single-ddpg",
            MethodChoice::Es => "es",
        }
    }

    pub fn parse(s: &str) -> Result<MethodChoice> {
        Self::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown method '{s}' (expected one of robustanalog, mtl-noprune, \
                     single-ddpg, es)"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub params: usize,
    pub metrics: usize,
    pub corners: usize,
    pub voltage_range: (f64, f64),
    pub temperature_range: (f64, f64),
    pub difficulty: f64,
}

impl SyntheticSpec {
    pub fn build(&self, corner_count: usize) -> Result<Benchmark> {
        let spec = CornerSpec::MonteCarlo {
            count: corner_count,
            voltage_range: self.voltage_range,
            temperature_range: self.temperature_range,
        };
        let mut benchmark = generate_synthetic_benchmark(
            self.seed,
            self.params,
            self.metrics,
            &spec,
            self.difficulty,
        )?;
        benchmark.id = format!("{}-c{}", benchmark.id, benchmark.corner_count());
        Ok(benchmark)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BenchmarkChoice {
    Ota2,
    Synthetic(SyntheticSpec),
    File(PathBuf),
}

impl BenchmarkChoice {
    pub fn build(&self) -> Result<Benchmark> {
        match self {
            BenchmarkChoice::Ota2 => ota2_benchmark(),
            BenchmarkChoice::Synthetic(spec) => spec.build(spec.corners),
            BenchmarkChoice::File(path) => Benchmark::from_file(path),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub methods: Vec<MethodChoice>,
    pub benchmark: BenchmarkChoice,
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
    /// Template for agent-based methods; `seed` is replaced per run.
    pub run: RunConfig,
    /// Template for the evolution strategy; `seed` and budget follow `run`.
    pub es: EsConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let doc = kv::parse_file(path)?;
        let top = doc.section("").expect("unnamed section always present");
        top.check_known_keys(&["schema"])?;
        if top.get("schema").is_none() {
            return Err(Error::config(format!(
                "{}: missing top-level 'schema' key",
                path.display()
            )));
        }
        let schema = top.u64("schema")?;
        if schema != u64::from(CONFIG_SCHEMA) {
            return Err(Error::config(format!(
                "{}: schema {schema} unsupported (expected {CONFIG_SCHEMA})",
                path.display()
            )));
        }

        let experiment = doc.require_section("experiment")?;
        experiment.check_known_keys(&["methods", "benchmark", "seeds", "output_dir"])?;
        let methods = experiment
            .list("methods")?
            .iter()
            .map(|m| MethodChoice::parse(m))
            .collect::<Result<Vec<_>>>()?;
        if methods.is_empty() {
            return Err(Error::config("experiment.methods is empty"));
        }
        let seeds = experiment.u64_list("seeds")?;
        if seeds.is_empty() {
            return Err(Error::config("experiment.seeds is empty"));
        }
        let benchmark_name = experiment.require("benchmark")?;
        let output_dir = experiment.get("output_dir").map(PathBuf::from);

        let mut run = RunConfig::new(0);
        if let Some(budget) = doc.section("budget") {
            budget.check_known_keys(&["max_simulations", "max_iterations"])?;
            if budget.get("max_simulations").is_some() {
                run.budget.max_simulations = budget.u64("max_simulations")?;
            }
            if budget.get("max_iterations").is_some() {
                run.budget.max_iterations = budget.u64("max_iterations")? as u32;
            }
        }
        if let Some(agent) = doc.section("agent") {
            agent.check_known_keys(&[
                "batch_size",
                "noise_std",
                "warmup_episodes",
                "retask_warmup",
                "stall_episodes",
                "eval_period",
                "baseline",
                "actor_lr",
                "critic_lr",
                "hidden",
                "buffer_capacity",
            ])?;
            if agent.get("batch_size").is_some() {
                run.agent.batch_size = agent.usize("batch_size")?;
            }
            if agent.get("noise_std").is_some() {
                run.agent.noise_std = agent.f64("noise_std")?;
            }
            if agent.get("warmup_episodes").is_some() {
                run.agent.warmup_episodes = agent.usize("warmup_episodes")?;
            }
            if agent.get("retask_warmup").is_some() {
                run.retask_warmup = agent.usize("retask_warmup")?;
            }
            if agent.get("stall_episodes").is_some() {
                run.stall_episodes = agent.u64("stall_episodes")?;
            }
            if agent.get("eval_period").is_some() {
                run.agent.eval_period = agent.usize("eval_period")?;
            }
            if let Some(baseline) = agent.get("baseline") {
                run.agent.baseline = parse_baseline(baseline)?;
            }
            if agent.get("actor_lr").is_some() {
                run.agent.actor_lr = agent.f64("actor_lr")?;
            }
            if agent.get("critic_lr").is_some() {
                run.agent.critic_lr = agent.f64("critic_lr")?;
            }
            if agent.get("hidden").is_some() {
                run.agent.hidden = agent
                    .u64_list("hidden")?
                    .into_iter()
                    .map(|w| w as usize)
                    .collect();
            }
            if agent.get("buffer_capacity").is_some() {
                run.agent.buffer_capacity = agent.usize("buffer_capacity")?;
            }
        }

        let mut es = EsConfig::new(0);
        es.budget = run.budget;
        if let Some(section) = doc.section("es") {
            section.check_known_keys(&[
                "parents",
                "offspring",
                "initial_sigma",
                "sigma_decay",
                "sigma_min",
                "sigma_max",
            ])?;
            if section.get("parents").is_some() {
                es.parents = section.usize("parents")?;
            }
            if section.get("offspring").is_some() {
                es.offspring = section.usize("offspring")?;
            }
            if section.get("initial_sigma").is_some() {
                es.initial_sigma = section.f64("initial_sigma")?;
            }
            if section.get("sigma_decay").is_some() {
                es.sigma_decay = section.f64("sigma_decay")?;
            }
            if section.get("sigma_min").is_some() {
                es.sigma_min = section.f64("sigma_min")?;
            }
            if section.get("sigma_max").is_some() {
                es.sigma_max = section.f64("sigma_max")?;
            }
        }

        let benchmark = match benchmark_name {
            "ota2" => {
                forbid_section(&doc, "synthetic", "benchmark 'ota2'")?;
                BenchmarkChoice::Ota2
            }
            "synthetic" => {
                let s = doc.require_section("synthetic")?;
                s.check_known_keys(&[
                    "seed",
                    "params",
                    "metrics",
                    "corners",
                    "voltage",
                    "temperature",
                    "difficulty",
                ])?;
                let voltage = pair(s.f64_list("voltage")?, "synthetic.voltage")?;
                let temperature = pair(s.f64_list("temperature")?, "synthetic.temperature")?;
                BenchmarkChoice::Synthetic(SyntheticSpec {
                    seed: s.u64("seed")?,
                    params: s.usize("params")?,
                    metrics: s.usize("metrics")?,
                    corners: s.usize("corners")?,
                    voltage_range: voltage,
                    temperature_range: temperature,
                    difficulty: s.f64("difficulty")?,
                })
            }
            other => {
                forbid_section(&doc, "synthetic", "a benchmark file")?;
                let candidate = Path::new(other);
                let resolved = if candidate.is_absolute() {
                    candidate.to_path_buf()
                } else {
                    path.parent().unwrap_or(Path::new(".")).join(candidate)
                };
                if !resolved.exists() {
                    return Err(Error::config(format!(
                        "benchmark '{other}' is neither 'ota2', 'synthetic', nor a file \
                         (looked at {})",
                        resolved.display()
                    )));
                }
                BenchmarkChoice::File(resolved)
            }
        };

        let config = ExperimentConfig {
            methods,
            benchmark,
            seeds,
            output_dir,
            run,
            es,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.run.validate()?;
        self.es.validate()?;
        let mut seen = Vec::new();
        for &seed in &self.seeds {
            if seen.contains(&seed) {
                return Err(Error::config(format!("duplicate seed {seed}")));
            }
            seen.push(seed);
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::config(format!("duplicate method '{}'", m.label())));
            }
        }
        Ok(())
    }
}

fn parse_baseline(s: &str) -> Result<Baseline> {
    if s == "running-mean" {
        return Ok(Baseline::RunningMean);
    }
    if let Some(v) = s.strip_prefix("fixed ") {
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad fixed baseline '{v}'")))?;
        return Ok(Baseline::Fixed(value));
    }
    Err(Error::config(format!(
        "baseline '{s}' not understood (use 'running-mean' or 'fixed <value>')"
    )))
}

fn pair(values: Vec<f64>, what: &str) -> Result<(f64, f64)> {
    if values.len() != 2 {
        return Err(Error::config(format!("{what} needs exactly two values")));
    }
    Ok((values[0], values[1]))
}

fn forbid_section(doc: &kv::Document, name: &str, context: &str) -> Result<()> {
    if doc.section(name).is_some() {
        return Err(Error::config(format!(
            "[{name}] section is not allowed with {context}"
        )));
    }
    Ok(())
}
