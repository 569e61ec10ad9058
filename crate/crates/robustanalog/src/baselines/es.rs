//! Mutation-only (mu, lambda) evolution strategy baseline.
//!
//! Individuals are raw action vectors in [-1, 1]^n. Fitness is the mean
//! banded reward over every corner, so one evaluation costs a full corner
//! sweep and the maximum fitness of 0.2 is reached exactly when all
//! corners pass. Selection keeps the best mu of the offspring plus a
//! single best-ever elite; the mutation scale follows the 1/5th success
//! rule.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::env::{Benchmark, Simulator, PASS_REWARD};
use crate::orchestrator::{
    write_trace_line, Budget, PhaseSims, RunResult, TraceEvent, TraceRecord,
};
use crate::seeding::derive_seed;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsConfig {
    pub seed: u64,
    pub budget: Budget,
    /// mu: parents kept per generation.
    pub parents: usize,
    /// lambda: offspring evaluated per generation.
    pub offspring: usize,
    pub initial_sigma: f64,
    /// Multiplicative step for the 1/5th rule.
    pub sigma_decay: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl EsConfig {
    pub fn new(seed: u64) -> Self {
        EsConfig {
            seed,
            budget: Budget::default(),
            parents: 4,
            offspring: 16,
            initial_sigma: 0.5,
            sigma_decay: 0.85,
            sigma_min: 1e-4,
            sigma_max: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.parents == 0 || self.offspring < self.parents {
            return Err(Error::config("need offspring >= parents >= 1"));
        }
        if !(self.initial_sigma.is_finite() && self.initial_sigma > 0.0) {
            return Err(Error::config("initial_sigma must be finite and > 0"));
        }
        if !(0.0 < self.sigma_decay && self.sigma_decay < 1.0) {
            return Err(Error::config("sigma_decay must lie in (0, 1)"));
        }
        if !(0.0 < self.sigma_min && self.sigma_min <= self.sigma_max) {
            return Err(Error::config("need 0 < sigma_min <= sigma_max"));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Individual {
    genes: Vec<f64>,
    /// Mean banded reward across all corners.
    fitness: f64,
    /// Worst corner reward, kept for the trace.
    min_reward: f64,
}

/// Mean and minimum banded reward of one sizing over every corner.
fn evaluate(sim: &mut Simulator, genes: &[f64]) -> Result<(f64, f64)> {
    let sizing = sim.benchmark().space.denormalize(genes)?;
    let n = sim.benchmark().corner_count();
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    for corner in 0..n {
        let (_, breakdown) = sim.simulate(&sizing, corner)?;
        sum += breakdown.shaped;
        min = min.min(breakdown.shaped);
    }
    Ok((sum / n as f64, min))
}

pub fn run_es(
    benchmark: Benchmark,
    config: EsConfig,
    trace_out: &mut impl Write,
) -> Result<RunResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "es"));
    let mut sim = Simulator::new(benchmark);
    let dims = sim.benchmark().space.dimension();
    let corners = sim.benchmark().corner_count() as u64;
    let benchmark_id = sim.benchmark().id.clone();
    let mut phase = PhaseSims::default();
    let record = |event| TraceRecord::new("es", &benchmark_id, config.seed, event);

    let fits = |sim: &Simulator, cost: u64| {
        sim.simulations() + cost <= config.budget.max_simulations
    };

    let mut solved = false;
    let mut solution = None;
    let mut generation = 0u64;
    let mut sigma = config.initial_sigma;
    let mut parents: Vec<Individual> = Vec::with_capacity(config.parents);
    let mut elite: Option<Individual> = None;

    // Initial parents, uniform over the box.
    if fits(&sim, config.parents as u64 * corners) {
        for _ in 0..config.parents {
            let genes: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let (fitness, min_reward) = evaluate(&mut sim, &genes)?;
            phase.warmup += corners;
            parents.push(Individual {
                genes,
                fitness,
                min_reward,
            });
        }
        elite = parents
            .iter()
            .max_by(|a, b| a.fitness.total_cmp(&b.fitness))
            .cloned();
    }

    // Mean fitness of an all-passing individual is not exactly 0.2 in
    // floating point; the worst corner reward is.
    if let Some(e) = &elite {
        if e.min_reward == PASS_REWARD {
            solved = true;
            solution = Some(sim.benchmark().space.denormalize(&e.genes)?);
        }
    }

    while !solved && !parents.is_empty() && fits(&sim, config.offspring as u64 * corners) {
        generation += 1;
        let normal = Normal::new(0.0, sigma).expect("sigma stays positive and finite");
        let mut offspring = Vec::with_capacity(config.offspring);
        let mut successes = 0usize;
        for _ in 0..config.offspring {
            let parent = &parents[rng.gen_range(0..parents.len())];
            let genes: Vec<f64> = parent
                .genes
                .iter()
                .map(|g| (g + normal.sample(&mut rng)).clamp(-1.0, 1.0))
                .collect();
            let parent_fitness = parent.fitness;
            let (fitness, min_reward) = evaluate(&mut sim, &genes)?;
            phase.rollout += corners;
            if fitness > parent_fitness {
                successes += 1;
            }
            offspring.push(Individual {
                genes,
                fitness,
                min_reward,
            });
        }

        if let Some(e) = elite.clone() {
            offspring.push(e);
        }
        offspring.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        offspring.truncate(config.parents);
        parents = offspring;
        elite = Some(parents[0].clone());

        let rate = successes as f64 / config.offspring as f64;
        if rate > 0.2 {
            sigma /= config.sigma_decay;
        } else if rate < 0.2 {
            sigma *= config.sigma_decay;
        }
        sigma = sigma.clamp(config.sigma_min, config.sigma_max);

        let best = &parents[0];
        write_trace_line(
            trace_out,
            &record(TraceEvent::Episode {
                episode: generation,
                simulations: sim.simulations(),
                task_count: corners as usize,
                min_reward: best.min_reward,
            }),
        )?;

        if best.min_reward == PASS_REWARD {
            solved = true;
            solution = Some(sim.benchmark().space.denormalize(&best.genes)?);
            write_trace_line(
                trace_out,
                &record(TraceEvent::FullCheck {
                    episode: generation,
                    simulations: sim.simulations(),
                    min_reward: best.min_reward,
                    passed: true,
                    failing_corners: Vec::new(),
                }),
            )?;
        }
    }

    debug_assert_eq!(phase.total(), sim.simulations());
    let result = RunResult {
        method: "es".to_string(),
        benchmark: benchmark_id.clone(),
        seed: config.seed,
        solved,
        simulations: sim.simulations(),
        episodes: generation,
        iterations: 0,
        phase_sims: phase,
        final_tasks: Vec::new(),
        solution,
    };
    write_trace_line(
        trace_out,
        &record(TraceEvent::Summary {
            episodes: generation,
            simulations: sim.simulations(),
            iterations: 0,
            solved,
            phase_sims: phase,
        }),
    )?;
    Ok(result)
}
