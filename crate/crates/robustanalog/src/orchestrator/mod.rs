//! The outer sizing loop: train on a task subset, verify on the full
//! corner set, re-prune, repeat.
//!
//! A run starts with the nominal corner as its only training task. The
//! agent trains until a periodic greedy evaluation passes the whole
//! subset, which triggers a counted evaluation across every corner. If
//! corners still fail, the corner-wise performance of that evaluation is
//! clustered and the worst member of each cluster becomes the next task
//! set. Iterations that stall past a cap force the full check anyway so a
//! bad subset cannot pin the run.
//!
//! Simulation budgeting is strict: a block of simulations (episode,
//! subset evaluation, or full check) only starts when it fits in the
//! remaining budget, and every simulation is attributed to a phase. The
//! phase totals always equal the simulator's counter.
//!
//! `step()` advances one episode and returns the trace records it
//! produced, so a run can be checkpointed between any two episodes and
//! resumed elsewhere without changing a single byte of its trace.

mod checkpoint;
pub mod rng;
pub mod trace;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_SCHEMA};
pub use rng::{RngSnapshot, RngStreams, StreamState};
pub use trace::{
    read_trace, write_trace_line, PhaseSims, TraceEvent, TraceRecord, TRACE_SCHEMA,
};

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentConfig, Transition};
use crate::env::{Benchmark, Simulator, SizingVector};
use crate::pruner::{select_training_tasks, PerformanceMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Full loop with cluster-based task pruning.
    RobustAnalog,
    /// Ablation: every corner is a training task from the start, so a
    /// passing subset evaluation already proves the full set.
    MtlNoPrune,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::RobustAnalog => "robustanalog",
            Method::MtlNoPrune => "mtl-noprune",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_simulations: u64,
    /// Cap on re-pruning rounds.
    pub max_iterations: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_simulations: 100_000,
            max_iterations: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub budget: Budget,
    pub agent: AgentConfig,
    /// Warm-up window after a re-task that introduced an unseen corner.
    pub retask_warmup: usize,
    /// Episodes within one iteration before a full check is forced.
    pub stall_episodes: u64,
}

impl RunConfig {
    pub fn new(seed: u64) -> Self {
        RunConfig {
            seed,
            budget: Budget::default(),
            agent: AgentConfig::default(),
            retask_warmup: 20,
            stall_episodes: 2000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.agent.validate()?;
        if self.budget.max_simulations == 0 {
            return Err(Error::config("simulation budget must be positive"));
        }
        if self.stall_episodes <= self.agent.warmup_episodes as u64 {
            return Err(Error::config(
                "stall_episodes must exceed the warm-up window",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Running,
    Solved,
    /// Simulation or iteration budget ran out first.
    Exhausted,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub method: String,
    pub benchmark: String,
    pub seed: u64,
    pub solved: bool,
    pub simulations: u64,
    pub episodes: u64,
    pub iterations: u32,
    pub phase_sims: PhaseSims,
    pub final_tasks: Vec<usize>,
    pub solution: Option<SizingVector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Orchestrator {
    method: Method,
    config: RunConfig,
    sim: Simulator,
    agent: Agent,
    rng: RngStreams,
    iteration: u32,
    episodes: u64,
    episodes_since_retask: u64,
    warmup_window: u64,
    phase: PhaseSims,
    status: RunStatus,
    solution: Option<SizingVector>,
}

impl Orchestrator {
    pub fn new(method: Method, benchmark: Benchmark, config: RunConfig) -> Result<Orchestrator> {
        config.validate()?;
        let mut rng = RngStreams::new(config.seed);
        let initial_tasks: Vec<usize> = match method {
            Method::RobustAnalog => vec![benchmark.nominal_index],
            Method::MtlNoPrune => (0..benchmark.corner_count()).collect(),
        };
        let agent = Agent::new(
            &benchmark,
            config.agent.clone(),
            &initial_tasks,
            rng.agent_init(),
        )?;
        let warmup_window = config.agent.warmup_episodes as u64;
        Ok(Orchestrator {
            method,
            config,
            sim: Simulator::new(benchmark),
            agent,
            rng,
            iteration: 0,
            episodes: 0,
            episodes_since_retask: 0,
            warmup_window,
            phase: PhaseSims::default(),
            status: RunStatus::Running,
            solution: None,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn status(&self) -> RunStatus {
        self.status
    }

    pub fn simulations(&self) -> u64 {
        self.sim.simulations()
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn phase_sims(&self) -> PhaseSims {
        self.phase
    }

    pub fn tasks(&self) -> &[usize] {
        self.agent.tasks()
    }

    pub fn benchmark(&self) -> &Benchmark {
        self.sim.benchmark()
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn result(&self) -> RunResult {
        RunResult {
            method: self.method.label().to_string(),
            benchmark: self.sim.benchmark().id.clone(),
            seed: self.config.seed,
            solved: self.status == RunStatus::Solved,
            simulations: self.sim.simulations(),
            episodes: self.episodes,
            iterations: self.iteration,
            phase_sims: self.phase,
            final_tasks: self.agent.tasks().to_vec(),
            solution: self.solution.clone(),
        }
    }

    pub fn summary_record(&self) -> TraceRecord {
        self.record(TraceEvent::Summary {
            episodes: self.episodes,
            simulations: self.sim.simulations(),
            iterations: self.iteration,
            solved: self.status == RunStatus::Solved,
            phase_sims: self.phase,
        })
    }

    /// Advance one episode (plus any evaluation it triggers). Returns the
    /// trace records produced, in order.
    pub fn step(&mut self) -> Result<Vec<TraceRecord>> {
        if self.status != RunStatus::Running {
            return Err(Error::config("step called on a finished run"));
        }
        let mut events = Vec::new();
        let k = self.agent.tasks().len() as u64;

        if !self.fits(k) {
            self.status = RunStatus::Exhausted;
            return Ok(events);
        }
        let in_warmup = self.episodes_since_retask < self.warmup_window;
        let action = self.agent.select_action(
            self.episodes_since_retask as usize,
            self.warmup_window as usize,
            self.rng.noise(),
        )?;
        let sizing = self.sim.benchmark().space.denormalize(&action)?;
        let tasks = self.agent.tasks().to_vec();
        let mut min_reward = f64::INFINITY;
        for (task_id, &corner) in tasks.iter().enumerate() {
            let state = self.sim.benchmark().encode_corner_state(corner)?;
            let (_, breakdown) = self.sim.simulate(&sizing, corner)?;
            min_reward = min_reward.min(breakdown.shaped);
            self.agent.store_transition(Transition {
                state,
                action: action.clone(),
                reward: breakdown.shaped,
                task_id,
            })?;
        }
        self.episodes += 1;
        self.episodes_since_retask += 1;
        if in_warmup {
            self.phase.warmup += k;
        } else {
            self.phase.rollout += k;
        }
        events.push(self.record(TraceEvent::Episode {
            episode: self.episodes,
            simulations: self.sim.simulations(),
            task_count: tasks.len(),
            min_reward,
        }));

        if !in_warmup && self.agent.ready_to_train() {
            self.agent.train_step(self.rng.train())?;
        }

        // Greedy subset evaluation every eval_period post-warm-up episodes.
        let rollouts = self.episodes_since_retask - self.warmup_window.min(self.episodes_since_retask);
        let mut subset_passed = false;
        if !in_warmup && rollouts > 0 && rollouts % self.config.agent.eval_period as u64 == 0 {
            if !self.fits(k) {
                self.status = RunStatus::Exhausted;
                return Ok(events);
            }
            let eval = self.agent.evaluate_subset(&mut self.sim)?;
            self.phase.subset_eval += k;
            let eval_min = eval.rewards.iter().cloned().fold(f64::INFINITY, f64::min);
            events.push(self.record(TraceEvent::Eval {
                episode: self.episodes,
                simulations: self.sim.simulations(),
                min_reward: eval_min,
                passed: eval.passed,
            }));
            if eval.passed {
                if self.agent.tasks().len() == self.sim.benchmark().corner_count() {
                    // The subset already covers every corner.
                    self.status = RunStatus::Solved;
                    self.solution = Some(eval.sizing);
                    debug_assert_eq!(self.phase.total(), self.sim.simulations());
                    return Ok(events);
                }
                subset_passed = true;
            }
        }

        let stalled = self.method == Method::RobustAnalog
            && self.episodes_since_retask >= self.config.stall_episodes;
        if subset_passed || stalled {
            self.full_check_and_retask(&mut events)?;
        }
        debug_assert_eq!(self.phase.total(), self.sim.simulations());
        Ok(events)
    }

    /// Counted greedy evaluation over every corner; on failure the task
    /// set is re-pruned from that evaluation's per-corner performance.
    fn full_check_and_retask(&mut self, events: &mut Vec<TraceRecord>) -> Result<()> {
        let n = self.sim.benchmark().corner_count();
        if !self.fits(n as u64) {
            self.status = RunStatus::Exhausted;
            return Ok(());
        }
        let raw_action = self.agent.greedy_action()?;
        let sizing = self.sim.benchmark().space.denormalize(&raw_action)?;
        let mut metric_names = Vec::new();
        let mut metrics = Vec::with_capacity(n);
        let mut raw_rewards = Vec::with_capacity(n);
        let mut shaped_rewards = Vec::with_capacity(n);
        let mut failing = Vec::new();
        let mut min_reward = f64::INFINITY;
        for corner in 0..n {
            let (mv, breakdown) = self.sim.simulate(&sizing, corner)?;
            if corner == 0 {
                metric_names = mv.iter().map(|(name, _)| name.to_string()).collect();
            }
            metrics.push(mv.iter().map(|(_, v)| v).collect());
            raw_rewards.push(breakdown.raw);
            shaped_rewards.push(breakdown.shaped);
            min_reward = min_reward.min(breakdown.shaped);
            if !breakdown.passed {
                failing.push(corner);
            }
        }
        self.phase.full_check += n as u64;
        let passed = failing.is_empty();
        events.push(self.record(TraceEvent::FullCheck {
            episode: self.episodes,
            simulations: self.sim.simulations(),
            min_reward,
            passed,
            failing_corners: failing,
        }));
        if passed {
            self.status = RunStatus::Solved;
            self.solution = Some(sizing);
            return Ok(());
        }
        if self.iteration >= self.config.budget.max_iterations {
            self.status = RunStatus::Exhausted;
            return Ok(());
        }
        let performance =
            PerformanceMatrix::new(metric_names, metrics, raw_rewards, shaped_rewards)?;
        let prune_seed = self.rng.pruner().gen::<u64>();
        let (task_set, report) = select_training_tasks(
            &performance,
            self.sim.benchmark().nominal_index,
            prune_seed,
        )?;
        let fresh = self.agent.set_tasks(task_set.corners())?;
        self.iteration += 1;
        self.episodes_since_retask = 0;
        self.warmup_window = if fresh.is_empty() {
            0
        } else {
            self.config.retask_warmup as u64
        };
        events.push(self.record(TraceEvent::Retask {
            episode: self.episodes,
            simulations: self.sim.simulations(),
            iteration: self.iteration,
            tasks: task_set.corners().to_vec(),
            clusters: report.k,
            silhouette: report.silhouette,
        }));
        Ok(())
    }

    fn fits(&self, cost: u64) -> bool {
        self.sim.simulations() + cost <= self.config.budget.max_simulations
    }

    fn record(&self, event: TraceEvent) -> TraceRecord {
        TraceRecord::new(
            self.method.label(),
            &self.sim.benchmark().id,
            self.config.seed,
            event,
        )
    }
}

/// Drive a run to its end, appending every trace record (including the
/// final summary) to `trace_out`.
pub fn run_to_completion(
    orchestrator: &mut Orchestrator,
    trace_out: &mut impl Write,
) -> Result<RunResult> {
    while orchestrator.status() == RunStatus::Running {
        for record in orchestrator.step()? {
            write_trace_line(trace_out, &record)?;
        }
    }
    write_trace_line(trace_out, &orchestrator.summary_record())?;
    Ok(orchestrator.result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ota2_benchmark;

    fn small_config(seed: u64, max_simulations: u64) -> RunConfig {
        let mut config = RunConfig::new(seed);
        config.budget.max_simulations = max_simulations;
        config
    }

    fn run_trace(method: Method, config: RunConfig) -> (Vec<u8>, RunResult) {
        let mut orchestrator =
            Orchestrator::new(method, ota2_benchmark().unwrap(), config).unwrap();
        let mut buf = Vec::new();
        let result = run_to_completion(&mut orchestrator, &mut buf).unwrap();
        (buf, result)
    }

    #[test]
    fn phase_totals_match_the_simulator_counter() {
        let (buf, result) = run_trace(Method::RobustAnalog, small_config(3, 1500));
        assert_eq!(result.phase_sims.total(), result.simulations);
        let records = read_trace(&String::from_utf8(buf).unwrap()).unwrap();
        let summaries: Vec<_> = records
            .iter()
            .filter(|r| matches!(r.event, TraceEvent::Summary { .. }))
            .collect();
        assert_eq!(summaries.len(), 1);
        if let TraceEvent::Summary {
            simulations,
            phase_sims,
            ..
        } = summaries[0].event
        {
            assert_eq!(phase_sims.total(), simulations);
            assert_eq!(simulations, result.simulations);
        }
    }

    #[test]
    fn traces_are_byte_identical_across_runs() {
        let (a, _) = run_trace(Method::RobustAnalog, small_config(11, 1200));
        let (b, _) = run_trace(Method::RobustAnalog, small_config(11, 1200));
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn stall_forces_a_full_check_and_retask() {
        let mut config = small_config(5, 4000);
        config.stall_episodes = 60;
        let (buf, result) = run_trace(Method::RobustAnalog, config);
        let records = read_trace(&String::from_utf8(buf).unwrap()).unwrap();
        let retasks: Vec<_> = records
            .iter()
            .filter_map(|r| match &r.event {
                TraceEvent::Retask { tasks, .. } => Some(tasks.clone()),
                _ => None,
            })
            .collect();
        assert!(!retasks.is_empty(), "stall never re-pruned");
        let nominal = ota2_benchmark().unwrap().nominal_index;
        for tasks in &retasks {
            assert!(tasks.len() <= 5, "more than k_max+1 tasks: {tasks:?}");
            assert_eq!(tasks[0], nominal, "nominal corner must lead the task set");
        }
        assert!(result.iterations >= 1);
        assert!(result.phase_sims.full_check >= 30);
    }

    #[test]
    fn exhausted_runs_stop_inside_the_budget() {
        let (_, result) = run_trace(Method::RobustAnalog, small_config(7, 200));
        assert!(!result.solved);
        assert!(result.simulations <= 200);
        assert_eq!(result.phase_sims.total(), result.simulations);
    }

    #[test]
    fn noprune_trains_on_every_corner_from_the_start() {
        let (_, result) = run_trace(Method::MtlNoPrune, small_config(9, 3200));
        assert_eq!(result.final_tasks.len(), 30);
        assert_eq!(result.iterations, 0);
        assert_eq!(result.phase_sims.full_check, 0);
    }

    #[test]
    fn finished_runs_reject_further_steps() {
        let mut orchestrator = Orchestrator::new(
            Method::RobustAnalog,
            ota2_benchmark().unwrap(),
            small_config(1, 60),
        )
        .unwrap();
        let mut buf = Vec::new();
        run_to_completion(&mut orchestrator, &mut buf).unwrap();
        assert!(orchestrator.step().is_err());
    }
}
