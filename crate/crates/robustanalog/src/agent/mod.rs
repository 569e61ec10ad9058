//! Multi-task DDPG agent for single-step sizing episodes.
//!
//! Episodes have no successor state, so the critic regresses the immediate
//! advantage R - B directly; there is no bootstrapping and no target
//! network. One actor and one critic are shared across all training tasks.
//! The critic tells tasks apart through a one-hot corner column appended to
//! its input, indexed by the task's position in the benchmark corner list,
//! so a task keeps its adapter column when the training set is re-pruned.
//!
//! A train step draws one stratified batch, computes every task's critic
//! and actor gradient at the pre-update parameters, runs gradient surgery
//! over each family, and only then lets Adam touch the networks: critic
//! first, then actor. If anything comes out non-finite the step aborts
//! before either network changes.

pub mod pcgrad;
pub mod replay;

pub use pcgrad::{pcgrad_combine, pcgrad_project};
pub use replay::{sample_stratified, stratified_quotas, ReplayBuffer, Transition};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::env::{Benchmark, Simulator, SizingVector, PASS_REWARD, STATE_DIM};
use crate::nn::{AdamParams, AdamState, FlatGradient, MlpNetwork, OutputActivation};
use crate::{Error, Result};

/// What the critic's regression target is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Baseline {
    /// Constant offset; `Fixed(0.0)` regresses plain rewards.
    Fixed(f64),
    /// Running mean of every reward stored so far.
    RunningMean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Total stratified batch size N_s, split across tasks per step.
    pub batch_size: usize,
    /// Exploration noise scale; draws are rejected beyond two sigma.
    pub noise_std: f64,
    /// Uniform-random episodes before the actor is consulted.
    pub warmup_episodes: usize,
    /// Episodes between greedy subset evaluations.
    pub eval_period: usize,
    pub baseline: Baseline,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Hidden layer widths shared by actor and critic.
    pub hidden: Vec<usize>,
    /// Per-task FIFO capacity.
    pub buffer_capacity: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            batch_size: 64,
            noise_std: 0.2,
            warmup_episodes: 50,
            eval_period: 10,
            baseline: Baseline::Fixed(0.0),
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            hidden: vec![64, 64],
            buffer_capacity: 1000,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::config("agent batch_size must be positive"));
        }
        if !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(Error::config("agent noise_std must be finite and >= 0"));
        }
        if self.eval_period == 0 {
            return Err(Error::config("agent eval_period must be positive"));
        }
        if let Baseline::Fixed(b) = self.baseline {
            if !b.is_finite() {
                return Err(Error::config("fixed baseline must be finite"));
            }
        }
        for (name, lr) in [("actor_lr", self.actor_lr), ("critic_lr", self.critic_lr)] {
            if !lr.is_finite() || lr <= 0.0 {
                return Err(Error::config(format!("agent {name} must be finite and > 0")));
            }
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::config("agent hidden layers must be non-empty widths"));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::config("agent buffer_capacity must be positive"));
        }
        Ok(())
    }
}

/// Greedy evaluation of the current policy on the training subset.
#[derive(Clone, Debug)]
pub struct SubsetEval {
    pub sizing: SizingVector,
    /// Banded reward per training task, aligned with `tasks()`.
    pub rewards: Vec<f64>,
    /// True iff every training task hit `PASS_REWARD` exactly.
    pub passed: bool,
}

/// Per-task diagnostics from one train step.
#[derive(Clone, Debug)]
pub struct TrainStats {
    pub critic_losses: Vec<f64>,
    pub actor_objectives: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Agent {
    config: AgentConfig,
    /// Corner indices currently trained on, in training-set order.
    tasks: Vec<usize>,
    n_corners: usize,
    action_dim: usize,
    actor: MlpNetwork,
    critic: MlpNetwork,
    actor_opt: AdamState,
    critic_opt: AdamState,
    buffers: Vec<ReplayBuffer>,
    reward_sum: f64,
    reward_count: u64,
}

impl Agent {
    /// Networks draw their init from `rng` in a fixed order (actor, then
    /// critic) so a seed pins both.
    pub fn new(
        benchmark: &Benchmark,
        config: AgentConfig,
        initial_tasks: &[usize],
        rng: &mut impl Rng,
    ) -> Result<Agent> {
        config.validate()?;
        let n_corners = benchmark.corner_count();
        let action_dim = benchmark.space.dimension();
        check_task_set(initial_tasks, n_corners, config.batch_size)?;

        let mut actor_sizes = vec![STATE_DIM];
        actor_sizes.extend_from_slice(&config.hidden);
        actor_sizes.push(action_dim);
        let actor = MlpNetwork::new(&actor_sizes, OutputActivation::Tanh, "actor", rng)?;

        let mut critic_sizes = vec![STATE_DIM + action_dim + n_corners];
        critic_sizes.extend_from_slice(&config.hidden);
        critic_sizes.push(1);
        let critic = MlpNetwork::new(&critic_sizes, OutputActivation::Identity, "critic", rng)?;

        let actor_opt = AdamState::new(
            actor.param_count(),
            AdamParams::with_learning_rate(config.actor_lr),
        );
        let critic_opt = AdamState::new(
            critic.param_count(),
            AdamParams::with_learning_rate(config.critic_lr),
        );
        let buffers = initial_tasks
            .iter()
            .map(|_| ReplayBuffer::new(config.buffer_capacity))
            .collect();

        Ok(Agent {
            config,
            tasks: initial_tasks.to_vec(),
            n_corners,
            action_dim,
            actor,
            critic,
            actor_opt,
            critic_opt,
            buffers,
            reward_sum: 0.0,
            reward_count: 0,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn tasks(&self) -> &[usize] {
        &self.tasks
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn buffer_len(&self, task_id: usize) -> usize {
        self.buffers.get(task_id).map_or(0, ReplayBuffer::len)
    }

    /// True once every task buffer can serve a sub-batch.
    pub fn ready_to_train(&self) -> bool {
        self.buffers.iter().all(|b| !b.is_empty())
    }

    /// Deterministic policy output. The actor conditions on nothing (the
    /// sizing problem is one-shot), so its input is a constant zero vector.
    pub fn greedy_action(&self) -> Result<Vec<f64>> {
        self.actor.forward(&[0.0; STATE_DIM])
    }

    /// Exploration policy: uniform in [-1, 1]^n during warm-up, otherwise
    /// actor output plus truncated Gaussian noise, clamped back to the box.
    pub fn select_action(
        &self,
        episodes_since_retask: usize,
        warmup: usize,
        rng: &mut impl Rng,
    ) -> Result<Vec<f64>> {
        if episodes_since_retask < warmup {
            return Ok((0..self.action_dim)
                .map(|_| rng.gen_range(-1.0..=1.0))
                .collect());
        }
        let mut action = self.greedy_action()?;
        if self.config.noise_std > 0.0 {
            for a in action.iter_mut() {
                *a = (*a + truncated_normal(self.config.noise_std, rng)).clamp(-1.0, 1.0);
            }
        }
        Ok(action)
    }

    pub fn store_transition(&mut self, transition: Transition) -> Result<()> {
        if transition.task_id >= self.tasks.len() {
            return Err(Error::InvalidTaskId {
                task_id: transition.task_id,
                task_count: self.tasks.len(),
            });
        }
        if transition.state.len() != STATE_DIM {
            return Err(Error::DimensionMismatch {
                context: "transition state",
                expected: STATE_DIM,
                got: transition.state.len(),
            });
        }
        if transition.action.len() != self.action_dim {
            return Err(Error::DimensionMismatch {
                context: "transition action",
                expected: self.action_dim,
                got: transition.action.len(),
            });
        }
        if !transition.reward.is_finite() {
            return Err(Error::non_finite("stored reward"));
        }
        self.reward_sum += transition.reward;
        self.reward_count += 1;
        let task_id = transition.task_id;
        self.buffers[task_id].push(transition);
        Ok(())
    }

    /// Replace the training task set, keeping the replay buffer of every
    /// corner that survives. Returns the positions of genuinely new tasks
    /// (the caller owes those a warm-up window).
    pub fn set_tasks(&mut self, new_tasks: &[usize]) -> Result<Vec<usize>> {
        check_task_set(new_tasks, self.n_corners, self.config.batch_size)?;
        let mut next_buffers = Vec::with_capacity(new_tasks.len());
        let mut fresh = Vec::new();
        for (pos, &corner) in new_tasks.iter().enumerate() {
            match self.tasks.iter().position(|&c| c == corner) {
                Some(old_pos) => {
                    let mut kept = std::mem::replace(
                        &mut self.buffers[old_pos],
                        ReplayBuffer::new(self.config.buffer_capacity),
                    );
                    kept.remap_task(pos);
                    next_buffers.push(kept);
                }
                None => {
                    next_buffers.push(ReplayBuffer::new(self.config.buffer_capacity));
                    fresh.push(pos);
                }
            }
        }
        self.tasks = new_tasks.to_vec();
        self.buffers = next_buffers;
        Ok(fresh)
    }

    /// Critic value for an arbitrary (state, action) pair under one task's
    /// adapter column.
    pub fn critic_value(&self, state: &[f64], action: &[f64], corner: usize) -> Result<f64> {
        if corner >= self.n_corners {
            return Err(Error::InvalidTaskId {
                task_id: corner,
                task_count: self.n_corners,
            });
        }
        Ok(self.critic.forward(&self.critic_input(state, action, corner))?[0])
    }

    /// One gradient-surgery train step over a fresh stratified batch.
    pub fn train_step(&mut self, rng: &mut impl Rng) -> Result<TrainStats> {
        let batches = sample_stratified(&self.buffers, self.config.batch_size, rng)?;
        let n_s = self.config.batch_size as f64;
        let baseline = self.baseline_value();

        // Every gradient below is taken at the pre-update parameters.
        let mut critic_grads = Vec::with_capacity(batches.len());
        let mut critic_losses = Vec::with_capacity(batches.len());
        for (i, sub) in batches.iter().enumerate() {
            let corner = self.tasks[i];
            let mut grad = FlatGradient::zeros_like(&self.critic);
            grad.tag = format!("critic task {i}");
            let mut loss = 0.0;
            for t in sub {
                let input = self.critic_input(&t.state, &t.action, corner);
                let q = self.critic.forward(&input)?[0];
                let residual = q - (t.reward - baseline);
                loss += residual * residual / n_s;
                self.critic
                    .gradients_into(&input, &[2.0 * residual / n_s], &mut grad.values)?;
            }
            if !loss.is_finite() {
                return Err(Error::non_finite(format!("critic loss, task {i}")));
            }
            critic_losses.push(loss);
            critic_grads.push(grad);
        }

        let zero_state = [0.0; STATE_DIM];
        let mean_action = self.actor.forward(&zero_state)?;
        let mut actor_grads = Vec::with_capacity(batches.len());
        let mut actor_objectives = Vec::with_capacity(batches.len());
        for (i, sub) in batches.iter().enumerate() {
            let corner = self.tasks[i];
            let mut value_grad = vec![0.0; self.action_dim];
            let mut objective = 0.0;
            for t in sub {
                let input = self.critic_input(&t.state, &mean_action, corner);
                objective += self.critic.forward(&input)?[0] / n_s;
                let (_, input_grad) = self.critic.gradients(&input, &[1.0 / n_s])?;
                for (v, g) in value_grad
                    .iter_mut()
                    .zip(&input_grad[STATE_DIM..STATE_DIM + self.action_dim])
                {
                    *v += g;
                }
            }
            // Ascent on the task's value estimate = descent along -dQ/da.
            let cotangent: Vec<f64> = value_grad.iter().map(|v| -v).collect();
            let (mut grad, _) = self.actor.gradients(&zero_state, &cotangent)?;
            grad.tag = format!("actor task {i}");
            actor_grads.push(grad);
            actor_objectives.push(objective);
        }

        // Surgery consumes randomness in a fixed order: critic, then actor.
        let critic_update = pcgrad_combine(&critic_grads, rng)?;
        let actor_update = pcgrad_combine(&actor_grads, rng)?;
        for (update, what) in [(&critic_update, "critic"), (&actor_update, "actor")] {
            if update.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::non_finite(format!("{what} surgery output")));
            }
        }

        let mut params = self.critic.params_flat();
        self.critic_opt.step(&mut params, &critic_update)?;
        self.critic.set_params_flat(&params)?;
        let mut params = self.actor.params_flat();
        self.actor_opt.step(&mut params, &actor_update)?;
        self.actor.set_params_flat(&params)?;

        Ok(TrainStats {
            critic_losses,
            actor_objectives,
        })
    }

    /// Run the greedy sizing through every training task. Costs exactly
    /// `tasks().len()` simulations.
    pub fn evaluate_subset(&self, sim: &mut Simulator) -> Result<SubsetEval> {
        let raw = self.greedy_action()?;
        let sizing = sim.benchmark().space.denormalize(&raw)?;
        let mut rewards = Vec::with_capacity(self.tasks.len());
        for &corner in &self.tasks {
            let (_, breakdown) = sim.simulate(&sizing, corner)?;
            rewards.push(breakdown.shaped);
        }
        let passed = rewards.iter().all(|&r| r == PASS_REWARD);
        Ok(SubsetEval {
            sizing,
            rewards,
            passed,
        })
    }

    fn baseline_value(&self) -> f64 {
        match self.config.baseline {
            Baseline::Fixed(b) => b,
            Baseline::RunningMean => {
                if self.reward_count == 0 {
                    0.0
                } else {
                    self.reward_sum / self.reward_count as f64
                }
            }
        }
    }

    fn critic_input(&self, state: &[f64], action: &[f64], corner: usize) -> Vec<f64> {
        let mut input = Vec::with_capacity(STATE_DIM + self.action_dim + self.n_corners);
        input.extend_from_slice(state);
        input.extend_from_slice(action);
        let base = input.len();
        input.resize(base + self.n_corners, 0.0);
        input[base + corner] = 1.0;
        input
    }
}

fn check_task_set(tasks: &[usize], n_corners: usize, batch_size: usize) -> Result<()> {
    if tasks.is_empty() {
        return Err(Error::config("training task set is empty"));
    }
    if tasks.len() > batch_size {
        return Err(Error::config(format!(
            "{} training tasks exceed batch size {batch_size}",
            tasks.len()
        )));
    }
    for (i, &t) in tasks.iter().enumerate() {
        if t >= n_corners {
            return Err(Error::InvalidTaskId {
                task_id: t,
                task_count: n_corners,
            });
        }
        if tasks[..i].contains(&t) {
            return Err(Error::config(format!("duplicate training task {t}")));
        }
    }
    Ok(())
}

/// Zero-mean Gaussian rejected outside two standard deviations.
pub(crate) fn truncated_normal(std: f64, rng: &mut impl Rng) -> f64 {
    let normal = Normal::new(0.0, std).expect("std checked finite and positive");
    loop {
        let x = normal.sample(rng);
        if x.abs() <= 2.0 * std {
            return x;
        }
    }
}
