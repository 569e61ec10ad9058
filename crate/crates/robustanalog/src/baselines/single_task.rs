//! Single-task DDPG baseline.
//!
//! The same agent as the multi-task loop, but with one task: every episode
//! plays one action, sweeps all corners, and stores the mean banded reward
//! as a single transition keyed to the nominal corner. Corner identity is
//! invisible to the learner, which is exactly the weakness this baseline
//! is meant to expose; on a one-corner benchmark it reduces to the
//! multi-task loop episode for episode.

use std::io::Write;

use crate::agent::{Agent, Transition};
use crate::env::{Benchmark, Simulator, PASS_REWARD};
use crate::orchestrator::{
    write_trace_line, PhaseSims, RngStreams, RunConfig, RunResult, TraceEvent, TraceRecord,
};
use crate::Result;

pub fn run_single_task_ddpg(
    benchmark: Benchmark,
    config: RunConfig,
    trace_out: &mut impl Write,
) -> Result<RunResult> {
    config.validate()?;
    let mut rng = RngStreams::new(config.seed);
    let nominal = benchmark.nominal_index;
    let state = benchmark.encode_corner_state(nominal)?;
    let mut agent = Agent::new(&benchmark, config.agent.clone(), &[nominal], rng.agent_init())?;
    let mut sim = Simulator::new(benchmark);
    let corners = sim.benchmark().corner_count();
    let benchmark_id = sim.benchmark().id.clone();
    let record = |event| TraceRecord::new("single-ddpg", &benchmark_id, config.seed, event);
    let block = corners as u64;
    let warmup = config.agent.warmup_episodes as u64;
    let eval_period = config.agent.eval_period as u64;

    let mut phase = PhaseSims::default();
    let mut episodes = 0u64;
    let mut solved = false;
    let mut solution = None;

    loop {
        if sim.simulations() + block > config.budget.max_simulations {
            break;
        }
        let in_warmup = episodes < warmup;
        let action = agent.select_action(episodes as usize, warmup as usize, rng.noise())?;
        let sizing = sim.benchmark().space.denormalize(&action)?;
        let mut sum = 0.0;
        let mut min_reward = f64::INFINITY;
        for corner in 0..corners {
            let (_, breakdown) = sim.simulate(&sizing, corner)?;
            sum += breakdown.shaped;
            min_reward = min_reward.min(breakdown.shaped);
        }
        episodes += 1;
        if in_warmup {
            phase.warmup += block;
        } else {
            phase.rollout += block;
        }
        agent.store_transition(Transition {
            state: state.clone(),
            action,
            reward: sum / corners as f64,
            task_id: 0,
        })?;
        write_trace_line(
            trace_out,
            &record(TraceEvent::Episode {
                episode: episodes,
                simulations: sim.simulations(),
                task_count: 1,
                min_reward,
            }),
        )?;

        if !in_warmup && agent.ready_to_train() {
            agent.train_step(rng.train())?;
        }

        let rollouts = episodes.saturating_sub(warmup);
        if !in_warmup && rollouts > 0 && rollouts % eval_period == 0 {
            if sim.simulations() + block > config.budget.max_simulations {
                break;
            }
            let raw = agent.greedy_action()?;
            let greedy_sizing = sim.benchmark().space.denormalize(&raw)?;
            let mut greedy_min = f64::INFINITY;
            let mut failing = Vec::new();
            for corner in 0..corners {
                let (_, breakdown) = sim.simulate(&greedy_sizing, corner)?;
                greedy_min = greedy_min.min(breakdown.shaped);
                if !breakdown.passed {
                    failing.push(corner);
                }
            }
            phase.full_check += block;
            let passed = greedy_min == PASS_REWARD;
            write_trace_line(
                trace_out,
                &record(TraceEvent::FullCheck {
                    episode: episodes,
                    simulations: sim.simulations(),
                    min_reward: greedy_min,
                    passed,
                    failing_corners: failing,
                }),
            )?;
            if passed {
                solved = true;
                solution = Some(greedy_sizing);
                break;
            }
        }
    }

    debug_assert_eq!(phase.total(), sim.simulations());
    let result = RunResult {
        method: "single-ddpg".to_string(),
        benchmark: benchmark_id.clone(),
        seed: config.seed,
        solved,
        simulations: sim.simulations(),
        episodes,
        iterations: 0,
        phase_sims: phase,
        final_tasks: vec![nominal],
        solution,
    };
    write_trace_line(
        trace_out,
        &record(TraceEvent::Summary {
            episodes,
            simulations: sim.simulations(),
            iterations: 0,
            solved,
            phase_sims: phase,
        }),
    )?;
    Ok(result)
}
