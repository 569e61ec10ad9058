//! Per-task FIFO replay buffers and stratified batch assembly.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One single-step episode outcome for one training task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Encoded corner state of the task.
    pub state: Vec<f64>,
    /// Raw action in [-1, 1]^n as played (pre-denormalization).
    pub action: Vec<f64>,
    /// Banded reward R, <= 0.2.
    pub reward: f64,
    /// Index into the current training task set.
    pub task_id: usize,
}

/// Bounded FIFO of transitions; eviction is strictly oldest-first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        ReplayBuffer {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1024)),
        }
    }

    pub fn push(&mut self, transition: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(transition);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, index: usize) -> Option<&Transition> {
        self.items.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// Rewrite the task id of every held transition (used when a retained
    /// task moves to a new position in the training set).
    pub fn remap_task(&mut self, task_id: usize) {
        for t in self.items.iter_mut() {
            t.task_id = task_id;
        }
    }
}

/// Per-task quotas: floor(N_s / K) each, remainder to the lowest indices.
pub fn stratified_quotas(batch_size: usize, task_count: usize) -> Vec<usize> {
    let base = batch_size / task_count;
    let remainder = batch_size % task_count;
    (0..task_count)
        .map(|i| base + usize::from(i < remainder))
        .collect()
}

/// Draw a stratified batch: per-task sub-batches sampled uniformly with
/// replacement within each task's buffer. Every buffer must be non-empty.
pub fn sample_stratified(
    buffers: &[ReplayBuffer],
    batch_size: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<Transition>>> {
    if buffers.is_empty() {
        return Err(Error::config("stratified sampling with no task buffers"));
    }
    if batch_size < buffers.len() {
        return Err(Error::config(format!(
            "batch size {batch_size} below task count {}",
            buffers.len()
        )));
    }
    for (task_id, b) in buffers.iter().enumerate() {
        if b.is_empty() {
            return Err(Error::EmptyBuffer { task_id });
        }
    }
    let quotas = stratified_quotas(batch_size, buffers.len());
    let mut batch = Vec::with_capacity(buffers.len());
    for (b, &quota) in buffers.iter().zip(&quotas) {
        let mut sub = Vec::with_capacity(quota);
        for _ in 0..quota {
            sub.push(b.get(rng.gen_range(0..b.len())).unwrap().clone());
        }
        batch.push(sub);
    }
    Ok(batch)
}
