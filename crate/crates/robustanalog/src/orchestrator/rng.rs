//! Named random streams for one run.
//!
//! Every source of randomness gets its own ChaCha8 stream seeded from the
//! run seed and a stable label, so changing how often one consumer draws
//! (say, exploration noise) cannot shift what any other consumer sees. A
//! stream's state is fully described by its derived seed plus the word
//! position, which is what checkpoints store.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seeding::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamState {
    pub seed: u64,
    pub word_pos: u128,
}

impl StreamState {
    fn capture(seed: u64, rng: &ChaCha8Rng) -> Self {
        StreamState {
            seed,
            word_pos: rng.get_word_pos(),
        }
    }

    fn rebuild(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(self.word_pos);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RngSnapshot {
    pub agent_init: StreamState,
    pub noise: StreamState,
    pub train: StreamState,
    pub pruner: StreamState,
    pub env: StreamState,
}

/// The five streams a run consumes: network init, exploration noise,
/// batch sampling and gradient surgery, prune seeding, and environment
/// randomness (corner draws, warm-up actions use `noise`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "RngSnapshot", into = "RngSnapshot")]
pub struct RngStreams {
    seeds: [u64; 5],
    agent_init: ChaCha8Rng,
    noise: ChaCha8Rng,
    train: ChaCha8Rng,
    pruner: ChaCha8Rng,
    env: ChaCha8Rng,
}

impl RngStreams {
    pub fn new(run_seed: u64) -> Self {
        let labels = ["agent-init", "noise", "train", "pruner", "env"];
        let seeds = labels.map(|l| derive_seed(run_seed, l));
        RngStreams {
            seeds,
            agent_init: ChaCha8Rng::seed_from_u64(seeds[0]),
            noise: ChaCha8Rng::seed_from_u64(seeds[1]),
            train: ChaCha8Rng::seed_from_u64(seeds[2]),
            pruner: ChaCha8Rng::seed_from_u64(seeds[3]),
            env: ChaCha8Rng::seed_from_u64(seeds[4]),
        }
    }

    pub fn agent_init(&mut self) -> &mut ChaCha8Rng {
        &mut self.agent_init
    }

    pub fn noise(&mut self) -> &mut ChaCha8Rng {
        &mut self.noise
    }

    pub fn train(&mut self) -> &mut ChaCha8Rng {
        &mut self.train
    }

    pub fn pruner(&mut self) -> &mut ChaCha8Rng {
        &mut self.pruner
    }

    pub fn env(&mut self) -> &mut ChaCha8Rng {
        &mut self.env
    }

    pub fn snapshot(&self) -> RngSnapshot {
        RngSnapshot {
            agent_init: StreamState::capture(self.seeds[0], &self.agent_init),
            noise: StreamState::capture(self.seeds[1], &self.noise),
            train: StreamState::capture(self.seeds[2], &self.train),
            pruner: StreamState::capture(self.seeds[3], &self.pruner),
            env: StreamState::capture(self.seeds[4], &self.env),
        }
    }
}

impl From<RngSnapshot> for RngStreams {
    fn from(s: RngSnapshot) -> Self {
        RngStreams {
            seeds: [
                s.agent_init.seed,
                s.noise.seed,
                s.train.seed,
                s.pruner.seed,
                s.env.seed,
            ],
            agent_init: s.agent_init.rebuild(),
            noise: s.noise.rebuild(),
            train: s.train.rebuild(),
            pruner: s.pruner.rebuild(),
            env: s.env.rebuild(),
        }
    }
}

impl From<RngStreams> for RngSnapshot {
    fn from(streams: RngStreams) -> Self {
        streams.snapshot()
    }
}
