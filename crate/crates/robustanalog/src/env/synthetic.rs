//! Seeded family of synthetic constraint-satisfaction benchmarks with a
//! known feasible witness.
//!
//! Each metric is a corner-shifted quadratic bowl over the unit-normalized
//! design space:
//!
//! ```text
//! f_j(x, corner) = b_j + a_j · ||x_norm - c_j - δ_j(corner)||²
//! ```
//!
//! where `δ_j(corner)` is a deterministic function of the corner's *values*
//! (not its position in the corner list) with magnitude scaled by the
//! difficulty knob. Constraint bounds are constructed from a drawn witness
//! point with 5% slack, so the benchmark is feasible by construction at any
//! difficulty; higher difficulty spreads the per-corner optima apart and
//! shrinks the all-corner feasible intersection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::benchmark::{Benchmark, Surrogate};
use super::corner::{build_corner_set, CornerSpec, PvtCorner};
use super::reward::{Constraint, Direction, MetricVector};
use super::space::{DesignSpace, ParamSpec, SizingVector};
use crate::seeding::{derive_seed, mix_seed};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyntheticModel {
    seed: u64,
    difficulty: f64,
    /// Bowl steepness a_j, one per metric.
    amplitudes: Vec<f64>,
    /// Bowl floor b_j (> 0), one per metric.
    offsets: Vec<f64>,
    /// Bowl centers c_j in normalized space.
    centers: Vec<Vec<f64>>,
    /// Grid point satisfying every constraint on every corner.
    witness: SizingVector,
}

impl SyntheticModel {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn difficulty(&self) -> f64 {
        self.difficulty
    }

    pub fn witness(&self) -> &SizingVector {
        &self.witness
    }

    pub fn metric_count(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Corner-dependent center shift for metric `j`. Depends only on the
/// corner's values, so permuting a corner list never changes any metric.
fn corner_shift(model_seed: u64, j: usize, corner: &PvtCorner, dim: usize, difficulty: f64) -> Vec<f64> {
    let mut s = derive_seed(model_seed, "synthetic-shift");
    s = mix_seed(s, j as u64);
    s = mix_seed(s, corner.process.index() as u64);
    s = mix_seed(s, corner.vdd.to_bits());
    s = mix_seed(s, corner.temp_c.to_bits());
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    (0..dim)
        .map(|_| difficulty * rng.gen_range(-0.5..0.5))
        .collect()
}

pub fn evaluate_synthetic(
    sizing: &SizingVector,
    corner: &PvtCorner,
    model: &SyntheticModel,
    space: &DesignSpace,
) -> Result<MetricVector> {
    let x = space.normalized_position(sizing)?;
    let mut pairs = Vec::with_capacity(model.metric_count());
    for j in 0..model.metric_count() {
        let shift = corner_shift(model.seed, j, corner, x.len(), model.difficulty);
        let mut dist2 = 0.0;
        for k in 0..x.len() {
            let d = x[k] - model.centers[j][k] - shift[k];
            dist2 += d * d;
        }
        pairs.push((format!("m{j}"), model.offsets[j] + model.amplitudes[j] * dist2));
    }
    Ok(MetricVector::new(pairs))
}

/// Build a synthetic benchmark. Model coefficients, the witness, and the
/// corner set are drawn from independent sub-streams of `seed`, so the same
/// seed with a different corner spec keeps the same metric surfaces.
pub fn generate_synthetic_benchmark(
    seed: u64,
    n_params: usize,
    n_metrics: usize,
    corner_spec: &CornerSpec,
    difficulty: f64,
) -> Result<Benchmark> {
    if n_params == 0 {
        return Err(Error::config("synthetic benchmark needs at least one parameter"));
    }
    if n_metrics == 0 {
        return Err(Error::config("synthetic benchmark needs at least one metric"));
    }
    if !(difficulty.is_finite() && difficulty >= 0.0) {
        return Err(Error::config(format!(
            "synthetic difficulty must be non-negative, got {difficulty}"
        )));
    }

    let space = DesignSpace::new(
        (0..n_params)
            .map(|k| ParamSpec {
                name: format!("x{k}"),
                lower: 0.0,
                upper: 1.0,
                precision: 0.001,
                unit: String::new(),
            })
            .collect(),
    )?;

    // Draw order is part of the determinism contract: per metric, amplitude,
    // floor, then center components.
    let mut rng_model = ChaCha8Rng::seed_from_u64(derive_seed(seed, "synthetic-model"));
    let mut amplitudes = Vec::with_capacity(n_metrics);
    let mut offsets = Vec::with_capacity(n_metrics);
    let mut centers = Vec::with_capacity(n_metrics);
    for _ in 0..n_metrics {
        amplitudes.push(rng_model.gen_range(0.5..1.5));
        offsets.push(rng_model.gen_range(1.0..2.0));
        centers.push((0..n_params).map(|_| rng_model.gen_range(-0.5..0.5)).collect());
    }

    let mut rng_witness = ChaCha8Rng::seed_from_u64(derive_seed(seed, "synthetic-witness"));
    let raw: Vec<f64> = (0..n_params).map(|_| rng_witness.gen_range(-0.6..0.6)).collect();
    let witness = space.denormalize(&raw)?;

    let mut rng_corners = ChaCha8Rng::seed_from_u64(derive_seed(seed, "synthetic-corners"));
    let corners = build_corner_set(corner_spec, &mut rng_corners)?;

    let model = SyntheticModel {
        seed,
        difficulty,
        amplitudes,
        offsets,
        centers,
        witness: witness.clone(),
    };

    // Bounds from the witness with 5% slack, alternating directions:
    // even metrics are capped above their worst corner, odd metrics must
    // stay above their best corner's value less slack.
    let mut constraints = Vec::with_capacity(n_metrics);
    for j in 0..n_metrics {
        let mut worst = f64::NEG_INFINITY;
        let mut best = f64::INFINITY;
        for corner in &corners {
            let v = evaluate_synthetic(&witness, corner, &model, &space)?
                .get(&format!("m{j}"))
                .unwrap();
            worst = worst.max(v);
            best = best.min(v);
        }
        let (direction, bound) = if j % 2 == 0 {
            (Direction::AtMost, worst * 1.05)
        } else {
            (Direction::AtLeast, best * 0.95)
        };
        constraints.push(Constraint {
            metric: format!("m{j}"),
            direction,
            bound,
            unit: String::new(),
        });
    }

    let (vr, tr) = corner_spec.value_ranges();

    Benchmark::assemble(
        "synthetic",
        space,
        constraints,
        corners,
        vr,
        tr,
        Surrogate::Synthetic(model),
    )
}

/// Default corner ranges used by the synthetic family (mirrors the OTA2
/// operating envelope).
pub fn synthetic_default_ranges() -> ((f64, f64), (f64, f64)) {
    ((1.0, 1.2), (0.0, 100.0))
}
