//! Gradient surgery for conflicting per-task gradients.
//!
//! For each task gradient g_i, every other task j is visited in a freshly
//! shuffled order; whenever the running gradient conflicts with g_j
//! (negative dot product) its component along g_j is removed:
//!
//!   g_i <- g_i - (g_i . g_j) / ||g_j||^2 * g_j
//!
//! Projections always use the original g_j, not a surgered copy, so after
//! the pass every projected gradient satisfies <proj_i, g_j> >= 0 for all j.
//! The combined update is the plain sum of the projected gradients.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::nn::FlatGradient;
use crate::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Project each task gradient against all others. With a single task this
/// is the identity and consumes no randomness, so K=1 degenerates to plain
/// DDPG bit for bit.
pub fn pcgrad_project(grads: &[FlatGradient], rng: &mut impl Rng) -> Result<Vec<FlatGradient>> {
    if grads.is_empty() {
        return Err(Error::config("gradient surgery on an empty task set"));
    }
    let len = grads[0].values.len();
    for g in grads {
        if g.values.len() != len {
            return Err(Error::DimensionMismatch {
                context: "gradient surgery",
                expected: len,
                got: g.values.len(),
            });
        }
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::non_finite(format!("gradient '{}'", g.tag)));
        }
    }
    if grads.len() == 1 {
        return Ok(vec![grads[0].clone()]);
    }

    let norms_sq: Vec<f64> = grads.iter().map(|g| dot(&g.values, &g.values)).collect();
    let mut order: Vec<usize> = (0..grads.len()).collect();
    let mut projected = Vec::with_capacity(grads.len());
    for (i, g) in grads.iter().enumerate() {
        let mut out = g.clone();
        order.shuffle(rng);
        for &j in &order {
            if j == i || norms_sq[j] == 0.0 {
                continue;
            }
            let d = dot(&out.values, &grads[j].values);
            if d < 0.0 {
                let scale = d / norms_sq[j];
                for (o, gj) in out.values.iter_mut().zip(&grads[j].values) {
                    *o -= scale * gj;
                }
            }
        }
        projected.push(out);
    }
    Ok(projected)
}

/// Full surgery step: project every gradient, then sum.
pub fn pcgrad_combine(grads: &[FlatGradient], rng: &mut impl Rng) -> Result<FlatGradient> {
    let projected = pcgrad_project(grads, rng)?;
    let mut combined = FlatGradient {
        values: vec![0.0; projected[0].values.len()],
        tag: "pcgrad sum".to_string(),
    };
    for g in &projected {
        for (c, v) in combined.values.iter_mut().zip(&g.values) {
            *c += v;
        }
    }
    Ok(combined)
}
