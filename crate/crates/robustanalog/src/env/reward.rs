//! Constraint deficits and the banded pass reward.
//!
//! Each constraint contributes a relative deficit
//! `d = (m - m*)/(m + m*)` (for `at_least`; negated numerator for
//! `at_most`), zero when satisfied. The raw reward is the sum of violated
//! deficits, `r = Σ min(d_i, 0) ≤ 0`, and the shaped reward plateaus at
//! `R = 0.2` once `r ≥ -0.02`, which is the pass condition: near-misses
//! inside the band count as passing, and passing corners all look identical
//! to the learner so it stops optimizing them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shaped reward value assigned to any passing evaluation.
pub const PASS_REWARD: f64 = 0.2;
/// Raw rewards at or above this band count as passing.
pub const PASS_BAND: f64 = -0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Metric must reach the bound: `m >= bound`.
    AtLeast,
    /// Metric must stay under the bound: `m <= bound`.
    AtMost,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AtLeast => "at_least",
            Direction::AtMost => "at_most",
        }
    }

    pub fn parse(s: &str) -> Result<Direction> {
        match s {
            "at_least" => Ok(Direction::AtLeast),
            "at_most" => Ok(Direction::AtMost),
            _ => Err(Error::config(format!(
                "unknown constraint direction '{s}' (expected at_least or at_most)"
            ))),
        }
    }
}

/// One performance requirement. Bounds are positive physical quantities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constraint {
    pub metric: String,
    pub direction: Direction,
    pub bound: f64,
    pub unit: String,
}

impl Constraint {
    pub fn validate(&self) -> Result<()> {
        if self.metric.is_empty() {
            return Err(Error::config("constraint with empty metric name"));
        }
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(Error::config(format!(
                "constraint '{}': bound {} must be positive and finite",
                self.metric, self.bound
            )));
        }
        Ok(())
    }
}

/// Named measurement results from one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricVector(Vec<(String, f64)>);

impl MetricVector {
    pub fn new(pairs: Vec<(String, f64)>) -> Self {
        MetricVector(pairs)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0
            .iter()
            .find_map(|(n, v)| (n == name).then_some(*v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|(_, v)| v.is_finite())
    }
}

/// Reward of one (sizing, corner) evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RewardBreakdown {
    /// Per-constraint contribution, aligned with the constraint list; zero
    /// when satisfied, otherwise in [-1, 0).
    pub deficits: Vec<f64>,
    /// Sum of violated deficits (`r`), always <= 0.
    pub raw: f64,
    /// Banded reward (`R`): `PASS_REWARD` when `raw >= PASS_BAND`, else `raw`.
    pub shaped: f64,
    pub passed: bool,
}

/// Relative deficit of one constraint. Satisfied -> 0. Violated -> negative,
/// clamped to [-1, 0): the formula already lives there for positive metric
/// values, and the clamp extends it monotonically to metrics at or below
/// `-bound` (only reachable far outside any feasible region).
fn deficit(value: f64, direction: Direction, bound: f64) -> f64 {
    match direction {
        Direction::AtLeast => {
            if value >= bound {
                0.0
            } else if value + bound <= 0.0 {
                -1.0
            } else {
                ((value - bound) / (value + bound)).max(-1.0)
            }
        }
        Direction::AtMost => {
            if value <= bound {
                0.0
            } else {
                // value > bound > 0, so the denominator is positive.
                ((bound - value) / (value + bound)).max(-1.0)
            }
        }
    }
}

/// Score a metric vector against a constraint list. Every constraint's
/// metric must be present; gaps are reported by name.
pub fn compute_reward(metrics: &MetricVector, constraints: &[Constraint]) -> Result<RewardBreakdown> {
    let mut deficits = Vec::with_capacity(constraints.len());
    let mut raw = 0.0;
    for c in constraints {
        let value = metrics.get(&c.metric).ok_or_else(|| Error::MissingMetric {
            metric: c.metric.clone(),
        })?;
        if !value.is_finite() {
            return Err(Error::non_finite(format!("metric '{}'", c.metric)));
        }
        let d = deficit(value, c.direction, c.bound);
        deficits.push(d);
        raw += d;
    }
    let passed = raw >= PASS_BAND;
    Ok(RewardBreakdown {
        deficits,
        raw,
        shaped: if passed { PASS_REWARD } else { raw },
        passed,
    })
}
