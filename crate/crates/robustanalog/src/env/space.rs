//! Design spaces: bounded, gridded parameter vectors and the mapping from
//! raw agent actions onto the grid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One sizing parameter: physical bounds plus the resolution the fabricated
/// value snaps to.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub precision: f64,
    pub unit: String,
}

/// A point in a design space, in physical units, always on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizingVector(pub Vec<f64>);

impl SizingVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Ordered parameter list. The span of every parameter must be an integer
/// multiple of its precision (relative tolerance 1e-9), so the grid's top
/// step lands exactly on the upper bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignSpace {
    params: Vec<ParamSpec>,
}

impl DesignSpace {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::config("design space has no parameters"));
        }
        for p in &params {
            if p.name.is_empty() {
                return Err(Error::config("design space parameter with empty name"));
            }
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
                return Err(Error::config(format!(
                    "parameter '{}': bounds [{}, {}] must be finite with lower < upper",
                    p.name, p.lower, p.upper
                )));
            }
            if !(p.precision.is_finite() && p.precision > 0.0) {
                return Err(Error::config(format!(
                    "parameter '{}': precision {} must be positive",
                    p.name, p.precision
                )));
            }
            let steps = (p.upper - p.lower) / p.precision;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return Err(Error::config(format!(
                    "parameter '{}': span {} is not a multiple of precision {}",
                    p.name,
                    p.upper - p.lower,
                    p.precision
                )));
            }
        }
        let mut names: Vec<&str> = params.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != params.len() {
            return Err(Error::config("design space has duplicate parameter names"));
        }
        Ok(DesignSpace { params })
    }

    pub fn dimension(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    fn grid_steps(&self, i: usize) -> f64 {
        let p = &self.params[i];
        ((p.upper - p.lower) / p.precision).round()
    }

    /// Map a raw action in [-1, 1]^n onto the grid. Out-of-range components
    /// are clipped first; rounding is half-away-from-zero on the step index.
    pub fn denormalize(&self, raw: &[f64]) -> Result<SizingVector> {
        if raw.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                context: "raw action",
                expected: self.params.len(),
                got: raw.len(),
            });
        }
        let mut values = Vec::with_capacity(raw.len());
        for (i, p) in self.params.iter().enumerate() {
            if raw[i].is_nan() {
                return Err(Error::non_finite(format!("raw action component '{}'", p.name)));
            }
            let r = raw[i].clamp(-1.0, 1.0);
            let span = p.upper - p.lower;
            let step = ((r + 1.0) / 2.0 * span / p.precision).round();
            let step = step.clamp(0.0, self.grid_steps(i));
            values.push(p.lower + step * p.precision);
        }
        Ok(SizingVector(values))
    }

    /// Min-max map a sizing onto [-1, 1]^n (inverse of the affine part of
    /// `denormalize`).
    pub fn normalized_position(&self, sizing: &SizingVector) -> Result<Vec<f64>> {
        self.validate(sizing)?;
        Ok(self
            .params
            .iter()
            .zip(sizing.0.iter())
            .map(|(p, &v)| 2.0 * (v - p.lower) / (p.upper - p.lower) - 1.0)
            .collect())
    }

    /// Check length, bounds, and grid membership (1e-9 relative tolerance).
    pub fn validate(&self, sizing: &SizingVector) -> Result<()> {
        if sizing.0.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                context: "sizing vector",
                expected: self.params.len(),
                got: sizing.0.len(),
            });
        }
        for (p, &v) in self.params.iter().zip(sizing.0.iter()) {
            let tol = 1e-9 * p.upper.abs().max(1.0);
            if !(v >= p.lower - tol && v <= p.upper + tol) {
                return Err(Error::OutOfRange {
                    context: format!("parameter '{}' value {v} outside [{}, {}]", p.name, p.lower, p.upper),
                });
            }
            let steps = (v - p.lower) / p.precision;
            if (steps - steps.round()).abs() > 1e-9 * steps.abs().max(1.0) {
                return Err(Error::OutOfRange {
                    context: format!(
                        "parameter '{}' value {v} is off the {}-step grid",
                        p.name, p.precision
                    ),
                });
            }
        }
        Ok(())
    }

    /// Uniform random grid point (used by coarse searches and warm starts).
    pub fn random_sizing(&self, rng: &mut impl Rng) -> SizingVector {
        let raw: Vec<f64> = (0..self.params.len())
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect();
        self.denormalize(&raw).expect("raw vector has the right arity")
    }
}
