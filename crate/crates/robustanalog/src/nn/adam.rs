use serde::{Deserialize, Serialize};

use super::FlatGradient;
use crate::{Error, Result};

/// Adam hyperparameters. Defaults follow the usual (0.9, 0.999, 1e-8).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamParams {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamParams {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Per-parameter first/second moment estimates plus the step counter.
/// Bias correction uses `t >= 1` after the first step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdamState {
    params: AdamParams,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(param_count: usize, params: AdamParams) -> Self {
        AdamState {
            params,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One Adam update, in place. A non-finite gradient refuses the update
    /// and leaves parameters, moments, and the step counter untouched.
    pub fn step(&mut self, params: &mut [f64], grad: &FlatGradient) -> Result<()> {
        if params.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                context: "adam parameters",
                expected: self.m.len(),
                got: params.len(),
            });
        }
        if grad.values.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                context: "adam gradient",
                expected: self.m.len(),
                got: grad.values.len(),
            });
        }
        if grad.values.iter().any(|g| !g.is_finite()) {
            return Err(Error::non_finite(format!(
                "gradient for '{}' passed to adam",
                grad.tag
            )));
        }
        self.t += 1;
        let AdamParams {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.params;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grad.values[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}
