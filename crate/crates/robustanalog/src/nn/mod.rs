//! Dense feedforward networks with manual backprop, flat parameter views,
//! and Adam. Everything is `f64`; all randomness comes from caller-supplied
//! RNGs, so identical seeds give bit-identical parameter trajectories.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod adam;
pub use adam::{AdamParams, AdamState};

/// Activation applied to the final layer. Hidden layers are always tanh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    /// Squashes into (-1, 1); used by policy networks emitting raw actions.
    Tanh,
    /// Unbounded; used by value networks emitting scalar predictions.
    Identity,
}

/// Gradient over a network's parameters, in flat (layer-major) order.
/// The tag names the network it was computed for; every consumer checks it
/// so an actor gradient can never be applied to a critic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatGradient {
    pub values: Vec<f64>,
    pub tag: String,
}

impl FlatGradient {
    pub fn zeros_like(net: &MlpNetwork) -> Self {
        FlatGradient {
            values: vec![0.0; net.param_count()],
            tag: net.tag().to_string(),
        }
    }
}

/// Multi-layer perceptron. `layer_sizes` includes input and output widths,
/// so a 4-layer network (two hidden) has `layer_sizes.len() == 4`.
/// Weight matrices are row-major `out × in`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MlpNetwork {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    output_activation: OutputActivation,
    tag: String,
}

impl MlpNetwork {
    /// Seeded initialization: weights and biases of each layer drawn
    /// uniformly from ±1/sqrt(fan_in), weights first (row-major), then
    /// biases. The draw order is part of the determinism contract.
    pub fn new(
        layer_sizes: &[usize],
        output_activation: OutputActivation,
        tag: &str,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::config(format!(
                "network '{tag}' needs at least input and output layers, got {} sizes",
                layer_sizes.len()
            )));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::config(format!(
                "network '{tag}' has a zero-width layer: {layer_sizes:?}"
            )));
        }
        let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
        let mut biases = Vec::with_capacity(layer_sizes.len() - 1);
        for l in 0..layer_sizes.len() - 1 {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = 1.0 / (fan_in as f64).sqrt();
            let mut w = Vec::with_capacity(fan_out * fan_in);
            for _ in 0..fan_out * fan_in {
                w.push(rng.gen_range(-limit..limit));
            }
            let mut b = Vec::with_capacity(fan_out);
            for _ in 0..fan_out {
                b.push(rng.gen_range(-limit..limit));
            }
            weights.push(w);
            biases.push(b);
        }
        Ok(MlpNetwork {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            output_activation,
            tag: tag.to_string(),
        })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn param_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[1] * w[0] + w[1])
            .sum()
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_size() {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_size(),
                got: input.len(),
            });
        }
        Ok(())
    }

    /// Forward pass returning post-activation values of every layer
    /// (index 0 is the input itself).
    fn forward_cached(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let n_layers = self.weights.len();
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        acts.push(input.to_vec());
        for l in 0..n_layers {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let prev = &acts[l];
            let w = &self.weights[l];
            let mut out = Vec::with_capacity(fan_out);
            for r in 0..fan_out {
                let row = &w[r * fan_in..(r + 1) * fan_in];
                let mut z = self.biases[l][r];
                for (wi, xi) in row.iter().zip(prev.iter()) {
                    z += wi * xi;
                }
                let last = l == n_layers - 1;
                out.push(if !last || self.output_activation == OutputActivation::Tanh {
                    z.tanh()
                } else {
                    z
                });
            }
            acts.push(out);
        }
        acts
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        Ok(self.forward_cached(input).pop().unwrap())
    }

    /// Gradient of `<output, cotangent>` with respect to all parameters
    /// (accumulated into `acc`, flat layout) and with respect to the input
    /// (returned). `acc` must already have `param_count()` entries.
    pub fn gradients_into(
        &self,
        input: &[f64],
        cotangent: &[f64],
        acc: &mut [f64],
    ) -> Result<Vec<f64>> {
        self.check_input(input)?;
        if cotangent.len() != self.output_size() {
            return Err(Error::DimensionMismatch {
                context: "gradient cotangent",
                expected: self.output_size(),
                got: cotangent.len(),
            });
        }
        if acc.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                context: "gradient accumulator",
                expected: self.param_count(),
                got: acc.len(),
            });
        }
        let acts = self.forward_cached(input);
        for (l, a) in acts.iter().enumerate().skip(1) {
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::non_finite(format!(
                    "network '{}' layer {l} activations",
                    self.tag
                )));
            }
        }

        let n_layers = self.weights.len();
        // Output delta: cotangent through the output activation.
        let mut delta: Vec<f64> = match self.output_activation {
            OutputActivation::Identity => cotangent.to_vec(),
            OutputActivation::Tanh => {
                let y = &acts[n_layers];
                cotangent
                    .iter()
                    .zip(y.iter())
                    .map(|(c, y)| c * (1.0 - y * y))
                    .collect()
            }
        };

        // Flat offsets of each layer's weight block.
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for l in 0..n_layers {
            offsets.push(off);
            off += self.layer_sizes[l + 1] * self.layer_sizes[l] + self.layer_sizes[l + 1];
        }

        let mut input_grad = vec![0.0; self.input_size()];
        for l in (0..n_layers).rev() {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let prev = &acts[l];
            let w_off = offsets[l];
            let b_off = w_off + fan_out * fan_in;
            for r in 0..fan_out {
                let d = delta[r];
                let row = &mut acc[w_off + r * fan_in..w_off + (r + 1) * fan_in];
                for (g, xi) in row.iter_mut().zip(prev.iter()) {
                    *g += d * xi;
                }
                acc[b_off + r] += d;
            }
            // Propagate to the previous layer (or into the input gradient).
            let w = &self.weights[l];
            let mut prev_delta = vec![0.0; fan_in];
            for r in 0..fan_out {
                let d = delta[r];
                let row = &w[r * fan_in..(r + 1) * fan_in];
                for (pd, wi) in prev_delta.iter_mut().zip(row.iter()) {
                    *pd += wi * d;
                }
            }
            if l == 0 {
                input_grad = prev_delta;
            } else {
                // Hidden layers are tanh; use post-activation values.
                for (pd, y) in prev_delta.iter_mut().zip(acts[l].iter()) {
                    *pd *= 1.0 - y * y;
                }
                delta = prev_delta;
            }
        }
        Ok(input_grad)
    }

    /// Convenience wrapper allocating a fresh gradient.
    pub fn gradients(&self, input: &[f64], cotangent: &[f64]) -> Result<(FlatGradient, Vec<f64>)> {
        let mut grad = FlatGradient::zeros_like(self);
        let input_grad = self.gradients_into(input, cotangent, &mut grad.values)?;
        Ok((grad, input_grad))
    }

    /// Parameters in flat layout: per layer, weights row-major then biases.
    /// `set_params_flat(params_flat())` round-trips bit-identically.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        for l in 0..self.weights.len() {
            flat.extend_from_slice(&self.weights[l]);
            flat.extend_from_slice(&self.biases[l]);
        }
        flat
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                context: "flat parameter vector",
                expected: self.param_count(),
                got: flat.len(),
            });
        }
        let mut off = 0;
        for l in 0..self.weights.len() {
            let wl = self.weights[l].len();
            self.weights[l].copy_from_slice(&flat[off..off + wl]);
            off += wl;
            let bl = self.biases[l].len();
            self.biases[l].copy_from_slice(&flat[off..off + bl]);
            off += bl;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn constant_net(sizes: &[usize], value: f64, out: OutputActivation) -> MlpNetwork {
        let mut net = MlpNetwork::new(sizes, out, "test", &mut rng(0)).unwrap();
        let flat: Vec<f64> = net
            .params_flat()
            .iter()
            .enumerate()
            .map(|(i, _)| {
                // Weights to `value`, biases to zero: bias entries come after
                // each layer's weight block.
                let mut off = 0;
                for w in net.layer_sizes().windows(2) {
                    let (wl, bl) = (w[1] * w[0], w[1]);
                    if i < off + wl {
                        return value;
                    }
                    if i < off + wl + bl {
                        return 0.0;
                    }
                    off += wl + bl;
                }
                unreachable!()
            })
            .collect();
        net.set_params_flat(&flat).unwrap();
        net
    }

    #[test]
    fn forward_matches_hand_computation() {
        // 2-2-1, weights 0.5, biases 0, input (1,1): output = tanh(1).
        let net = constant_net(&[2, 2, 1], 0.5, OutputActivation::Identity);
        let out = net.forward(&[1.0, 1.0]).unwrap();
        assert!((out[0] - 1.0f64.tanh()).abs() < 1e-12, "{}", out[0]);
    }

    #[test]
    fn tanh_output_stays_in_open_interval() {
        let net = MlpNetwork::new(&[3, 8, 8, 2], OutputActivation::Tanh, "actor", &mut rng(7))
            .unwrap();
        for s in 0..50 {
            let mut r = rng(s);
            let input: Vec<f64> = (0..3).map(|_| r.gen_range(-10.0..10.0)).collect();
            for v in net.forward(&input).unwrap() {
                assert!(v > -1.0 && v < 1.0);
            }
        }
    }

    #[test]
    fn seeded_init_is_reproducible() {
        let a = MlpNetwork::new(&[4, 8, 3], OutputActivation::Tanh, "actor", &mut rng(42)).unwrap();
        let b = MlpNetwork::new(&[4, 8, 3], OutputActivation::Tanh, "actor", &mut rng(42)).unwrap();
        assert_eq!(a.params_flat(), b.params_flat());
        let c = MlpNetwork::new(&[4, 8, 3], OutputActivation::Tanh, "actor", &mut rng(43)).unwrap();
        assert_ne!(a.params_flat(), c.params_flat());
    }

    #[test]
    fn flat_roundtrip_is_bit_identical() {
        let mut net =
            MlpNetwork::new(&[5, 16, 16, 4], OutputActivation::Identity, "critic", &mut rng(3))
                .unwrap();
        let flat = net.params_flat();
        assert_eq!(flat.len(), net.param_count());
        net.set_params_flat(&flat).unwrap();
        let back = net.params_flat();
        assert!(flat.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn gradients_match_finite_differences() {
        // Central differences with eps 1e-6 on small seeded nets; relative
        // error threshold mirrors the acceptance gate.
        for seed in 0..5 {
            let net = MlpNetwork::new(
                &[3, 6, 6, 2],
                if seed % 2 == 0 {
                    OutputActivation::Tanh
                } else {
                    OutputActivation::Identity
                },
                "fd",
                &mut rng(seed),
            )
            .unwrap();
            let mut r = rng(100 + seed);
            let input: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            let cot: Vec<f64> = (0..2).map(|_| r.gen_range(-1.0..1.0)).collect();
            let (grad, input_grad) = net.gradients(&input, &cot).unwrap();

            let scalar = |n: &MlpNetwork, x: &[f64]| -> f64 {
                n.forward(x)
                    .unwrap()
                    .iter()
                    .zip(cot.iter())
                    .map(|(o, c)| o * c)
                    .sum()
            };
            let eps = 1e-6;
            let flat = net.params_flat();
            for i in (0..flat.len()).step_by(7) {
                let mut plus = net.clone();
                let mut minus = net.clone();
                let mut fp = flat.clone();
                fp[i] += eps;
                plus.set_params_flat(&fp).unwrap();
                fp[i] -= 2.0 * eps;
                minus.set_params_flat(&fp).unwrap();
                let fd = (scalar(&plus, &input) - scalar(&minus, &input)) / (2.0 * eps);
                let denom = fd.abs().max(grad.values[i].abs()).max(1e-6);
                assert!(
                    (fd - grad.values[i]).abs() / denom < 1e-4,
                    "param {i}: fd {fd} vs analytic {}",
                    grad.values[i]
                );
            }
            for i in 0..input.len() {
                let mut xp = input.clone();
                let mut xm = input.clone();
                xp[i] += eps;
                xm[i] -= eps;
                let fd = (scalar(&net, &xp) - scalar(&net, &xm)) / (2.0 * eps);
                let denom = fd.abs().max(input_grad[i].abs()).max(1e-6);
                assert!((fd - input_grad[i]).abs() / denom < 1e-4);
            }
        }
    }

    #[test]
    fn dimension_mismatch_reports_sizes() {
        let net = MlpNetwork::new(&[3, 4, 2], OutputActivation::Tanh, "actor", &mut rng(0)).unwrap();
        let err = net.forward(&[1.0, 2.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('3') && msg.contains('2'), "{msg}");
        assert!(net.gradients(&[0.0; 3], &[0.0; 3]).is_err());
    }

    #[test]
    fn non_finite_activation_names_layer() {
        let mut net =
            MlpNetwork::new(&[2, 2, 1], OutputActivation::Identity, "critic", &mut rng(0)).unwrap();
        let mut flat = net.params_flat();
        flat[0] = f64::NAN;
        net.set_params_flat(&flat).unwrap();
        let err = net.gradients(&[1.0, 1.0], &[1.0]).unwrap_err();
        assert!(err.to_string().contains("layer 1"), "{err}");
    }
}
