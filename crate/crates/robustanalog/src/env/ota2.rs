//! Closed-form surrogate of a two-stage Miller-compensated OTA.
//!
//! The surrogate keeps the physics that matter for sizing trade-offs and
//! nothing else: first-stage transconductance sets the unity-gain bandwidth,
//! the second stage sets the non-dominant pole, and bias current scales with
//! the wide devices. The right-half-plane zero is cancelled by the usual
//! nulling resistor sized against the output stage (Rz ≈ 1/gm6), so the
//! phase budget is set by the output pole alone. Only `w1`, `w5`, `w6`, and
//! `cc` enter the equations; the remaining widths are carried to preserve
//! the full seven-dimensional action space of the original circuit.
//!
//! Model, with `τ(T) = (T + 273.15)/300` and `v = vdd/1.1`:
//!
//! ```text
//! gm1 = g0·µn·τ^-1.5·sqrt(w1·w5)           [µS]   first-stage transconductance
//! gm6 = g0·µp·τ^-0.7·sqrt(w6·w5)           [µS]   second-stage transconductance
//! i   = i0·v·(1 + 0.2·(T-27)/100)·(w5 + k6·w6)   [mA]   supply current
//! ugb = gm1 / (2π·cc)                      [MHz]  unity-gain bandwidth
//! p2  = gm6 / (2π·(cl + cpar·w6))          [MHz]  output pole
//! phm = 90° - atan(ugb/p2)
//! ```
//!
//! The two stages carry different temperature exponents: the input pair is
//! mobility-dominated (τ^-1.5) while the wide output device sees partial
//! threshold compensation (τ^-0.7). Bias current rises with temperature.
//! The worst corners therefore split: bandwidth dies slow-hot, phase margin
//! dies fast-NMOS-cold, and current peaks at high supply and temperature.
//!
//! The five coefficients {g0, i0, k6, cl, cpar} are calibration outputs,
//! fixed in the versioned constants file shipped with the crate so every
//! test sees the same benchmark.

use std::path::Path;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::benchmark::{Benchmark, Surrogate};
use super::corner::{build_corner_set, CornerSpec, Process, PvtCorner};
use super::reward::{Constraint, Direction, MetricVector};
use super::space::{DesignSpace, ParamSpec, SizingVector};
use crate::{kv, Error, Result};

/// Versioned surrogate coefficients (see the module docs for units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ota2Constants {
    pub schema: u32,
    pub g0: f64,
    pub i0: f64,
    pub k6: f64,
    pub cl: f64,
    pub cpar: f64,
}

pub const OTA2_CONSTANTS_SCHEMA: u32 = 1;

/// The constants file shipped with the crate.
const BUILTIN_CONSTANTS: &str = include_str!("../../data/ota2_constants.txt");

impl Ota2Constants {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = kv::parse(text)?;
        let top = doc.require_section("")?;
        top.check_known_keys(&["schema", "g0", "i0", "k6", "cl", "cpar"])?;
        let schema = top.u64("schema")? as u32;
        if schema != OTA2_CONSTANTS_SCHEMA {
            return Err(Error::config(format!(
                "constants file schema {schema} unsupported (expected {OTA2_CONSTANTS_SCHEMA})"
            )));
        }
        let c = Ota2Constants {
            schema,
            g0: top.f64("g0")?,
            i0: top.f64("i0")?,
            k6: top.f64("k6")?,
            cl: top.f64("cl")?,
            cpar: top.f64("cpar")?,
        };
        for (name, v) in [("g0", c.g0), ("i0", c.i0), ("k6", c.k6), ("cl", c.cl), ("cpar", c.cpar)] {
            if v <= 0.0 {
                return Err(Error::config(format!("constant '{name}' must be positive, got {v}")));
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read constants file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_CONSTANTS).expect("shipped constants file is valid")
    }
}

/// (NMOS, PMOS) mobility multipliers per process model. First letter is the
/// NMOS speed, second the PMOS speed.
pub fn mobility_factors(process: Process) -> (f64, f64) {
    match process {
        Process::TT => (1.0, 1.0),
        Process::FF => (1.12, 1.12),
        Process::SS => (0.88, 0.88),
        Process::FS => (1.12, 0.88),
        Process::SF => (0.88, 1.12),
    }
}

/// Input-pair transconductance falls with absolute temperature as T^-1.5
/// (mobility-dominated), normalized near room temperature.
pub fn thermal_factor(temp_c: f64) -> f64 {
    ((temp_c + 273.15) / 300.0).powf(-1.5)
}

/// Output-stage transconductance tempco; threshold compensation flattens the
/// mobility roll-off to T^-0.7.
pub fn thermal_factor_output(temp_c: f64) -> f64 {
    ((temp_c + 273.15) / 300.0).powf(-0.7)
}

/// Bias current rises roughly linearly with temperature (+20% over 100 K).
pub fn current_thermal_factor(temp_c: f64) -> f64 {
    1.0 + 0.2 * (temp_c - 27.0) / 100.0
}

/// Evaluate the surrogate at one corner. Sizing layout is
/// `[w1..w6, cc]` (µm six times, then pF).
pub fn evaluate_ota2(sizing: &SizingVector, corner: &PvtCorner, c: &Ota2Constants) -> MetricVector {
    let v = sizing.values();
    let (w1, w5, w6, cc) = (v[0], v[4], v[5], v[6]);
    let (mu_n, mu_p) = mobility_factors(corner.process);
    let vr = corner.vdd / 1.1;

    let gm1 = c.g0 * mu_n * thermal_factor(corner.temp_c) * (w1 * w5).sqrt();
    let gm6 = c.g0 * mu_p * thermal_factor_output(corner.temp_c) * (w6 * w5).sqrt();
    let tau = std::f64::consts::TAU;
    let i = c.i0 * vr * current_thermal_factor(corner.temp_c) * (w5 + c.k6 * w6);
    let ugb = gm1 / (tau * cc);
    let p2 = gm6 / (tau * (c.cl + c.cpar * w6));
    let phm = 90.0 - (ugb / p2).atan().to_degrees();

    MetricVector::new(vec![("i".into(), i), ("ugb".into(), ugb), ("phm".into(), phm)])
}

pub fn ota2_design_space() -> DesignSpace {
    let mut params: Vec<ParamSpec> = (1..=6)
        .map(|k| ParamSpec {
            name: format!("w{k}"),
            lower: 0.5,
            upper: 50.0,
            precision: 0.5,
            unit: "um".into(),
        })
        .collect();
    params.push(ParamSpec {
        name: "cc".into(),
        lower: 0.1,
        upper: 10.0,
        precision: 0.1,
        unit: "pF".into(),
    });
    DesignSpace::new(params).expect("built-in space is valid")
}

pub fn ota2_constraints() -> Vec<Constraint> {
    vec![
        Constraint {
            metric: "i".into(),
            direction: Direction::AtMost,
            bound: 5.0,
            unit: "mA".into(),
        },
        Constraint {
            metric: "ugb".into(),
            direction: Direction::AtLeast,
            bound: 15.0,
            unit: "MHz".into(),
        },
        Constraint {
            metric: "phm".into(),
            direction: Direction::AtLeast,
            bound: 60.0,
            unit: "deg".into(),
        },
    ]
}

/// The built-in 30-corner benchmark: 5 processes × {1.0, 1.1, 1.2} V ×
/// {0, 100} °C with the shipped calibration constants.
pub fn ota2_benchmark() -> Result<Benchmark> {
    ota2_benchmark_with(Ota2Constants::builtin())
}

pub fn ota2_benchmark_with(constants: Ota2Constants) -> Result<Benchmark> {
    let spec = CornerSpec::Factorial {
        processes: Process::ALL.to_vec(),
        voltages: vec![1.0, 1.1, 1.2],
        temperatures: vec![0.0, 100.0],
    };
    // Factorial construction ignores the RNG.
    let corners = build_corner_set(&spec, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0))?;
    Benchmark::assemble(
        "ota2",
        ota2_design_space(),
        ota2_constraints(),
        corners,
        (1.0, 1.2),
        (0.0, 100.0),
        Surrogate::Ota2(constants),
    )
}
