//! PVT corners, corner-set construction, and the agent-facing state encoding.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Process models: typical/slow/fast NMOS–PMOS speed combinations.
/// The declaration order fixes the one-hot layout in [`encode_state`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Process {
    TT,
    SS,
    FF,
    FS,
    SF,
}

impl Process {
    pub const ALL: [Process; 5] = [Process::TT, Process::SS, Process::FF, Process::FS, Process::SF];

    pub fn index(self) -> usize {
        Process::ALL.iter().position(|&p| p == self).unwrap()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Process::TT => "TT",
            Process::SS => "SS",
            Process::FF => "FF",
            Process::FS => "FS",
            Process::SF => "SF",
        }
    }

    pub fn parse(s: &str) -> Result<Process> {
        Process::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown process model '{s}'")))
    }
}

/// One operating condition. Exactly one corner in any corner set carries
/// `is_nominal = true`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PvtCorner {
    pub process: Process,
    pub vdd: f64,
    pub temp_c: f64,
    pub is_nominal: bool,
}

impl PvtCorner {
    pub fn new(process: Process, vdd: f64, temp_c: f64) -> Self {
        PvtCorner {
            process,
            vdd,
            temp_c,
            is_nominal: false,
        }
    }

    /// Identity ignores the nominal flag: two corners are the same operating
    /// condition if process, supply, and temperature match bit-for-bit.
    pub fn same_condition(&self, other: &PvtCorner) -> bool {
        self.process == other.process
            && self.vdd.to_bits() == other.vdd.to_bits()
            && self.temp_c.to_bits() == other.temp_c.to_bits()
    }
}

/// How to build a corner set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum CornerSpec {
    /// Full Cartesian product in declaration order (process, voltage,
    /// temperature, outer to inner). The member closest to (TT, mid-voltage,
    /// mid-temperature) is flagged nominal.
    Factorial {
        processes: Vec<Process>,
        voltages: Vec<f64>,
        temperatures: Vec<f64>,
    },
    /// `count` seeded uniform draws (process, then voltage, then
    /// temperature per corner); the nominal corner (TT, mid-voltage,
    /// mid-temperature) is appended if absent. Different counts with the same
    /// RNG share their draw prefix, so a set of 20 is a subset of a set of 40.
    MonteCarlo {
        count: usize,
        voltage_range: (f64, f64),
        temperature_range: (f64, f64),
    },
}

impl CornerSpec {
    /// The (min, max) voltage and temperature values a spec can produce;
    /// benchmarks use these as the state-encoding ranges.
    pub fn value_ranges(&self) -> ((f64, f64), (f64, f64)) {
        fn span(values: &[f64]) -> (f64, f64) {
            (
                values.iter().cloned().fold(f64::INFINITY, f64::min),
                values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            )
        }
        match self {
            CornerSpec::Factorial {
                voltages,
                temperatures,
                ..
            } => (span(voltages), span(temperatures)),
            CornerSpec::MonteCarlo {
                voltage_range,
                temperature_range,
                ..
            } => (*voltage_range, *temperature_range),
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::config(format!(
            "invalid {name} range [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Build the corner list for a spec. Monte Carlo sampling consumes `rng`;
/// factorial construction does not touch it.
pub fn build_corner_set(spec: &CornerSpec, rng: &mut impl Rng) -> Result<Vec<PvtCorner>> {
    match spec {
        CornerSpec::Factorial {
            processes,
            voltages,
            temperatures,
        } => {
            if processes.is_empty() {
                return Err(Error::config("factorial corner spec: empty process axis"));
            }
            if voltages.is_empty() {
                return Err(Error::config("factorial corner spec: empty voltage axis"));
            }
            if temperatures.is_empty() {
                return Err(Error::config(
                    "factorial corner spec: empty temperature axis",
                ));
            }
            let mut corners = Vec::with_capacity(processes.len() * voltages.len() * temperatures.len());
            for &p in processes {
                for &v in voltages {
                    for &t in temperatures {
                        corners.push(PvtCorner::new(p, v, t));
                    }
                }
            }
            let v_mid = mid(voltages);
            let t_mid = mid(temperatures);
            // Nominal: prefer TT, then closest-to-mid voltage, then
            // closest-to-mid temperature; ties break toward the lower value.
            let mut best = 0usize;
            for i in 1..corners.len() {
                let key = |c: &PvtCorner| {
                    (
                        if c.process == Process::TT { 0u8 } else { 1u8 },
                        (c.vdd - v_mid).abs(),
                        c.vdd,
                        (c.temp_c - t_mid).abs(),
                        c.temp_c,
                    )
                };
                if key(&corners[i]) < key(&corners[best]) {
                    best = i;
                }
            }
            corners[best].is_nominal = true;
            Ok(corners)
        }
        CornerSpec::MonteCarlo {
            count,
            voltage_range,
            temperature_range,
        } => {
            check_range("voltage", *voltage_range)?;
            check_range("temperature", *temperature_range)?;
            let draw = |rng: &mut dyn rand::RngCore, (lo, hi): (f64, f64)| {
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo..hi)
                }
            };
            let mut corners = Vec::with_capacity(count + 1);
            for _ in 0..*count {
                let p = Process::ALL[rng.gen_range(0..Process::ALL.len())];
                let v = draw(rng, *voltage_range);
                let t = draw(rng, *temperature_range);
                corners.push(PvtCorner::new(p, v, t));
            }
            let nominal = PvtCorner::new(
                Process::TT,
                (voltage_range.0 + voltage_range.1) / 2.0,
                (temperature_range.0 + temperature_range.1) / 2.0,
            );
            match corners.iter().position(|c| c.same_condition(&nominal)) {
                Some(i) => corners[i].is_nominal = true,
                None => {
                    let mut n = nominal;
                    n.is_nominal = true;
                    corners.push(n);
                }
            }
            Ok(corners)
        }
    }
}

fn mid(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo + hi) / 2.0
}

/// Width of the encoded state: 5-way process one-hot plus normalized supply
/// and temperature.
pub const STATE_DIM: usize = 7;

/// Encode a corner for the agent. Voltage and temperature are min-max mapped
/// onto [-1, 1] over the benchmark's declared ranges; a degenerate range
/// (single value) maps to 0.
pub fn encode_state(
    corner: &PvtCorner,
    voltage_range: (f64, f64),
    temperature_range: (f64, f64),
) -> Result<Vec<f64>> {
    check_range("voltage", voltage_range)?;
    check_range("temperature", temperature_range)?;
    let norm = |value: f64, (lo, hi): (f64, f64), what: &str| -> Result<f64> {
        if value < lo || value > hi {
            return Err(Error::OutOfRange {
                context: format!("{what} {value} outside declared range [{lo}, {hi}]"),
            });
        }
        if lo == hi {
            return Ok(0.0);
        }
        Ok(2.0 * (value - lo) / (hi - lo) - 1.0)
    };
    let mut state = vec![0.0; STATE_DIM];
    state[corner.process.index()] = 1.0;
    state[5] = norm(corner.vdd, voltage_range, "supply voltage")?;
    state[6] = norm(corner.temp_c, temperature_range, "temperature")?;
    Ok(state)
}
