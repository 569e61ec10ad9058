//! Benchmark assembly and the counting simulator.
//!
//! A [`Benchmark`] bundles everything that defines a sizing problem: the
//! design space, the constraint set, the corner set with its nominal member,
//! the value ranges used for state encoding, and the surrogate that stands in
//! for a circuit simulator. All optimizers evaluate designs through
//! [`Simulator::simulate`], the single choke point where simulations are
//! counted against the budget.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corner::{build_corner_set, encode_state, CornerSpec, Process, PvtCorner};
use super::ota2::{evaluate_ota2, Ota2Constants};
use super::reward::{compute_reward, Constraint, Direction, MetricVector, RewardBreakdown};
use super::space::{DesignSpace, ParamSpec, SizingVector};
use super::synthetic::{evaluate_synthetic, generate_synthetic_benchmark, SyntheticModel};
use crate::{kv, Error, Result};

pub const BENCHMARK_FILE_SCHEMA: u64 = 1;

/// Closed-form stand-ins for a circuit simulator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Surrogate {
    Ota2(Ota2Constants),
    Synthetic(SyntheticModel),
}

/// A complete sizing problem: find one in-space sizing whose reward passes
/// on every corner.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Benchmark {
    pub id: String,
    pub space: DesignSpace,
    pub constraints: Vec<Constraint>,
    pub corners: Vec<PvtCorner>,
    /// Index of the corner flagged nominal.
    pub nominal_index: usize,
    pub voltage_range: (f64, f64),
    pub temperature_range: (f64, f64),
    pub surrogate: Surrogate,
}

impl Benchmark {
    /// Bundle and validate the parts: non-empty constraint and corner lists,
    /// exactly one nominal corner, every corner encodable within the ranges.
    pub fn assemble(
        id: &str,
        space: DesignSpace,
        constraints: Vec<Constraint>,
        corners: Vec<PvtCorner>,
        voltage_range: (f64, f64),
        temperature_range: (f64, f64),
        surrogate: Surrogate,
    ) -> Result<Benchmark> {
        if constraints.is_empty() {
            return Err(Error::config("benchmark has no constraints"));
        }
        for c in &constraints {
            c.validate()?;
        }
        if corners.is_empty() {
            return Err(Error::config("benchmark has no corners"));
        }
        let nominal: Vec<usize> = corners
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.is_nominal.then_some(i))
            .collect();
        if nominal.len() != 1 {
            return Err(Error::config(format!(
                "benchmark needs exactly one nominal corner, found {}",
                nominal.len()
            )));
        }
        let b = Benchmark {
            id: id.to_string(),
            space,
            constraints,
            corners,
            nominal_index: nominal[0],
            voltage_range,
            temperature_range,
            surrogate,
        };
        for i in 0..b.corners.len() {
            b.encode_corner_state(i)?;
        }
        Ok(b)
    }

    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn nominal_corner(&self) -> &PvtCorner {
        &self.corners[self.nominal_index]
    }

    fn corner(&self, corner_index: usize) -> Result<&PvtCorner> {
        self.corners.get(corner_index).ok_or(Error::InvalidTaskId {
            task_id: corner_index,
            task_count: self.corners.len(),
        })
    }

    /// Raw surrogate evaluation. Does not count against any budget; budgeted
    /// callers go through [`Simulator::simulate`].
    pub fn evaluate(&self, sizing: &SizingVector, corner_index: usize) -> Result<MetricVector> {
        let corner = self.corner(corner_index)?;
        self.space.validate(sizing)?;
        match &self.surrogate {
            Surrogate::Ota2(c) => Ok(evaluate_ota2(sizing, corner, c)),
            Surrogate::Synthetic(m) => evaluate_synthetic(sizing, corner, m, &self.space),
        }
    }

    /// Agent-facing encoding of one corner.
    pub fn encode_corner_state(&self, corner_index: usize) -> Result<Vec<f64>> {
        encode_state(self.corner(corner_index)?, self.voltage_range, self.temperature_range)
    }

    /// Load a benchmark definition file. See `data/ota2.bench` for the
    /// format: a top-level `schema`, a `[benchmark]` section naming the
    /// surrogate, a `[corners]` spec, and (for the `ota2` surrogate) explicit
    /// `[space]` and `[constraints]` tables. A relative `constants_file`
    /// resolves against the definition file's directory.
    pub fn from_file(path: &Path) -> Result<Benchmark> {
        let doc = kv::parse_file(path)?;
        let top = doc.section("").expect("unnamed section always present");
        top.check_known_keys(&["schema"])?;
        if top.get("schema").is_none() {
            return Err(Error::config(format!(
                "{}: missing top-level 'schema' key",
                path.display()
            )));
        }
        let schema = top.u64("schema")?;
        if schema != BENCHMARK_FILE_SCHEMA {
            return Err(Error::config(format!(
                "{}: schema {schema} unsupported (expected {BENCHMARK_FILE_SCHEMA})",
                path.display()
            )));
        }

        let head = doc.require_section("benchmark")?;
        head.check_known_keys(&[
            "id",
            "surrogate",
            "constants_file",
            "seed",
            "params",
            "metrics",
            "difficulty",
        ])?;
        let id = head.require("id")?;
        let (spec, corner_seed) = parse_corner_spec(doc.require_section("corners")?)?;

        match head.require("surrogate")? {
            "ota2" => {
                let constants = match head.get("constants_file") {
                    Some(rel) => {
                        let base = path.parent().unwrap_or_else(|| Path::new("."));
                        Ota2Constants::load(&base.join(rel))?
                    }
                    None => Ota2Constants::builtin(),
                };
                let space = parse_space(doc.require_section("space")?)?;
                if space.dimension() != 7 {
                    return Err(Error::config(format!(
                        "ota2 surrogate needs the 7-parameter layout [w1..w6, cc], got {} parameters",
                        space.dimension()
                    )));
                }
                let constraints = parse_constraints(doc.require_section("constraints")?)?;
                let seed = match (&spec, corner_seed) {
                    (CornerSpec::Factorial { .. }, None) => 0,
                    (CornerSpec::Factorial { .. }, Some(_)) => {
                        return Err(Error::config(
                            "[corners]: 'seed' is only meaningful with mode = monte_carlo",
                        ));
                    }
                    (CornerSpec::MonteCarlo { .. }, Some(s)) => s,
                    (CornerSpec::MonteCarlo { .. }, None) => {
                        return Err(Error::config(
                            "[corners]: mode = monte_carlo needs a 'seed' key",
                        ));
                    }
                };
                let corners = build_corner_set(&spec, &mut ChaCha8Rng::seed_from_u64(seed))?;
                let (vr, tr) = spec.value_ranges();
                Benchmark::assemble(id, space, constraints, corners, vr, tr, Surrogate::Ota2(constants))
            }
            "synthetic" => {
                if doc.section("space").is_some() || doc.section("constraints").is_some() {
                    return Err(Error::config(
                        "synthetic benchmarks generate their space and constraints; remove [space]/[constraints]",
                    ));
                }
                if corner_seed.is_some() {
                    return Err(Error::config(
                        "[corners]: synthetic benchmarks draw corners from the model seed; remove 'seed'",
                    ));
                }
                let mut b = generate_synthetic_benchmark(
                    head.u64("seed")?,
                    head.usize("params")?,
                    head.usize("metrics")?,
                    &spec,
                    head.f64("difficulty")?,
                )?;
                b.id = id.to_string();
                Ok(b)
            }
            other => Err(Error::config(format!(
                "unknown surrogate '{other}' (expected ota2 or synthetic)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Definition-file parsing
// ---------------------------------------------------------------------------

fn row_f64(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::config(format!("line {line}: '{token}' is not a real number")))
}

fn parse_space(section: &kv::Section) -> Result<DesignSpace> {
    section.check_known_keys(&[])?;
    let mut params = Vec::new();
    for (line, row) in section.rows() {
        if row.len() != 5 {
            return Err(Error::config(format!(
                "line {line}: design space row needs 5 fields (name lower upper precision unit), got {}",
                row.len()
            )));
        }
        params.push(ParamSpec {
            name: row[0].clone(),
            lower: row_f64(&row[1], line)?,
            upper: row_f64(&row[2], line)?,
            precision: row_f64(&row[3], line)?,
            unit: row[4].clone(),
        });
    }
    DesignSpace::new(params)
}

fn parse_constraints(section: &kv::Section) -> Result<Vec<Constraint>> {
    section.check_known_keys(&[])?;
    let mut out = Vec::new();
    for (line, row) in section.rows() {
        if row.len() != 4 {
            return Err(Error::config(format!(
                "line {line}: constraint row needs 4 fields (metric direction bound unit), got {}",
                row.len()
            )));
        }
        out.push(Constraint {
            metric: row[0].clone(),
            direction: Direction::parse(&row[1])?,
            bound: row_f64(&row[2], line)?,
            unit: row[3].clone(),
        });
    }
    if out.is_empty() {
        return Err(Error::config("[constraints] section has no rows"));
    }
    Ok(out)
}

/// Returns the spec plus the optional Monte Carlo draw seed.
fn parse_corner_spec(section: &kv::Section) -> Result<(CornerSpec, Option<u64>)> {
    section.check_known_keys(&[
        "mode",
        "processes",
        "voltages",
        "temperatures",
        "count",
        "seed",
        "voltage_range",
        "temperature_range",
    ])?;
    let seed = if section.get("seed").is_some() {
        Some(section.u64("seed")?)
    } else {
        None
    };
    match section.require("mode")? {
        "factorial" => {
            let processes = section
                .list("processes")?
                .iter()
                .map(|s| Process::parse(s))
                .collect::<Result<Vec<_>>>()?;
            Ok((
                CornerSpec::Factorial {
                    processes,
                    voltages: section.f64_list("voltages")?,
                    temperatures: section.f64_list("temperatures")?,
                },
                seed,
            ))
        }
        "monte_carlo" => {
            let pair = |key: &str| -> Result<(f64, f64)> {
                let v = section.f64_list(key)?;
                if v.len() != 2 {
                    return Err(Error::config(format!(
                        "[corners]: '{key}' needs exactly two values (lo hi)"
                    )));
                }
                Ok((v[0], v[1]))
            };
            Ok((
                CornerSpec::MonteCarlo {
                    count: section.usize("count")?,
                    voltage_range: pair("voltage_range")?,
                    temperature_range: pair("temperature_range")?,
                },
                seed,
            ))
        }
        other => Err(Error::config(format!(
            "[corners]: unknown mode '{other}' (expected factorial or monte_carlo)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Counting simulator
// ---------------------------------------------------------------------------

/// The budget choke point. One `simulate` call is one counted simulation,
/// mirroring the cost model of a real SPICE run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Simulator {
    benchmark: Benchmark,
    simulations: u64,
}

impl Simulator {
    pub fn new(benchmark: Benchmark) -> Self {
        Simulator {
            benchmark,
            simulations: 0,
        }
    }

    pub fn benchmark(&self) -> &Benchmark {
        &self.benchmark
    }

    /// Simulations counted so far.
    pub fn simulations(&self) -> u64 {
        self.simulations
    }

    /// Reset the counter to a checkpointed value.
    pub fn restore_count(&mut self, simulations: u64) {
        self.simulations = simulations;
    }

    /// Evaluate and score one (sizing, corner) pair, counting it. Non-finite
    /// metrics abort with an error instead of reaching the optimizer.
    pub fn simulate(
        &mut self,
        sizing: &SizingVector,
        corner_index: usize,
    ) -> Result<(MetricVector, RewardBreakdown)> {
        let metrics = self.benchmark.evaluate(sizing, corner_index)?;
        self.simulations += 1;
        let reward = compute_reward(&metrics, &self.benchmark.constraints)?;
        Ok((metrics, reward))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ota2::ota2_benchmark;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn assemble_requires_exactly_one_nominal() {
        let b = ota2_benchmark().unwrap();
        let mut corners = b.corners.clone();
        corners[b.nominal_index].is_nominal = false;
        let none = Benchmark::assemble(
            "x",
            b.space.clone(),
            b.constraints.clone(),
            corners.clone(),
            b.voltage_range,
            b.temperature_range,
            b.surrogate.clone(),
        );
        assert!(none.is_err());
        corners[0].is_nominal = true;
        corners[1].is_nominal = true;
        let two = Benchmark::assemble(
            "x",
            b.space.clone(),
            b.constraints.clone(),
            corners,
            b.voltage_range,
            b.temperature_range,
            b.surrogate.clone(),
        );
        assert!(two.is_err());
    }

    #[test]
    fn simulator_counts_every_call() {
        let b = ota2_benchmark().unwrap();
        let mut sim = Simulator::new(b);
        let s = SizingVector(vec![10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 2.0]);
        for expect in 1..=5u64 {
            let (metrics, reward) = sim.simulate(&s, (expect as usize - 1) % 3).unwrap();
            assert_eq!(sim.simulations(), expect);
            assert_eq!(reward.deficits.len(), 3);
            assert!(metrics.all_finite());
        }
        sim.restore_count(42);
        assert_eq!(sim.simulations(), 42);
    }

    #[test]
    fn simulator_rejects_bad_corner_index() {
        let b = ota2_benchmark().unwrap();
        let n = b.corner_count();
        let mut sim = Simulator::new(b);
        let s = SizingVector(vec![10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 2.0]);
        assert!(matches!(
            sim.simulate(&s, n),
            Err(Error::InvalidTaskId { .. })
        ));
        assert_eq!(sim.simulations(), 0);
    }

    #[test]
    fn definition_file_reproduces_builtin_ota2() {
        let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/ota2.bench"));
        let file = Benchmark::from_file(path).unwrap();
        let builtin = ota2_benchmark().unwrap();
        assert_eq!(file.id, builtin.id);
        assert_eq!(file.corners.len(), builtin.corners.len());
        for (a, b) in file.corners.iter().zip(builtin.corners.iter()) {
            assert!(a.same_condition(b));
            assert_eq!(a.is_nominal, b.is_nominal);
        }
        assert_eq!(file.constraints.len(), builtin.constraints.len());
        for (a, b) in file.constraints.iter().zip(builtin.constraints.iter()) {
            assert_eq!(a.metric, b.metric);
            assert_eq!(a.direction, b.direction);
            assert_eq!(a.bound, b.bound);
        }
        assert_eq!(file.space.dimension(), builtin.space.dimension());
        let s = SizingVector(vec![5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 1.0]);
        let m_file = file.evaluate(&s, file.nominal_index).unwrap();
        let m_builtin = builtin.evaluate(&s, builtin.nominal_index).unwrap();
        assert_eq!(m_file, m_builtin);
    }

    #[test]
    fn definition_file_synthetic_generates_model() {
        let f = write_temp(
            "schema = 1\n\
             [benchmark]\n\
             id = toy\n\
             surrogate = synthetic\n\
             seed = 7\n\
             params = 3\n\
             metrics = 2\n\
             difficulty = 0.4\n\
             [corners]\n\
             mode = monte_carlo\n\
             count = 10\n\
             voltage_range = 1.0 1.2\n\
             temperature_range = 0 100\n",
        );
        let b = Benchmark::from_file(f.path()).unwrap();
        assert_eq!(b.id, "toy");
        assert_eq!(b.space.dimension(), 3);
        assert_eq!(b.constraints.len(), 2);
        assert!(b.corners.len() >= 10);
        assert!(matches!(b.surrogate, Surrogate::Synthetic(_)));
    }

    #[test]
    fn definition_file_rejects_bad_schema_and_surrogate() {
        let bad_schema = write_temp("schema = 9\n[benchmark]\nid = x\nsurrogate = ota2\n[corners]\nmode = factorial\nprocesses = TT\nvoltages = 1.0\ntemperatures = 0\n");
        assert!(Benchmark::from_file(bad_schema.path()).is_err());
        let bad_surrogate = write_temp("schema = 1\n[benchmark]\nid = x\nsurrogate = spice\n[corners]\nmode = factorial\nprocesses = TT\nvoltages = 1.0\ntemperatures = 0\n");
        assert!(Benchmark::from_file(bad_surrogate.path()).is_err());
    }

    #[test]
    fn monte_carlo_ota2_file_requires_seed() {
        let f = write_temp(
            "schema = 1\n\
             [benchmark]\n\
             id = x\n\
             surrogate = ota2\n\
             [space]\n\
             w1 0.5 50 0.5 um\n\
             w2 0.5 50 0.5 um\n\
             w3 0.5 50 0.5 um\n\
             w4 0.5 50 0.5 um\n\
             w5 0.5 50 0.5 um\n\
             w6 0.5 50 0.5 um\n\
             cc 0.1 10 0.1 pF\n\
             [constraints]\n\
             i at_most 5 mA\n\
             [corners]\n\
             mode = monte_carlo\n\
             count = 5\n\
             voltage_range = 1.0 1.2\n\
             temperature_range = 0 100\n",
        );
        let err = Benchmark::from_file(f.path()).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn encode_corner_state_matches_direct_encoding() {
        let b = ota2_benchmark().unwrap();
        let got = b.encode_corner_state(b.nominal_index).unwrap();
        let want = encode_state(b.nominal_corner(), b.voltage_range, b.temperature_range).unwrap();
        assert_eq!(got, want);
    }
}
