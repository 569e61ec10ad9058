//! Sizing environments: corners, design spaces, constraint rewards, and the
//! closed-form surrogate benchmarks.

pub mod benchmark;
pub mod corner;
pub mod ota2;
pub mod reward;
pub mod space;
pub mod synthetic;

pub use benchmark::{Benchmark, Simulator, Surrogate, BENCHMARK_FILE_SCHEMA};
pub use corner::{build_corner_set, encode_state, CornerSpec, Process, PvtCorner, STATE_DIM};
pub use ota2::{
    evaluate_ota2, ota2_benchmark, ota2_benchmark_with, ota2_constraints, ota2_design_space,
    Ota2Constants,
};
pub use reward::{
    compute_reward, Constraint, Direction, MetricVector, RewardBreakdown, PASS_BAND, PASS_REWARD,
};
pub use space::{DesignSpace, ParamSpec, SizingVector};
pub use synthetic::{
    evaluate_synthetic, generate_synthetic_benchmark, synthetic_default_ranges, SyntheticModel,
};
