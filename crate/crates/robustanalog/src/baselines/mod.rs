//! Reference methods the multi-task loop is measured against.

pub mod es;
pub mod single_task;

pub use es::{run_es, EsConfig};
pub use single_task::run_single_task_ddpg;
