//! Library side of the `nhom-lab` CLI: the theorem-verification harness,
//! the map analyzer, and the fixture generators. The binary in `main.rs`
//! is a thin argument-parsing shell over these.

pub mod analyze;
pub mod generate_cmd;
pub mod harness;

pub use analyze::{analyze_file, analyze_map, Analysis};
pub use harness::{run_verify, HarnessConfig, TheoremId, TheoremReport};
