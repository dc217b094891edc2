//! Library side of the `oraclebench` binary: file formats, the timing
//! harness, and the summary table. Kept as a library so the integration and
//! acceptance suites can drive the exact code the CLI runs.

pub mod bench;
pub mod io;
