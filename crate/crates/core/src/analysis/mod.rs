//! Diagnostics that verify solution properties on numerical output:
//! entropy pairs and residuals, boundary-trace admissibility, windowed
//! Young-measure estimation, weak-star errors, and report assembly.

pub mod bln;
pub mod entropy;
pub mod report;
pub mod residual;
pub mod weakstar;
pub mod young;

pub use bln::{bln_check, bln_series, left_trace_variants, side_verdict, BlnVerdict, Side};
pub use entropy::EntropyPair;
pub use report::DiagnosticsReport;
pub use residual::{entropy_residual, entropy_residual_on_mesh, ResidualField};
pub use weakstar::{weak_star_error, TestDictionary, WeakStarError};
pub use young::{young_measure, WindowGeometry, YoungMeasureEstimate};
