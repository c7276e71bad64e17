//! Seeded experiment runner over `otoc-core`: named experiments write a CSV
//! of rows and a JSON sidecar, and `verify` re-checks a stored pair.

pub mod checks;
pub mod config;
pub mod error;
pub mod experiments;
pub mod record;
pub mod studies;
pub mod table;

pub use config::{Config, ExperimentKind};
pub use error::{LabError, LabResult};
pub use record::{run, verify, RunOutput};
