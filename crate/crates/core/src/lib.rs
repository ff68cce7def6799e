pub mod baseline;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod generate;
pub mod graph;
pub mod numeric;
pub mod probe;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, IngestStats, NodeId, ValidationReport};
pub use probe::{derive_probe, ProbeFamily, ProbeKey};
