//! Configuration-driven driver for building, analysing and exporting
//! semi-discrete surfaces.

pub mod config;
pub mod error;
pub mod job;
pub mod mesh;
pub mod projection;
pub mod report;
pub mod seeds;
pub mod selftest;

pub use config::{validate, JobConfig};
pub use error::JobError;
pub use job::{run_job, JobOutcome, Verb};
pub use projection::{project_ambient, ProjectionError};
