//! Experiment driver library behind the rp-bench binary: configuration,
//! CSV schema, CIFAR-10 ingestion and the experiment implementations.

pub mod cifar;
pub mod config;
pub mod experiments;
pub mod records;
