//! Library half of the command-line front end, split out so integration
//! tests can drive ingestion, reporting, and the experiment registry
//! directly.

pub mod commands;
pub mod experiments;
pub mod ingest;
pub mod report;
pub mod streams;
