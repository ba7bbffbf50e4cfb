//! Dataset ingestion and output formatting for the `qmse` command.

pub mod ingest;
pub mod output;

pub use ingest::{ingest, Format, IngestError, Loaded, Need, Record, RowError};
