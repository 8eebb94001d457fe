//! Scans over a whole dimension and the tables they produce.

pub mod scan;

pub use scan::{scan, ScanRow, ScanTable, CSV_COLUMNS, SCHEMA_VERSION};
