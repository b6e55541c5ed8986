//! Batch driver: model checks, tables, verification suites and oracle dumps.

pub mod cache;
pub mod commands;
pub mod config;
pub mod suites;
pub mod table;
