//! File formats, MediaWiki ingestion and the `hoaxscope` command line on
//! top of [`hoaxscope_core`].

#![forbid(unsafe_code)]

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;

pub use error::{Error, Result};

/// Version stamped into every artifact this crate writes.
pub const FORMAT_VERSION: u32 = 1;
