//! Analysis kernels for Wikipedia hoax forensics.
//!
//! Everything in this crate is a pure function over in-memory data and only
//! needs an allocator: topic-matched negative sampling by cosine retrieval,
//! sentence/word/syllable stylometry, revision-timeline analysis (month
//! binning, online changepoint detection, kernel density dense regions,
//! quartile distribution), the month-token TF-IDF + linear SVM classifier,
//! and the shared classification metrics.
//!
//! File formats, networking and the command line live in the `hoaxscope`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod error;
pub mod eval;
pub mod negsample;
pub mod stylometry;
pub mod timeclf;
pub mod timeline;

pub use error::{Error, Result};
