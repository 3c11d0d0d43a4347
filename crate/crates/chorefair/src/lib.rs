//! File formats, instance generators, parallel enumeration and benchmarking on top of
//! [`chorefair_core`].

pub mod bench;
pub mod error;
pub mod generate;
pub mod io;
pub mod parallel;

pub use chorefair_core as core;
pub use error::{Error, Result};
