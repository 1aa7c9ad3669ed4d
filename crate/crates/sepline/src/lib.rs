//! File formats, the parallel experiment driver and the `sep` command line
//! for [`sepline_core`].

pub mod cli;
pub mod formats;
pub mod study;
