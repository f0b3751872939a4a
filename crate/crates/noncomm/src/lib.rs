//! File formats, reports, the verification pipeline and the command-line
//! front end on top of `noncomm-core`.

pub mod cli;
pub mod clock;
pub mod formats;
pub mod parallel;
pub mod pipeline;
pub mod report;
