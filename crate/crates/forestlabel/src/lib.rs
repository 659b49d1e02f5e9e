//! File formats, reports and the command line around `forestlabel-core`.

pub mod cli;
pub mod format;
pub mod report;
pub mod verify;
