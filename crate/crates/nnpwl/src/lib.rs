//! File formats, experiment reports and the command-line front end for
//! [`nnpwl_core`].

pub mod cli;
pub mod format;
pub mod report;
