//! File formats, deterministic property suites, acceptance criteria and the command-line
//! front end over `qg-core`.

pub mod acceptance;
pub mod config;
pub mod io;
pub mod report;
pub mod suites;
