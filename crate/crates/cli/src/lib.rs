//! Command line front end for `orthotract` and its acceptance suite.

pub mod acceptance;
pub mod commands;
