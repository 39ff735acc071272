//! Command-line front end for `hyphull-core`: configuration, CSV reports,
//! manifests and figures.

pub mod app;
pub mod args;
pub mod config;
pub mod error;
pub mod figure;
pub mod manifest;
pub mod report;
pub mod run;
pub mod selftest;
pub mod svg;
