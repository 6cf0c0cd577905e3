//! The `codecarta` command line: mine a workspace, lay it out, and bundle
//! the interactive diagram.

pub mod app;
pub mod bundle;
pub mod config;
pub mod error;
pub mod synth;

pub use app::run;
