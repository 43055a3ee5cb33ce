//! Command-line orchestration: run configurations, presets and report bundles.

pub mod bundle;
pub mod config;
pub mod run;
