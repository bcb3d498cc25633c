//! Pipeline driver: configuration, artifacts and the subcommands of
//! `ncs-sched`.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod generate;
pub mod svg;
