//! Command-line front end: expression language, JSON element schema and the
//! `ugl` subcommands.

pub mod commands;
pub mod expr;
pub mod json;
