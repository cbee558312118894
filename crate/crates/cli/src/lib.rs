//! Batch interface for `dg-operad`: workspace files, built-in examples and
//! the `dgop` command verbs.

pub mod commands;
pub mod examples;
pub mod workspace;

pub use commands::{run, CheckKind, Failure, Outcome, Request, Show, Source, Verb};
pub use workspace::{parse_workspace, Object, ParseError, Workspace};
