//! Errors that carry a process exit code.

use std::fmt;

pub const CONFIG: i32 = 2;
pub const DEGENERATE: i32 = 3;
pub const VERIFICATION: i32 = 4;

#[derive(Debug)]
pub struct Coded {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Coded {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    Coded { code: CONFIG, message: msg.into() }.into()
}

pub fn degenerate(msg: impl Into<String>) -> anyhow::Error {
    Coded { code: DEGENERATE, message: msg.into() }.into()
}

pub fn verification_failed(msg: impl Into<String>) -> anyhow::Error {
    Coded { code: VERIFICATION, message: msg.into() }.into()
}

/// Exit code of an error chain; uncoded errors (I/O and the like) exit with 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    err.chain().find_map(|e| e.downcast_ref::<Coded>()).map_or(1, |c| c.code)
}
