use std::process::ExitCode;

use tauberlab_core::Error;

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const CHECK_FAILED: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const RESOURCE: u8 = 3;

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: Self::INPUT, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EnumerationCap { .. } | Error::HorizonOverflow { .. } => Self::RESOURCE,
            _ => Self::INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

/// Outcome of a completed run: did every check hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    CheckFailed,
}

impl Status {
    pub fn and(self, ok: bool) -> Self {
        if ok {
            self
        } else {
            Status::CheckFailed
        }
    }
}
