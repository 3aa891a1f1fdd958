use std::fmt;
use std::path::Path;

use omsig::DecodeError;

/// Exit code classes: 1 rejection, 2 usage or I/O, 3 decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitClass {
    Reject = 1,
    Usage = 2,
    Decode = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub class: ExitClass,
    pub tag: &'static str,
    pub message: String,
}

impl CliError {
    pub fn reject(tag: &'static str, message: impl Into<String>) -> Self {
        CliError {
            class: ExitClass::Reject,
            tag,
            message: message.into(),
        }
    }

    pub fn usage(tag: &'static str, message: impl Into<String>) -> Self {
        CliError {
            class: ExitClass::Usage,
            tag,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::usage("io", format!("{}: {e}", path.display()))
    }

    pub fn decode(what: impl fmt::Display, e: DecodeError) -> Self {
        let tag = match e {
            DecodeError::OffCurve => "off-curve",
            DecodeError::WrongSubgroup => "wrong-subgroup",
            DecodeError::BadLength => "bad-length",
            DecodeError::BadHeader => "bad-header",
            DecodeError::NonCanonical => "non-canonical",
            DecodeError::UnknownCurve => "unknown-curve",
            DecodeError::Inconsistent => "inconsistent",
        };
        CliError {
            class: ExitClass::Decode,
            tag,
            message: format!("{what}: {e}"),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.class as u8
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.tag, self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
