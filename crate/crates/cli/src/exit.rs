use std::fmt;

use rep2ldc::Error;

pub const OK: u8 = 0;
pub const PARSE: u8 = 1;
pub const CAP: u8 = 2;
pub const FAILED: u8 = 3;
pub const DEGENERATE: u8 = 4;
pub const SPANNING: u8 = 5;

/// An error on its way to becoming an exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: PARSE,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn code_for(e: &Error) -> u8 {
    match e {
        Error::CapExceeded(_) => CAP,
        Error::ZeroMatrix | Error::ZeroVector | Error::IdentityElement | Error::ScalarMultipleOfIdentity => DEGENERATE,
        Error::OrbitDoesNotSpan => SPANNING,
        Error::InternalInconsistency(_)
        | Error::BudgetExhausted(_)
        | Error::NotSpecialForm
        | Error::PairNotSeparated(..)
        | Error::MatchingCrossesPrefixClass { .. }
        | Error::NotADistribution(_) => FAILED,
        _ => PARSE,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: code_for(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::parse(e.to_string())
    }
}
