use serde::Serialize;
use sha2::{Digest, Sha256};

use gradedlc::Error;

#[derive(Clone, Debug, Serialize)]
pub struct Warning {
    pub code: &'static str,
    pub message: String,
}

impl Warning {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Warning {
            code,
            message: message.into(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a crate::Cmd,
    input_hash: Option<&'a str>,
    results: &'a T,
    warnings: &'a [Warning],
    version: &'static str,
}

pub struct Output {
    pub text: String,
    pub json: String,
    pub warnings: Vec<Warning>,
    pub exit: u8,
}

pub fn output<T: Serialize>(
    cmd: &crate::Cmd,
    input_hash: Option<&str>,
    results: &T,
    text: String,
    warnings: Vec<Warning>,
    exit: u8,
) -> Output {
    let env = Envelope {
        command: cmd,
        input_hash,
        results,
        warnings: &warnings,
        version: concat!(env!("CARGO_PKG_VERSION"), "+schema.1"),
    };
    let json = serde_json::to_string_pretty(&env).expect("report serializes");
    Output {
        text,
        json,
        warnings,
        exit,
    }
}

/// SHA-256 of the canonical ideal encoding.
pub fn hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug)]
pub enum CliError {
    Io(String, std::io::Error),
    Input(String),
    Core(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "cannot read {path}: {e}"),
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 2 for bad input, 3 for failed internal verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::Input(_) => 2,
            CliError::Core(e) => match e {
                Error::Malformed(_)
                | Error::VariableOutOfRange { .. }
                | Error::NotPrime(_)
                | Error::TooManyVariables { .. }
                | Error::TooManyGenerators { .. }
                | Error::VariableNotInClass(_)
                | Error::UnitIdeal
                | Error::CoefficientMismatch(_) => 2,
                _ => 3,
            },
        }
    }
}
