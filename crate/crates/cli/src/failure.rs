use std::fmt;

use serde::Serialize;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub enum Failure {
    Core(probewalk::Error),
    Usage { kind: &'static str, message: String },
    Io(String),
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        Failure::Usage { kind, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_usage() => EXIT_USAGE,
            Failure::Core(_) | Failure::Io(_) => EXIT_FAILURE,
            Failure::Usage { .. } => EXIT_USAGE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.kind(),
            Failure::Usage { kind, .. } => kind,
            Failure::Io(_) => "io",
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport { kind_tag: "error", error: ErrorBody { kind: self.kind(), message: self.to_string() } }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => {
                write!(f, "{e}")?;
                match e {
                    probewalk::Error::Disconnected => write!(f, "; rerun with --largest-component"),
                    probewalk::Error::Bipartite => write!(f, "; rerun with --allow-bipartite and an explicit --L"),
                    _ => Ok(()),
                }
            }
            Failure::Usage { message, .. } => f.write_str(message),
            Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<probewalk::Error> for Failure {
    fn from(e: probewalk::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(format!("io error: {e}"))
    }
}

#[derive(Serialize)]
pub struct ErrorReport {
    #[serde(rename = "type")]
    kind_tag: &'static str,
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}
