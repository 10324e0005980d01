use std::fmt;

/// Why a run stopped, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Size(String),
    Io(String),
    /// The computation finished but a verdict was not acceptable.
    Verdict(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Size(_) => 2,
            Failure::Io(_) => 3,
            Failure::Verdict(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Size(m) => write!(f, "size cap: {m}"),
            Failure::Io(m) => write!(f, "i/o: {m}"),
            Failure::Verdict(m) => write!(f, "verdict: {m}"),
        }
    }
}

impl From<fraclab::Error> for Failure {
    fn from(e: fraclab::Error) -> Self {
        match e {
            fraclab::Error::Validation(m) => Failure::Validation(m),
            fraclab::Error::Size(m) => Failure::Size(m),
            fraclab::Error::Io(e) => Failure::Io(e.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
