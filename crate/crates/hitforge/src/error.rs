use std::fmt;
use std::io;

/// Error taxonomy shared by every module in the crate.
///
/// The command-line layer maps these onto process exit codes: input-shape,
/// parse and incompatibility problems are usage errors; resource-limit and
/// construction-failure are capacity errors. Missing-witness outcomes (⊥)
/// are *values*, not errors, and never appear here.
#[derive(Debug)]
pub enum Error {
    /// Arguments fail a structural precondition (wrong length, bad arity, ...).
    InputShape(String),
    /// The request exceeds a documented feasibility cap.
    ResourceLimit(String),
    /// A search procedure exhausted its budget without producing an object.
    ConstructionFailed(String),
    /// A membership procedure could not evaluate its input.
    PropertyEval(String),
    /// A randomized producer violated its output contract.
    ProducerContract(String),
    /// A compression scheme violated its output contract.
    SchemeContract(String),
    /// A file or flag payload does not match its documented format.
    Parse(String),
    /// A report was produced by an incompatible tool version.
    Incompatible(String),
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InputShape(m) => write!(f, "input shape: {m}"),
            Error::ResourceLimit(m) => write!(f, "resource limit: {m}"),
            Error::ConstructionFailed(m) => write!(f, "construction failed: {m}"),
            Error::PropertyEval(m) => write!(f, "property evaluation: {m}"),
            Error::ProducerContract(m) => write!(f, "producer contract: {m}"),
            Error::SchemeContract(m) => write!(f, "scheme contract: {m}"),
            Error::Parse(m) => write!(f, "parse: {m}"),
            Error::Incompatible(m) => write!(f, "incompatible: {m}"),
            Error::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InputShape(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
