use thiserror::Error;

/// Errors produced by the construction and verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sign vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("ground set of size {0} exceeds the supported maximum of 64 elements")]
    GroundSetTooLarge(usize),

    #[error("invalid sign character {0:?}")]
    InvalidSign(char),

    #[error("{0} is not a tope")]
    NotATope(String),

    #[error("element {0} is not part of the poset")]
    UnknownElement(usize),

    #[error("non-simple arrangement: {0}")]
    NonSimple(String),

    #[error("not an oriented matroid: axiom {axiom} violated by {witness:?}")]
    NotAnOrientedMatroid { axiom: String, witness: Vec<String> },

    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),

    #[error("not a lattice: {0}")]
    NotALattice(String),

    #[error("map is not order preserving: {0}")]
    NotOrderPreserving(String),

    #[error("matching contains a directed cycle through {0:?}")]
    CyclicMatching(Vec<usize>),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal invariant violated in {stage}: {message}")]
    Invariant {
        stage: &'static str,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn invariant(stage: &'static str, message: impl Into<String>) -> Self {
        Error::Invariant {
            stage,
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
