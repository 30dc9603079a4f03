use thiserror::Error;

use crate::kripke::Violation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("duplicate `init` declaration on line {0}")]
    DuplicateInit(usize),

    #[error("atom `{atom}` on state `{state}` is not declared in `aps`")]
    UndeclaredAtom { state: String, atom: String },

    #[error("invalid structure: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("reserved atom `{0}` cannot be used as a user atom")]
    ReservedAtom(String),

    #[error("partition does not cover state `{0}`")]
    MissingState(String),

    #[error("state `{0}` appears in more than one block")]
    DuplicateState(String),

    #[error("partition covers {found} states but the structure has {expected}")]
    PartitionSize { expected: usize, found: usize },

    #[error("partition is not a {0}")]
    NotAnEquivalence(&'static str),

    #[error("removing {from} -> {to} would leave `{from}` without successors")]
    WouldBreakTotality { from: String, to: String },

    #[error("exhaustive search refused: a label class has {size} states (limit {limit})")]
    SizeLimit { size: usize, limit: usize },

    #[error("quotient block `{0}` has no successor")]
    QuotientNotTotal(String),

    #[error("LTL parse error at offset {offset}: {message}")]
    Formula { offset: usize, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
