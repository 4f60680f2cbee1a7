use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph error: {0}")]
    Graph(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("point assigns no value to variable {0}")]
    MissingVariable(usize),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("type error at term {index}: {msg}")]
    Type { index: usize, msg: String },
    #[error("expected an expression with empty codomain, found codomain `{0}`")]
    NotRExpression(String),
    #[error("not a good g-expression: {0}")]
    NotGoodExpression(String),
    #[error("word mismatch: {0}")]
    WordMismatch(String),
    #[error("word length {len} exceeds the enumeration bound {bound}")]
    BoundExceeded { len: usize, bound: usize },
    #[error("fuel exhausted in stage {stage} after {steps} rule applications")]
    FuelExhausted { stage: String, steps: usize, trace: String },
    #[error("internal rewriting error: {0}")]
    Internal(String),
}
