//! Exact truncated arithmetic for skew inverse power series rings and
//! their Laurent localizations, plus the checks built on top of them.

pub mod expr;
pub mod field;
pub mod ideal;
pub mod k4;
pub mod laurent;
pub mod oracle;
pub mod report;
pub mod ring;
pub mod scenario;
pub mod series;
pub mod tower;
pub mod validate;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("operation would produce a result known to precision zero")]
    DegeneratePrecision,
    #[error("element is zero to the working precision")]
    ZeroToPrecision,
    #[error("unknown ring id: {0}")]
    UnknownRing(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}
