//! Exact arithmetic in ℚ(√17) and its multiquadratic extensions.

pub mod classes;
pub mod ext;
pub mod interval;
pub mod parse;
pub mod qsqrt17;
pub mod rational;
pub mod tower;

pub use classes::{reduce_square_class, SquareClass};
pub use ext::ExtScalar;
pub use interval::{certified_sign, to_decimal};
pub use parse::{parse_ext, parse_scalar};
pub use qsqrt17::QSqrt17;
pub use tower::TowerScalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative radicand {radicand} at byte {pos}")]
    NegativeRadicandAt { pos: usize, radicand: String },
    #[error("radicand {0} is not positive")]
    NonPositiveRadicand(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("b({0}) is undefined: d - {0} is not positive")]
    BetaOutOfRange(i64),
    #[error("cannot take the square root of {0} exactly")]
    UnsupportedRadical(String),
    #[error("{0} involves fourth roots and is not a tower element")]
    NotInTower(String),
}
