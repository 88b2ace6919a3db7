use thiserror::Error;

use crate::value_group::GroupScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("empty interval: {lo} is not below {hi}")]
    EmptyInterval { lo: GroupScalar, hi: GroupScalar },

    #[error("{value} lies in the value group {group}")]
    InGroup { value: GroupScalar, group: &'static str },

    #[error("{value} does not lie in the value group {group}")]
    NotInGroup { value: GroupScalar, group: &'static str },

    #[error("negative target {0}")]
    NegativeTarget(GroupScalar),

    #[error("sequence length must be at least 1")]
    EmptySequence,

    #[error("element is not in the valuation ring: {0}")]
    NotInRing(String),

    #[error("not divisible in R: val(b) = {numerator} < val(a) = {denominator}")]
    NotDivisible { numerator: String, denominator: String },

    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(GroupScalar),

    #[error("series has no nonzero known coefficient")]
    ZeroSeries,

    #[error("series order must be at least 1")]
    EmptySeries,

    #[error("v_0 needs a certified series; truncation only gives a lower bound")]
    Uncertified,

    #[error("inexact evaluation: {0}")]
    Inexact(String),

    #[error("cannot assemble certificate: {0}")]
    Certificate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("witness identity fails at coefficient {index}")]
    WitnessMismatch { index: usize },

    #[error("inconclusive at order {order}: {reason}")]
    Inconclusive { order: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
