pub mod base_field;
pub mod error;
pub mod graded;
pub mod incoherence;
pub mod localization;
pub mod power_series;
pub mod random;
pub mod selftest;
pub mod value_group;

pub use base_field::{FieldElem, MonomialSum};
pub use error::{Error, Result};
pub use value_group::{ExtScalar, GroupScalar, ValueGroup};
