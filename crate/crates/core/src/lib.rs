// negated float comparisons below deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod certify;
pub mod cli;
pub mod construction;
pub mod entanglement;
pub mod error;
pub mod matrix_json;
pub mod tensor;

pub use error::{Error, Result};
