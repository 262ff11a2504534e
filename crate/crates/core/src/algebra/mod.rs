//! Finite groups and fields with integer element codes.
//!
//! Every group element is a code in `0..q`. Direct products of cyclic groups
//! use a mixed-radix encoding with the first factor as the least significant
//! digit; fields `GF(p^e)` use the base-`p` digits of the polynomial-basis
//! coefficients, constant term first. Code `0` is always the identity.

mod field;
mod group;
mod poly;

pub use field::{default_modulus, is_irreducible, is_prime};
pub use group::{GroupKind, GroupTable, Structure, DEFAULT_ORDER_LIMIT};
pub use poly::{parse_poly, Polynomial};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("group order {order} exceeds the configured limit {limit}")]
    OrderLimit { order: u128, limit: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("polynomial {0} is reducible over the prime field")]
    Reducible(String),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("operation requires a field, got {0}")]
    NotAField(String),
    #[error("element code {code} out of range for order {order}")]
    ElementOutOfRange { code: usize, order: usize },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
