//! Grammar-compressed words over alphabets with involution.

pub mod alphabet;
pub mod equations;
pub mod error;
pub mod num;
pub mod product;
pub mod freegroup;
pub mod ig;
pub mod query;
pub mod slp;
pub mod text;

pub use alphabet::{Alphabet, Letter, Var, VarRef, Word};
pub use error::{Error, Result};
pub use num::Length;

/// Arbitrary-precision lengths and positions.
pub type Len = num_bigint::BigUint;

/// Straight-line program with arbitrary-precision lengths.
pub type Slp = slp::Slp<Len>;
/// Straight-line program with machine-word lengths, for grammars whose
/// words are known to be shorter than `2^64`.
pub type SlpU64 = slp::Slp<u64>;
