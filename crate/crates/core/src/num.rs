//! Length and position arithmetic.
//!
//! Every grammar in this crate is generic over the unsigned integer type used
//! for lengths and positions. Evaluations of height `h` can have length
//! `2^h`, so the default instantiation is [`num_bigint::BigUint`]; `u64` and
//! `u128` work as long as the grammar stays below their range, and overflow is
//! reported as an error instead of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, ToPrimitive, Unsigned};

/// Unsigned integer type usable for lengths and positions.
pub trait Length:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Unsigned
    + Integer
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("every length type holds usize values")
    }

    /// `2^k`, or `None` on overflow.
    fn pow2(k: u32) -> Option<Self> {
        let two = Self::one() + Self::one();
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.checked_mul(&two)?;
        }
        Some(acc)
    }

    /// Converts to `usize` if it fits.
    fn as_count(&self) -> Option<usize> {
        self.to_usize()
    }
}

impl<T> Length for T where
    T: Clone
        + Ord
        + Hash
        + Debug
        + Display
        + Unsigned
        + Integer
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Difference `a - b`; callers guarantee `a >= b`.
pub(crate) fn diff<L: Length>(a: &L, b: &L) -> L {
    debug_assert!(a >= b);
    a.clone() - b.clone()
}
