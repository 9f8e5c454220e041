//! Shared domain vocabulary: the numeric carrier, traces, stop reasons,
//! and the `e` numbers that anchor the jump structure.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::Error;

/// The universal numeric carrier: a nonnegative integer of unbounded
/// magnitude. All public arithmetic in this crate is exact.
pub type Nat = num_bigint::BigUint;

/// Builds a `Nat` from a machine integer; handy in call sites and tests.
#[inline]
pub fn nat(v: u128) -> Nat {
    Nat::from(v)
}

#[inline]
pub fn is_even(n: &Nat) -> bool {
    !n.bit(0)
}

#[inline]
pub fn is_odd(n: &Nat) -> bool {
    n.bit(0)
}

/// Residue of `n` modulo 3 as a plain integer.
#[inline]
pub fn mod3(n: &Nat) -> u8 {
    use num_traits::ToPrimitive;
    (n % 3u32).to_u8().expect("residue mod 3 fits in u8")
}

/// Number of trailing one-bits. For odd `a` this is `tail_length(a) + 1`.
#[inline]
pub fn trailing_ones(n: &Nat) -> u64 {
    // The trailing ones of n are the trailing zeros of n+1.
    (n + 1u32).trailing_zeros().unwrap_or(0)
}

/// Largest odd divisor: `n` with all factors of two removed.
#[inline]
pub fn odd_part(n: &Nat) -> Nat {
    match n.trailing_zeros() {
        Some(k) if k > 0 => n >> k,
        _ => n.clone(),
    }
}

/// Power-of-two test via popcount.
#[inline]
pub fn is_power_of_two(n: &Nat) -> bool {
    n.count_ones() == 1
}

/// 2^k as a `Nat`.
#[inline]
pub fn pow2(k: u64) -> Nat {
    Nat::from(1u32) << k
}

/// 4^k as a `Nat`.
#[inline]
pub fn pow4(k: u64) -> Nat {
    Nat::from(1u32) << (2 * k)
}

/// The `e` numbers: e(−1) = 0 and e(n) = 4·e(n−1) + 1, i.e.
/// 1, 5, 21, 85, 341, 1365, …, the base-4 repunits Σ_{i=0..n} 4^i.
///
/// Computed in closed form as (4^{n+1} − 1) / 3; agreement with the
/// recurrence is a tested invariant.
///
/// Panics if `n < −1` (precondition; there is no such `e` number).
pub fn e_value(n: i64) -> Nat {
    assert!(n >= -1, "e_value is defined for n >= -1, got {n}");
    if n == -1 {
        return Nat::default();
    }
    (pow4(n as u64 + 1) - 1u32) / 3u32
}

/// Why a terminated trace stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Forward sequence reached 1.
    ReachedOne,
    /// Reverse sequence reached an odd multiple of 3.
    ReachedMultipleOf3,
    /// The step or term budget ran out first.
    BudgetExhausted,
    /// An odd term repeated (the fixed point at 1 is the only known case).
    CycleDetected,
    /// Requested a predecessor of a multiple of 3, which has none.
    NoPredecessor,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ReachedOne => "reached-one",
            StopReason::ReachedMultipleOf3 => "reached-multiple-of-3",
            StopReason::BudgetExhausted => "budget-exhausted",
            StopReason::CycleDetected => "cycle-detected",
            StopReason::NoPredecessor => "no-predecessor",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ordered run of sequence terms with its starting number and the
/// reason iteration stopped.
///
/// When `odd_only` is false, `terms[0]` is `start` and consecutive terms
/// obey the generating map of the engine that produced the trace. When
/// `odd_only` is true, `terms` holds only odd values and `terms[0]` is the
/// first odd value reached from `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub start: Nat,
    pub terms: Vec<Nat>,
    pub stop: StopReason,
    pub odd_only: bool,
}

impl Trace {
    /// Terms joined with single spaces, the text form used by the CLI.
    pub fn to_line(&self) -> String {
        let mut line = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&t.to_string());
        }
        line
    }
}

/// A jump of height `height` from an odd base: the number
/// `4^height · base + e(height − 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpSpec {
    pub base: Nat,
    pub height: u64,
}

impl JumpSpec {
    /// Requires an odd base.
    pub fn new(base: Nat, height: u64) -> Result<Self, Error> {
        if is_even(&base) {
            return Err(Error::Even(base));
        }
        Ok(JumpSpec { base, height })
    }

    /// The number this jump denotes. Always odd.
    pub fn realize(&self) -> Nat {
        (&self.base << (2 * self.height)) + e_value(self.height as i64 - 1)
    }
}
