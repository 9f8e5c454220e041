//! The consecutive-odd predecessor structure.
//!
//! For an odd `b` not divisible by 3 there is a smallest odd number `p`
//! that can occur immediately before `b` in the odd subsequence of any
//! Collatz sequence, and the complete set of such predecessors is exactly
//! the jump family `{4^n·p + e(n−1) : n ≥ 0}`. Multiples of 3 have no odd
//! predecessor at all, which is what makes reduction of every sequence to
//! one starting at a multiple of 3 possible.

use crate::error::Error;
use crate::forward::next_odd;
use crate::types::{is_even, mod3, odd_part, Nat};
use num_traits::{One, Zero};

/// The smallest odd number `p` that can precede `b` among consecutive odd
/// terms, together with `b` itself. `3p + 1` is exactly `2b` or `4b`
/// depending on `b mod 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredecessorBase {
    pub b: Nat,
    pub p: Nat,
}

/// `4^n·p + e(n−1)` for odd `p`; `jump(p, 0) = p` and the result is
/// always odd.
pub fn jump(p: &Nat, n: u64) -> Result<Nat, Error> {
    if is_even(p) {
        return Err(Error::Even(p.clone()));
    }
    Ok(crate::types::JumpSpec {
        base: p.clone(),
        height: n,
    }
    .realize())
}

/// The base of the jump family for odd `b`: (4b−1)/3 when b ≡ 1 mod 3,
/// (2b−1)/3 when b ≡ 2 mod 3. Fails with `NoPredecessor` when 3 | b.
pub fn predecessor_base(b: &Nat) -> Result<PredecessorBase, Error> {
    if b.is_zero() {
        return Err(Error::Zero);
    }
    if is_even(b) {
        return Err(Error::Even(b.clone()));
    }
    let p = match mod3(b) {
        1 => (4u32 * b - 1u32) / 3u32,
        2 => (2u32 * b - 1u32) / 3u32,
        _ => return Err(Error::NoPredecessor(b.clone())),
    };
    Ok(PredecessorBase { b: b.clone(), p })
}

/// All consecutive odd predecessors of `b` up to `max_height`, lowest
/// first: index `n` holds the jump of height `n` from the base.
pub fn predecessors(b: &Nat, max_height: u64) -> Result<Vec<Nat>, Error> {
    let base = predecessor_base(b)?;
    let mut out = Vec::with_capacity(max_height as usize + 1);
    let mut cur = base.p;
    for _ in 0..=max_height {
        out.push(cur.clone());
        cur = 4u32 * cur + 1u32;
    }
    Ok(out)
}

/// Height `n` with `a = 4^n·p + e(n−1)`, if any, found by running the
/// exact inverse map x → (x−1)/4 from `a` down to `p`.
pub fn jump_height_from(a: &Nat, p: &Nat) -> Result<Option<u64>, Error> {
    if is_even(a) {
        return Err(Error::Even(a.clone()));
    }
    if is_even(p) {
        return Err(Error::Even(p.clone()));
    }
    let mut cur = a.clone();
    let mut height = 0u64;
    loop {
        if &cur == p {
            return Ok(Some(height));
        }
        if &cur < p {
            return Ok(None);
        }
        let down = &cur - 1u32;
        if down.trailing_zeros().unwrap_or(0) < 2 {
            return Ok(None);
        }
        cur = down >> 2;
        height += 1;
    }
}

/// The second odd number of the sequence of `a`: for odd `a` this is the
/// odd term after `a` itself; for even `a`, the odd term after the first
/// odd value reached. `second_odd(1) = 1`, and the value for powers of
/// two is 1 (their only odd term).
pub fn second_odd(a: &Nat) -> Result<Nat, Error> {
    if a.is_zero() {
        return Err(Error::Zero);
    }
    let first = odd_part(a);
    if first.is_one() {
        return Ok(first);
    }
    next_odd(&first)
}

/// Two sequences are equivalent when they share their second odd number,
/// and hence coincide from that term on.
pub fn equivalent(a: &Nat, b: &Nat) -> Result<bool, Error> {
    Ok(second_odd(a)? == second_odd(b)?)
}

/// An odd number whose sequence is equivalent to that of `a` and which is
/// divisible by 3: `a` itself, `4a+1`, or `4(4a+1)+1` depending on
/// `a mod 3`.
pub fn reduce_to_multiple_of_3(a: &Nat) -> Result<Nat, Error> {
    if a.is_zero() {
        return Err(Error::Zero);
    }
    if is_even(a) {
        return Err(Error::Even(a.clone()));
    }
    Ok(match mod3(a) {
        0 => a.clone(),
        2 => 4u32 * a + 1u32,
        _ => 16u32 * a + 5u32,
    })
}
