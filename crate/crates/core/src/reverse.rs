//! The unique reverse sequence.
//!
//! Running backwards, each odd number keeps only its *smallest* odd
//! predecessor, which makes the reverse orbit well defined:
//!
//! - (r−1)/3 when r is even and r ≡ 1 mod 3,
//! - 2r otherwise.
//!
//! The walk converges when its odd subsequence reaches a multiple of 3:
//! a multiple of 3 has no odd predecessor, so the walk can only double
//! from there, and those `2^i·t` terms are not emitted. Whether every
//! start > 1 converges this way is open; the engine reports
//! `BudgetExhausted` and `CycleDetected` as observable outcomes rather
//! than errors. The only known cycle is 1 → 2 → 4 → 1.

use std::collections::HashSet;

use crate::error::Error;
use crate::forward::collatz_sequence;
use crate::types::{is_even, is_odd, mod3, odd_part, Nat, StopReason, Trace};
use num_traits::Zero;

/// Default odd-term budget for reverse walks: 2^17.
pub const DEFAULT_REVERSE_BUDGET: u64 = 1 << 17;

/// A terminated reverse walk. `terms` is the full run including doubling
/// steps; `odd_terms` collects odd values in order of first production.
/// `converged_to` is present exactly when `stop` is `ReachedMultipleOf3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseTrace {
    pub start: Nat,
    pub terms: Vec<Nat>,
    pub odd_terms: Vec<Nat>,
    pub stop: StopReason,
    pub converged_to: Option<Nat>,
}

impl ReverseTrace {
    /// Odd-step depth of the walk: index of the converged term among the
    /// odd terms (0 when the start is already terminal).
    pub fn depth(&self) -> u64 {
        (self.odd_terms.len() as u64).saturating_sub(1)
    }
}

/// One reverse step: (r−1)/3 if r is even and r ≡ 1 mod 3, else 2r.
pub fn reverse_step(r: &Nat) -> Result<Nat, Error> {
    if r.is_zero() {
        return Err(Error::Zero);
    }
    if is_even(r) && mod3(r) == 1 {
        Ok((r - 1u32) / 3u32)
    } else {
        Ok(2u32 * r)
    }
}

/// The reverse walk from `start`, collecting at most `budget` odd terms.
///
/// Stops with `ReachedMultipleOf3` at the first odd term divisible by 3,
/// with `CycleDetected` when an odd term repeats, or with
/// `BudgetExhausted`. An even start whose odd part is divisible by 3 is
/// itself a post-convergence `2^i·t` term: it converges immediately to
/// its odd part and produces no odd terms.
pub fn reverse_sequence(start: &Nat, budget: u64) -> Result<ReverseTrace, Error> {
    if start.is_zero() {
        return Err(Error::Zero);
    }
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }

    let mut trace = ReverseTrace {
        start: start.clone(),
        terms: vec![start.clone()],
        odd_terms: Vec::new(),
        stop: StopReason::BudgetExhausted,
        converged_to: None,
    };

    if is_even(start) && mod3(start) == 0 {
        // Doubling preserves divisibility by 3, so no odd term will ever
        // appear; the start already sits in the ignored 2^i·t tail.
        trace.stop = StopReason::ReachedMultipleOf3;
        trace.converged_to = Some(odd_part(start));
        return Ok(trace);
    }

    let mut seen: HashSet<Nat> = HashSet::new();
    let mut cur = start.clone();

    // Handles an odd term: records it and decides whether the walk ends.
    // Returns true when iteration should stop.
    let mut take_odd = |t: &Nat, trace: &mut ReverseTrace| -> bool {
        if seen.contains(t) {
            trace.stop = StopReason::CycleDetected;
            return true;
        }
        seen.insert(t.clone());
        trace.odd_terms.push(t.clone());
        if mod3(t) == 0 {
            trace.stop = StopReason::ReachedMultipleOf3;
            trace.converged_to = Some(t.clone());
            return true;
        }
        trace.odd_terms.len() as u64 >= budget
    };

    if is_odd(&cur) && take_odd(&cur, &mut trace) {
        return Ok(trace);
    }

    loop {
        cur = reverse_step(&cur)?;
        trace.terms.push(cur.clone());
        if is_odd(&cur) && take_odd(&cur, &mut trace) {
            return Ok(trace);
        }
    }
}

/// The smallest odd number before odd `p` in any Collatz sequence:
/// (2p−1)/3 when p ≡ 2 mod 3, (4p−1)/3 when p ≡ 1 mod 3. Fails with
/// `NoPredecessor` when 3 | p.
pub fn reverse_odd_step(p: &Nat) -> Result<Nat, Error> {
    if p.is_zero() {
        return Err(Error::Zero);
    }
    if is_even(p) {
        return Err(Error::Even(p.clone()));
    }
    match mod3(p) {
        2 => Ok((2u32 * p - 1u32) / 3u32),
        1 => Ok((4u32 * p - 1u32) / 3u32),
        _ => Err(Error::NoPredecessor(p.clone())),
    }
}

/// Odd terms of the reverse walk of odd `start`, computed directly with
/// the odd-level recurrence. Equals `reverse_sequence(start, budget)`'s
/// `odd_terms`.
pub fn reverse_odd_subsequence(start: &Nat, budget: u64) -> Result<Vec<Nat>, Error> {
    if start.is_zero() {
        return Err(Error::Zero);
    }
    if is_even(start) {
        return Err(Error::Even(start.clone()));
    }
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let mut out = vec![start.clone()];
    let mut seen: HashSet<Nat> = HashSet::new();
    seen.insert(start.clone());
    while mod3(out.last().unwrap()) != 0 && (out.len() as u64) < budget {
        let next = reverse_odd_step(out.last().unwrap())?;
        if seen.contains(&next) {
            break;
        }
        seen.insert(next.clone());
        out.push(next);
    }
    Ok(out)
}

/// The full orbit through odd `a`: the reverse walk reversed so it runs
/// forward from the converged multiple of 3, spliced with the forward
/// sequence of `a` down to 1.
///
/// The reverse phase must converge; `BudgetExhausted` or `CycleDetected`
/// there becomes an error.
pub fn complete_sequence(a: &Nat, budget: u64) -> Result<Trace, Error> {
    if is_even(a) {
        return Err(Error::Even(a.clone()));
    }
    let rev = reverse_sequence(a, budget)?;
    if rev.stop != StopReason::ReachedMultipleOf3 {
        return Err(Error::Unconverged {
            start: a.clone(),
            stop: rev.stop,
        });
    }
    let mut terms: Vec<Nat> = rev.terms.into_iter().rev().collect();
    let forward = collatz_sequence(a, None)?;
    terms.extend(forward.terms.into_iter().skip(1));
    Ok(Trace {
        start: terms[0].clone(),
        terms,
        stop: forward.stop,
        odd_only: false,
    })
}
