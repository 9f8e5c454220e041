//! Forward Collatz iteration: full sequences, the odd subsequence, and
//! convergence statistics.
//!
//! A sequence is considered convergent when it first reaches 1; the
//! trailing 4, 2, 1 cycle is never emitted. Convergence is conjectural,
//! so every iterating operation carries a term budget and reports
//! `BudgetExhausted` instead of hanging.

use crate::error::Error;
use crate::types::{is_even, is_odd, is_power_of_two, Nat, StopReason, Trace};
use num_traits::{One, Zero};

/// Default cap on emitted terms (and on odd terms for the odd
/// subsequence): 2^20.
pub const DEFAULT_TERM_LIMIT: u64 = 1 << 20;

fn check_positive(n: &Nat) -> Result<(), Error> {
    if n.is_zero() {
        Err(Error::Zero)
    } else {
        Ok(())
    }
}

fn effective_limit(limit: Option<u64>) -> Result<u64, Error> {
    match limit {
        Some(0) => Err(Error::ZeroBudget),
        Some(k) => Ok(k),
        None => Ok(DEFAULT_TERM_LIMIT),
    }
}

/// One application of the map: 3c+1 if `c` is odd, c/2 if `c` is even.
pub fn collatz_step(c: &Nat) -> Result<Nat, Error> {
    check_positive(c)?;
    if is_odd(c) {
        Ok(3u32 * c + 1u32)
    } else {
        Ok(c >> 1)
    }
}

/// The full sequence from `start`, stopping at the first 1 or after
/// `limit` terms (default 2^20).
pub fn collatz_sequence(start: &Nat, limit: Option<u64>) -> Result<Trace, Error> {
    check_positive(start)?;
    let limit = effective_limit(limit)?;
    let mut terms = vec![start.clone()];
    while !terms.last().unwrap().is_one() && (terms.len() as u64) < limit {
        let next = collatz_step(terms.last().unwrap())?;
        terms.push(next);
    }
    let stop = if terms.last().unwrap().is_one() {
        StopReason::ReachedOne
    } else {
        StopReason::BudgetExhausted
    };
    Ok(Trace {
        start: start.clone(),
        terms,
        stop,
        odd_only: false,
    })
}

/// The odd number following odd `a` in its sequence: (3a+1)/2^r with 2^r
/// the exact power of two dividing 3a+1. `next_odd(1) = 1`.
pub fn next_odd(a: &Nat) -> Result<Nat, Error> {
    check_positive(a)?;
    if is_even(a) {
        return Err(Error::Even(a.clone()));
    }
    let t = 3u32 * a + 1u32;
    let r = t.trailing_zeros().expect("3a+1 is nonzero");
    Ok(t >> r)
}

/// The odd terms of `collatz_sequence(start)` in order, stopping at the
/// first 1 or after `limit` odd terms.
pub fn odd_subsequence(start: &Nat, limit: Option<u64>) -> Result<Trace, Error> {
    check_positive(start)?;
    let limit = effective_limit(limit)?;
    // Halve down to the first odd value, then walk odd-to-odd. Each
    // segment (one 3n+1 followed by its halvings) is finite, so this
    // cannot spin without producing a term.
    let mut cur = start.clone();
    while is_even(&cur) {
        cur >>= 1;
    }
    let mut terms = vec![cur.clone()];
    while !cur.is_one() && (terms.len() as u64) < limit {
        cur = next_odd(&cur)?;
        terms.push(cur.clone());
    }
    let stop = if cur.is_one() {
        StopReason::ReachedOne
    } else {
        StopReason::BudgetExhausted
    };
    Ok(Trace {
        start: start.clone(),
        terms,
        stop,
        odd_only: true,
    })
}

/// Convergence statistics of a forward sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardStats {
    pub start: Nat,
    /// Map applications before first reaching 1; `None` if the budget ran
    /// out first.
    pub steps_to_one: Option<u64>,
    /// Largest term anywhere in the trace (≥ start).
    pub max_excursion: Nat,
    /// The final odd term > 1, absent for powers of two (and on budget
    /// exhaustion).
    pub last_odd_before_one: Option<Nat>,
}

/// Computes [`ForwardStats`] without materializing the trace. `limit`
/// bounds the number of map applications (default 2^20).
pub fn forward_stats(start: &Nat, limit: Option<u64>) -> Result<ForwardStats, Error> {
    check_positive(start)?;
    let limit = effective_limit(limit)?;

    let mut steps: u64 = 0;
    let mut max_excursion = start.clone();
    let mut last_odd: Option<Nat> = None;

    // Reduce an even start to its first odd value, step by step against
    // the budget.
    let mut cur = start.clone();
    while is_even(&cur) && steps < limit {
        cur >>= 1;
        steps += 1;
    }
    if is_even(&cur) {
        return Ok(ForwardStats {
            start: start.clone(),
            steps_to_one: None,
            max_excursion,
            last_odd_before_one: None,
        });
    }

    // Odd-to-odd segments: the only new maximum candidate in a segment is
    // its peak 3n+1; everything after is a halving of it.
    while !cur.is_one() && steps < limit {
        let peak = 3u32 * &cur + 1u32;
        let r = peak.trailing_zeros().expect("3n+1 is nonzero");
        let segment = 1 + r;
        if steps + segment > limit {
            // The budget dies mid-segment. steps < limit here, so the
            // 3n+1 application itself fits and its peak counts; the
            // remaining halvings only shrink.
            if peak > max_excursion {
                max_excursion = peak;
            }
            steps = limit;
            break;
        }
        if peak > max_excursion {
            max_excursion = peak.clone();
        }
        last_odd = Some(cur.clone());
        cur = peak >> r;
        steps += segment;
    }

    if cur.is_one() {
        if is_power_of_two(start) {
            last_odd = None;
        }
        Ok(ForwardStats {
            start: start.clone(),
            steps_to_one: Some(steps),
            max_excursion,
            last_odd_before_one: last_odd,
        })
    } else {
        Ok(ForwardStats {
            start: start.clone(),
            steps_to_one: None,
            max_excursion,
            last_odd_before_one: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::nat;
    use proptest::prelude::*;

    #[test]
    fn step_cases() {
        assert_eq!(collatz_step(&nat(27)).unwrap(), nat(82));
        assert_eq!(collatz_step(&nat(82)).unwrap(), nat(41));
        assert_eq!(collatz_step(&nat(1)).unwrap(), nat(4));
        assert_eq!(collatz_step(&nat(0)), Err(Error::Zero));
    }

    #[test]
    fn sequence_of_27_prefix_and_tail() {
        let t = collatz_sequence(&nat(27), None).unwrap();
        assert_eq!(t.stop, StopReason::ReachedOne);
        let head: Vec<Nat> = [27u32, 82, 41, 124, 62, 31].map(Nat::from).to_vec();
        assert_eq!(&t.terms[..6], &head[..]);
        let tail: Vec<Nat> = [5u32, 16, 8, 4, 2, 1].map(Nat::from).to_vec();
        assert_eq!(&t.terms[t.terms.len() - 6..], &tail[..]);
        assert_eq!(t.terms.len(), 112);
    }

    #[test]
    fn sequence_degenerate_starts() {
        let one = collatz_sequence(&nat(1), None).unwrap();
        assert_eq!(one.terms, vec![nat(1)]);
        assert_eq!(one.stop, StopReason::ReachedOne);

        let sixteen = collatz_sequence(&nat(16), None).unwrap();
        assert_eq!(
            sixteen.terms,
            [16u32, 8, 4, 2, 1].map(Nat::from).to_vec()
        );
        assert_eq!(collatz_sequence(&nat(0), None), Err(Error::Zero));
    }

    #[test]
    fn sequence_budget_exhaustion() {
        let t = collatz_sequence(&nat(27), Some(10)).unwrap();
        assert_eq!(t.stop, StopReason::BudgetExhausted);
        assert_eq!(t.terms.len(), 10);
        assert_eq!(collatz_sequence(&nat(27), Some(0)), Err(Error::ZeroBudget));
    }

    #[test]
    fn next_odd_cases() {
        assert_eq!(next_odd(&nat(27)).unwrap(), nat(41));
        assert_eq!(next_odd(&nat(41)).unwrap(), nat(31));
        assert_eq!(next_odd(&nat(1)).unwrap(), nat(1));
        assert_eq!(next_odd(&nat(82)), Err(Error::Even(nat(82))));
    }

    #[test]
    fn odd_subsequence_of_27_matches_filtering() {
        let odd = odd_subsequence(&nat(27), None).unwrap();
        let expected: Vec<Nat> = [
            27u32, 41, 31, 47, 71, 107, 161, 121, 91, 137, 103, 155, 233, 175, 263, 395, 593,
            445, 167, 251, 377, 283, 425, 319, 479, 719, 1079, 1619, 2429, 911, 1367, 2051, 3077,
            577, 433, 325, 61, 23, 35, 53, 5, 1,
        ]
        .map(Nat::from)
        .to_vec();
        assert_eq!(odd.terms, expected);
        assert!(odd.odd_only);
    }

    #[test]
    fn odd_subsequence_even_and_power_of_two_starts() {
        let from82 = odd_subsequence(&nat(82), None).unwrap();
        assert_eq!(&from82.terms[..2], &[nat(41), nat(31)]);
        let from4 = odd_subsequence(&nat(4), None).unwrap();
        assert_eq!(from4.terms, vec![nat(1)]);
    }

    #[test]
    fn stats_of_27() {
        let s = forward_stats(&nat(27), None).unwrap();
        assert_eq!(s.max_excursion, nat(9232));
        assert_eq!(s.steps_to_one, Some(111));
        assert_eq!(s.last_odd_before_one, Some(nat(5)));
    }

    #[test]
    fn stats_of_powers_of_two() {
        let s = forward_stats(&nat(32), None).unwrap();
        assert_eq!(s.last_odd_before_one, None);
        assert_eq!(s.steps_to_one, Some(5));
        assert_eq!(s.max_excursion, nat(32));
    }

    #[test]
    fn stats_budget_exhaustion_absents_fields() {
        let s = forward_stats(&nat(27), Some(5)).unwrap();
        assert_eq!(s.steps_to_one, None);
        assert_eq!(s.last_odd_before_one, None);
        assert!(s.max_excursion >= nat(27));
    }

    #[test]
    fn stats_step_count_matches_sequence_length() {
        for n in 1u32..200 {
            let t = collatz_sequence(&Nat::from(n), None).unwrap();
            let s = forward_stats(&Nat::from(n), None).unwrap();
            assert_eq!(s.steps_to_one, Some(t.terms.len() as u64 - 1), "n = {n}");
            assert_eq!(&s.max_excursion, t.terms.iter().max().unwrap(), "n = {n}");
        }
    }

    proptest! {
        // Adjacent terms of a full trace obey the map.
        #[test]
        fn trace_is_well_formed(start in 1u64..1_000_000u64) {
            let t = collatz_sequence(&Nat::from(start), Some(4096)).unwrap();
            for pair in t.terms.windows(2) {
                prop_assert_eq!(collatz_step(&pair[0]).unwrap(), pair[1].clone());
            }
        }

        // next_odd agrees with raw stepping through the even gap.
        #[test]
        fn next_odd_matches_raw_iteration(a in prop::num::u64::ANY) {
            let a = Nat::from(a | 1);
            let mut cur = collatz_step(&a).unwrap();
            while is_even(&cur) {
                cur = collatz_step(&cur).unwrap();
            }
            prop_assert_eq!(next_odd(&a).unwrap(), cur);
        }

        // The odd subsequence is exactly the odd terms of the full trace.
        #[test]
        fn odd_subsequence_is_the_filter(start in 1u64..100_000u64) {
            let full = collatz_sequence(&Nat::from(start), None).unwrap();
            let odd = odd_subsequence(&Nat::from(start), None).unwrap();
            let filtered: Vec<Nat> =
                full.terms.iter().filter(|t| is_odd(t)).cloned().collect();
            prop_assert_eq!(odd.terms, filtered);
        }
    }
}
