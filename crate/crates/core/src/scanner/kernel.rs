//! Per-number verification kernels.
//!
//! Numbers start in u64 arithmetic, widen to u128 when a checked
//! operation overflows, and fall back to `Nat` after that; nothing ever
//! wraps. The pure big-integer routes (`verify_*_unbounded`) exist so the
//! fast paths can be cross-checked against unbounded evaluation.
//!
//! Reverse steps are computed residue-free: with k = p div 3,
//!   p ≡ 2 mod 3 → (2p−1)/3 = 2k+1 (always narrower than p),
//!   p ≡ 1 mod 3 → (4p−1)/3 = 4k+1 (the only overflow point).
//! Cycle detection uses Brent's teleporting-tortoise scheme in O(1)
//! memory; the fixed point at 1 is short-circuited since 1, 2, 4 are the
//! only numbers known to fall into it.

use crate::types::{mod3, odd_part, Nat};
use num_traits::{One, ToPrimitive};

/// Largest value reached while verifying one number. Stays a machine word
/// until the value genuinely exceeds u128.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Peak {
    Word(u128),
    Big(Nat),
}

impl Peak {
    fn raise_word(&mut self, v: u128) {
        match self {
            Peak::Word(cur) => {
                if v > *cur {
                    *cur = v;
                }
            }
            // A Big peak already exceeds u128.
            Peak::Big(_) => {}
        }
    }

    fn raise_big(&mut self, v: &Nat) {
        match v.to_u128() {
            Some(w) => self.raise_word(w),
            None => match self {
                Peak::Word(_) => *self = Peak::Big(v.clone()),
                Peak::Big(cur) => {
                    if v > cur {
                        *cur = v.clone();
                    }
                }
            },
        }
    }

    pub fn to_nat(&self) -> Nat {
        match self {
            Peak::Word(v) => Nat::from(*v),
            Peak::Big(b) => b.clone(),
        }
    }
}

fn peak_of(n: &Nat) -> Peak {
    match n.to_u128() {
        Some(v) => Peak::Word(v),
        None => Peak::Big(n.clone()),
    }
}

/// Fixed-width carrier for the hot loops.
trait Word: Copy + Eq + Ord {
    fn to_u128(self) -> u128;
    fn to_nat(self) -> Nat;
    fn is_one(self) -> bool;
    fn rem3(self) -> u8;
    fn div3(self) -> Self;
    fn tz(self) -> u32;
    fn shr(self, k: u32) -> Self;
    fn triple_plus_one(self) -> Option<Self>;
    fn quad_plus_one(self) -> Option<Self>;
    fn double_plus_one(self) -> Self;
    fn dec_div3(self) -> Self;
}

macro_rules! impl_word {
    ($t:ty) => {
        impl Word for $t {
            #[inline]
            fn to_u128(self) -> u128 {
                self as u128
            }
            #[inline]
            fn to_nat(self) -> Nat {
                Nat::from(self)
            }
            #[inline]
            fn is_one(self) -> bool {
                self == 1
            }
            #[inline]
            fn rem3(self) -> u8 {
                (self % 3) as u8
            }
            #[inline]
            fn div3(self) -> Self {
                self / 3
            }
            #[inline]
            fn tz(self) -> u32 {
                self.trailing_zeros()
            }
            #[inline]
            fn shr(self, k: u32) -> Self {
                self >> k
            }
            #[inline]
            fn triple_plus_one(self) -> Option<Self> {
                self.checked_mul(3)?.checked_add(1)
            }
            #[inline]
            fn quad_plus_one(self) -> Option<Self> {
                self.checked_mul(4)?.checked_add(1)
            }
            #[inline]
            fn double_plus_one(self) -> Self {
                2 * self + 1
            }
            #[inline]
            fn dec_div3(self) -> Self {
                (self - 1) / 3
            }
        }
    };
}

impl_word!(u64);
impl_word!(u128);

// ---------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------

/// Result of verifying forward convergence of one number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardOutcome {
    /// Reached 1 after `steps` map applications.
    ReachedOne { steps: u64, peak: Peak },
    /// The odd-step budget ran out first.
    Budget { peak: Peak },
}

struct ForwardCarry {
    cur: Nat,
    steps: u64,
    odd_steps: u64,
    peak: Peak,
}

fn forward_loop<W: Word>(
    mut cur: W,
    mut steps: u64,
    mut odd_steps: u64,
    mut peak: Peak,
    budget: u64,
) -> Result<ForwardOutcome, ForwardCarry> {
    let r = cur.tz();
    if r > 0 {
        cur = cur.shr(r);
        steps += r as u64;
    }
    loop {
        if cur.is_one() {
            return Ok(ForwardOutcome::ReachedOne { steps, peak });
        }
        if odd_steps == budget {
            return Ok(ForwardOutcome::Budget { peak });
        }
        match cur.triple_plus_one() {
            Some(t) => {
                peak.raise_word(t.to_u128());
                let r = t.tz();
                cur = t.shr(r);
                steps += 1 + r as u64;
                odd_steps += 1;
            }
            None => {
                return Err(ForwardCarry {
                    cur: cur.to_nat(),
                    steps,
                    odd_steps,
                    peak,
                })
            }
        }
    }
}

fn forward_loop_big(
    mut cur: Nat,
    mut steps: u64,
    mut odd_steps: u64,
    mut peak: Peak,
    budget: u64,
) -> ForwardOutcome {
    let r = cur.trailing_zeros().expect("positive input");
    if r > 0 {
        cur >>= r;
        steps += r;
    }
    loop {
        if cur.is_one() {
            return ForwardOutcome::ReachedOne { steps, peak };
        }
        if odd_steps == budget {
            return ForwardOutcome::Budget { peak };
        }
        let t = 3u32 * cur + 1u32;
        peak.raise_big(&t);
        let r = t.trailing_zeros().expect("3n+1 is nonzero");
        cur = t >> r;
        steps += 1 + r;
        odd_steps += 1;
    }
}

fn forward_widen(carry: ForwardCarry, budget: u64) -> ForwardOutcome {
    match carry.cur.to_u128() {
        Some(c) => match forward_loop::<u128>(c, carry.steps, carry.odd_steps, carry.peak, budget)
        {
            Ok(done) => done,
            Err(c2) => forward_loop_big(c2.cur, c2.steps, c2.odd_steps, c2.peak, budget),
        },
        None => forward_loop_big(carry.cur, carry.steps, carry.odd_steps, carry.peak, budget),
    }
}

pub fn verify_forward_u64(n: u64, budget: u64) -> ForwardOutcome {
    debug_assert!(n >= 1);
    match forward_loop::<u64>(n, 0, 0, Peak::Word(n as u128), budget) {
        Ok(done) => done,
        Err(carry) => forward_widen(carry, budget),
    }
}

pub fn verify_forward_nat(n: &Nat, budget: u64) -> ForwardOutcome {
    if let Some(w) = n.to_u64() {
        return verify_forward_u64(w, budget);
    }
    if let Some(w) = n.to_u128() {
        return match forward_loop::<u128>(w, 0, 0, Peak::Word(w), budget) {
            Ok(done) => done,
            Err(carry) => forward_loop_big(carry.cur, carry.steps, carry.odd_steps, carry.peak, budget),
        };
    }
    forward_loop_big(n.clone(), 0, 0, peak_of(n), budget)
}

/// Pure big-integer route, for cross-checking the fast paths.
#[cfg_attr(not(test), allow(dead_code))]
pub fn verify_forward_unbounded(n: &Nat, budget: u64) -> ForwardOutcome {
    forward_loop_big(n.clone(), 0, 0, peak_of(n), budget)
}

// ---------------------------------------------------------------------
// reverse
// ---------------------------------------------------------------------

/// Result of verifying reverse convergence of one number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReverseOutcome {
    /// The odd walk reached a multiple of 3 after `depth` odd steps.
    Converged { depth: u64, peak: Peak },
    /// The walk reached 1 and would repeat 1 → 2 → 4 → 1 forever.
    UnitCycle { peak: Peak },
    /// An odd term repeated without passing through 1.
    ForeignCycle { peak: Peak },
    /// The odd-term budget ran out first.
    Budget { peak: Peak },
}

struct ReverseCarry {
    cur: Nat,
    tort: Nat,
    power: u64,
    lam: u64,
    count: u64,
    peak: Peak,
}

fn reverse_loop<W: Word>(
    first: W,
    budget: u64,
    mut peak: Peak,
) -> Result<ReverseOutcome, ReverseCarry> {
    let mut cur = first;
    peak.raise_word(cur.to_u128());
    let mut count: u64 = 1;
    if cur.is_one() {
        return Ok(ReverseOutcome::UnitCycle { peak });
    }
    if cur.rem3() == 0 {
        return Ok(ReverseOutcome::Converged { depth: 0, peak });
    }
    let mut tort = cur;
    let mut power: u64 = 1;
    let mut lam: u64 = 0;
    loop {
        if count == budget {
            return Ok(ReverseOutcome::Budget { peak });
        }
        let next = match cur.rem3() {
            2 => cur.div3().double_plus_one(),
            _ => match cur.div3().quad_plus_one() {
                Some(v) => v,
                None => {
                    return Err(ReverseCarry {
                        cur: cur.to_nat(),
                        tort: tort.to_nat(),
                        power,
                        lam,
                        count,
                        peak,
                    })
                }
            },
        };
        count += 1;
        peak.raise_word(next.to_u128());
        if next.is_one() {
            return Ok(ReverseOutcome::UnitCycle { peak });
        }
        if next.rem3() == 0 {
            return Ok(ReverseOutcome::Converged {
                depth: count - 1,
                peak,
            });
        }
        lam += 1;
        if next == tort {
            return Ok(ReverseOutcome::ForeignCycle { peak });
        }
        if lam == power {
            tort = next;
            power = power.saturating_mul(2);
            lam = 0;
        }
        cur = next;
    }
}

fn reverse_loop_big(
    mut cur: Nat,
    mut tort: Nat,
    mut power: u64,
    mut lam: u64,
    mut count: u64,
    mut peak: Peak,
    budget: u64,
) -> ReverseOutcome {
    loop {
        if count == budget {
            return ReverseOutcome::Budget { peak };
        }
        let k = &cur / 3u32;
        let next = if mod3(&cur) == 2 {
            2u32 * k + 1u32
        } else {
            4u32 * k + 1u32
        };
        count += 1;
        peak.raise_big(&next);
        if next.is_one() {
            return ReverseOutcome::UnitCycle { peak };
        }
        if mod3(&next) == 0 {
            return ReverseOutcome::Converged {
                depth: count - 1,
                peak,
            };
        }
        lam += 1;
        if next == tort {
            return ReverseOutcome::ForeignCycle { peak };
        }
        if lam == power {
            tort = next.clone();
            power = power.saturating_mul(2);
            lam = 0;
        }
        cur = next;
    }
}

fn start_reverse_big(first: Nat, mut peak: Peak, budget: u64) -> ReverseOutcome {
    peak.raise_big(&first);
    if first.is_one() {
        return ReverseOutcome::UnitCycle { peak };
    }
    if mod3(&first) == 0 {
        return ReverseOutcome::Converged { depth: 0, peak };
    }
    reverse_loop_big(first.clone(), first, 1, 0, 1, peak, budget)
}

fn reverse_widen(carry: ReverseCarry, budget: u64) -> ReverseOutcome {
    // No u128 re-entry: the wide state is not a fresh start, and the
    // big loop shares its exact step rule, so continue there.
    reverse_loop_big(
        carry.cur,
        carry.tort,
        carry.power,
        carry.lam,
        carry.count,
        carry.peak,
        budget,
    )
}

pub fn verify_reverse_u64(n: u64, budget: u64) -> ReverseOutcome {
    debug_assert!(n >= 1 && budget >= 1);
    if n % 2 == 1 {
        return match reverse_loop::<u64>(n, budget, Peak::Word(0)) {
            Ok(done) => done,
            Err(carry) => reverse_widen(carry, budget),
        };
    }
    if n.is_multiple_of(3) {
        // Doubling keeps the value ≡ 0 mod 3: the start is a 2^i·t term
        // past its own convergence point.
        let t = n >> n.trailing_zeros();
        return ReverseOutcome::Converged {
            depth: 0,
            peak: Peak::Word(t as u128),
        };
    }
    let first = if n % 3 == 1 {
        n.dec_div3()
    } else {
        n.div3().double_plus_one()
    };
    match reverse_loop::<u64>(first, budget, Peak::Word(0)) {
        Ok(done) => done,
        Err(carry) => reverse_widen(carry, budget),
    }
}

pub fn verify_reverse_nat(n: &Nat, budget: u64) -> ReverseOutcome {
    if let Some(w) = n.to_u64() {
        return verify_reverse_u64(w, budget);
    }
    let first_big: Nat;
    if n.bit(0) {
        first_big = n.clone();
    } else if mod3(n) == 0 {
        return ReverseOutcome::Converged {
            depth: 0,
            peak: peak_of(&odd_part(n)),
        };
    } else if mod3(n) == 1 {
        first_big = (n - 1u32) / 3u32;
    } else {
        first_big = 2u32 * (n / 3u32) + 1u32;
    }
    if let Some(w) = first_big.to_u128() {
        return match reverse_loop::<u128>(w, budget, Peak::Word(0)) {
            Ok(done) => done,
            Err(carry) => reverse_widen(carry, budget),
        };
    }
    start_reverse_big(first_big, Peak::Word(0), budget)
}

/// Pure big-integer route, for cross-checking the fast paths.
#[cfg_attr(not(test), allow(dead_code))]
pub fn verify_reverse_unbounded(n: &Nat, budget: u64) -> ReverseOutcome {
    let first: Nat;
    if n.bit(0) {
        first = n.clone();
    } else if mod3(n) == 0 {
        return ReverseOutcome::Converged {
            depth: 0,
            peak: peak_of(&odd_part(n)),
        };
    } else if mod3(n) == 1 {
        first = (n - 1u32) / 3u32;
    } else {
        first = 2u32 * (n / 3u32) + 1u32;
    }
    start_reverse_big(first, Peak::Word(0), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::forward_stats;
    use crate::reverse::reverse_sequence;
    use crate::types::{nat, StopReason};

    #[test]
    fn forward_matches_stats_engine() {
        for n in 1u64..=2_000 {
            let fast = verify_forward_u64(n, 1 << 16);
            let stats = forward_stats(&Nat::from(n), None).unwrap();
            match fast {
                ForwardOutcome::ReachedOne { steps, peak } => {
                    assert_eq!(Some(steps), stats.steps_to_one, "n = {n}");
                    assert_eq!(peak.to_nat(), stats.max_excursion, "n = {n}");
                }
                ForwardOutcome::Budget { .. } => panic!("n = {n} failed to converge"),
            }
        }
    }

    #[test]
    fn forward_fast_path_equals_unbounded() {
        for n in (1u64..50_000).step_by(7) {
            assert_eq!(
                verify_forward_u64(n, 1 << 16),
                verify_forward_unbounded(&Nat::from(n), 1 << 16),
                "n = {n}"
            );
        }
    }

    #[test]
    fn forward_promotion_is_exact() {
        // 3n+1 overflows u64 on the very first odd step.
        let near_max = (u64::MAX - 4) | 1;
        let fast = verify_forward_u64(near_max, 1 << 16);
        let slow = verify_forward_unbounded(&Nat::from(near_max), 1 << 16);
        assert_eq!(fast, slow);

        // And past u128, entering through the Nat dispatcher.
        let big = (Nat::from(1u32) << 200u32) - 7u32;
        assert_eq!(
            verify_forward_nat(&big, 1 << 16),
            verify_forward_unbounded(&big, 1 << 16)
        );
    }

    #[test]
    fn forward_budget_outcome() {
        let out = verify_forward_u64(27, 3);
        assert!(matches!(out, ForwardOutcome::Budget { .. }));
    }

    #[test]
    fn reverse_matches_sequence_engine() {
        for n in 1u64..=4_000 {
            let fast = verify_reverse_u64(n, 1 << 12);
            let trace = reverse_sequence(&Nat::from(n), 1 << 12).unwrap();
            match (&fast, trace.stop) {
                (ReverseOutcome::Converged { depth, .. }, StopReason::ReachedMultipleOf3) => {
                    assert_eq!(*depth, trace.depth(), "n = {n}");
                }
                (ReverseOutcome::UnitCycle { .. }, StopReason::CycleDetected) => {
                    assert_eq!(trace.odd_terms, vec![nat(1)], "n = {n}");
                }
                (ReverseOutcome::Budget { .. }, StopReason::BudgetExhausted) => {}
                other => panic!("n = {n}: kernel/engine disagree: {other:?}"),
            }
        }
    }

    #[test]
    fn reverse_fast_path_equals_unbounded() {
        for n in 2u64..30_000 {
            assert_eq!(
                verify_reverse_u64(n, 1 << 14),
                verify_reverse_unbounded(&Nat::from(n), 1 << 14),
                "n = {n}"
            );
        }
    }

    #[test]
    fn reverse_promotion_is_exact() {
        // Hunt near u64::MAX for starts whose walk overflows the narrow
        // step; equality with the unbounded route must hold regardless.
        for delta in 0u64..200 {
            let n = u64::MAX - delta;
            assert_eq!(
                verify_reverse_u64(n, 1 << 10),
                verify_reverse_unbounded(&Nat::from(n), 1 << 10),
                "n = u64::MAX - {delta}"
            );
        }
        let big = (Nat::from(1u32) << 150u32) + 5u32;
        assert_eq!(
            verify_reverse_nat(&big, 1 << 10),
            verify_reverse_unbounded(&big, 1 << 10)
        );
    }

    #[test]
    fn reverse_classifies_the_unit_cycle() {
        assert!(matches!(
            verify_reverse_u64(1, 16),
            ReverseOutcome::UnitCycle { .. }
        ));
        assert!(matches!(
            verify_reverse_u64(2, 16),
            ReverseOutcome::UnitCycle { .. }
        ));
        assert!(matches!(
            verify_reverse_u64(4, 16),
            ReverseOutcome::UnitCycle { .. }
        ));
        assert!(matches!(
            verify_reverse_u64(8, 16),
            ReverseOutcome::Converged { .. }
        ));
    }

    #[test]
    fn reverse_even_multiple_of_three_is_preconverged() {
        match verify_reverse_u64(24, 16) {
            ReverseOutcome::Converged { depth, peak } => {
                assert_eq!(depth, 0);
                assert_eq!(peak.to_nat(), nat(3));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn reverse_known_walk_depths() {
        match verify_reverse_u64(121, 64) {
            ReverseOutcome::Converged { depth, peak } => {
                assert_eq!(depth, 7);
                assert_eq!(peak.to_nat(), nat(161));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
        match verify_reverse_u64(9, 64) {
            ReverseOutcome::Converged { depth, .. } => assert_eq!(depth, 0),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
