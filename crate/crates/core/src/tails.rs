//! Binary tail analysis.
//!
//! The *tail* of an odd number is its maximal low block of one-bits
//! `2^n + … + 2 + 1`; `n` is the tail length. While the tail is nonempty
//! the next odd term is (3a+1)/2, a rise, and the first `n` odd iterates
//! have the closed form `3^i·(a+1)/2^i − 1`, each shortening the tail by
//! one. The n-th iterate has tail length 0 and the sequence
//! falls there, so no Collatz sequence increases monotonically.

use crate::error::Error;
use crate::types::{is_even, trailing_ones, Nat};
use num_traits::One;

/// An odd number split as `Σ 2^{i_j} + (2^{tail_length+1} − 1)` with every
/// high exponent `i_j > tail_length + 1`, listed in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailDecomposition {
    pub a: Nat,
    pub tail_length: u64,
    pub high_exponents: Vec<u64>,
}

impl TailDecomposition {
    /// Rebuilds the number from the pieces; equals `a` by construction.
    pub fn reconstruct(&self) -> Nat {
        let mut v = crate::types::pow2(self.tail_length + 1) - 1u32;
        for &e in &self.high_exponents {
            v += crate::types::pow2(e);
        }
        v
    }
}

fn check_odd(a: &Nat) -> Result<(), Error> {
    use num_traits::Zero;
    if a.is_zero() {
        return Err(Error::Zero);
    }
    if is_even(a) {
        return Err(Error::Even(a.clone()));
    }
    Ok(())
}

/// Length of the tail of odd `a`: the number of trailing one-bits minus
/// one.
pub fn tail_length(a: &Nat) -> Result<u64, Error> {
    check_odd(a)?;
    Ok(trailing_ones(a) - 1)
}

/// The unique split of odd `a` into high bits and its all-ones tail.
pub fn tail_decompose(a: &Nat) -> Result<TailDecomposition, Error> {
    let n = tail_length(a)?;
    // a + 1 = Σ 2^{i_j} + 2^{n+1}, so the high exponents are the set bits
    // of a+1 above n+1.
    let high = (a + 1u32) - crate::types::pow2(n + 1);
    let mut high_exponents = Vec::new();
    let bits = high.bits();
    for e in (0..bits).rev() {
        if high.bit(e) {
            high_exponents.push(e);
        }
    }
    debug_assert!(high_exponents.iter().all(|&e| e > n + 1));
    Ok(TailDecomposition {
        a: a.clone(),
        tail_length: n,
        high_exponents,
    })
}

/// The first `n = tail_length(a)` odd iterates after `a`, in closed form:
/// `3^i·(a+1)/2^i − 1` for i = 1..n. Requires a nonzero tail.
pub fn predicted_odd_iterates(a: &Nat) -> Result<Vec<Nat>, Error> {
    let n = tail_length(a)?;
    if n == 0 {
        return Err(Error::ZeroTail(a.clone()));
    }
    // 2^{n+1} divides a+1, so each of the n halvings below is exact.
    let mut m = a + 1u32;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        m = (3u32 * m) >> 1;
        out.push(&m - 1u32);
    }
    Ok(out)
}

/// The odd term at which the sequence of `a` is guaranteed to fall, and
/// its odd-step distance from `a`: `a` itself for tail length 0,
/// otherwise the n-th predicted iterate. The witness always has tail
/// length 0.
pub fn descent_witness(a: &Nat) -> Result<(Nat, u64), Error> {
    check_odd(a)?;
    if a.is_one() {
        return Err(Error::UnitInput);
    }
    let n = tail_length(a)?;
    if n == 0 {
        return Ok((a.clone(), 0));
    }
    let mut m = a + 1u32;
    for _ in 0..n {
        m = (3u32 * m) >> 1;
    }
    let witness = m - 1u32;
    debug_assert_eq!(trailing_ones(&witness), 1);
    Ok((witness, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::next_odd;
    use crate::types::{nat, pow2};
    use proptest::prelude::*;

    #[test]
    fn tail_length_examples() {
        assert_eq!(tail_length(&nat(27)).unwrap(), 1);
        assert_eq!(tail_length(&nat(161)).unwrap(), 0);
        assert_eq!(tail_length(&nat(31)).unwrap(), 4);
        assert_eq!(tail_length(&nat(8)), Err(Error::Even(nat(8))));
    }

    #[test]
    fn decompose_examples() {
        let d27 = tail_decompose(&nat(27)).unwrap();
        assert_eq!(d27.high_exponents, vec![4, 3]);
        assert_eq!(d27.tail_length, 1);

        let d31 = tail_decompose(&nat(31)).unwrap();
        assert!(d31.high_exponents.is_empty());
        assert_eq!(d31.tail_length, 4);

        let d1 = tail_decompose(&nat(1)).unwrap();
        assert!(d1.high_exponents.is_empty());
        assert_eq!(d1.tail_length, 0);
    }

    #[test]
    fn predicted_iterates_examples() {
        assert_eq!(
            predicted_odd_iterates(&nat(319)).unwrap(),
            [479u32, 719, 1079, 1619, 2429].map(Nat::from).to_vec()
        );
        assert_eq!(predicted_odd_iterates(&nat(27)).unwrap(), vec![nat(41)]);
        assert_eq!(
            predicted_odd_iterates(&nat(7)).unwrap(),
            vec![nat(11), nat(17)]
        );
        assert_eq!(
            predicted_odd_iterates(&nat(5)),
            Err(Error::ZeroTail(nat(5)))
        );
    }

    #[test]
    fn descent_witness_examples() {
        assert_eq!(descent_witness(&nat(27)).unwrap(), (nat(41), 1));
        assert_eq!(descent_witness(&nat(319)).unwrap(), (nat(2429), 5));
        assert_eq!(descent_witness(&nat(5)).unwrap(), (nat(5), 0));
        assert_eq!(descent_witness(&nat(1)), Err(Error::UnitInput));
    }

    #[test]
    fn descent_witness_really_descends() {
        for a in (3u32..4000).step_by(2) {
            let a = Nat::from(a);
            let (w, steps) = descent_witness(&a).unwrap();
            assert_eq!(tail_length(&w).unwrap(), 0, "a = {a}");
            assert!(next_odd(&w).unwrap() < w, "a = {a}");
            assert_eq!(steps, tail_length(&a).unwrap());
        }
    }

    // (3·(2^{n+1} − 1) + 1) / 2 written out bit by bit: the doubled-and-
    // carried tail is 2^{n+1} + 2^{n-1} + … + 2 + 1.
    #[test]
    fn halved_triple_of_all_ones_identity() {
        for n in 1u64..=62 {
            let all_ones = pow2(n + 1) - 1u32;
            let lhs = (3u32 * all_ones + 1u32) >> 1;
            let mut rhs = pow2(n + 1);
            for i in 0..n {
                rhs += pow2(i);
            }
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    proptest! {
        // The decomposition rebuilds its input and orders exponents.
        #[test]
        fn decomposition_reconstructs(a in prop::num::u128::ANY) {
            let a = Nat::from(a | 1);
            let d = tail_decompose(&a).unwrap();
            prop_assert_eq!(d.reconstruct(), a);
            for w in d.high_exponents.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
            for &e in &d.high_exponents {
                prop_assert!(e > d.tail_length + 1);
            }
        }

        // Rise exactly when the tail is nonempty.
        #[test]
        fn rise_iff_nonzero_tail(a in 1u64..u64::MAX / 4) {
            let a = Nat::from(a | 1);
            prop_assume!(!a.is_one());
            let rises = next_odd(&a).unwrap() > a;
            prop_assert_eq!(rises, tail_length(&a).unwrap() >= 1);
        }

        // Closed form matches actual iteration and the tail shrinks by
        // one per step.
        #[test]
        fn predicted_iterates_match_iteration(a in 1u64..u64::MAX / 4) {
            let a = Nat::from(a | 1);
            let n = tail_length(&a).unwrap();
            prop_assume!(n >= 1);
            let predicted = predicted_odd_iterates(&a).unwrap();
            let mut cur = a;
            for (i, p) in predicted.iter().enumerate() {
                cur = next_odd(&cur).unwrap();
                prop_assert_eq!(&cur, p);
                prop_assert_eq!(tail_length(p).unwrap(), n - 1 - i as u64);
            }
        }
    }
}
