use crate::types::{Nat, StopReason};
use thiserror::Error;

/// Errors raised by the sequence engines. All of them are precondition
/// violations or a reverse phase that stopped without converging; the
/// engines themselves never panic on valid input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be a positive integer")]
    Zero,

    #[error("{0} is even; this operation is defined on odd numbers")]
    Even(Nat),

    #[error("1 is the terminal odd value; this operation needs a number greater than 1")]
    UnitInput,

    #[error("{0} is divisible by 3; no odd number can precede it")]
    NoPredecessor(Nat),

    #[error("{0} has tail length 0; there are no predicted iterates")]
    ZeroTail(Nat),

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("reverse phase of {start} stopped without converging: {stop}")]
    Unconverged { start: Nat, stop: StopReason },
}
