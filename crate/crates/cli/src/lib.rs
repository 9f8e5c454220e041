//! Shared pieces of the `collatz` binary: output records, formats, exit
//! codes, and number parsing. Lives in a library so integration tests can
//! exercise the exact mappings the binary uses.

pub mod output;

use collatz_core::types::{Nat, StopReason};
use num_traits::Num;

/// Documented exit codes: 0 for a converged trace, 2 when a budget ran
/// out, 3 when a cycle was detected. (1 is reserved for scans with
/// failures, 64 for usage errors, 74 for I/O errors.)
pub fn exit_code_for_stop(stop: StopReason) -> u8 {
    match stop {
        StopReason::ReachedOne | StopReason::ReachedMultipleOf3 => 0,
        StopReason::BudgetExhausted => 2,
        StopReason::CycleDetected => 3,
        // Not a trace outcome; anything mapping here is a misuse.
        StopReason::NoPredecessor => 1,
    }
}

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

/// Unbounded decimal, or hex with an 0x prefix.
pub fn parse_nat(raw: &str) -> Option<Nat> {
    let s = raw.trim();
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Nat::from_str_radix(hex, 16).ok()
    } else if s.chars().all(|c| c.is_ascii_digit()) && !s.is_empty() {
        s.parse().ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_a_function_of_the_stop_reason() {
        assert_eq!(exit_code_for_stop(StopReason::ReachedOne), 0);
        assert_eq!(exit_code_for_stop(StopReason::ReachedMultipleOf3), 0);
        assert_eq!(exit_code_for_stop(StopReason::BudgetExhausted), 2);
        assert_eq!(exit_code_for_stop(StopReason::CycleDetected), 3);
    }

    #[test]
    fn parses_decimal_and_hex() {
        assert_eq!(parse_nat("27"), Some(Nat::from(27u32)));
        assert_eq!(parse_nat("0x13f"), Some(Nat::from(319u32)));
        assert_eq!(parse_nat("0X1B"), Some(Nat::from(27u32)));
        assert_eq!(
            parse_nat("340282366920938463463374607431768211456"),
            Some(Nat::from(1u8) << 128u32)
        );
        assert_eq!(parse_nat("-3"), None);
        assert_eq!(parse_nat("12.5"), None);
        assert_eq!(parse_nat(""), None);
        assert_eq!(parse_nat("0x"), None);
    }
}
