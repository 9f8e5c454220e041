//! Workload helpers shared by the benchmark targets.

use collatz_core::types::Nat;

/// Odd numbers spread across [3, 2·count+3), as `Nat`s.
pub fn odd_workload(count: u64) -> Vec<Nat> {
    (0..count).map(|i| Nat::from(2 * i + 3)).collect()
}

/// A deterministic pseudo-random 64-bit workload.
pub fn scattered_workload(count: u64) -> Vec<u64> {
    let mut state = 0x853c49e6748fea9bu64;
    (0..count)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % (1 << 40)) | 1
        })
        .collect()
}
