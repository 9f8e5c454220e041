//! Runnable property suites.
//!
//! Each suite sweeps a configurable range with exact arithmetic and
//! returns what it checked plus any counterexamples (capped, so a broken
//! build does not flood the caller). The CLI exposes them under the
//! stable names lemma22, lemma24, thm25, thm34, cor36, lemma46.

use crate::forward::next_odd;
use crate::reverse::reverse_odd_step;
use crate::structure::{jump, jump_height_from, predecessor_base};
use crate::tails::{descent_witness, predicted_odd_iterates, tail_length};
use crate::types::{e_value, mod3, pow4, Nat};

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checked: u64,
    pub failures: Vec<String>,
}

const MAX_REPORTED_FAILURES: usize = 8;

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < MAX_REPORTED_FAILURES {
            self.failures.push(msg);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Stable suite names accepted by `run`.
pub const SUITE_NAMES: [&str; 6] = ["lemma22", "lemma24", "thm25", "thm34", "cor36", "lemma46"];

/// Runs the named suite (or every suite for "all"). `max` rescales the
/// sweep; `None` uses each suite's default range. Unknown names return
/// `None`.
pub fn run(name: &str, max: Option<u64>) -> Option<Vec<SuiteReport>> {
    match name {
        "lemma22" => Some(vec![e_number_identities(max.unwrap_or(512))]),
        "lemma24" => Some(vec![jump_product_identity(200, 64)]),
        "thm25" => Some(vec![predecessor_characterization(max.unwrap_or(100_000))]),
        "thm34" => Some(vec![tail_closed_form(max.unwrap_or(1_000_000))]),
        "cor36" => Some(vec![descent_within_tail_steps(max.unwrap_or(1_000_000))]),
        "lemma46" => Some(vec![reverse_residue_descent(max.unwrap_or(1_000_000))]),
        "all" => Some(vec![
            e_number_identities(max.unwrap_or(512)),
            jump_product_identity(200, 64),
            predecessor_characterization(max.unwrap_or(100_000)),
            tail_closed_form(max.unwrap_or(1_000_000)),
            descent_within_tail_steps(max.unwrap_or(1_000_000)),
            reverse_residue_descent(max.unwrap_or(1_000_000)),
        ]),
        _ => None,
    }
}

/// lemma22: 4^n = 3·e(n−1) + 1 and e(n) = 4·e(n−1) + 1 for n up to
/// `max_n`.
pub fn e_number_identities(max_n: u64) -> SuiteReport {
    let mut report = SuiteReport::new("lemma22");
    let mut prev = Nat::default();
    for n in 0..=max_n {
        report.checked += 1;
        let e = e_value(n as i64);
        if pow4(n) != 3u32 * &prev + 1u32 {
            report.fail(format!("4^{n} != 3*e({}) + 1", n as i64 - 1));
        }
        if e != 4u32 * &prev + 1u32 {
            report.fail(format!("e({n}) breaks the recurrence"));
        }
        prev = e;
    }
    report
}

/// Deterministic xorshift for reproducible random sweeps.
struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }
}

/// lemma24: 3·jump(b0, n) + 1 = 4^n·(3·b0 + 1) for random odd b0 below
/// 2^128 and every height up to `max_height`.
pub fn jump_product_identity(samples: u64, max_height: u64) -> SuiteReport {
    let mut report = SuiteReport::new("lemma24");
    let mut rng = XorShift(0x2545f4914f6cdd1d);
    for _ in 0..samples {
        let b0: Nat = (Nat::from(rng.next()) << 64u32 | Nat::from(rng.next())) | Nat::from(1u32);
        for n in 0..=max_height {
            report.checked += 1;
            let lhs = 3u32 * jump(&b0, n).expect("odd base") + 1u32;
            let rhs = pow4(n) * (3u32 * &b0 + 1u32);
            if lhs != rhs {
                report.fail(format!("b0 = {b0}, height {n}"));
            }
        }
    }
    report
}

/// thm25, in four sweeps. Soundness: every jump from the base of b
/// steps forward to b. Completeness: the actual predecessor of every
/// odd a is in the jump set of its base. Minimality: that base is the
/// smallest predecessor. Residue: no multiple of 3 ever follows an odd
/// number.
pub fn predecessor_characterization(max: u64) -> SuiteReport {
    let mut report = SuiteReport::new("thm25");

    let sound_max = (max / 10).clamp(1_000, 10_000);
    let mut b = Nat::from(1u32);
    while b <= Nat::from(sound_max) {
        if mod3(&b) != 0 {
            let base = predecessor_base(&b).expect("b not divisible by 3").p;
            for n in 0..=6u64 {
                report.checked += 1;
                let a = jump(&base, n).expect("odd base");
                match next_odd(&a) {
                    Ok(next) if next == b => {}
                    other => report.fail(format!("jump({base}, {n}) -> {other:?}, wanted {b}")),
                }
            }
        }
        b += 2u32;
    }

    let mut a = Nat::from(3u32);
    while a <= Nat::from(max) {
        report.checked += 1;
        let b = next_odd(&a).expect("odd a");
        match predecessor_base(&b) {
            Err(e) => report.fail(format!("next_odd({a}) = {b} has no base: {e}")),
            Ok(pb) => {
                // completeness
                if jump_height_from(&a, &pb.p).expect("odd inputs").is_none() {
                    report.fail(format!("{a} is not a jump from the base {} of {b}", pb.p));
                }
                // minimality
                if pb.p > a {
                    report.fail(format!("base {} of {b} exceeds its predecessor {a}", pb.p));
                }
            }
        }
        a += 2u32;
    }

    // residue claim, swept over odd a up to 10·max (cheap)
    let mut a = Nat::from(1u32);
    let residue_max = max.saturating_mul(10);
    while a <= Nat::from(residue_max) {
        report.checked += 1;
        let b = next_odd(&a).expect("odd a");
        if mod3(&b) == 0 {
            report.fail(format!("next_odd({a}) = {b} is divisible by 3"));
        }
        a += 2u32;
    }

    report
}

/// thm34: the closed-form iterates match real iteration, tails shrink by
/// one per step, and the walk rises exactly when the tail is nonempty.
pub fn tail_closed_form(max: u64) -> SuiteReport {
    let mut report = SuiteReport::new("thm34");
    let mut a = Nat::from(3u32);
    while a <= Nat::from(max) {
        report.checked += 1;
        let n = tail_length(&a).expect("odd a");

        let rises = next_odd(&a).expect("odd a") > a;
        if rises != (n >= 1) {
            report.fail(format!("rise/fall law breaks at {a} (tail {n})"));
        }

        if n >= 1 {
            let predicted = predicted_odd_iterates(&a).expect("tail >= 1");
            let mut cur = a.clone();
            for (i, p) in predicted.iter().enumerate() {
                cur = next_odd(&cur).expect("odd");
                if &cur != p {
                    report.fail(format!("iterate {} of {a}: predicted {p}, got {cur}", i + 1));
                    break;
                }
                let t = tail_length(p).expect("odd");
                if t != n - 1 - i as u64 {
                    report.fail(format!(
                        "tail of iterate {} of {a} is {t}, expected {}",
                        i + 1,
                        n - 1 - i as u64
                    ));
                    break;
                }
            }
        }
        a += 2u32;
    }
    report
}

/// cor36: within tail_length(a) + 1 odd steps the walk strictly
/// decreases; the descent witness has tail 0 and falls.
pub fn descent_within_tail_steps(max: u64) -> SuiteReport {
    let mut report = SuiteReport::new("cor36");
    let mut a = Nat::from(3u32);
    while a <= Nat::from(max) {
        report.checked += 1;
        let (witness, steps) = descent_witness(&a).expect("odd a > 1");
        if tail_length(&witness) != Ok(0) {
            report.fail(format!("witness {witness} of {a} has a nonzero tail"));
        } else if next_odd(&witness).expect("odd") >= witness {
            report.fail(format!("no descent at witness {witness} of {a}"));
        } else if steps != tail_length(&a).expect("odd") {
            report.fail(format!("witness distance for {a} is {steps}"));
        } else {
            // The witness really is the steps-th odd successor, so the
            // subsequence decreased within tail+1 odd steps.
            let mut cur = a.clone();
            for _ in 0..steps {
                cur = next_odd(&cur).expect("odd");
            }
            if cur != witness {
                report.fail(format!("witness {witness} of {a} is off the orbit"));
            }
        }
        a += 2u32;
    }
    report
}

/// lemma46: from any odd start not divisible by 3, the reverse odd walk
/// reaches a term not ≡ 2 mod 3, strictly decreasing until it does.
pub fn reverse_residue_descent(max: u64) -> SuiteReport {
    let mut report = SuiteReport::new("lemma46");
    let mut a = Nat::from(5u32);
    while a <= Nat::from(max) {
        if mod3(&a) != 0 {
            report.checked += 1;
            let mut cur = a.clone();
            loop {
                let next = reverse_odd_step(&cur).expect("not a multiple of 3");
                if mod3(&cur) == 2 && next >= cur {
                    report.fail(format!("no strict decrease at {cur} (start {a})"));
                    break;
                }
                if mod3(&next) != 2 {
                    break;
                }
                cur = next;
            }
        }
        a += 2u32;
    }
    report
}
