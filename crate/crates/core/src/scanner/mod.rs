//! Parallel, checkpointed range verification.
//!
//! A job covers an inclusive range of starting numbers. The range is cut
//! into contiguous chunks; workers lease chunks through an atomic
//! counter and verify each number with the fixed-width kernels. Chunk
//! results merge with a commutative, order-insensitive operation and is
//! committed strictly in range order, so reports are identical for any
//! worker count, and checkpoints always describe a whole prefix of the
//! range. Anomalies stream to the output sink the moment their chunk
//! commits.

mod checkpoint;
mod kernel;

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT};

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nat_serde;
use crate::types::{Nat, StopReason};
use kernel::{ForwardOutcome, Peak, ReverseOutcome};

/// Numbers per work unit by default: 2^16.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// What a scan verifies for every number in its range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// The forward sequence reaches 1 within the odd-step budget.
    ForwardConvergence,
    /// The reverse walk reaches an odd multiple of 3 within the odd-term
    /// budget. The number 1 is excluded from this claim.
    ReverseConjecture,
}

impl ScanKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanKind::ForwardConvergence => "forward-convergence",
            ScanKind::ReverseConjecture => "reverse-conjecture",
        }
    }

    /// Default per-number odd-step budget: 2^16 forward, 2^17 reverse.
    /// These sit orders of magnitude above depths observed at desk scale
    /// and are plain engineering choices, tunable per job.
    pub fn default_budget(self) -> u64 {
        match self {
            ScanKind::ForwardConvergence => 1 << 16,
            ScanKind::ReverseConjecture => 1 << 17,
        }
    }
}

/// A range-verification job description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanJob {
    pub kind: ScanKind,
    #[serde(with = "nat_serde::decimal")]
    pub lo: Nat,
    #[serde(with = "nat_serde::decimal")]
    pub hi: Nat,
    /// Odd-step limit per number.
    pub budget: u64,
    pub chunk_size: u64,
    pub checkpoint_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
}

impl ScanJob {
    pub fn new(kind: ScanKind, lo: Nat, hi: Nat) -> ScanJob {
        ScanJob {
            kind,
            lo,
            hi,
            budget: kind.default_budget(),
            chunk_size: DEFAULT_CHUNK_SIZE,
            checkpoint_path: None,
            output_path: None,
        }
    }

    fn validate(&self) -> Result<(), ScanError> {
        if self.lo.is_zero() || self.lo > self.hi {
            return Err(ScanError::InvalidRange {
                lo: self.lo.clone(),
                hi: self.hi.clone(),
            });
        }
        if self.budget == 0 || self.chunk_size == 0 {
            return Err(ScanError::ZeroParameter);
        }
        Ok(())
    }

    /// Numbers in the range; rejects ranges past 2^64 numbers.
    fn range_len(&self) -> Result<u64, ScanError> {
        (&self.hi - &self.lo + 1u32)
            .to_u64()
            .ok_or(ScanError::RangeTooLarge)
    }

    fn chunk_lo(&self, idx: u64) -> Nat {
        &self.lo + Nat::from(idx) * self.chunk_size
    }

    fn chunk_hi(&self, idx: u64) -> Nat {
        let end = self.chunk_lo(idx) + (self.chunk_size - 1);
        end.min(self.hi.clone())
    }
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid scan range [{lo}, {hi}]")]
    InvalidRange { lo: Nat, hi: Nat },

    #[error("scan range holds more than 2^64 numbers")]
    RangeTooLarge,

    #[error("budget and chunk size must be at least 1")]
    ZeroParameter,

    #[error("checkpoint {}: {reason}", path.display())]
    CorruptCheckpoint { path: PathBuf, reason: String },

    #[error("checkpoint mismatch: {field} is {in_checkpoint} in the checkpoint but {requested} was requested")]
    ParameterMismatch {
        field: &'static str,
        in_checkpoint: String,
        requested: String,
    },

    #[error("pausing a scan requires a checkpoint path")]
    PauseNeedsCheckpoint,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A value maximum together with the smallest number attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatExtremum {
    #[serde(with = "nat_serde::decimal")]
    pub value: Nat,
    #[serde(with = "nat_serde::decimal")]
    pub witness: Nat,
}

/// A count maximum together with the smallest number attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountExtremum {
    pub value: u64,
    #[serde(with = "nat_serde::decimal")]
    pub witness: Nat,
}

/// A number that failed verification and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    #[serde(with = "nat_serde::decimal")]
    pub number: Nat,
    pub reason: StopReason,
}

/// Order-insensitive aggregate over any set of verified numbers.
///
/// `verified_count + failed.len() + excluded_one` accounts for every
/// number in the covered range exactly once. `unit_cycle` lists verified
/// numbers whose reverse walk fell into the known cycle at 1 (only 2 and
/// 4 are known); they are reported but are not anomalies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanAggregate {
    pub verified_count: u64,
    pub excluded_one: bool,
    pub failed: Vec<FailureRecord>,
    #[serde(with = "nat_serde::decimal_vec")]
    pub unit_cycle: Vec<Nat>,
    pub max_excursion: Option<NatExtremum>,
    pub max_steps: Option<CountExtremum>,
    pub max_reverse_depth: Option<CountExtremum>,
}

fn better_nat(a: Option<NatExtremum>, b: Option<NatExtremum>) -> Option<NatExtremum> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.value > x.value || (y.value == x.value && y.witness < x.witness) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

fn better_count(a: Option<CountExtremum>, b: Option<CountExtremum>) -> Option<CountExtremum> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.value > x.value || (y.value == x.value && y.witness < x.witness) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

fn merge_failures(a: Vec<FailureRecord>, b: Vec<FailureRecord>) -> Vec<FailureRecord> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (a.into_iter().peekable(), b.into_iter().peekable());
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => {
                if x.number <= y.number {
                    out.push(ia.next().unwrap());
                } else {
                    out.push(ib.next().unwrap());
                }
            }
            (Some(_), None) => out.push(ia.next().unwrap()),
            (None, Some(_)) => out.push(ib.next().unwrap()),
            (None, None) => return out,
        }
    }
}

fn merge_numbers(a: Vec<Nat>, b: Vec<Nat>) -> Vec<Nat> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (a.into_iter().peekable(), b.into_iter().peekable());
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => {
                if x <= y {
                    out.push(ia.next().unwrap());
                } else {
                    out.push(ib.next().unwrap());
                }
            }
            (Some(_), None) => out.push(ia.next().unwrap()),
            (None, Some(_)) => out.push(ib.next().unwrap()),
            (None, None) => return out,
        }
    }
}

impl ScanAggregate {
    /// Commutative, associative merge: counts add, failure and unit-cycle
    /// lists merge by number, maxima keep the larger value breaking ties
    /// toward the smaller witness.
    pub fn merge(self, other: ScanAggregate) -> ScanAggregate {
        ScanAggregate {
            verified_count: self.verified_count + other.verified_count,
            excluded_one: self.excluded_one || other.excluded_one,
            failed: merge_failures(self.failed, other.failed),
            unit_cycle: merge_numbers(self.unit_cycle, other.unit_cycle),
            max_excursion: better_nat(self.max_excursion, other.max_excursion),
            max_steps: better_count(self.max_steps, other.max_steps),
            max_reverse_depth: better_count(self.max_reverse_depth, other.max_reverse_depth),
        }
    }
}

/// Final result of a completed scan.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub job: ScanJob,
    pub workers: usize,
    pub aggregate: ScanAggregate,
    pub elapsed: Duration,
}

/// The deterministic part of a report: job parameters and results, with
/// run-environment fields (elapsed time, worker count, paths) left out.
/// Two runs of the same job serialize to identical canonical bytes no
/// matter how work was scheduled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub kind: ScanKind,
    #[serde(with = "nat_serde::decimal")]
    pub lo: Nat,
    #[serde(with = "nat_serde::decimal")]
    pub hi: Nat,
    pub budget: u64,
    pub chunk_size: u64,
    pub aggregate: ScanAggregate,
}

/// One anomaly, streamed as soon as its chunk commits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyRecord {
    pub record: String,
    pub kind: ScanKind,
    #[serde(with = "nat_serde::decimal")]
    pub number: Nat,
    pub reason: StopReason,
}

/// The closing record of a scan's output stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub record: String,
    pub kind: ScanKind,
    #[serde(with = "nat_serde::decimal")]
    pub lo: Nat,
    #[serde(with = "nat_serde::decimal")]
    pub hi: Nat,
    pub budget: u64,
    pub chunk_size: u64,
    pub verified_count: u64,
    pub excluded_one: bool,
    pub failed_count: u64,
    #[serde(with = "nat_serde::decimal_vec")]
    pub unit_cycle: Vec<Nat>,
    pub max_excursion: Option<NatExtremum>,
    pub max_steps: Option<CountExtremum>,
    pub max_reverse_depth: Option<CountExtremum>,
    pub elapsed_ms: u64,
    pub workers: u64,
}

impl ScanReport {
    pub fn canonical(&self) -> CanonicalReport {
        CanonicalReport {
            kind: self.job.kind,
            lo: self.job.lo.clone(),
            hi: self.job.hi.clone(),
            budget: self.job.budget,
            chunk_size: self.job.chunk_size,
            aggregate: self.aggregate.clone(),
        }
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.canonical()).expect("canonical report serializes")
    }

    pub fn summary_record(&self) -> SummaryRecord {
        SummaryRecord {
            record: "summary".to_string(),
            kind: self.job.kind,
            lo: self.job.lo.clone(),
            hi: self.job.hi.clone(),
            budget: self.job.budget,
            chunk_size: self.job.chunk_size,
            verified_count: self.aggregate.verified_count,
            excluded_one: self.aggregate.excluded_one,
            failed_count: self.aggregate.failed.len() as u64,
            unit_cycle: self.aggregate.unit_cycle.clone(),
            max_excursion: self.aggregate.max_excursion.clone(),
            max_steps: self.aggregate.max_steps.clone(),
            max_reverse_depth: self.aggregate.max_reverse_depth.clone(),
            elapsed_ms: self.elapsed.as_millis() as u64,
            workers: self.workers as u64,
        }
    }

    /// True when no number in the range failed verification.
    pub fn passed(&self) -> bool {
        self.aggregate.failed.is_empty()
    }
}

/// Result of a scan that may pause at a chunk boundary.
#[derive(Debug)]
#[allow(clippy::large_enum_variant)]
pub enum ScanOutcome {
    Complete(ScanReport),
    Paused(PausedScan),
}

/// State of a scan paused at a chunk boundary; the checkpoint holds
/// everything needed to resume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PausedScan {
    pub checkpoint_path: PathBuf,
    pub chunks_committed: u64,
    pub next_unprocessed: Nat,
}

// ---------------------------------------------------------------------
// per-chunk verification
// ---------------------------------------------------------------------

fn run_chunk(job: &ScanJob, idx: u64) -> ScanAggregate {
    let lo = job.chunk_lo(idx);
    let hi = job.chunk_hi(idx);
    match (lo.to_u64(), hi.to_u64()) {
        (Some(lo), Some(hi)) => run_chunk_fast(job.kind, lo, hi, job.budget),
        _ => run_chunk_big(job.kind, lo, hi, job.budget),
    }
}

fn run_chunk_fast(kind: ScanKind, lo: u64, hi: u64, budget: u64) -> ScanAggregate {
    let mut agg = ScanAggregate::default();
    // Chunk-local maxima stay in machine words; peaks past u128 are rare
    // enough to track separately (they always beat the word track).
    let mut exc_word: Option<(u128, u64)> = None;
    let mut exc_big: Option<(Nat, u64)> = None;
    let mut steps_max: Option<(u64, u64)> = None;
    let mut depth_max: Option<(u64, u64)> = None;

    let raise = |peak: Peak,
                     n: u64,
                     exc_word: &mut Option<(u128, u64)>,
                     exc_big: &mut Option<(Nat, u64)>| match peak {
        Peak::Word(v) => {
            if exc_word.is_none_or(|(best, _)| v > best) {
                *exc_word = Some((v, n));
            }
        }
        Peak::Big(b) => {
            if exc_big.as_ref().is_none_or(|(best, _)| &b > best) {
                *exc_big = Some((b, n));
            }
        }
    };

    for n in lo..=hi {
        match kind {
            ScanKind::ForwardConvergence => match kernel::verify_forward_u64(n, budget) {
                ForwardOutcome::ReachedOne { steps, peak } => {
                    agg.verified_count += 1;
                    if steps_max.is_none_or(|(best, _)| steps > best) {
                        steps_max = Some((steps, n));
                    }
                    raise(peak, n, &mut exc_word, &mut exc_big);
                }
                ForwardOutcome::Budget { peak } => {
                    agg.failed.push(FailureRecord {
                        number: Nat::from(n),
                        reason: StopReason::BudgetExhausted,
                    });
                    raise(peak, n, &mut exc_word, &mut exc_big);
                }
            },
            ScanKind::ReverseConjecture => {
                if n == 1 {
                    agg.excluded_one = true;
                    continue;
                }
                match kernel::verify_reverse_u64(n, budget) {
                    ReverseOutcome::Converged { depth, peak } => {
                        agg.verified_count += 1;
                        if depth_max.is_none_or(|(best, _)| depth > best) {
                            depth_max = Some((depth, n));
                        }
                        raise(peak, n, &mut exc_word, &mut exc_big);
                    }
                    ReverseOutcome::UnitCycle { peak } => {
                        agg.verified_count += 1;
                        agg.unit_cycle.push(Nat::from(n));
                        raise(peak, n, &mut exc_word, &mut exc_big);
                    }
                    ReverseOutcome::Budget { peak } => {
                        agg.failed.push(FailureRecord {
                            number: Nat::from(n),
                            reason: StopReason::BudgetExhausted,
                        });
                        raise(peak, n, &mut exc_word, &mut exc_big);
                    }
                    ReverseOutcome::ForeignCycle { peak } => {
                        agg.failed.push(FailureRecord {
                            number: Nat::from(n),
                            reason: StopReason::CycleDetected,
                        });
                        raise(peak, n, &mut exc_word, &mut exc_big);
                    }
                }
            }
        }
    }

    // A Big peak exceeds u128 by construction, so it dominates the word
    // track whenever present.
    agg.max_excursion = match (exc_big, exc_word) {
        (Some((value, witness)), _) => Some(NatExtremum {
            value,
            witness: Nat::from(witness),
        }),
        (None, Some((value, witness))) => Some(NatExtremum {
            value: Nat::from(value),
            witness: Nat::from(witness),
        }),
        (None, None) => None,
    };
    agg.max_steps = steps_max.map(|(value, witness)| CountExtremum {
        value,
        witness: Nat::from(witness),
    });
    agg.max_reverse_depth = depth_max.map(|(value, witness)| CountExtremum {
        value,
        witness: Nat::from(witness),
    });
    agg
}

fn run_chunk_big(kind: ScanKind, lo: Nat, hi: Nat, budget: u64) -> ScanAggregate {
    let mut agg = ScanAggregate::default();
    let mut exc: Option<NatExtremum> = None;
    let mut steps_max: Option<CountExtremum> = None;
    let mut depth_max: Option<CountExtremum> = None;

    let mut n = lo;
    while n <= hi {
        match kind {
            ScanKind::ForwardConvergence => match kernel::verify_forward_nat(&n, budget) {
                ForwardOutcome::ReachedOne { steps, peak } => {
                    agg.verified_count += 1;
                    steps_max = better_count(
                        steps_max,
                        Some(CountExtremum {
                            value: steps,
                            witness: n.clone(),
                        }),
                    );
                    exc = better_nat(
                        exc,
                        Some(NatExtremum {
                            value: peak.to_nat(),
                            witness: n.clone(),
                        }),
                    );
                }
                ForwardOutcome::Budget { peak } => {
                    agg.failed.push(FailureRecord {
                        number: n.clone(),
                        reason: StopReason::BudgetExhausted,
                    });
                    exc = better_nat(
                        exc,
                        Some(NatExtremum {
                            value: peak.to_nat(),
                            witness: n.clone(),
                        }),
                    );
                }
            },
            ScanKind::ReverseConjecture => {
                // 1 < 2^64 never reaches this path, so no exclusion here.
                let (outcome, reason) = match kernel::verify_reverse_nat(&n, budget) {
                    ReverseOutcome::Converged { depth, peak } => {
                        agg.verified_count += 1;
                        depth_max = better_count(
                            depth_max,
                            Some(CountExtremum {
                                value: depth,
                                witness: n.clone(),
                            }),
                        );
                        (peak, None)
                    }
                    ReverseOutcome::UnitCycle { peak } => {
                        agg.verified_count += 1;
                        agg.unit_cycle.push(n.clone());
                        (peak, None)
                    }
                    ReverseOutcome::Budget { peak } => (peak, Some(StopReason::BudgetExhausted)),
                    ReverseOutcome::ForeignCycle { peak } => {
                        (peak, Some(StopReason::CycleDetected))
                    }
                };
                if let Some(reason) = reason {
                    agg.failed.push(FailureRecord {
                        number: n.clone(),
                        reason,
                    });
                }
                exc = better_nat(
                    exc,
                    Some(NatExtremum {
                        value: outcome.to_nat(),
                        witness: n.clone(),
                    }),
                );
            }
        }
        n += 1u32;
    }

    agg.max_excursion = exc;
    agg.max_steps = steps_max;
    agg.max_reverse_depth = depth_max;
    agg
}

// ---------------------------------------------------------------------
// the drive loop
// ---------------------------------------------------------------------

struct Sink {
    out: Option<BufWriter<fs::File>>,
}

impl Sink {
    fn open(path: Option<&Path>, append: bool) -> Result<Sink, ScanError> {
        let out = match path {
            Some(p) => {
                let file = fs::OpenOptions::new()
                    .create(true)
                    .write(true)
                    .append(append)
                    .truncate(!append)
                    .open(p)?;
                Some(BufWriter::new(file))
            }
            None => None,
        };
        Ok(Sink { out })
    }

    fn anomaly(&mut self, kind: ScanKind, failure: &FailureRecord) -> Result<(), ScanError> {
        if let Some(out) = &mut self.out {
            let rec = AnomalyRecord {
                record: "anomaly".to_string(),
                kind,
                number: failure.number.clone(),
                reason: failure.reason,
            };
            serde_json::to_writer(&mut *out, &rec).map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
            // A potential counterexample must hit the disk now, not on
            // process exit.
            out.flush()?;
        }
        Ok(())
    }

    fn summary(&mut self, rec: &SummaryRecord) -> Result<(), ScanError> {
        if let Some(out) = &mut self.out {
            serde_json::to_writer(&mut *out, rec).map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
        Ok(())
    }
}

fn commit_chunk(
    job: &ScanJob,
    aggregate: &mut ScanAggregate,
    sink: &mut Sink,
    idx: u64,
    outcome: ScanAggregate,
) -> Result<(), ScanError> {
    for failure in &outcome.failed {
        sink.anomaly(job.kind, failure)?;
    }
    *aggregate = std::mem::take(aggregate).merge(outcome);
    if let Some(cp_path) = &job.checkpoint_path {
        let next = (job.chunk_hi(idx) + 1u32).min(&job.hi + 1u32);
        Checkpoint::new(job, next, aggregate.clone()).write_atomic(cp_path)?;
    }
    Ok(())
}

fn drive(
    job: &ScanJob,
    workers: usize,
    start_chunk: u64,
    seed: ScanAggregate,
    max_chunks: Option<u64>,
    append_output: bool,
) -> Result<ScanOutcome, ScanError> {
    let started = Instant::now();
    job.validate()?;
    let total = job.range_len()?;
    let chunk_count = total.div_ceil(job.chunk_size);
    let end_chunk = match max_chunks {
        Some(k) => chunk_count.min(start_chunk.saturating_add(k)),
        None => chunk_count,
    };
    let paused = end_chunk < chunk_count;
    if paused && job.checkpoint_path.is_none() {
        return Err(ScanError::PauseNeedsCheckpoint);
    }

    let mut sink = Sink::open(job.output_path.as_deref(), append_output)?;
    let mut aggregate = seed;

    if workers <= 1 {
        for idx in start_chunk..end_chunk {
            let outcome = run_chunk(job, idx);
            commit_chunk(job, &mut aggregate, &mut sink, idx, outcome)?;
        }
    } else {
        let next = AtomicU64::new(start_chunk);
        thread::scope(|scope| -> Result<(), ScanError> {
            let (tx, rx) = mpsc::channel::<(u64, ScanAggregate)>();
            for _ in 0..workers {
                let tx = tx.clone();
                let next = &next;
                scope.spawn(move || loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= end_chunk {
                        break;
                    }
                    let outcome = run_chunk(job, idx);
                    if tx.send((idx, outcome)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);

            // Commit strictly in range order so the aggregate, the output
            // stream, and every checkpoint describe a contiguous prefix.
            let mut pending: BTreeMap<u64, ScanAggregate> = BTreeMap::new();
            let mut expect = start_chunk;
            for (idx, outcome) in rx {
                pending.insert(idx, outcome);
                while let Some(ready) = pending.remove(&expect) {
                    commit_chunk(job, &mut aggregate, &mut sink, expect, ready)?;
                    expect += 1;
                }
            }
            debug_assert_eq!(expect, end_chunk);
            debug_assert!(pending.is_empty());
            Ok(())
        })?;
    }

    if paused {
        let next_unprocessed = job.chunk_lo(end_chunk);
        return Ok(ScanOutcome::Paused(PausedScan {
            checkpoint_path: job
                .checkpoint_path
                .clone()
                .expect("pause requires a checkpoint"),
            chunks_committed: end_chunk - start_chunk,
            next_unprocessed,
        }));
    }

    let report = ScanReport {
        job: job.clone(),
        workers: workers.max(1),
        aggregate,
        elapsed: started.elapsed(),
    };
    sink.summary(&report.summary_record())?;
    Ok(ScanOutcome::Complete(report))
}

/// Verifies every number in the job's range, using `workers` threads
/// (1 runs entirely on the calling thread).
pub fn scan(job: &ScanJob, workers: usize) -> Result<ScanReport, ScanError> {
    match drive(job, workers, 0, ScanAggregate::default(), None, false)? {
        ScanOutcome::Complete(report) => Ok(report),
        ScanOutcome::Paused(_) => unreachable!("unlimited scan cannot pause"),
    }
}

/// Like [`scan`] but stops after committing `max_chunks` chunks, leaving
/// a checkpoint to resume from. Useful for time-boxed runs; also how the
/// crash-safety differential is exercised deterministically.
pub fn scan_with_limit(
    job: &ScanJob,
    workers: usize,
    max_chunks: Option<u64>,
) -> Result<ScanOutcome, ScanError> {
    drive(job, workers, 0, ScanAggregate::default(), max_chunks, false)
}

/// Job parameters a resumed invocation supplies for cross-checking
/// against the checkpoint. Absent fields are taken from the checkpoint
/// unchecked; present ones must match it exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResumeRequest {
    pub kind: Option<ScanKind>,
    pub lo: Option<Nat>,
    pub hi: Option<Nat>,
    pub budget: Option<u64>,
    pub chunk_size: Option<u64>,
    pub output_path: Option<PathBuf>,
}

/// Continues a checkpointed scan to completion.
pub fn resume(
    checkpoint_path: &Path,
    request: &ResumeRequest,
    workers: usize,
) -> Result<ScanReport, ScanError> {
    match resume_with_limit(checkpoint_path, request, workers, None)? {
        ScanOutcome::Complete(report) => Ok(report),
        ScanOutcome::Paused(_) => unreachable!("unlimited resume cannot pause"),
    }
}

/// [`resume`] with the same pause knob as [`scan_with_limit`].
pub fn resume_with_limit(
    checkpoint_path: &Path,
    request: &ResumeRequest,
    workers: usize,
    max_chunks: Option<u64>,
) -> Result<ScanOutcome, ScanError> {
    let cp = Checkpoint::load(checkpoint_path)?;
    fn check<T: PartialEq + ToString>(
        field: &'static str,
        in_checkpoint: &T,
        requested: Option<&T>,
    ) -> Result<(), ScanError> {
        match requested {
            Some(want) if want != in_checkpoint => Err(ScanError::ParameterMismatch {
                field,
                in_checkpoint: in_checkpoint.to_string(),
                requested: want.to_string(),
            }),
            _ => Ok(()),
        }
    }
    check(
        "kind",
        &cp.kind.as_str().to_string(),
        request.kind.map(|k| k.as_str().to_string()).as_ref(),
    )?;
    check("lo", &cp.lo, request.lo.as_ref())?;
    check("hi", &cp.hi, request.hi.as_ref())?;
    check("budget", &cp.budget, request.budget.as_ref())?;
    check("chunk_size", &cp.chunk_size, request.chunk_size.as_ref())?;

    let job = ScanJob {
        kind: cp.kind,
        lo: cp.lo.clone(),
        hi: cp.hi.clone(),
        budget: cp.budget,
        chunk_size: cp.chunk_size,
        checkpoint_path: Some(checkpoint_path.to_path_buf()),
        output_path: request.output_path.clone(),
    };
    let done = (&cp.next_unprocessed - &cp.lo)
        .to_u64()
        .ok_or(ScanError::RangeTooLarge)?;
    let start_chunk = done.div_ceil(cp.chunk_size);
    drive(&job, workers, start_chunk, cp.aggregate, max_chunks, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::nat;

    fn job(kind: ScanKind, lo: u64, hi: u64) -> ScanJob {
        let mut j = ScanJob::new(kind, nat(lo as u128), nat(hi as u128));
        j.chunk_size = 1 << 10;
        j
    }

    #[test]
    fn forward_singleton_excursion_witness() {
        let report = scan(&job(ScanKind::ForwardConvergence, 27, 27), 1).unwrap();
        let exc = report.aggregate.max_excursion.unwrap();
        assert_eq!(exc.value, nat(9232));
        assert_eq!(exc.witness, nat(27));
        let steps = report.aggregate.max_steps.unwrap();
        assert_eq!(steps.value, 111);
        assert_eq!(report.aggregate.verified_count, 1);
    }

    #[test]
    fn forward_range_accounts_for_every_number() {
        let report = scan(&job(ScanKind::ForwardConvergence, 1, 50_000), 3).unwrap();
        assert_eq!(report.aggregate.verified_count, 50_000);
        assert!(report.aggregate.failed.is_empty());
        assert!(!report.aggregate.excluded_one);
        assert!(report.aggregate.max_reverse_depth.is_none());
    }

    #[test]
    fn reverse_range_excludes_one_and_notes_unit_cycle() {
        let report = scan(&job(ScanKind::ReverseConjecture, 1, 10_000), 2).unwrap();
        assert!(report.aggregate.excluded_one);
        assert_eq!(report.aggregate.unit_cycle, vec![nat(2), nat(4)]);
        assert_eq!(report.aggregate.verified_count, 9_999);
        assert!(report.aggregate.failed.is_empty());
        assert!(report.aggregate.max_reverse_depth.is_some());
        assert!(report.aggregate.max_steps.is_none());
    }

    #[test]
    fn reports_identical_across_worker_counts() {
        let j = job(ScanKind::ReverseConjecture, 2, 30_000);
        let canon: Vec<String> = [1usize, 2, 8]
            .iter()
            .map(|&w| scan(&j, w).unwrap().canonical_json())
            .collect();
        assert_eq!(canon[0], canon[1]);
        assert_eq!(canon[0], canon[2]);
    }

    #[test]
    fn budget_failures_are_reported_not_panicked() {
        // A one-odd-step budget cannot finish most forward runs.
        let mut j = job(ScanKind::ForwardConvergence, 3, 64);
        j.budget = 1;
        let report = scan(&j, 1).unwrap();
        assert!(!report.passed());
        let total = report.aggregate.verified_count + report.aggregate.failed.len() as u64;
        assert_eq!(total, 62);
        for f in &report.aggregate.failed {
            assert_eq!(f.reason, StopReason::BudgetExhausted);
        }
        // Powers of two converge with zero odd steps.
        assert!(report
            .aggregate
            .failed
            .iter()
            .all(|f| !crate::types::is_power_of_two(&f.number)));
    }

    #[test]
    fn merge_is_commutative_on_samples() {
        let a = run_chunk(&job(ScanKind::ReverseConjecture, 2, 5_000), 0);
        let b = run_chunk(&job(ScanKind::ReverseConjecture, 5_001, 9_000), 0);
        assert_eq!(
            a.clone().merge(b.clone()),
            b.merge(a)
        );
    }

    #[test]
    fn invalid_jobs_are_rejected() {
        let bad = ScanJob::new(ScanKind::ForwardConvergence, nat(10), nat(5));
        assert!(matches!(
            scan(&bad, 1),
            Err(ScanError::InvalidRange { .. })
        ));
        let zero = ScanJob::new(ScanKind::ForwardConvergence, nat(0), nat(5));
        assert!(matches!(
            scan(&zero, 1),
            Err(ScanError::InvalidRange { .. })
        ));
        let mut j = ScanJob::new(ScanKind::ForwardConvergence, nat(1), nat(5));
        j.budget = 0;
        assert!(matches!(scan(&j, 1), Err(ScanError::ZeroParameter)));
    }

    #[test]
    fn pause_and_resume_equals_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let mut j = job(ScanKind::ReverseConjecture, 2, 40_000);
        j.chunk_size = 1 << 12;
        let uninterrupted = scan(&j, 2).unwrap();

        let mut j2 = j.clone();
        j2.checkpoint_path = Some(dir.path().join("scan.ckpt"));
        let paused = match scan_with_limit(&j2, 2, Some(3)).unwrap() {
            ScanOutcome::Paused(p) => p,
            ScanOutcome::Complete(_) => panic!("expected a pause"),
        };
        assert_eq!(paused.chunks_committed, 3);
        assert_eq!(paused.next_unprocessed, nat(2) + nat(3) * nat(1 << 12));

        let resumed = resume(&paused.checkpoint_path, &ResumeRequest::default(), 2).unwrap();
        assert_eq!(resumed.canonical_json(), uninterrupted.canonical_json());
    }

    #[test]
    fn resume_on_completed_checkpoint_is_a_no_op() {
        let dir = tempfile::tempdir().unwrap();
        let mut j = job(ScanKind::ForwardConvergence, 1, 3_000);
        j.checkpoint_path = Some(dir.path().join("scan.ckpt"));
        let first = scan(&j, 1).unwrap();
        let again = resume(
            j.checkpoint_path.as_ref().unwrap(),
            &ResumeRequest::default(),
            1,
        )
        .unwrap();
        assert_eq!(first.canonical_json(), again.canonical_json());
    }

    #[test]
    fn resume_rejects_parameter_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let mut j = job(ScanKind::ReverseConjecture, 2, 4_000);
        j.checkpoint_path = Some(dir.path().join("scan.ckpt"));
        match scan_with_limit(&j, 1, Some(1)).unwrap() {
            ScanOutcome::Paused(_) => {}
            ScanOutcome::Complete(_) => panic!("expected a pause"),
        }
        let other = ResumeRequest {
            budget: Some(7),
            ..ResumeRequest::default()
        };
        assert!(matches!(
            resume(j.checkpoint_path.as_ref().unwrap(), &other, 1),
            Err(ScanError::ParameterMismatch { field: "budget", .. })
        ));
        // Matching partial parameters resume cleanly.
        let matching = ResumeRequest {
            lo: Some(nat(2)),
            chunk_size: Some(j.chunk_size),
            ..ResumeRequest::default()
        };
        let report = resume(j.checkpoint_path.as_ref().unwrap(), &matching, 1).unwrap();
        assert_eq!(report.aggregate.verified_count, 3_999);
    }

    #[test]
    fn pause_without_checkpoint_is_an_error() {
        let j = job(ScanKind::ForwardConvergence, 1, 100_000);
        assert!(matches!(
            scan_with_limit(&j, 1, Some(1)),
            Err(ScanError::PauseNeedsCheckpoint)
        ));
    }

    #[test]
    fn output_stream_has_anomalies_then_summary() {
        let dir = tempfile::tempdir().unwrap();
        let out_path = dir.path().join("records.jsonl");
        let mut j = job(ScanKind::ForwardConvergence, 3, 40);
        j.budget = 1;
        j.output_path = Some(out_path.clone());
        let report = scan(&j, 1).unwrap();

        let raw = std::fs::read_to_string(&out_path).unwrap();
        let lines: Vec<&str> = raw.lines().collect();
        assert_eq!(lines.len(), report.aggregate.failed.len() + 1);
        for (line, failure) in lines.iter().zip(&report.aggregate.failed) {
            let rec: AnomalyRecord = serde_json::from_str(line).unwrap();
            assert_eq!(rec.record, "anomaly");
            assert_eq!(rec.number, failure.number);
            assert_eq!(rec.reason, failure.reason);
        }
        let summary: SummaryRecord = serde_json::from_str(lines.last().unwrap()).unwrap();
        assert_eq!(summary.record, "summary");
        assert_eq!(summary.failed_count, report.aggregate.failed.len() as u64);
    }

    #[test]
    fn fast_paths_match_unbounded_reprocessing_on_a_sample() {
        // Deterministic xorshift picks ~1% of a wide span, including the
        // u64 overflow neighborhood.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..400 {
            let n = (rand() % 2_000_000) + 2;
            assert_eq!(
                kernel::verify_forward_u64(n, 1 << 16),
                kernel::verify_forward_unbounded(&Nat::from(n), 1 << 16),
                "forward n = {n}"
            );
            assert_eq!(
                kernel::verify_reverse_u64(n, 1 << 17),
                kernel::verify_reverse_unbounded(&Nat::from(n), 1 << 17),
                "reverse n = {n}"
            );
        }
        for _ in 0..50 {
            let n = u64::MAX - (rand() % 10_000);
            assert_eq!(
                kernel::verify_forward_u64(n, 1 << 16),
                kernel::verify_forward_unbounded(&Nat::from(n), 1 << 16),
                "forward n = {n}"
            );
            assert_eq!(
                kernel::verify_reverse_u64(n, 1 << 17),
                kernel::verify_reverse_unbounded(&Nat::from(n), 1 << 17),
                "reverse n = {n}"
            );
        }
    }

    #[test]
    fn big_range_chunks_work_past_u64() {
        let lo = Nat::from(u64::MAX) + 1u32;
        let hi = &lo + 40u32;
        let mut j = ScanJob::new(ScanKind::ReverseConjecture, lo, hi);
        j.chunk_size = 16;
        let report = scan(&j, 2).unwrap();
        assert_eq!(
            report.aggregate.verified_count + report.aggregate.failed.len() as u64,
            41
        );
    }
}
