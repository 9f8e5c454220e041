use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use collatz_cli::output::{
    csv_row, AnalysisRecord, Format, ReverseTraceRecord, SuiteRecord, TraceRecord,
};
use collatz_cli::{exit_code_for_stop, parse_nat, EXIT_FAILED, EXIT_IO, EXIT_USAGE};
use collatz_core::scanner::{
    self, ResumeRequest, ScanJob, ScanKind, ScanOutcome, ScanReport, ScanError,
};
use collatz_core::types::{is_odd, Nat, StopReason};
use collatz_core::{forward, reverse, structure, suites, tails, Error};

#[derive(Parser)]
#[command(
    name = "collatz",
    version,
    about = "Collatz sequences, reverse walks, tail analysis, and range scans",
    disable_help_subcommand = true
)]
struct Cli {
    /// Output format: text, json-records, or csv
    #[arg(
        long,
        short = 'f',
        global = true,
        value_enum,
        env = "COLLATZ_FORMAT",
        default_value = "text"
    )]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the forward sequence of N down to 1
    Seq {
        /// Starting number (decimal, or hex with an 0x prefix)
        n: String,
        /// Print only the odd terms
        #[arg(long)]
        odd_only: bool,
        /// Maximum number of terms (default 2^20)
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Print the reverse walk of N (or the complete orbit with --complete)
    Reverse {
        n: String,
        /// Maximum odd terms in the reverse walk (default 2^17)
        #[arg(long)]
        budget: Option<u64>,
        /// Print only the odd terms
        #[arg(long, conflicts_with = "complete")]
        odd_only: bool,
        /// Splice the reverse walk with the forward sequence (odd N only)
        #[arg(long)]
        complete: bool,
    },
    /// Tail decomposition, predicted iterates, and predecessor structure of odd N
    Analyze { n: String },
    /// Verify a range of starting numbers
    Scan {
        /// What to verify for every number
        kind: ScanKindArg,
        /// First number of the range (inclusive)
        #[arg(long)]
        from: Option<String>,
        /// Last number of the range (inclusive)
        #[arg(long)]
        to: Option<String>,
        /// Odd-step budget per number
        #[arg(long)]
        budget: Option<u64>,
        /// Worker threads (default: available parallelism)
        #[arg(long)]
        jobs: Option<usize>,
        /// Numbers per work chunk (default 2^16)
        #[arg(long)]
        chunk: Option<u64>,
        /// Checkpoint file for crash safety and resumption
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Stream anomaly and summary records to this file
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from the checkpoint instead of starting over
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Pause after committing this many chunks (requires --checkpoint)
        #[arg(long, requires = "checkpoint")]
        stop_after_chunks: Option<u64>,
    },
    /// Run a property suite and report pass/fail per property
    Verify {
        /// One of: lemma22, lemma24, thm25, thm34, cor36, lemma46, all
        #[arg(long)]
        suite: String,
        /// Rescale the sweep range
        #[arg(long)]
        max: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanKindArg {
    /// Forward sequences reach 1
    Converge,
    /// Reverse walks reach an odd multiple of 3
    Conjecture,
}

impl From<ScanKindArg> for ScanKind {
    fn from(arg: ScanKindArg) -> ScanKind {
        match arg {
            ScanKindArg::Converge => ScanKind::ForwardConvergence,
            ScanKindArg::Conjecture => ScanKind::ReverseConjecture,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    // Traces are built to be piped; die quietly on a closed pipe instead
    // of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let kind = err.kind();
            let _ = err.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    let format = cli.format;
    let result = match cli.command {
        Command::Seq { n, odd_only, limit } => cmd_seq(&n, odd_only, limit, format),
        Command::Reverse {
            n,
            budget,
            odd_only,
            complete,
        } => cmd_reverse(&n, budget, odd_only, complete, format),
        Command::Analyze { n } => cmd_analyze(&n, format),
        Command::Scan {
            kind,
            from,
            to,
            budget,
            jobs,
            chunk,
            checkpoint,
            out,
            resume,
            stop_after_chunks,
        } => cmd_scan(
            kind.into(),
            from,
            to,
            budget,
            jobs,
            chunk,
            checkpoint,
            out,
            resume,
            stop_after_chunks,
            format,
        ),
        Command::Verify { suite, max } => cmd_verify(&suite, max, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("collatz: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn require_nat(raw: &str) -> Result<Nat, Failure> {
    match parse_nat(raw) {
        Some(n) if n > Nat::default() => Ok(n),
        Some(_) => Err(Failure::usage("the starting number must be at least 1")),
        None => Err(Failure::usage(format!("not a nonnegative integer: {raw:?}"))),
    }
}

fn map_engine_error(err: Error) -> Failure {
    match err {
        Error::Unconverged { ref stop, .. } => Failure {
            code: exit_code_for_stop(*stop),
            message: err.to_string(),
        },
        other => Failure::usage(other.to_string()),
    }
}

fn print_trace_terms(terms: &[Nat], format: Format) {
    match format {
        Format::Text => {
            let line = terms
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!("{line}");
        }
        Format::Csv => {
            println!("index,value");
            for (i, t) in terms.iter().enumerate() {
                println!("{}", csv_row(&[i.to_string(), t.to_string()]));
            }
        }
        Format::JsonRecords => unreachable!("json traces print whole records"),
    }
}

fn cmd_seq(raw: &str, odd_only: bool, limit: Option<u64>, format: Format) -> CmdResult {
    let n = require_nat(raw)?;
    let trace = if odd_only {
        forward::odd_subsequence(&n, limit)
    } else {
        forward::collatz_sequence(&n, limit)
    }
    .map_err(map_engine_error)?;

    match format {
        Format::JsonRecords => {
            let rec = TraceRecord {
                record: "trace".into(),
                start: trace.start.clone(),
                odd_only: trace.odd_only,
                stop: trace.stop,
                terms: trace.terms.clone(),
            };
            println!("{}", serde_json::to_string(&rec).expect("record serializes"));
        }
        _ => print_trace_terms(&trace.terms, format),
    }
    if trace.stop == StopReason::BudgetExhausted {
        eprintln!("collatz: term budget exhausted before reaching 1");
    }
    Ok(exit_code_for_stop(trace.stop))
}

fn cmd_reverse(
    raw: &str,
    budget: Option<u64>,
    odd_only: bool,
    complete: bool,
    format: Format,
) -> CmdResult {
    let n = require_nat(raw)?;
    let budget = budget.unwrap_or(reverse::DEFAULT_REVERSE_BUDGET);

    if complete {
        if !is_odd(&n) {
            return Err(Failure::usage("--complete requires an odd starting number"));
        }
        let trace = reverse::complete_sequence(&n, budget).map_err(map_engine_error)?;
        match format {
            Format::JsonRecords => {
                let rec = TraceRecord {
                    record: "trace".into(),
                    start: trace.start.clone(),
                    odd_only: false,
                    stop: trace.stop,
                    terms: trace.terms.clone(),
                };
                println!("{}", serde_json::to_string(&rec).expect("record serializes"));
            }
            _ => print_trace_terms(&trace.terms, format),
        }
        return Ok(exit_code_for_stop(trace.stop));
    }

    let trace = reverse::reverse_sequence(&n, budget).map_err(map_engine_error)?;
    let shown = if odd_only {
        &trace.odd_terms
    } else {
        &trace.terms
    };
    match format {
        Format::JsonRecords => {
            let rec = ReverseTraceRecord {
                record: "reverse-trace".into(),
                start: trace.start.clone(),
                stop: trace.stop,
                converged_to: trace.converged_to.clone(),
                terms: trace.terms.clone(),
                odd_terms: trace.odd_terms.clone(),
            };
            println!("{}", serde_json::to_string(&rec).expect("record serializes"));
        }
        Format::Text => {
            let line = shown
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!("{line}");
            if let Some(t) = &trace.converged_to {
                println!("converged-to: {t}");
            }
        }
        Format::Csv => {
            println!("index,value");
            for (i, t) in shown.iter().enumerate() {
                println!("{}", csv_row(&[i.to_string(), t.to_string()]));
            }
            if let Some(t) = &trace.converged_to {
                println!("{}", csv_row(&["converged-to".to_string(), t.to_string()]));
            }
        }
    }
    match trace.stop {
        StopReason::BudgetExhausted => {
            eprintln!("collatz: odd-term budget exhausted before a multiple of 3")
        }
        StopReason::CycleDetected => eprintln!("collatz: cycle detected"),
        _ => {}
    }
    Ok(exit_code_for_stop(trace.stop))
}

fn cmd_analyze(raw: &str, format: Format) -> CmdResult {
    let n = require_nat(raw)?;
    if !is_odd(&n) {
        return Err(Failure::usage("analyze requires an odd number"));
    }

    let decomposition = tails::tail_decompose(&n).map_err(map_engine_error)?;
    let tail = decomposition.tail_length;
    let predicted = if tail >= 1 {
        tails::predicted_odd_iterates(&n).map_err(map_engine_error)?
    } else {
        Vec::new()
    };
    let witness = match tails::descent_witness(&n) {
        Ok((w, steps)) => Some((w, steps)),
        Err(Error::UnitInput) => None,
        Err(other) => return Err(map_engine_error(other)),
    };
    let base = match structure::predecessor_base(&n) {
        Ok(pb) => Some(pb.p),
        Err(Error::NoPredecessor(_)) => None,
        Err(other) => return Err(map_engine_error(other)),
    };
    let reduced = structure::reduce_to_multiple_of_3(&n).map_err(map_engine_error)?;

    match format {
        Format::JsonRecords => {
            let rec = AnalysisRecord {
                record: "analysis".into(),
                n: n.clone(),
                binary: format!("{n:b}"),
                tail_length: tail,
                high_exponents: decomposition.high_exponents.clone(),
                predicted_odd_iterates: predicted,
                descent_witness: witness.as_ref().map(|(w, _)| w.clone()),
                descent_steps: witness.as_ref().map(|(_, s)| *s),
                predecessor_base: base,
                reduce_to_multiple_of_3: reduced,
            };
            println!("{}", serde_json::to_string(&rec).expect("record serializes"));
        }
        Format::Text => {
            println!("n: {n}");
            println!("binary: {n:b}");
            println!("tail-length: {tail}");
            let exps = decomposition
                .high_exponents
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!(
                "high-exponents: {}",
                if exps.is_empty() { "-" } else { exps.as_str() }
            );
            if !predicted.is_empty() {
                let line = predicted
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("predicted-odd-iterates: {line}");
            }
            match &witness {
                Some((w, steps)) => {
                    println!("descent-witness: {w}");
                    println!("descent-steps: {steps}");
                }
                None => println!("descent-witness: none"),
            }
            match &base {
                Some(p) => println!("predecessor-base: {p}"),
                None => println!("predecessor-base: none (multiple of 3)"),
            }
            println!("reduce-to-multiple-of-3: {reduced}");
        }
        Format::Csv => {
            println!("field,value");
            let mut rows: Vec<(String, String)> = vec![
                ("n".into(), n.to_string()),
                ("binary".into(), format!("{n:b}")),
                ("tail-length".into(), tail.to_string()),
                (
                    "high-exponents".into(),
                    decomposition
                        .high_exponents
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
            ];
            if !predicted.is_empty() {
                rows.push((
                    "predicted-odd-iterates".into(),
                    predicted
                        .iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ));
            }
            if let Some((w, steps)) = &witness {
                rows.push(("descent-witness".into(), w.to_string()));
                rows.push(("descent-steps".into(), steps.to_string()));
            }
            rows.push((
                "predecessor-base".into(),
                base.as_ref().map_or("none".into(), |p| p.to_string()),
            ));
            rows.push(("reduce-to-multiple-of-3".into(), reduced.to_string()));
            for (k, v) in rows {
                println!("{}", csv_row(&[k, v]));
            }
        }
    }
    Ok(0)
}

fn map_scan_error(err: ScanError) -> Failure {
    let code = match &err {
        ScanError::Io(_) | ScanError::CorruptCheckpoint { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn print_scan_report(report: &ScanReport, format: Format) {
    match format {
        Format::JsonRecords => {
            for failure in &report.aggregate.failed {
                let rec = scanner::AnomalyRecord {
                    record: "anomaly".into(),
                    kind: report.job.kind,
                    number: failure.number.clone(),
                    reason: failure.reason,
                };
                println!("{}", serde_json::to_string(&rec).expect("record serializes"));
            }
            let summary = report.summary_record();
            println!(
                "{}",
                serde_json::to_string(&summary).expect("record serializes")
            );
        }
        Format::Text => {
            for failure in &report.aggregate.failed {
                println!("FAIL {} {}", failure.number, failure.reason);
            }
            let agg = &report.aggregate;
            println!("kind: {}", report.job.kind.as_str());
            println!("range: [{}, {}]", report.job.lo, report.job.hi);
            println!(
                "budget: {}  chunk: {}  workers: {}",
                report.job.budget, report.job.chunk_size, report.workers
            );
            println!(
                "verified: {}  failed: {}  excluded: {}",
                agg.verified_count,
                agg.failed.len(),
                u64::from(agg.excluded_one)
            );
            if agg.excluded_one {
                println!("note: 1 is outside the reverse-convergence claim and was skipped");
            }
            if !agg.unit_cycle.is_empty() {
                let list = agg
                    .unit_cycle
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("unit-cycle entrants: {list}");
            }
            if let Some(m) = &agg.max_excursion {
                println!("max-excursion: {} at {}", m.value, m.witness);
            }
            if let Some(m) = &agg.max_steps {
                println!("max-steps: {} at {}", m.value, m.witness);
            }
            if let Some(m) = &agg.max_reverse_depth {
                println!("max-reverse-depth: {} at {}", m.value, m.witness);
            }
            println!("elapsed-ms: {}", report.elapsed.as_millis());
        }
        Format::Csv => {
            for failure in &report.aggregate.failed {
                println!(
                    "{}",
                    csv_row(&[
                        "anomaly".to_string(),
                        failure.number.to_string(),
                        failure.reason.to_string(),
                    ])
                );
            }
            let agg = &report.aggregate;
            let mut rows: Vec<(String, String)> = vec![
                ("kind".into(), report.job.kind.as_str().into()),
                ("lo".into(), report.job.lo.to_string()),
                ("hi".into(), report.job.hi.to_string()),
                ("budget".into(), report.job.budget.to_string()),
                ("chunk".into(), report.job.chunk_size.to_string()),
                ("workers".into(), report.workers.to_string()),
                ("verified".into(), agg.verified_count.to_string()),
                ("failed".into(), agg.failed.len().to_string()),
                ("excluded".into(), u64::from(agg.excluded_one).to_string()),
                (
                    "unit-cycle".into(),
                    agg.unit_cycle
                        .iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
            ];
            if let Some(m) = &agg.max_excursion {
                rows.push(("max-excursion".into(), m.value.to_string()));
                rows.push(("max-excursion-witness".into(), m.witness.to_string()));
            }
            if let Some(m) = &agg.max_steps {
                rows.push(("max-steps".into(), m.value.to_string()));
                rows.push(("max-steps-witness".into(), m.witness.to_string()));
            }
            if let Some(m) = &agg.max_reverse_depth {
                rows.push(("max-reverse-depth".into(), m.value.to_string()));
                rows.push(("max-reverse-depth-witness".into(), m.witness.to_string()));
            }
            rows.push(("elapsed-ms".into(), report.elapsed.as_millis().to_string()));
            println!("field,value");
            for (k, v) in rows {
                println!("{}", csv_row(&[k, v]));
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    kind: ScanKind,
    from: Option<String>,
    to: Option<String>,
    budget: Option<u64>,
    jobs: Option<usize>,
    chunk: Option<u64>,
    checkpoint: Option<PathBuf>,
    out: Option<PathBuf>,
    resume: bool,
    stop_after_chunks: Option<u64>,
    format: Format,
) -> CmdResult {
    let workers = jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });

    let parse_bound = |raw: &Option<String>, name: &str| -> Result<Option<Nat>, Failure> {
        match raw {
            Some(text) => match parse_nat(text) {
                Some(v) => Ok(Some(v)),
                None => Err(Failure::usage(format!("--{name}: not an integer: {text:?}"))),
            },
            None => Ok(None),
        }
    };
    let lo = parse_bound(&from, "from")?;
    let hi = parse_bound(&to, "to")?;

    if resume {
        let request = ResumeRequest {
            kind: Some(kind),
            lo,
            hi,
            budget,
            chunk_size: chunk,
            output_path: out,
        };
        let path = checkpoint.expect("clap enforces --checkpoint with --resume");
        let outcome = scanner::resume_with_limit(&path, &request, workers, stop_after_chunks)
            .map_err(map_scan_error)?;
        return finish_scan(outcome, format);
    }

    let (lo, hi) = match (lo, hi) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Failure::usage("scan requires --from and --to (or --resume)")),
    };
    let mut job = ScanJob::new(kind, lo, hi);
    if let Some(b) = budget {
        job.budget = b;
    }
    if let Some(c) = chunk {
        job.chunk_size = c;
    }
    job.checkpoint_path = checkpoint;
    job.output_path = out;

    let outcome =
        scanner::scan_with_limit(&job, workers, stop_after_chunks).map_err(map_scan_error)?;
    finish_scan(outcome, format)
}

fn finish_scan(outcome: ScanOutcome, format: Format) -> CmdResult {
    match outcome {
        ScanOutcome::Complete(report) => {
            print_scan_report(&report, format);
            Ok(if report.passed() { 0 } else { EXIT_FAILED })
        }
        ScanOutcome::Paused(paused) => {
            eprintln!(
                "collatz: paused after {} chunks; next unprocessed {}; resume with --resume --checkpoint {}",
                paused.chunks_committed,
                paused.next_unprocessed,
                paused.checkpoint_path.display()
            );
            Ok(0)
        }
    }
}

fn cmd_verify(suite: &str, max: Option<u64>, format: Format) -> CmdResult {
    let reports = suites::run(suite, max)
        .ok_or_else(|| Failure::usage(format!("unknown suite {suite:?}; expected one of lemma22, lemma24, thm25, thm34, cor36, lemma46, all")))?;
    let mut all_pass = true;
    match format {
        Format::JsonRecords => {
            for r in &reports {
                all_pass &= r.passed();
                let rec = SuiteRecord {
                    record: "suite".into(),
                    name: r.name.to_string(),
                    checked: r.checked,
                    pass: r.passed(),
                    failures: r.failures.clone(),
                };
                println!("{}", serde_json::to_string(&rec).expect("record serializes"));
            }
        }
        Format::Text => {
            for r in &reports {
                all_pass &= r.passed();
                let verdict = if r.passed() { "pass" } else { "FAIL" };
                println!("{}: {} ({} checks)", r.name, verdict, r.checked);
                for f in &r.failures {
                    println!("  counterexample: {f}");
                }
            }
        }
        Format::Csv => {
            println!("suite,checked,pass,failures");
            for r in &reports {
                all_pass &= r.passed();
                println!(
                    "{}",
                    csv_row(&[
                        r.name.to_string(),
                        r.checked.to_string(),
                        r.passed().to_string(),
                        r.failures.join("; "),
                    ])
                );
            }
        }
    }
    Ok(if all_pass { 0 } else { EXIT_FAILED })
}
