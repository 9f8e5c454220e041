//! Checkpoint persistence: a single JSON document, written atomically by
//! renaming a fully synced temporary sibling over the target.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ScanAggregate, ScanError, ScanJob, ScanKind};
use crate::nat_serde;
use crate::types::Nat;

/// Format tag embedded in every checkpoint file.
pub const CHECKPOINT_FORMAT: &str = "collatz-scan-checkpoint/1";

/// On-disk scan state: job parameters, the lowest unprocessed number, and
/// the aggregate over the committed chunk prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub kind: ScanKind,
    #[serde(with = "nat_serde::decimal")]
    pub lo: Nat,
    #[serde(with = "nat_serde::decimal")]
    pub hi: Nat,
    pub budget: u64,
    pub chunk_size: u64,
    #[serde(with = "nat_serde::decimal")]
    pub next_unprocessed: Nat,
    pub aggregate: ScanAggregate,
}

impl Checkpoint {
    pub fn new(job: &ScanJob, next_unprocessed: Nat, aggregate: ScanAggregate) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            kind: job.kind,
            lo: job.lo.clone(),
            hi: job.hi.clone(),
            budget: job.budget,
            chunk_size: job.chunk_size,
            next_unprocessed,
            aggregate,
        }
    }

    /// Serialize and atomically replace `path`.
    pub fn write_atomic(&self, path: &Path) -> Result<(), ScanError> {
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "checkpoint".to_string());
        let tmp: PathBuf = path.with_file_name(format!("{file_name}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, self).map_err(std::io::Error::other)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Load and validate structure; the caller checks job parameters.
    pub fn load(path: &Path) -> Result<Checkpoint, ScanError> {
        let corrupt = |reason: String| ScanError::CorruptCheckpoint {
            path: path.to_path_buf(),
            reason,
        };
        let raw = fs::read_to_string(path)?;
        let cp: Checkpoint =
            serde_json::from_str(&raw).map_err(|e| corrupt(format!("unparseable: {e}")))?;
        if cp.format != CHECKPOINT_FORMAT {
            return Err(corrupt(format!(
                "unsupported format tag {:?} (expected {CHECKPOINT_FORMAT:?})",
                cp.format
            )));
        }
        if cp.lo > cp.hi || cp.next_unprocessed < cp.lo {
            return Err(corrupt("inconsistent range bounds".to_string()));
        }
        if cp.next_unprocessed > &cp.hi + 1u32 {
            return Err(corrupt(
                "next_unprocessed lies beyond the end of the range".to_string(),
            ));
        }
        if cp.budget == 0 || cp.chunk_size == 0 {
            return Err(corrupt("zero budget or chunk size".to_string()));
        }
        // Commits happen only at whole-chunk boundaries (or completion).
        let offset = &cp.next_unprocessed - &cp.lo;
        let aligned = (&offset % cp.chunk_size) == Nat::default();
        let complete = cp.next_unprocessed == &cp.hi + 1u32;
        if !aligned && !complete {
            return Err(corrupt(format!(
                "next_unprocessed {} is not at a chunk boundary",
                cp.next_unprocessed
            )));
        }
        Ok(cp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::nat;

    fn sample_job() -> ScanJob {
        ScanJob::new(ScanKind::ReverseConjecture, nat(2), nat(1000))
    }

    #[test]
    fn round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let cp = Checkpoint::new(&sample_job(), nat(2), ScanAggregate::default());
        cp.write_atomic(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), cp);
        // No temporary residue.
        assert!(!path.with_file_name("scan.ckpt.tmp").exists());
    }

    #[test]
    fn rejects_garbage_and_bad_tags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");

        std::fs::write(&path, "not json").unwrap();
        assert!(matches!(
            Checkpoint::load(&path),
            Err(ScanError::CorruptCheckpoint { .. })
        ));

        let mut cp = Checkpoint::new(&sample_job(), nat(2), ScanAggregate::default());
        cp.format = "collatz-scan-checkpoint/99".to_string();
        let raw = serde_json::to_string(&cp).unwrap();
        std::fs::write(&path, raw).unwrap();
        assert!(matches!(
            Checkpoint::load(&path),
            Err(ScanError::CorruptCheckpoint { .. })
        ));
    }

    #[test]
    fn rejects_unaligned_progress() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let mut job = sample_job();
        job.chunk_size = 64;
        let cp = Checkpoint::new(&job, nat(7), ScanAggregate::default());
        cp.write_atomic(&path).unwrap();
        assert!(matches!(
            Checkpoint::load(&path),
            Err(ScanError::CorruptCheckpoint { .. })
        ));
    }
}
