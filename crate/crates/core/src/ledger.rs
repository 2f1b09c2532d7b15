//! Append-only record of certified bounds.
//!
//! One entry per line, tab separated: `timestamp`, the bound record's
//! `key=value` fields, and the command that reproduces it. Lines starting
//! with `#` are comments. Every append (and every load) enforces
//! `max(lower) < min(upper)`; a violation means some pipeline is wrong.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::certify::{pentagon_bound, read_certificate, verify_certificate};
use crate::error::{Error, Result};
use crate::optimize::{replay_upper, BoundKind, BoundRecord};
use crate::scalar::fmt_ratio;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub record: BoundRecord,
    pub replay: String,
}

impl LedgerEntry {
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.timestamp, self.record.to_line(), self.replay)
    }

    fn parse(line: &str, lineno: usize) -> Result<Self> {
        let mut parts = line.splitn(3, '\t');
        let (Some(ts), Some(rec), Some(replay)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(lineno, "expected timestamp, record and replay command separated by tabs"));
        };
        let timestamp = ts.trim().parse().map_err(|_| Error::parse(lineno, format!("bad timestamp {ts:?}")))?;
        let record = BoundRecord::from_line(rec).map_err(|e| Error::parse(lineno, e.to_string()))?;
        Ok(LedgerEntry { timestamp, record, replay: replay.trim().to_string() })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Ledger {
    path: Option<PathBuf>,
    entries: Vec<LedgerEntry>,
}

impl Ledger {
    /// A ledger that is never written to disk.
    pub fn in_memory() -> Self {
        Ledger::default()
    }

    /// Load `path`, or start empty if it does not exist yet.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut ledger = Ledger { path: Some(path.clone()), entries: Vec::new() };
        if !path.exists() {
            return Ok(ledger);
        }
        let reader = BufReader::new(std::fs::File::open(&path)?);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let entry = LedgerEntry::parse(&line, i + 1)?;
            ledger.check(&entry.record)?;
            ledger.entries.push(entry);
        }
        Ok(ledger)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    fn best(&self, kind: BoundKind) -> Option<&BoundRecord> {
        let records = self.entries.iter().map(|e| &e.record).filter(|r| r.direction == kind);
        match kind {
            BoundKind::Lower => records.max_by(|a, b| a.value.cmp(&b.value)),
            BoundKind::Upper => records.min_by(|a, b| a.value.cmp(&b.value)),
        }
    }

    pub fn best_lower(&self) -> Option<&BoundRecord> {
        self.best(BoundKind::Lower)
    }

    pub fn best_upper(&self) -> Option<&BoundRecord> {
        self.best(BoundKind::Upper)
    }

    /// `(max lower, min upper)` when both sides have records.
    pub fn sandwich(&self) -> Option<(Rational, Rational)> {
        Some((self.best_lower()?.value.clone(), self.best_upper()?.value.clone()))
    }

    /// Whether `record` can join the ledger without breaking the sandwich.
    pub fn check(&self, record: &BoundRecord) -> Result<()> {
        let conflict = match record.direction {
            BoundKind::Lower => self.best_upper().filter(|u| record.value >= u.value),
            BoundKind::Upper => self.best_lower().filter(|l| record.value <= l.value),
        };
        match conflict {
            None => Ok(()),
            Some(other) => Err(Error::Consistency(format!(
                "ledger sandwich broken: new {} bound {} ({}) against existing {} bound {} ({})",
                record.direction,
                fmt_ratio(&record.value),
                record.to_line(),
                other.direction,
                fmt_ratio(&other.value),
                other.to_line()
            ))),
        }
    }

    /// Check, then persist one entry. The file is opened in append mode per
    /// call, so a crash never truncates earlier lines.
    pub fn append(&mut self, record: BoundRecord, replay: impl Into<String>) -> Result<&LedgerEntry> {
        self.check(&record)?;
        let replay = replay.into().replace(['\t', '\n'], " ");
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let entry = LedgerEntry { timestamp, record, replay };
        if let Some(path) = &self.path {
            let fresh = !path.exists();
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            if fresh {
                writeln!(file, "# tab separated: timestamp, bound record, replay command")?;
            }
            writeln!(file, "{}", entry.to_line())?;
            file.flush()?;
        }
        self.entries.push(entry);
        Ok(self.entries.last().expect("just pushed"))
    }
}

/// Re-derive an entry from its witness.
///
/// Upper records recount their coloring file. Lower records re-verify their
/// certificate file (the pentagon record is rebuilt from scratch) and must
/// not claim more than the certificate proves.
pub fn replay_entry(entry: &LedgerEntry) -> Result<()> {
    let record = &entry.record;
    match record.direction {
        BoundKind::Upper => replay_upper(record),
        BoundKind::Lower => {
            let proved = match record.witness_path.as_deref() {
                None if record.method == "pentagon" => pentagon_bound()?.value,
                None => return Err(Error::invalid("lower bound record has no certificate")),
                Some(path) => {
                    let cert = read_certificate(BufReader::new(std::fs::File::open(path)?))?;
                    verify_certificate(&cert).map_err(|r| Error::Consistency(format!("{path}: {r}")))?.bound
                }
            };
            if proved < record.value {
                return Err(Error::Consistency(format!(
                    "certificate proves {} but the record claims {}",
                    fmt_ratio(&proved),
                    fmt_ratio(&record.value)
                )));
            }
            Ok(())
        }
    }
}
