// SPDX-License-Identifier: Apache-2.0

//! Session persistence.
//!
//! A session is an append-only sequence of [`LogRecord`]s. The current
//! state is whatever replaying them produces, so a store only has to
//! append, replay and list.
//!
//! [`FileStore`] writes one file per session. Each record is a single line
//!
//! ```text
//! <byte length of json> <first 16 hex chars of sha256(json)> <json>\n
//! ```
//!
//! A line that is cut short or fails its checksum at the very end of the
//! file is the remains of an interrupted append: replay drops it and the
//! next append truncates it away. The same damage anywhere else means the
//! file was tampered with and replay fails.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogRecord {
    SessionCreated {
        template: String,
        data: String,
        #[serde(default)]
        annotations: Vec<String>,
    },
    Submission {
        annotator_id: String,
        /// Canonical annotation file.
        annotations: String,
        hash: String,
    },
    Completion {
        annotator_id: String,
        code: String,
        issued_at: String,
    },
    Closed,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` already exists")]
    Exists(String),
    #[error("session log `{session}` is corrupt at byte {offset}: {reason}")]
    Corrupt {
        session: String,
        offset: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub trait SessionStore: Send + Sync {
    /// Start a new log whose first record is `first`.
    fn create(&self, session: &str, first: &LogRecord) -> Result<(), StoreError>;
    /// Durably append to an existing log. Returns only after the record is
    /// persisted.
    fn append(&self, session: &str, record: &LogRecord) -> Result<(), StoreError>;
    fn replay(&self, session: &str) -> Result<Vec<LogRecord>, StoreError>;
    fn list(&self) -> Result<Vec<String>, StoreError>;
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    logs: Mutex<BTreeMap<String, Vec<LogRecord>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SessionStore for MemoryStore {
    fn create(&self, session: &str, first: &LogRecord) -> Result<(), StoreError> {
        let mut logs = self.logs.lock();
        if logs.contains_key(session) {
            return Err(StoreError::Exists(session.into()));
        }
        logs.insert(session.into(), vec![first.clone()]);
        Ok(())
    }

    fn append(&self, session: &str, record: &LogRecord) -> Result<(), StoreError> {
        self.logs
            .lock()
            .get_mut(session)
            .ok_or_else(|| StoreError::UnknownSession(session.into()))?
            .push(record.clone());
        Ok(())
    }

    fn replay(&self, session: &str) -> Result<Vec<LogRecord>, StoreError> {
        self.logs
            .lock()
            .get(session)
            .cloned()
            .ok_or_else(|| StoreError::UnknownSession(session.into()))
    }

    fn list(&self) -> Result<Vec<String>, StoreError> {
        Ok(self.logs.lock().keys().cloned().collect())
    }
}

const CHECK_LEN: usize = 16;
const EXTENSION: &str = "log";

pub fn encode_record(record: &LogRecord) -> Vec<u8> {
    let json = serde_json::to_string(record).expect("records always serialize");
    let check = &hex::encode(Sha256::digest(json.as_bytes()))[..CHECK_LEN];
    format!("{} {check} {json}\n", json.len()).into_bytes()
}

/// Result of scanning a log: the intact records and the byte length they
/// occupy. Anything after `valid_len` is a torn tail.
#[derive(Debug)]
pub struct Scan {
    pub records: Vec<LogRecord>,
    pub valid_len: usize,
}

pub fn scan_log(session: &str, bytes: &[u8]) -> Result<Scan, StoreError> {
    let mut records = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        match decode_at(&bytes[pos..]) {
            Ok((record, used)) => {
                records.push(record);
                pos += used;
            }
            Err(reason) => {
                // Damage is only acceptable in the final, unterminated
                // record left by an interrupted write.
                let rest = &bytes[pos..];
                let terminated = rest
                    .iter()
                    .position(|&b| b == b'\n')
                    .is_some_and(|i| i + 1 < rest.len());
                if terminated {
                    return Err(StoreError::Corrupt {
                        session: session.into(),
                        offset: pos,
                        reason,
                    });
                }
                break;
            }
        }
    }
    Ok(Scan {
        records,
        valid_len: pos,
    })
}

fn decode_at(bytes: &[u8]) -> Result<(LogRecord, usize), String> {
    let sp1 = bytes
        .iter()
        .position(|&b| b == b' ')
        .ok_or("missing length")?;
    let len: usize = std::str::from_utf8(&bytes[..sp1])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or("bad length field")?;
    let check_start = sp1 + 1;
    let json_start = check_start + CHECK_LEN + 1;
    let end = json_start + len;
    if bytes.len() < end + 1 {
        return Err("record is truncated".into());
    }
    if bytes[json_start - 1] != b' ' || bytes[end] != b'\n' {
        return Err("bad record framing".into());
    }
    let json = &bytes[json_start..end];
    let check = &hex::encode(Sha256::digest(json))[..CHECK_LEN];
    if check.as_bytes() != &bytes[check_start..check_start + CHECK_LEN] {
        return Err("checksum mismatch".into());
    }
    let record = serde_json::from_slice(json).map_err(|e| format!("undecodable record: {e}"))?;
    Ok((record, end + 1))
}

/// One log file per session under a root directory.
#[derive(Debug)]
pub struct FileStore {
    root: PathBuf,
    writers: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    /// Sessions whose tail has been checked since this process started.
    clean: Mutex<HashSet<String>>,
}

impl FileStore {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            writers: Mutex::default(),
            clean: Mutex::default(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn log_path(&self, session: &str) -> PathBuf {
        self.root.join(format!("{session}.{EXTENSION}"))
    }

    fn writer(&self, session: &str) -> Arc<Mutex<()>> {
        self.writers
            .lock()
            .entry(session.to_string())
            .or_default()
            .clone()
    }

    fn sync_root(&self) -> io::Result<()> {
        #[cfg(unix)]
        File::open(&self.root)?.sync_all()?;
        Ok(())
    }
}

impl SessionStore for FileStore {
    fn create(&self, session: &str, first: &LogRecord) -> Result<(), StoreError> {
        let lock = self.writer(session);
        let _guard = lock.lock();
        let mut f = match OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(self.log_path(session))
        {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                return Err(StoreError::Exists(session.into()))
            }
            Err(e) => return Err(e.into()),
        };
        f.write_all(&encode_record(first))?;
        f.sync_all()?;
        self.sync_root()?;
        self.clean.lock().insert(session.to_string());
        Ok(())
    }

    fn append(&self, session: &str, record: &LogRecord) -> Result<(), StoreError> {
        let lock = self.writer(session);
        let _guard = lock.lock();
        let path = self.log_path(session);
        let mut f = match OpenOptions::new().read(true).write(true).open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::UnknownSession(session.into()))
            }
            Err(e) => return Err(e.into()),
        };
        if !self.clean.lock().contains(session) {
            let bytes = fs::read(&path)?;
            let scan = scan_log(session, &bytes)?;
            if scan.valid_len < bytes.len() {
                tracing::warn!(
                    session,
                    dropped = bytes.len() - scan.valid_len,
                    "truncating torn log tail"
                );
                f.set_len(scan.valid_len as u64)?;
            }
            self.clean.lock().insert(session.to_string());
        }
        let mut f = {
            use std::io::Seek;
            f.seek(io::SeekFrom::End(0))?;
            f
        };
        f.write_all(&encode_record(record))?;
        f.sync_data()?;
        Ok(())
    }

    fn replay(&self, session: &str) -> Result<Vec<LogRecord>, StoreError> {
        let bytes = match fs::read(self.log_path(session)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::UnknownSession(session.into()))
            }
            Err(e) => return Err(e.into()),
        };
        Ok(scan_log(session, &bytes)?.records)
    }

    fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == EXTENSION) {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    out.push(stem.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }
}
