//! Stage reports: a fixed header followed by `[section]` blocks of
//! `key = value` lines, ending with the stage result.

use std::fmt::{Display, Write as _};
use std::path::{Path, PathBuf};

use crate::{Error, Result};

pub const FORMAT_VERSION: &str = "antilde-report-1";

#[derive(Clone, Debug)]
pub struct Header {
    pub config: String,
    pub seed: u64,
    pub checksum: String,
}

#[derive(Debug)]
pub struct Report {
    stage: &'static str,
    body: String,
    failures: usize,
}

impl Report {
    pub fn new(stage: &'static str, header: &Header) -> Self {
        let mut body = String::new();
        let _ = writeln!(body, "format-version = {FORMAT_VERSION}");
        let _ = writeln!(body, "stage = {stage}");
        let _ = writeln!(body, "config = {}", header.config);
        let _ = writeln!(body, "seed = {}", header.seed);
        let _ = writeln!(body, "geometry-checksum = {}", header.checksum);
        Self {
            stage,
            body,
            failures: 0,
        }
    }

    pub fn section(&mut self, name: &str) {
        let _ = write!(self.body, "\n[{name}]\n");
    }

    pub fn kv(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.body, "{key} = {value}");
    }

    /// Records an assertion; failures flip the stage result.
    pub fn check(&mut self, key: &str, ok: bool, detail: impl Display) {
        if !ok {
            self.failures += 1;
        }
        let status = if ok { "pass" } else { "FAIL" };
        let detail = detail.to_string();
        if detail.is_empty() {
            self.kv(key, status);
        } else {
            self.kv(key, format!("{status} ({detail})"));
        }
    }

    pub fn fail(&mut self, key: &str, detail: impl Display) {
        self.check(key, false, detail);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn stage(&self) -> &'static str {
        self.stage
    }

    /// Writes `<dir>/<stage>.report` and returns its path and the result.
    pub fn finish(mut self, dir: &Path) -> Result<(PathBuf, bool)> {
        let passed = self.passed();
        self.section("result");
        self.kv("failures", self.failures);
        self.kv("status", if passed { "pass" } else { "FAIL" });
        let path = dir.join(format!("{}.report", self.stage));
        write_file(&path, &self.body)?;
        Ok((path, passed))
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
