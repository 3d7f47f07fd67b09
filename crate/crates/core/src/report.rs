//! Pass/fail check lists rendered as TSV with a `#` metadata header.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, suite: &str, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push(Check { suite: suite.into(), name: name.into(), status, detail: detail.into() });
    }

    pub fn check(&mut self, suite: &str, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.push(suite, name, Status::from_bool(ok), detail);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {}\t{}", clean(k), clean(v));
        }
        out.push_str("suite\tcheck\tstatus\tdetail\n");
        for c in &self.checks {
            let _ =
                writeln!(out, "{}\t{}\t{}\t{}", clean(&c.suite), clean(&c.name), c.status.as_str(), clean(&c.detail));
        }
        out
    }

    /// Only the failing rows, same format.
    pub fn failures_tsv(&self) -> String {
        let mut out = String::from("suite\tcheck\tstatus\tdetail\n");
        for c in self.failures() {
            let _ =
                writeln!(out, "{}\t{}\t{}\t{}", clean(&c.suite), clean(&c.name), c.status.as_str(), clean(&c.detail));
        }
        out
    }
}
