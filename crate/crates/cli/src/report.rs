//! The JSON report. Field order is fixed by the struct layout and every
//! collection is a Vec in computation order, so equal inputs serialize to
//! equal bytes. Timings are not part of the report.

use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Suite};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: Option<String>) -> Self {
        Check { name: name.into(), status: if pass { Status::Pass } else { Status::Fail }, detail }
    }

    pub fn inconclusive(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Inconclusive, detail: Some(reason.into()) }
    }
}

/// One table row. `position` is a homological position, a cohomological
/// degree k or a vertex, depending on `item`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub suite: Suite,
    pub item: String,
    pub position: Option<i64>,
    pub internal_degree: Option<i64>,
    pub rank: i64,
    pub expected: Option<i64>,
    pub strategy: String,
    pub certificate: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub status: Status,
    /// Set for every inconclusive or failing suite.
    pub reason: Option<String>,
    pub checks: Vec<Check>,
    pub records: Vec<Record>,
}

impl SuiteReport {
    pub fn from_checks(suite: Suite, checks: Vec<Check>, records: Vec<Record>) -> Self {
        let status = checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
        let reason = match status {
            Status::Pass => None,
            s => Some(
                checks
                    .iter()
                    .filter(|c| c.status == s)
                    .map(|c| match &c.detail {
                        Some(d) => format!("{}: {d}", c.name),
                        None => c.name.clone(),
                    })
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
        };
        SuiteReport { suite, status, reason, checks, records }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn records_for(&self, item: &str) -> std::vec::IntoIter<&Record> {
        self.records.iter().filter(|r| r.item == item).collect::<Vec<_>>().into_iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// sha256 of the canonical text of the presentation.
    pub algebroid_hash: String,
    pub algebroid: String,
    pub config: RunConfig,
    pub status: Status,
    pub failed: Vec<Suite>,
    pub inconclusive: Vec<Suite>,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn suite(&self, s: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|r| r.suite == s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
