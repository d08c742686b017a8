//! Machine-readable pass/fail reporting shared by the verification
//! suites and the CLI. One JSON object per case, schema version 1.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub schema: u32,
    pub suite: String,
    pub case: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub cases: Vec<CaseReport>,
}

impl Report {
    pub fn new() -> Self {
        Report { cases: Vec::new() }
    }

    pub fn record(&mut self, suite: &str, case: &str, ok: bool, detail: impl Into<String>) {
        self.cases.push(CaseReport {
            schema: 1,
            suite: suite.to_string(),
            case: case.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        });
    }

    pub fn skip(&mut self, suite: &str, case: &str, detail: impl Into<String>) {
        self.cases.push(CaseReport {
            schema: 1,
            suite: suite.to_string(),
            case: case.to_string(),
            status: Status::Skip,
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.cases.extend(other.cases);
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }

    /// One JSON object per line, in recorded (canonical) order.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for case in &self.cases {
            out.push_str(&serde_json::to_string(case).expect("report serializes"));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for case in &self.cases {
            let tag = match case.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            out.push_str(&format!("[{}] {}: {}", tag, case.suite, case.case));
            if !case.detail.is_empty() {
                out.push_str(&format!(" ({})", case.detail));
            }
            out.push('\n');
        }
        out
    }
}
