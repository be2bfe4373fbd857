//! Verification reports, the command output envelope, and CSV rendering.

use std::io::Write;

use mirrorcount_core::instance::{CountRecord, InstanceKey};
use mirrorcount_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ENGINE_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Formula counts against enumeration.
    #[serde(rename = "oracle")]
    Oracle,
    #[serde(rename = "equal")]
    Equal,
    #[serde(rename = "cong1")]
    Cong1,
    #[serde(rename = "cong2X")]
    Cong2X,
    #[serde(rename = "cong2Y")]
    Cong2Y,
    #[serde(rename = "crt")]
    Crt,
    #[serde(rename = "lemmaE1")]
    LemmaE1,
    #[serde(rename = "group_orders")]
    GroupOrders,
    #[serde(rename = "quot")]
    Quot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// The hypothesis gate did not hold; nothing was asserted.
    Excluded,
    /// The case did not fit the configured budget.
    Budget,
    Fail,
}

impl Verdict {
    pub fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// The verdict recorded when a computation errors out.
    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::BoundExceeded { .. } | Error::PrecisionBudgetExceeded { .. } => Verdict::Budget,
            _ => Verdict::Fail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<InstanceKey>,
    pub verdict: Verdict,
    pub values: Value,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub excluded: usize,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub grid: String,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(theorem: TheoremId, grid: impl Into<String>) -> Self {
        VerificationReport {
            theorem,
            grid: grid.into(),
            cases: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn push(&mut self, case: impl Into<String>, key: Option<InstanceKey>, verdict: Verdict, values: Value) {
        match verdict {
            Verdict::Pass => self.summary.pass += 1,
            Verdict::Fail => self.summary.fail += 1,
            Verdict::Excluded => self.summary.excluded += 1,
            Verdict::Budget => self.summary.budget += 1,
        }
        self.cases.push(CaseResult {
            case: case.into(),
            key,
            verdict,
            values,
        });
    }

    pub fn push_error(&mut self, case: impl Into<String>, key: Option<InstanceKey>, e: &Error) {
        self.push(case, key, Verdict::of_error(e), serde_json::json!({ "error": e.to_string() }));
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

/// Exit status for a set of reports: 1 on any failure, else 3 on any budget
/// refusal, else 0.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    let s = reports.iter().fold(Summary::default(), |acc, r| Summary {
        pass: acc.pass + r.summary.pass,
        fail: acc.fail + r.summary.fail,
        excluded: acc.excluded + r.summary.excluded,
        budget: acc.budget + r.summary.budget,
    });
    if s.fail > 0 {
        1
    } else if s.budget > 0 {
        3
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub command: String,
    pub params: Value,
    pub results: Vec<Value>,
    pub engine_version: String,
}

impl Output {
    pub fn new(command: &str, params: Value, results: Vec<Value>) -> Self {
        Output {
            command: command.to_string(),
            params,
            results,
            engine_version: ENGINE_VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

pub const REPORT_COLUMNS: [&str; 5] = ["theorem", "grid", "case", "verdict", "values"];
pub const COUNT_COLUMNS: [&str; 9] = [
    "p",
    "m",
    "n",
    "lambda",
    "method",
    "count_x",
    "count_y",
    "count_nstar",
    "err_budget_used",
];

fn to_string<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v).expect("serializable") {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_report_csv(w: impl Write, reports: &[VerificationReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    out.write_record(REPORT_COLUMNS).map_err(err)?;
    for r in reports {
        for c in &r.cases {
            out.write_record([
                to_string(&r.theorem),
                r.grid.clone(),
                c.case.clone(),
                to_string(&c.verdict),
                c.values.to_string(),
            ])
            .map_err(err)?;
        }
    }
    out.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn write_count_csv(w: impl Write, records: &[CountRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    out.write_record(COUNT_COLUMNS).map_err(err)?;
    for r in records {
        out.write_record([
            r.key.p.to_string(),
            r.key.m.to_string(),
            r.key.n.to_string(),
            r.key.lambda.to_string(),
            r.method.to_string(),
            opt(r.count_x),
            opt(r.count_y),
            opt(r.count_nstar),
            format!("{:e}", r.err_budget_used),
        ])
        .map_err(err)?;
    }
    out.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Generic CSV: one row per result, keys of the first result as columns.
pub fn write_value_csv(w: impl Write, results: &[Value]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    let columns: Vec<String> = match results.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        _ => vec!["value".to_string()],
    };
    out.write_record(&columns).map_err(err)?;
    for r in results {
        let row: Vec<String> = match r {
            Value::Object(m) => columns
                .iter()
                .map(|c| match m.get(c) {
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                    None => String::new(),
                })
                .collect(),
            other => vec![other.to_string()],
        };
        out.write_record(&row).map_err(err)?;
    }
    out.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}
