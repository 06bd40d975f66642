//! Versioned JSON reports and their CSV flattening.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Bumped whenever the JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// A documented exception that fails as expected.
    ExpectedFail,
    /// Outside the construction's domain.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Stage {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Stage {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub k: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u64>,
    pub outcome: Outcome,
    pub classification: Option<String>,
    pub expected: Option<String>,
    pub generator_orders: Vec<u64>,
    pub case_tag: Option<String>,
    pub witness: Option<String>,
    pub stages: Vec<Stage>,
    pub detail: Option<String>,
    /// Wall-clock time, recorded only on request so that reports stay reproducible.
    pub elapsed_ms: Option<u64>,
}

impl Cell {
    pub fn new(k: u64, outcome: Outcome) -> Self {
        Cell {
            k,
            n: None,
            g: None,
            outcome,
            classification: None,
            expected: None,
            generator_orders: Vec::new(),
            case_tag: None,
            witness: None,
            stages: Vec::new(),
            detail: None,
            elapsed_ms: None,
        }
    }

    /// Equality ignoring timing.
    pub fn same_result(&self, other: &Cell) -> bool {
        Cell {
            elapsed_ms: None,
            ..self.clone()
        } == Cell {
            elapsed_ms: None,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub expected_fail: usize,
    pub skip: usize,
}

impl Summary {
    pub fn tally(cells: &[Cell]) -> Self {
        let mut s = Summary::default();
        for c in cells {
            match c.outcome {
                Outcome::Pass => s.pass += 1,
                Outcome::Fail => s.fail += 1,
                Outcome::ExpectedFail => s.expected_fail += 1,
                Outcome::Skip => s.skip += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub grid: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub cells: Vec<Cell>,
    pub summary: Summary,
}

impl SweepReport {
    pub fn new(command: &str, grid: BTreeMap<String, String>, seed: Option<u64>, cells: Vec<Cell>) -> Self {
        let summary = Summary::tally(&cells);
        SweepReport {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            grid,
            seed,
            cells,
            summary,
        }
    }

    /// Every cell matched its expected outcome.
    pub fn all_expected(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    /// One row per cell; stages collapse to `name=ok|FAIL` pairs.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "command",
            "k",
            "n",
            "g",
            "outcome",
            "classification",
            "expected",
            "generator_orders",
            "case_tag",
            "witness",
            "stages",
            "detail",
            "elapsed_ms",
        ])
        .expect("in-memory write");
        let opt = |v: &Option<String>| v.clone().unwrap_or_default();
        let num = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.cells {
            let outcome = serde_json::to_value(c.outcome).expect("outcome serialises");
            let orders: Vec<String> = c.generator_orders.iter().map(u64::to_string).collect();
            let stages: Vec<String> = c
                .stages
                .iter()
                .map(|s| format!("{}={}", s.name, if s.passed { "ok" } else { "FAIL" }))
                .collect();
            w.write_record([
                self.command.clone(),
                c.k.to_string(),
                num(c.n),
                num(c.g),
                outcome.as_str().unwrap_or_default().to_string(),
                opt(&c.classification),
                opt(&c.expected),
                orders.join(" "),
                opt(&c.case_tag),
                opt(&c.witness),
                stages.join(" "),
                opt(&c.detail),
                num(c.elapsed_ms),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}
