//! Versioned JSON report and CSV export.

use std::io::Write;

use anyhow::Result;
use freeprob_core::rmt::{FreenessReport, Verdict};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: Value,
    pub expected: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: impl Serialize, expected: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            observed: serde_json::to_value(observed).unwrap_or(Value::Null),
            expected: expected.into(),
            passed,
        }
    }

    /// `|observed - target| <= tol`
    pub fn close(name: impl Into<String>, observed: f64, target: f64, tol: f64) -> Self {
        let passed = (observed - target).abs() <= tol;
        Self::new(name, observed, format!("{target} +- {tol:e}"), passed)
    }

    /// `observed <= bound`
    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(name, observed, format!("<= {bound:e}"), observed <= bound)
    }

    /// A freeness report that must pass.
    pub fn free(report: &FreenessReport) -> Self {
        Self::new(
            format!("{} freeness", report.label),
            report.max_mean(),
            "every pattern within its threshold",
            report.verdict.passed(),
        )
    }

    /// A control report that must fail.
    pub fn control(report: &FreenessReport) -> Self {
        Self::new(
            format!("{} fails", report.label),
            report.max_mean(),
            "some pattern above its threshold",
            !report.verdict.passed(),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub verdict: Verdict,
    pub summary: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub freeness: Vec<FreenessReport>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl SuiteResult {
    pub fn new(suite: &str, summary: String, checks: Vec<Check>, freeness: Vec<FreenessReport>, details: Value) -> Self {
        let verdict = Verdict::from_bool(checks.iter().all(|c| c.passed));
        Self { suite: suite.to_string(), verdict, summary, checks, freeness, details }
    }

    /// `suite: verdict (summary)`; failing checks are named.
    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            format!("{}: {} ({})", self.suite, self.verdict, self.summary)
        } else {
            format!("{}: {} ({}; failed: {})", self.suite, self.verdict, self.summary, failed.join(", "))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub generated_at: u64,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn new(config: RunConfig, suites: Vec<SuiteResult>) -> Self {
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let verdict = Verdict::from_bool(suites.iter().all(|s| s.verdict.passed()));
        Self { schema: SCHEMA_VERSION, generated_at, config, verdict, suites }
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// One row per freeness pattern, labelled `report/pattern`.
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pattern", "mean_abs_trace", "stderr", "trials", "N", "verdict"])?;
        for suite in &self.suites {
            for report in &suite.freeness {
                for mut row in report.csv_rows() {
                    row[0] = format!("{}/{}", report.label, row[0]);
                    w.write_record(&row)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}
