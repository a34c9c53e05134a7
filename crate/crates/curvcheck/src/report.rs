//! Deterministic JSON rendering of suite reports.
//!
//! The writer fixes field order and prints every float with 17 significant
//! digits, so two runs with identical inputs produce byte-identical files.
//! Reading back goes through serde.

use serde::Deserialize;

use crate::checks::{CheckStatus, SuiteReport};

/// 17 significant digits, sign-stable.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    format!("{x:.16e}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn to_json(report: &SuiteReport) -> String {
    let mut s = String::with_capacity(4096);
    s.push_str("{\n");
    s.push_str(&format!(
        "  \"tool_version\": \"{}\",\n",
        escape(&report.tool_version)
    ));
    s.push_str(&format!("  \"metric\": \"{}\",\n", escape(&report.metric)));
    s.push_str(&format!("  \"seed\": {},\n", report.seed));
    s.push_str(&format!("  \"points\": {},\n", report.points));
    s.push_str(&format!(
        "  \"tolerance\": {},\n",
        fmt_f64(report.tolerance)
    ));
    s.push_str("  \"suites\": [");
    for (i, suite) in report.suites.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("\"{}\"", suite.name()));
    }
    s.push_str("],\n");
    s.push_str(&format!("  \"pass\": {},\n", report.pass));
    s.push_str("  \"checks\": [\n");
    for (i, c) in report.checks.iter().enumerate() {
        s.push_str("    {");
        s.push_str(&format!("\"id\": \"{}\", ", escape(&c.id)));
        s.push_str(&format!("\"anchor\": \"{}\", ", escape(&c.anchor)));
        s.push_str(&format!("\"suite\": \"{}\", ", c.suite.name()));
        s.push_str(&format!("\"status\": \"{}\", ", c.status.name()));
        s.push_str(&format!("\"points_tested\": {}, ", c.points_tested));
        s.push_str(&format!(
            "\"max_scaled_residual\": {}, ",
            fmt_f64(c.max_scaled_residual)
        ));
        s.push_str(&format!(
            "\"min_scaled_residual\": {}, ",
            fmt_f64(c.min_scaled_residual)
        ));
        s.push_str(&format!("\"tolerance\": {}, ", fmt_f64(c.tolerance)));
        s.push_str(&format!("\"pass\": {}", c.pass));
        match &c.reason {
            Some(r) => s.push_str(&format!(", \"reason\": \"{}\"", escape(r))),
            None => {}
        }
        s.push('}');
        if i + 1 < report.checks.len() {
            s.push(',');
        }
        s.push('\n');
    }
    s.push_str("  ]\n}\n");
    s
}

/// Deserialized form for consumers (round-trips the writer above).
#[derive(Debug, Clone, Deserialize)]
pub struct CheckRow {
    pub id: String,
    pub anchor: String,
    pub suite: String,
    pub status: String,
    pub points_tested: usize,
    pub max_scaled_residual: f64,
    pub min_scaled_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReportDoc {
    pub tool_version: String,
    pub metric: String,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub suites: Vec<String>,
    pub pass: bool,
    pub checks: Vec<CheckRow>,
}

pub fn from_json(text: &str) -> Result<ReportDoc, serde_json::Error> {
    serde_json::from_str(text)
}

/// One terminal line per check.
pub fn render_text(report: &SuiteReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "metric {} | seed {} | points {}\n",
        report.metric, report.seed, report.points
    ));
    for c in &report.checks {
        let line = match c.status {
            CheckStatus::Pass | CheckStatus::Fail => format!(
                "{:<6} {:<38} {:<22} max {:.3e} tol {:.1e} ({} pts)\n",
                c.status.name().to_uppercase(),
                c.id,
                c.anchor,
                c.max_scaled_residual,
                c.tolerance,
                c.points_tested
            ),
            CheckStatus::Skipped | CheckStatus::Errored => format!(
                "{:<6} {:<38} {:<22} {}\n",
                c.status.name().to_uppercase(),
                c.id,
                c.anchor,
                c.reason.as_deref().unwrap_or("")
            ),
        };
        s.push_str(&line);
    }
    s.push_str(&format!(
        "overall: {}\n",
        if report.pass { "PASS" } else { "FAIL" }
    ));
    s
}
