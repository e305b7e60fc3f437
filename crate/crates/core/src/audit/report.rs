use std::collections::BTreeSet;
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::script::{AuditCheck, AuditFinding};
use crate::cell::CellRef;

/// Upper bound on the plain-text rendering, one printed page.
pub const REPORT_MAX_LINES: usize = 60;
const WIDTH: usize = 78;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub auditor: String,
    pub audited: String,
    pub date: Option<NaiveDate>,
    pub workbook_name: String,
    pub script_title: String,
    pub findings: Vec<AuditFinding>,
    pub total_mark: u32,
    pub possible_mark: u32,
    #[serde(default)]
    pub narrative: String,
}

impl AuditReport {
    pub fn signed(mut self, auditor: &str, audited: &str, date: NaiveDate) -> AuditReport {
        self.auditor = auditor.to_string();
        self.audited = audited.to_string();
        self.date = Some(date);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<AuditReport, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Records a manual finding: the auditor believes `cells` are wrong.
    /// Carries no marks.
    pub fn flag(&mut self, cells: impl IntoIterator<Item = CellRef>, description: &str) {
        let cells: Vec<CellRef> = cells.into_iter().collect();
        let observed = cells
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        self.findings.push(AuditFinding {
            step: self.findings.len(),
            check: AuditCheck::KeyFunctions,
            description: description.to_string(),
            passed: false,
            observed,
            marks_available: 0,
            marks_awarded: 0,
            cells,
        });
    }

    /// Cells implicated by failed findings: the auditor's claimed errors.
    pub fn flagged_cells(&self) -> BTreeSet<CellRef> {
        self.findings
            .iter()
            .filter(|f| !f.passed)
            .flat_map(|f| f.cells.iter().copied())
            .collect()
    }

    /// One-page plain-text rendering: parties, date, workbook identity and
    /// the findings grouped under the four audit checks.
    pub fn render_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        lines.push("PEER AUDIT REPORT".into());
        lines.push("=".repeat(17));
        lines.push(format!("Auditor:   {}", self.auditor));
        lines.push(format!("Audited:   {}", self.audited));
        lines.push(format!(
            "Date:      {}",
            self.date.map(|d| d.to_string()).unwrap_or_default()
        ));
        lines.push(format!("Workbook:  {}", self.workbook_name));
        lines.push(format!("Script:    {}", self.script_title));
        lines.push(String::new());
        lines.push("Findings on the four checks".into());

        let footer_len = 4 + usize::from(!self.narrative.is_empty()) * 3;
        for (n, check) in AuditCheck::ALL.iter().enumerate() {
            let group: Vec<&AuditFinding> =
                self.findings.iter().filter(|f| f.check == *check).collect();
            let got: u32 = group.iter().map(|f| f.marks_awarded).sum();
            let of: u32 = group.iter().map(|f| f.marks_available).sum();
            lines.push(String::new());
            lines.push(format!("{}. {} ({got}/{of})", n + 1, check.title()));
            if group.is_empty() {
                lines.push("   not checked".into());
            }
            for (i, f) in group.iter().enumerate() {
                // Leave room for the remaining headings and the footer.
                let reserved = footer_len + 3 * (AuditCheck::ALL.len() - n - 1);
                if lines.len() + reserved + 1 >= REPORT_MAX_LINES && i + 1 < group.len() {
                    lines.push(format!("   ... {} more findings", group.len() - i));
                    break;
                }
                let mark = if f.passed { "PASS" } else { "FAIL" };
                let mut line = format!("   [{mark}] {}: {}", f.description, f.observed);
                truncate(&mut line);
                lines.push(line);
            }
        }

        lines.push(String::new());
        lines.push(format!(
            "MARK GIVEN: {} / {}",
            self.total_mark, self.possible_mark
        ));
        if !self.narrative.is_empty() {
            lines.push(String::new());
            lines.push("Notes".into());
            let mut note = self.narrative.replace('\n', " ");
            if lines.len() >= REPORT_MAX_LINES {
                lines.truncate(REPORT_MAX_LINES - 1);
            }
            truncate(&mut note);
            lines.push(note);
        }
        lines.truncate(REPORT_MAX_LINES);
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

fn truncate(line: &mut String) {
    if line.chars().count() > WIDTH {
        let cut: String = line.chars().take(WIDTH - 3).collect();
        *line = cut + "...";
    }
}
