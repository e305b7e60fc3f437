use serde::{Deserialize, Serialize};

use super::guide::check_user_guide;
use super::risk::RiskTable;
use crate::workbook::Workbook;

/// The builder's answers to the six pre-build questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SelfAuditChecklist {
    pub development_stages: bool,
    pub modularisation: bool,
    pub logical_model: bool,
    pub key_function_tests: bool,
    pub user_guide: bool,
    pub risk_table: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChecklistItem {
    DevelopmentStages,
    Modularisation,
    LogicalModel,
    KeyFunctionTests,
    UserGuide,
    RiskTable,
}

impl ChecklistItem {
    pub fn question(self) -> &'static str {
        match self {
            ChecklistItem::DevelopmentStages => "development life-cycle stages planned",
            ChecklistItem::Modularisation => "spreadsheet split into modules",
            ChecklistItem::LogicalModel => "logical model drawn up",
            ChecklistItem::KeyFunctionTests => "key functions chosen for testing",
            ChecklistItem::UserGuide => "user guide written",
            ChecklistItem::RiskTable => "risk assessment table compiled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemReport {
    pub item: ChecklistItem,
    pub declared: bool,
    /// `None` for items that can only be declared.
    pub evidence: Option<bool>,
    pub reported: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfAuditReport {
    pub items: Vec<ItemReport>,
    pub discrepancies: usize,
}

impl SelfAuditReport {
    pub fn render_text(&self) -> String {
        let mut out = String::from("SELF-AUDIT CHECKLIST\n");
        for (i, item) in self.items.iter().enumerate() {
            let yn = if item.reported { "yes" } else { "no" };
            out.push_str(&format!("{}. {:<40} {yn}", i + 1, item.item.question()));
            if let Some(note) = &item.note {
                out.push_str(&format!("  ({note})"));
            }
            out.push('\n');
        }
        out.push_str(&format!("discrepancies: {}\n", self.discrepancies));
        out
    }
}

/// Reports the checklist, overriding declarations with observed evidence
/// for the user guide, modularisation and risk table items.
pub fn self_audit(
    workbook: &Workbook,
    declarations: &SelfAuditChecklist,
    risk: Option<&RiskTable>,
) -> SelfAuditReport {
    let guide_ok = check_user_guide(workbook).all();
    let regions_ok = !workbook.regions().is_empty();
    let risk_ok = risk.is_some_and(|r| !r.entries.is_empty() && r.validate().is_ok());

    let rows = [
        (
            ChecklistItem::DevelopmentStages,
            declarations.development_stages,
            None,
        ),
        (
            ChecklistItem::Modularisation,
            declarations.modularisation,
            Some((regions_ok, "no named region in workbook")),
        ),
        (
            ChecklistItem::LogicalModel,
            declarations.logical_model,
            None,
        ),
        (
            ChecklistItem::KeyFunctionTests,
            declarations.key_function_tests,
            None,
        ),
        (
            ChecklistItem::UserGuide,
            declarations.user_guide,
            Some((guide_ok, "user guide missing or incomplete")),
        ),
        (
            ChecklistItem::RiskTable,
            declarations.risk_table,
            Some((risk_ok, "no valid risk table supplied")),
        ),
    ];
    let items: Vec<ItemReport> = rows
        .into_iter()
        .map(|(item, declared, evidence)| match evidence {
            None => ItemReport {
                item,
                declared,
                evidence: None,
                reported: declared,
                note: None,
            },
            Some((seen, missing)) => {
                let note = match (declared, seen) {
                    (true, false) => Some(format!("declared yes, but {missing}")),
                    (false, true) => Some("declared no, but evidence is present".to_string()),
                    _ => None,
                };
                ItemReport {
                    item,
                    declared,
                    evidence: Some(seen),
                    reported: seen,
                    note,
                }
            }
        })
        .collect();
    let discrepancies = items
        .iter()
        .filter(|i| i.evidence.is_some_and(|e| e != i.declared))
        .count();
    SelfAuditReport {
        items,
        discrepancies,
    }
}
