//! Self-audit and peer-audit procedures.

mod diff;
mod guide;
mod report;
mod risk;
mod script;
mod selfaudit;

pub use diff::{diff_workbooks, Classification, Divergence};
pub use guide::{check_modularisation, check_user_guide, GuideCheck};
pub use report::{AuditReport, ReportError, REPORT_MAX_LINES};
pub use risk::{hottest_cells, rank_risks, RankedRisk, RiskEntry, RiskError, RiskTable};
pub use script::{
    run_audit_script, AuditCheck, AuditFinding, AuditScript, GuideField, InputLiteral, Step,
};
pub use selfaudit::{self_audit, ChecklistItem, ItemReport, SelfAuditChecklist, SelfAuditReport};
