use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{diff_workbooks, AuditReport, Classification};
use crate::cell::CellRef;
use crate::seeding::{apply_seeds, ApplyError, SeedManifest};
use crate::workbook::Workbook;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditorGrade {
    pub auditor: String,
    pub true_findings: usize,
    pub false_findings: usize,
    pub missed: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Error)]
pub enum GradeError {
    #[error("report is for workbook `{report}` but the subject is `{subject}`")]
    ReportSubject { report: String, subject: String },
    #[error("manifest was made from `{manifest}` but the reference is `{reference}`")]
    ManifestReference { manifest: String, reference: String },
    #[error("manifest does not apply to the reference: {0}")]
    Apply(#[from] ApplyError),
    #[error("subject is not the reference with the manifest applied")]
    SubjectMismatch,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores a peer-audit report against ground truth. A flagged cell is a
/// cell named by any failed finding; it is a true finding when it is a
/// root divergence of `subject` from `reference`.
pub fn grade_auditor(
    report: &AuditReport,
    manifest: &SeedManifest,
    reference: &Workbook,
    subject: &Workbook,
) -> Result<AuditorGrade, GradeError> {
    if report.workbook_name != subject.name {
        return Err(GradeError::ReportSubject {
            report: report.workbook_name.clone(),
            subject: subject.name.clone(),
        });
    }
    if manifest.reference_name != reference.name {
        return Err(GradeError::ManifestReference {
            manifest: manifest.reference_name.clone(),
            reference: reference.name.clone(),
        });
    }
    if !apply_seeds(reference, manifest)?.same_content(subject) {
        return Err(GradeError::SubjectMismatch);
    }
    let roots: BTreeSet<CellRef> = diff_workbooks(reference, subject)
        .into_iter()
        .filter(|d| d.classification == Classification::Root)
        .map(|d| d.cell)
        .collect();
    let flagged = report.flagged_cells();
    let true_findings = flagged.intersection(&roots).count();
    let false_findings = flagged.len() - true_findings;
    let missed = roots.len() - true_findings;
    Ok(AuditorGrade {
        auditor: report.auditor.clone(),
        true_findings,
        false_findings,
        missed,
        precision: ratio(true_findings, true_findings + false_findings),
        recall: ratio(true_findings, true_findings + missed),
    })
}
