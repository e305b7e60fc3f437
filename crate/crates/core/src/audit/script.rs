use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::guide::check_user_guide;
use super::report::AuditReport;
use crate::cell::CellRef;
use crate::eval::{evaluate, Value, Values, CURRENCY_TOLERANCE};
use crate::workbook::{Cell, Workbook};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuideField {
    Builder,
    Date,
    Purpose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputLiteral {
    Number(f64),
    Text(String),
}

fn default_tolerance() -> f64 {
    CURRENCY_TOLERANCE
}

fn default_key_count() -> usize {
    3
}

/// One instruction on an audit sheet. Cells are kept as written so a bad
/// address fails its step instead of rejecting the whole script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Step {
    SetInput {
        cell: String,
        literal: InputLiteral,
    },
    ExpectValue {
        cell: String,
        expected: f64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        marks: u32,
    },
    CheckGuideField {
        field: GuideField,
        marks: u32,
    },
    CheckRegionExists {
        region: String,
        marks: u32,
    },
    CheckKeyFunctions {
        region: String,
        #[serde(default = "default_key_count")]
        count: usize,
        marks: u32,
    },
}

impl Step {
    pub fn marks(&self) -> u32 {
        match self {
            Step::SetInput { .. } => 0,
            Step::ExpectValue { marks, .. }
            | Step::CheckGuideField { marks, .. }
            | Step::CheckRegionExists { marks, .. }
            | Step::CheckKeyFunctions { marks, .. } => *marks,
        }
    }

    pub fn check(&self) -> AuditCheck {
        match self {
            Step::CheckGuideField { .. } => AuditCheck::UserGuide,
            Step::CheckRegionExists { .. } => AuditCheck::Modularisation,
            Step::CheckKeyFunctions { .. } => AuditCheck::KeyFunctions,
            Step::SetInput { .. } | Step::ExpectValue { .. } => AuditCheck::SampleInputs,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Step::SetInput { cell, literal } => match literal {
                InputLiteral::Number(n) => format!("set {cell} to {n}"),
                InputLiteral::Text(t) => format!("set {cell} to \"{t}\""),
            },
            Step::ExpectValue { cell, expected, .. } => format!("{cell} should be {expected:.2}"),
            Step::CheckGuideField { field, .. } => format!(
                "user guide states the {}",
                match field {
                    GuideField::Builder => "builder",
                    GuideField::Date => "date of creation",
                    GuideField::Purpose => "purpose",
                }
            ),
            Step::CheckRegionExists { region, .. } => format!("region `{region}` exists"),
            Step::CheckKeyFunctions { region, count, .. } => {
                format!("{count} key functions in `{region}` are correct")
            }
        }
    }
}

/// The four checks of a peer audit, used to group findings in the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AuditCheck {
    UserGuide,
    Modularisation,
    KeyFunctions,
    SampleInputs,
}

impl AuditCheck {
    pub const ALL: [AuditCheck; 4] = [
        AuditCheck::UserGuide,
        AuditCheck::Modularisation,
        AuditCheck::KeyFunctions,
        AuditCheck::SampleInputs,
    ];

    pub fn title(self) -> &'static str {
        match self {
            AuditCheck::UserGuide => "User guide",
            AuditCheck::Modularisation => "Modularisation",
            AuditCheck::KeyFunctions => "Key functions",
            AuditCheck::SampleInputs => "Sample input tests",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditScript {
    pub title: String,
    pub steps: Vec<Step>,
}

impl AuditScript {
    pub fn from_json(text: &str) -> serde_json::Result<AuditScript> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes") + "\n"
    }

    pub fn total_marks(&self) -> u32 {
        self.steps.iter().map(Step::marks).sum()
    }

    /// Cells the script overwrites before checking anything.
    pub fn input_cells(&self) -> BTreeSet<CellRef> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::SetInput { cell, .. } => cell.parse().ok(),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFinding {
    /// Zero-based position in the script.
    pub step: usize,
    pub check: AuditCheck,
    pub description: String,
    pub passed: bool,
    pub observed: String,
    pub marks_available: u32,
    pub marks_awarded: u32,
    /// Cells the finding implicates; only meaningful for failed findings.
    #[serde(default)]
    pub cells: Vec<CellRef>,
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Deterministic sample of up to `count` formula cells of `region` in the
/// reference, seeded by the subject workbook's name. Returned row-major.
fn sample_key_cells(
    reference: &Workbook,
    region: &str,
    count: usize,
    seed_name: &str,
) -> Option<Vec<CellRef>> {
    let range = reference.region(region)?;
    let pool: Vec<CellRef> = reference
        .formula_cells()
        .map(|(at, _)| at)
        .filter(|at| range.contains(*at))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(seed_name));
    let mut picked: Vec<usize> =
        rand::seq::index::sample(&mut rng, pool.len(), count.min(pool.len())).into_vec();
    picked.sort_unstable();
    Some(picked.into_iter().map(|i| pool[i]).collect())
}

fn show(v: &Value) -> String {
    match v {
        Value::Number(n) => format!("{n:.2}"),
        Value::Empty => "(empty)".into(),
        other => other.to_string(),
    }
}

/// Runs `script` against a working copy of `subject`. The returned report
/// has no auditor, audited party, date or narrative yet.
pub fn run_audit_script(
    subject: &Workbook,
    reference: &Workbook,
    script: &AuditScript,
) -> AuditReport {
    let mut working = subject.clone();
    let mut values: Option<Values> = None;
    let guide = check_user_guide(subject);
    let mut findings = Vec::with_capacity(script.steps.len());

    for (index, step) in script.steps.iter().enumerate() {
        let (passed, observed, cells) = match step {
            Step::SetInput { cell, literal } => match cell.parse::<CellRef>() {
                Ok(at) if working.contains(at) => {
                    let new = match literal {
                        InputLiteral::Number(n) => Cell::Number(*n),
                        InputLiteral::Text(t) => Cell::Text(t.clone()),
                    };
                    working.set(at, new);
                    values = None;
                    (true, format!("{at} set"), Vec::new())
                }
                _ => (false, format!("cell {cell} does not exist"), Vec::new()),
            },
            Step::ExpectValue {
                cell,
                expected,
                tolerance,
                ..
            } => match cell.parse::<CellRef>() {
                Ok(at) => {
                    let vals = values.get_or_insert_with(|| evaluate(&working));
                    let got = vals.get(&at).cloned().unwrap_or(Value::Empty);
                    let ok = got
                        .as_number()
                        .is_some_and(|n| (n - expected).abs() <= *tolerance);
                    (
                        ok,
                        format!("{at} = {}", show(&got)),
                        if ok { Vec::new() } else { vec![at] },
                    )
                }
                Err(_) => (false, format!("cell {cell} does not exist"), Vec::new()),
            },
            Step::CheckGuideField { field, .. } => {
                let ok = match field {
                    GuideField::Builder => guide.builder,
                    GuideField::Date => guide.date,
                    GuideField::Purpose => guide.purpose,
                };
                let observed = match (&subject.user_guide, ok) {
                    (None, _) => "no user guide".to_string(),
                    (Some(_), true) => "present".to_string(),
                    (Some(_), false) => "missing or invalid".to_string(),
                };
                (ok, observed, Vec::new())
            }
            Step::CheckRegionExists { region, .. } => match subject.region(region) {
                Some(r) => (true, format!("{region} = {r}"), Vec::new()),
                None => (false, format!("no region `{region}`"), Vec::new()),
            },
            Step::CheckKeyFunctions { region, count, .. } => {
                match sample_key_cells(reference, region, *count, &subject.name) {
                    None => (
                        false,
                        format!("reference has no region `{region}`"),
                        Vec::new(),
                    ),
                    Some(sample) if sample.is_empty() => {
                        (false, format!("no formulas in `{region}`"), Vec::new())
                    }
                    Some(sample) => {
                        let wrong: Vec<CellRef> = sample
                            .iter()
                            .copied()
                            .filter(|at| {
                                let want = reference.cell(*at).formula().map(|f| f.ast());
                                let have = working.cell(*at).formula().map(|f| f.ast());
                                want != have
                            })
                            .collect();
                        let names: Vec<String> = sample.iter().map(ToString::to_string).collect();
                        let observed = format!(
                            "{} of {} sampled formulas match ({})",
                            sample.len() - wrong.len(),
                            sample.len(),
                            names.join(", ")
                        );
                        (wrong.is_empty(), observed, wrong)
                    }
                }
            }
        };
        let available = step.marks();
        findings.push(AuditFinding {
            step: index,
            check: step.check(),
            description: step.describe(),
            passed,
            observed,
            marks_available: available,
            marks_awarded: if passed { available } else { 0 },
            cells,
        });
    }

    let total_mark = findings.iter().map(|f| f.marks_awarded).sum();
    AuditReport {
        auditor: String::new(),
        audited: String::new(),
        date: None,
        workbook_name: subject.name.clone(),
        script_title: script.title.clone(),
        findings,
        total_mark,
        possible_mark: script.total_marks(),
        narrative: String::new(),
    }
}
