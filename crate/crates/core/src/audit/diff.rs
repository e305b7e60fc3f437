use std::collections::BTreeSet;

use serde::Serialize;

use crate::cell::CellRef;
use crate::eval::{evaluate, Value, CURRENCY_TOLERANCE};
use crate::workbook::Workbook;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    /// The cell's own content differs from the reference.
    Root,
    /// Same content, different value, inherited from a root upstream.
    Propagated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub cell: CellRef,
    pub reference_value: Value,
    pub subject_value: Value,
    pub classification: Classification,
}

/// Cell-by-cell comparison of `subject` against `reference`.
///
/// Every cell whose content differs is a root divergence, even when its
/// value happens to coincide. Every other cell whose value differs beyond
/// [`CURRENCY_TOLERANCE`] (or in kind) is propagated. Output is row-major.
pub fn diff_workbooks(reference: &Workbook, subject: &Workbook) -> Vec<Divergence> {
    let ref_values = evaluate(reference);
    let sub_values = evaluate(subject);
    let cells: BTreeSet<CellRef> = reference
        .cells()
        .chain(subject.cells())
        .map(|(at, _)| at)
        .collect();
    let empty = Value::Empty;
    cells
        .into_iter()
        .filter_map(|at| {
            let rv = ref_values.get(&at).unwrap_or(&empty);
            let sv = sub_values.get(&at).unwrap_or(&empty);
            let classification =
                if reference.cell(at).content_text() != subject.cell(at).content_text() {
                    Classification::Root
                } else if !rv.approx_eq(sv, CURRENCY_TOLERANCE) {
                    Classification::Propagated
                } else {
                    return None;
                };
            Some(Divergence {
                cell: at,
                reference_value: rv.clone(),
                subject_value: sv.clone(),
                classification,
            })
        })
        .collect()
}
