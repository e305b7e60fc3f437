use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::{diff_workbooks, Classification};
use crate::cell::CellRef;
use crate::seeding::SeedManifest;
use crate::workbook::Workbook;

/// Per-sheet input to [`compute_metrics`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetResult {
    pub name: String,
    pub formula_cells: usize,
    /// Wrong cells of any kind; a sheet with at least one has errors.
    pub erroneous_cells: usize,
    /// Wrong cells that are formula cells of the reference.
    pub erroneous_formula_cells: usize,
}

impl SheetResult {
    fn from_cells(reference: &Workbook, wrong: &BTreeSet<CellRef>) -> SheetResult {
        SheetResult {
            name: reference.name.clone(),
            formula_cells: reference.formula_cells().count(),
            erroneous_cells: wrong.len(),
            erroneous_formula_cells: wrong
                .iter()
                .filter(|c| reference.cell(**c).is_formula())
                .count(),
        }
    }

    pub fn from_manifest(reference: &Workbook, manifest: &SeedManifest) -> SheetResult {
        SheetResult::from_cells(reference, &manifest.cells())
    }

    /// Uses the root divergences of `subject` as the error set.
    pub fn from_diff(reference: &Workbook, subject: &Workbook) -> SheetResult {
        let roots = diff_workbooks(reference, subject)
            .into_iter()
            .filter(|d| d.classification == Classification::Root)
            .map(|d| d.cell)
            .collect();
        SheetResult::from_cells(reference, &roots)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMetrics {
    pub sheets_total: usize,
    pub sheets_with_errors: usize,
    pub pct_with_errors: f64,
    pub formula_cells_total: usize,
    pub erroneous_formula_cells: usize,
    pub cell_error_rate: f64,
}

impl CorpusMetrics {
    /// Share of sheets with errors as a whole percent.
    pub fn pct_with_errors_display(&self) -> u32 {
        percent_half_up(self.sheets_with_errors, self.sheets_total)
    }

    /// Cell error rate as a percent with one decimal place.
    pub fn cell_error_rate_display(&self) -> String {
        format!("{:.1}%", self.cell_error_rate * 100.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("corpus is empty")]
    Empty,
}

/// `num/den` as a whole percent, halves rounded up. Exact integer
/// arithmetic, so 1/8 is 13 not 12.
pub fn percent_half_up(num: usize, den: usize) -> u32 {
    if den == 0 {
        return 0;
    }
    ((200 * num + den) / (2 * den)) as u32
}

pub fn compute_metrics(results: &[SheetResult]) -> Result<CorpusMetrics, MetricsError> {
    if results.is_empty() {
        return Err(MetricsError::Empty);
    }
    let sheets_total = results.len();
    let sheets_with_errors = results.iter().filter(|r| r.erroneous_cells > 0).count();
    let formula_cells_total: usize = results.iter().map(|r| r.formula_cells).sum();
    let erroneous_formula_cells: usize = results.iter().map(|r| r.erroneous_formula_cells).sum();
    let cell_error_rate = if formula_cells_total == 0 {
        0.0
    } else {
        erroneous_formula_cells as f64 / formula_cells_total as f64
    };
    Ok(CorpusMetrics {
        sheets_total,
        sheets_with_errors,
        pct_with_errors: sheets_with_errors as f64 / sheets_total as f64,
        formula_cells_total,
        erroneous_formula_cells,
        cell_error_rate,
    })
}
