use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::CellRef;
use crate::graph::DependencyGraph;
use crate::workbook::Workbook;

/// Number of structurally critical cells attached to each ranked risk.
pub const HOTTEST_CELLS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskEntry {
    pub event: String,
    pub causes: Vec<String>,
    pub effect: String,
    /// 1 (rare) to 5 (almost certain).
    pub likelihood: u8,
    /// 1 (negligible) to 5 (severe).
    pub impact: u8,
}

impl RiskEntry {
    pub fn score(&self) -> u32 {
        u32::from(self.likelihood) * u32::from(self.impact)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RiskTable {
    pub entries: Vec<RiskEntry>,
}

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("risk table has no entries")]
    Empty,
    #[error("risk entry {index}: {field} {value} is outside 1..=5")]
    OutOfRange {
        index: usize,
        field: &'static str,
        value: u8,
    },
    #[error("risk table JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl RiskTable {
    pub fn validate(&self) -> Result<(), RiskError> {
        for (index, e) in self.entries.iter().enumerate() {
            for (field, value) in [("likelihood", e.likelihood), ("impact", e.impact)] {
                if !(1..=5).contains(&value) {
                    return Err(RiskError::OutOfRange {
                        index,
                        field,
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<RiskTable, RiskError> {
        let table: RiskTable = serde_json::from_str(text)?;
        table.validate()?;
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedRisk {
    pub entry: RiskEntry,
    pub score: u32,
    pub hottest_cells: Vec<CellRef>,
}

/// The `n` formula cells with the most transitive precedents, i.e. the
/// cells whose values depend on the largest part of the model. Ties go to
/// the earlier cell in row-major order.
pub fn hottest_cells(workbook: &Workbook, n: usize) -> Vec<CellRef> {
    let graph = DependencyGraph::build(workbook);
    let mut scored: Vec<(usize, CellRef)> = workbook
        .formula_cells()
        .map(|(at, _)| (graph.transitive_precedents(at).len(), at))
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().take(n).map(|(_, at)| at).collect()
}

/// Orders entries by likelihood × impact, highest first; ties keep table
/// order.
pub fn rank_risks(risk: &RiskTable, workbook: &Workbook) -> Result<Vec<RankedRisk>, RiskError> {
    if risk.entries.is_empty() {
        return Err(RiskError::Empty);
    }
    risk.validate()?;
    let hot = hottest_cells(workbook, HOTTEST_CELLS);
    let mut ranked: Vec<RankedRisk> = risk
        .entries
        .iter()
        .map(|e| RankedRisk {
            entry: e.clone(),
            score: e.score(),
            hottest_cells: hot.clone(),
        })
        .collect();
    ranked.sort_by_key(|r| std::cmp::Reverse(r.score));
    Ok(ranked)
}
