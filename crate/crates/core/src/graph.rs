//! Cell dependency graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::cell::CellRef;
use crate::workbook::Workbook;

/// Direct read edges between cells. Only formula cells have precedents;
/// precedents may be empty or absent cells.
#[derive(Debug, Clone, Default)]
pub struct DependencyGraph {
    precedents: BTreeMap<CellRef, BTreeSet<CellRef>>,
    dependents: BTreeMap<CellRef, BTreeSet<CellRef>>,
}

impl DependencyGraph {
    pub fn build(workbook: &Workbook) -> DependencyGraph {
        let mut g = DependencyGraph::default();
        for (at, formula) in workbook.formula_cells() {
            let reads: BTreeSet<CellRef> = formula.ast().referenced_cells().into_iter().collect();
            for &p in &reads {
                g.dependents.entry(p).or_default().insert(at);
            }
            g.precedents.insert(at, reads);
        }
        g
    }

    pub fn precedents(&self, cell: CellRef) -> BTreeSet<CellRef> {
        self.precedents.get(&cell).cloned().unwrap_or_default()
    }

    pub fn dependents(&self, cell: CellRef) -> BTreeSet<CellRef> {
        self.dependents.get(&cell).cloned().unwrap_or_default()
    }

    pub(crate) fn precedents_ref(&self, cell: CellRef) -> Option<&BTreeSet<CellRef>> {
        self.precedents.get(&cell)
    }

    pub(crate) fn dependents_ref(&self, cell: CellRef) -> Option<&BTreeSet<CellRef>> {
        self.dependents.get(&cell)
    }

    fn closure(
        &self,
        start: impl IntoIterator<Item = CellRef>,
        forward: bool,
    ) -> BTreeSet<CellRef> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<CellRef> = start.into_iter().collect();
        while let Some(c) = queue.pop_front() {
            let next = if forward {
                self.dependents_ref(c)
            } else {
                self.precedents_ref(c)
            };
            for &n in next.into_iter().flatten() {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Every cell that reads `cell`, directly or through other cells.
    pub fn transitive_dependents(&self, cell: CellRef) -> BTreeSet<CellRef> {
        self.closure([cell], true)
    }

    /// Every cell `cell` reads, directly or through other cells.
    pub fn transitive_precedents(&self, cell: CellRef) -> BTreeSet<CellRef> {
        self.closure([cell], false)
    }

    /// Union of the transitive dependents of `cells`.
    pub fn downstream_of(&self, cells: impl IntoIterator<Item = CellRef>) -> BTreeSet<CellRef> {
        self.closure(cells, true)
    }

    /// Kahn ordering of formula cells. Returns the ordered cells and the
    /// cells left over, which are exactly those on or downstream of a cycle.
    pub fn topological_order(&self) -> (Vec<CellRef>, BTreeSet<CellRef>) {
        let mut indegree: BTreeMap<CellRef, usize> = BTreeMap::new();
        for (&cell, reads) in &self.precedents {
            let n = reads
                .iter()
                .filter(|p| self.precedents.contains_key(p))
                .count();
            indegree.insert(cell, n);
        }
        let mut ready: VecDeque<CellRef> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&c, _)| c)
            .collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(c) = ready.pop_front() {
            order.push(c);
            for &d in self.dependents_ref(c).into_iter().flatten() {
                let e = indegree.get_mut(&d).expect("dependents are formula cells");
                *e -= 1;
                if *e == 0 {
                    ready.push_back(d);
                }
            }
        }
        let placed: BTreeSet<CellRef> = order.iter().copied().collect();
        let stuck = indegree
            .keys()
            .filter(|c| !placed.contains(c))
            .copied()
            .collect();
        (order, stuck)
    }
}

/// Cells read by the formula at `cell`, ranges expanded. Empty for
/// non-formula or unknown cells.
pub fn precedents(workbook: &Workbook, cell: CellRef) -> BTreeSet<CellRef> {
    workbook
        .cell(cell)
        .formula()
        .map(|f| f.ast().referenced_cells().into_iter().collect())
        .unwrap_or_default()
}

/// Formula cells that read `cell` directly. Empty for unknown cells.
pub fn dependents(workbook: &Workbook, cell: CellRef) -> BTreeSet<CellRef> {
    if !workbook.contains(cell) {
        return BTreeSet::new();
    }
    workbook
        .formula_cells()
        .filter(|(_, f)| f.ast().referenced_cells().contains(&cell))
        .map(|(at, _)| at)
        .collect()
}
