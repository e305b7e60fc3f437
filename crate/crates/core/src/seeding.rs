//! Error seeding: turn a correct reference workbook into a training model
//! with known, findable defects, plus the ground-truth manifest.
//!
//! Every seed is a single-cell content change drawn from one of six error
//! kinds. Candidate mutations for a `(cell, kind)` pair are enumerated in a
//! fixed order, and the planner picks uniformly among them with a ChaCha8
//! generator seeded from the manifest's `rng_seed`, so a manifest can be
//! regenerated bit-for-bit on any machine running the same build.
//!
//! A seed is only accepted if applying it alone to the reference changes at
//! least one evaluated value by more than [`CURRENCY_TOLERANCE`] (or changes
//! a value's kind). Up to [`MAX_DRAWS`] draws are made per seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cell::{CellRef, RangeRef};
use crate::eval::{evaluate, Value, Values, CURRENCY_TOLERANCE};
use crate::formula::{Expr, Function, ParseError};
use crate::workbook::{Cell, Workbook};

/// Draws attempted per seed before giving up.
pub const MAX_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorKind {
    /// One digit of a number changed to a different digit.
    TypoConstant,
    /// An operator tree rotated so operands group differently.
    Precedence,
    /// A reference shifted by one row or column, as in a bad copy/fill.
    WrongReference,
    /// A `SUM` range shortened by one cell at either end.
    RangeOmission,
    /// A formula overwritten with a number pasted from a neighbouring cell.
    FormulaToConstant,
    /// An input number replaced by another input's value.
    DataEntry,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 6] = [
        ErrorKind::TypoConstant,
        ErrorKind::Precedence,
        ErrorKind::WrongReference,
        ErrorKind::RangeOmission,
        ErrorKind::FormulaToConstant,
        ErrorKind::DataEntry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::TypoConstant => "TYPO_CONSTANT",
            ErrorKind::Precedence => "PRECEDENCE",
            ErrorKind::WrongReference => "WRONG_REFERENCE",
            ErrorKind::RangeOmission => "RANGE_OMISSION",
            ErrorKind::FormulaToConstant => "FORMULA_TO_CONSTANT",
            ErrorKind::DataEntry => "DATA_ENTRY",
        }
    }

    /// Whether the kind applies to literal cells, formula cells, or both.
    pub fn applies_to(self, cell: &Cell) -> bool {
        match self {
            ErrorKind::TypoConstant => matches!(cell, Cell::Number(_) | Cell::Formula(_)),
            ErrorKind::DataEntry => matches!(cell, Cell::Number(_)),
            _ => cell.is_formula(),
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.name() == wanted)
            .ok_or_else(|| format!("unknown error kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub cell: CellRef,
    pub kind: ErrorKind,
    pub original: String,
    pub mutated: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedManifest {
    pub rng_seed: u64,
    pub reference_name: String,
    pub seeds: Vec<Seed>,
}

impl SeedManifest {
    pub fn cells(&self) -> BTreeSet<CellRef> {
        self.seeds.iter().map(|s| s.cell).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<SeedManifest> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("no error kinds requested")]
    NoKinds,
    #[error("reference cell {0} evaluates to an error; seed a correct model")]
    ReferenceHasErrors(CellRef),
    #[error("infeasible: {0} applies to no cell of the reference")]
    KindInapplicable(ErrorKind),
    #[error("infeasible: {requested} seeds requested but only {eligible} cells are eligible")]
    TooFewEligibleCells { requested: usize, eligible: usize },
    #[error("infeasible: no observable mutation found for seed {index} after {MAX_DRAWS} draws")]
    Unobservable { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("seed cell {0} is not part of the reference")]
    UnknownCell(CellRef),
    #[error("seed cell {0} appears more than once")]
    DuplicateCell(CellRef),
    #[error(
        "seed for {cell} does not match the reference (expected `{expected}`, found `{found}`)"
    )]
    OriginalMismatch {
        cell: CellRef,
        expected: String,
        found: String,
    },
    #[error("mutated content for {cell} does not parse: {source}")]
    BadMutation { cell: CellRef, source: ParseError },
}

/// Reference-wide data the candidate generators need.
struct Context<'a> {
    reference: &'a Workbook,
    values: Values,
    extent: Option<RangeRef>,
    inputs: Vec<f64>,
}

impl<'a> Context<'a> {
    fn new(reference: &'a Workbook) -> Context<'a> {
        let inputs = reference
            .cells()
            .filter_map(|(_, c)| match c {
                Cell::Number(n) => Some(*n),
                _ => None,
            })
            .collect();
        Context {
            reference,
            values: evaluate(reference),
            extent: reference.used_extent(),
            inputs,
        }
    }

    fn candidates(&self, at: CellRef, kind: ErrorKind) -> Vec<String> {
        let cell = self.reference.cell(at);
        if !kind.applies_to(cell) {
            return Vec::new();
        }
        let original = cell.content_text();
        let raw = match (kind, cell) {
            (ErrorKind::TypoConstant, Cell::Number(n)) => digit_typos(*n)
                .into_iter()
                .map(|n| format!("{n}"))
                .collect(),
            (ErrorKind::TypoConstant, Cell::Formula(f)) => formula_variants(f.ast(), |e| match e {
                Expr::Number(n) => digit_typos(*n).into_iter().map(Expr::Number).collect(),
                _ => Vec::new(),
            }),
            (ErrorKind::Precedence, Cell::Formula(f)) => formula_variants(f.ast(), regroupings),
            (ErrorKind::WrongReference, Cell::Formula(f)) => {
                let Some(extent) = self.extent else {
                    return Vec::new();
                };
                formula_variants(f.ast(), |e| displacements(e, &extent))
            }
            (ErrorKind::RangeOmission, Cell::Formula(f)) => {
                formula_variants(f.ast(), shortened_sums)
            }
            (ErrorKind::FormulaToConstant, Cell::Formula(_)) => self.neighbour_constants(at),
            (ErrorKind::DataEntry, Cell::Number(n)) => self
                .inputs
                .iter()
                .filter(|v| (*v - n).abs() > CURRENCY_TOLERANCE)
                .map(|v| format!("{v}"))
                .collect(),
            _ => Vec::new(),
        };
        let mut seen = BTreeSet::new();
        raw.into_iter()
            .filter(|c| *c != original && seen.insert(c.clone()))
            .collect()
    }

    fn neighbour_constants(&self, at: CellRef) -> Vec<String> {
        let Some(own) = self.values.get(&at).and_then(Value::as_number) else {
            return Vec::new();
        };
        [(-1, 0), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .filter_map(|(dc, dr)| at.offset(dc, dr))
            .filter_map(|n| self.values.get(&n).and_then(Value::as_number))
            .filter(|v| (v - own).abs() > CURRENCY_TOLERANCE)
            .map(|v| format!("{v}"))
            .collect()
    }

    fn observable(&self, at: CellRef, mutated: &str) -> bool {
        let Ok(cell) = Cell::from_field(mutated) else {
            return false;
        };
        let mut trial = self.reference.clone();
        trial.set(at, cell);
        values_differ(&self.values, &evaluate(&trial))
    }
}

pub(crate) fn values_differ(a: &Values, b: &Values) -> bool {
    let empty = Value::Empty;
    a.keys().chain(b.keys()).any(|k| {
        !a.get(k)
            .unwrap_or(&empty)
            .approx_eq(b.get(k).unwrap_or(&empty), CURRENCY_TOLERANCE)
    })
}

/// Every number obtained by changing one digit of `n`'s shortest rendering.
fn digit_typos(n: f64) -> Vec<f64> {
    let text = format!("{n}");
    let mut out = Vec::new();
    for (i, ch) in text.char_indices() {
        let Some(d) = ch.to_digit(10) else { continue };
        for nd in (0..10).filter(|&x| x != d) {
            let mut s = text.clone();
            s.replace_range(i..i + 1, &nd.to_string());
            if let Ok(v) = s.parse::<f64>() {
                if v != n {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Applies `variants` to every node of `ast` in pre-order and renders each
/// resulting formula.
fn formula_variants(ast: &Expr, variants: impl Fn(&Expr) -> Vec<Expr>) -> Vec<String> {
    let mut nodes = Vec::new();
    ast.walk(&mut |e| nodes.push(e.clone()));
    let mut out = Vec::new();
    for (index, node) in nodes.iter().enumerate() {
        for replacement in variants(node) {
            let mut copy = ast.clone();
            let mut i = 0;
            let mut slot = Some(replacement);
            copy.walk_mut(&mut |e| {
                if i == index {
                    if let Some(r) = slot.take() {
                        *e = r;
                    }
                }
                i += 1;
            });
            out.push(copy.to_formula());
        }
    }
    out
}

fn regroupings(e: &Expr) -> Vec<Expr> {
    let Expr::Binary { op, lhs, rhs } = e else {
        return Vec::new();
    };
    let mut out = Vec::new();
    // (a op1 b) op c  ->  a op1 (b op c)
    if let Expr::Binary {
        op: op1,
        lhs: a,
        rhs: b,
    } = &**lhs
    {
        out.push(Expr::binary(
            *op1,
            (**a).clone(),
            Expr::binary(*op, (**b).clone(), (**rhs).clone()),
        ));
    }
    // a op (b op2 c)  ->  (a op b) op2 c
    if let Expr::Binary {
        op: op2,
        lhs: b,
        rhs: c,
    } = &**rhs
    {
        out.push(Expr::binary(
            *op2,
            Expr::binary(*op, (**lhs).clone(), (**b).clone()),
            (**c).clone(),
        ));
    }
    out
}

const STEPS: [(i32, i32); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

fn displacements(e: &Expr, extent: &RangeRef) -> Vec<Expr> {
    match e {
        Expr::Ref(r) => STEPS
            .iter()
            .filter_map(|&(dc, dr)| r.offset(dc, dr))
            .filter(|c| extent.contains(*c))
            .map(Expr::Ref)
            .collect(),
        Expr::Range(range) => STEPS
            .iter()
            .filter_map(|&(dc, dr)| range.offset(dc, dr))
            .filter(|r| extent.contains(r.top_left()) && extent.contains(r.bottom_right()))
            .map(Expr::Range)
            .collect(),
        _ => Vec::new(),
    }
}

fn shortened_sums(e: &Expr) -> Vec<Expr> {
    let Expr::Call {
        func: Function::Sum,
        args,
    } = e
    else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (i, arg) in args.iter().enumerate() {
        let Expr::Range(range) = arg else { continue };
        if !range.is_line() || range.len() < 2 {
            continue;
        }
        let cells: Vec<CellRef> = range.cells().collect();
        let n = cells.len();
        for (from, to) in [(cells[1], cells[n - 1]), (cells[0], cells[n - 2])] {
            let mut new_args = args.clone();
            new_args[i] = Expr::Range(RangeRef::new(from, to));
            out.push(Expr::Call {
                func: Function::Sum,
                args: new_args,
            });
        }
    }
    out
}

/// Candidate mutated contents for `cell` under `kind`, in the fixed order
/// the planner draws from. Empty when the kind does not apply.
pub fn candidate_mutations(reference: &Workbook, cell: CellRef, kind: ErrorKind) -> Vec<String> {
    Context::new(reference).candidates(cell, kind)
}

/// Plans `count` observable seeds on distinct cells.
pub fn plan_seeds(
    reference: &Workbook,
    count: usize,
    kinds: &BTreeSet<ErrorKind>,
    rng_seed: u64,
) -> Result<SeedManifest, SeedError> {
    plan_seeds_excluding(reference, count, kinds, rng_seed, &BTreeSet::new())
}

/// Like [`plan_seeds`], but never seeds the cells in `excluded` (for
/// example cells an audit script overwrites before checking).
pub fn plan_seeds_excluding(
    reference: &Workbook,
    count: usize,
    kinds: &BTreeSet<ErrorKind>,
    rng_seed: u64,
    excluded: &BTreeSet<CellRef>,
) -> Result<SeedManifest, SeedError> {
    let mut manifest = SeedManifest {
        rng_seed,
        reference_name: reference.name.clone(),
        seeds: Vec::new(),
    };
    if count == 0 {
        return Ok(manifest);
    }
    if kinds.is_empty() {
        return Err(SeedError::NoKinds);
    }
    let ctx = Context::new(reference);
    if let Some((at, _)) = ctx.values.iter().find(|(_, v)| v.is_error()) {
        return Err(SeedError::ReferenceHasErrors(*at));
    }

    let mut options: BTreeMap<CellRef, Vec<(ErrorKind, Vec<String>)>> = BTreeMap::new();
    for (at, _) in reference.cells().filter(|(at, _)| !excluded.contains(at)) {
        let per_kind: Vec<(ErrorKind, Vec<String>)> = kinds
            .iter()
            .map(|&k| (k, ctx.candidates(at, k)))
            .filter(|(_, c)| !c.is_empty())
            .collect();
        if !per_kind.is_empty() {
            options.insert(at, per_kind);
        }
    }
    for &k in kinds {
        if !options
            .values()
            .any(|opts| opts.iter().any(|(kind, _)| *kind == k))
        {
            return Err(SeedError::KindInapplicable(k));
        }
    }
    if options.len() < count {
        return Err(SeedError::TooFewEligibleCells {
            requested: count,
            eligible: options.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for index in 0..count {
        let remaining: Vec<CellRef> = options.keys().copied().collect();
        let mut accepted = None;
        for _ in 0..MAX_DRAWS {
            let at = remaining[rng.gen_range(0..remaining.len())];
            let opts = &options[&at];
            let (kind, candidates) = &opts[rng.gen_range(0..opts.len())];
            let mutated = &candidates[rng.gen_range(0..candidates.len())];
            if ctx.observable(at, mutated) {
                accepted = Some(Seed {
                    cell: at,
                    kind: *kind,
                    original: reference.cell(at).content_text(),
                    mutated: mutated.clone(),
                });
                break;
            }
        }
        let seed = accepted.ok_or(SeedError::Unobservable { index })?;
        options.remove(&seed.cell);
        manifest.seeds.push(seed);
    }
    Ok(manifest)
}

/// Applies a manifest. Only the manifest cells change.
pub fn apply_seeds(reference: &Workbook, manifest: &SeedManifest) -> Result<Workbook, ApplyError> {
    let mut out = reference.clone();
    let mut seen = BTreeSet::new();
    for seed in &manifest.seeds {
        if !seen.insert(seed.cell) {
            return Err(ApplyError::DuplicateCell(seed.cell));
        }
        if !reference.contains(seed.cell) {
            return Err(ApplyError::UnknownCell(seed.cell));
        }
        let found = reference.cell(seed.cell).content_text();
        if found != seed.original {
            return Err(ApplyError::OriginalMismatch {
                cell: seed.cell,
                expected: seed.original.clone(),
                found,
            });
        }
        let cell = Cell::from_field(&seed.mutated).map_err(|source| ApplyError::BadMutation {
            cell: seed.cell,
            source,
        })?;
        out.set(seed.cell, cell);
    }
    Ok(out)
}
