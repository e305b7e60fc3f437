//! Spreadsheet models for error-awareness training and peer/self audit.
//!
//! The crate is organised bottom-up:
//!
//! - [`cell`], [`formula`], [`workbook`], [`graph`] and [`eval`] parse and
//!   evaluate small single-sheet models;
//! - [`seeding`] injects known defects into a correct model;
//! - [`audit`] diffs models, runs scripted audit sheets and self-audit
//!   checklists, and ranks declared risks;
//! - [`cohort`] pairs auditors, grades them against ground truth and
//!   computes corpus error rates and feedback tallies.
//!
//! ```
//! use sheetaudit::{evaluate, load_workbook, CellRef, Value};
//!
//! let wb = load_workbook("4000,1500,=A1+B1\n").unwrap();
//! let values = evaluate(&wb);
//! let total: CellRef = "C1".parse().unwrap();
//! assert_eq!(values[&total], Value::Number(5500.0));
//! ```

pub mod audit;
pub mod cell;
pub mod cohort;
pub mod eval;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod seeding;
pub mod workbook;

pub use cell::{CellRef, RangeRef};
pub use eval::{evaluate, CellError, Value, Values, CURRENCY_TOLERANCE};
pub use formula::{parse_formula, Expr, ParseError};
pub use graph::{dependents, precedents, DependencyGraph};
pub use seeding::{apply_seeds, plan_seeds, ErrorKind, Seed, SeedManifest};
pub use workbook::{load_workbook, Cell, LoadError, UserGuide, Workbook};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/workbooks.md")]
    mod workbooks {}
    #[doc = include_str!("../../../book/src/seeding.md")]
    mod seeding {}
    #[doc = include_str!("../../../book/src/auditing.md")]
    mod auditing {}
    #[doc = include_str!("../../../book/src/cohorts.md")]
    mod cohorts {}
}
