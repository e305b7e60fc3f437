//! A1-style cell addressing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_COLUMN: u8 = 26;
pub const MAX_ROW: u16 = 999;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefError {
    #[error("`{0}` is not an A1 cell reference")]
    Syntax(String),
    #[error("column of `{0}` is outside A..Z")]
    ColumnOutOfRange(String),
    #[error("row of `{0}` is outside 1..999")]
    RowOutOfRange(String),
}

/// A single cell address. Ordering is row-major, so iteration over a
/// `BTreeMap<CellRef, _>` walks the sheet top to bottom, left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellRef {
    row: u16,
    column: u8,
}

impl CellRef {
    /// `column` is 1-based (A = 1).
    pub fn new(column: u8, row: u16) -> Option<CellRef> {
        if (1..=MAX_COLUMN).contains(&column) && (1..=MAX_ROW).contains(&row) {
            Some(CellRef { row, column })
        } else {
            None
        }
    }

    pub fn column(self) -> u8 {
        self.column
    }

    pub fn row(self) -> u16 {
        self.row
    }

    pub fn column_letter(self) -> char {
        (b'A' + self.column - 1) as char
    }

    /// Moves by the given deltas, or `None` when the result leaves the grid.
    pub fn offset(self, d_col: i32, d_row: i32) -> Option<CellRef> {
        let column = i32::from(self.column) + d_col;
        let row = i32::from(self.row) + d_row;
        if column < 1 || row < 1 || column > i32::from(MAX_COLUMN) || row > i32::from(MAX_ROW) {
            return None;
        }
        CellRef::new(column as u8, row as u16)
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.column_letter(), self.row)
    }
}

impl FromStr for CellRef {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: String = s.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        let digits = &s[letters.len()..];
        if letters.is_empty() || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RefError::Syntax(s.to_string()));
        }
        if letters.len() > 1 {
            return Err(RefError::ColumnOutOfRange(s.to_string()));
        }
        let column = letters.as_bytes()[0].to_ascii_uppercase() - b'A' + 1;
        let row: u32 = digits
            .parse()
            .map_err(|_| RefError::RowOutOfRange(s.to_string()))?;
        if row == 0 || row > u32::from(MAX_ROW) {
            return Err(RefError::RowOutOfRange(s.to_string()));
        }
        Ok(CellRef::new(column, row as u16).expect("bounds checked"))
    }
}

impl Serialize for CellRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CellRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rectangular block of cells with normalized corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RangeRef {
    top_left: CellRef,
    bottom_right: CellRef,
}

impl RangeRef {
    /// Builds a range from any two opposite corners.
    pub fn new(a: CellRef, b: CellRef) -> RangeRef {
        let top_left = CellRef::new(a.column.min(b.column), a.row.min(b.row)).unwrap();
        let bottom_right = CellRef::new(a.column.max(b.column), a.row.max(b.row)).unwrap();
        RangeRef {
            top_left,
            bottom_right,
        }
    }

    pub fn top_left(&self) -> CellRef {
        self.top_left
    }

    pub fn bottom_right(&self) -> CellRef {
        self.bottom_right
    }

    pub fn width(&self) -> usize {
        usize::from(self.bottom_right.column - self.top_left.column) + 1
    }

    pub fn height(&self) -> usize {
        usize::from(self.bottom_right.row - self.top_left.row) + 1
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True for a single row or a single column.
    pub fn is_line(&self) -> bool {
        self.width() == 1 || self.height() == 1
    }

    pub fn contains(&self, cell: CellRef) -> bool {
        (self.top_left.column..=self.bottom_right.column).contains(&cell.column)
            && (self.top_left.row..=self.bottom_right.row).contains(&cell.row)
    }

    pub fn overlaps(&self, other: &RangeRef) -> bool {
        self.top_left.column <= other.bottom_right.column
            && other.top_left.column <= self.bottom_right.column
            && self.top_left.row <= other.bottom_right.row
            && other.top_left.row <= self.bottom_right.row
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        let (c0, c1) = (self.top_left.column, self.bottom_right.column);
        (self.top_left.row..=self.bottom_right.row)
            .flat_map(move |row| (c0..=c1).map(move |column| CellRef { row, column }))
    }

    pub fn offset(&self, d_col: i32, d_row: i32) -> Option<RangeRef> {
        Some(RangeRef::new(
            self.top_left.offset(d_col, d_row)?,
            self.bottom_right.offset(d_col, d_row)?,
        ))
    }
}

impl fmt::Display for RangeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.top_left, self.bottom_right)
    }
}

impl FromStr for RangeRef {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| RefError::Syntax(s.to_string()))?;
        Ok(RangeRef::new(a.trim().parse()?, b.trim().parse()?))
    }
}
