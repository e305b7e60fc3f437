//! Workbook model and the `.grid` text format.
//!
//! A grid file is UTF-8 text. Header records come first, one per line:
//!
//! ```text
//! #name <text>
//! #guide builder=<text>;date=<YYYY-MM-DD>;purpose=<text>
//! #region <name>=<A1>:<A1>
//! ```
//!
//! The first line that does not start with `#` is spreadsheet row 1. Rows are
//! comma separated; `"` quotes a field (a doubled `""` inside quotes is a
//! literal quote). A field starting with `=` is a formula, a plain decimal
//! is a number, an empty field is an empty cell and anything else is text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use thiserror::Error;

use crate::cell::{CellRef, RangeRef, RefError, MAX_COLUMN, MAX_ROW};
use crate::formula::{parse_formula, Expr, ParseError};

#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    source: String,
    ast: Expr,
}

impl Formula {
    pub fn parse(source: &str) -> Result<Formula, ParseError> {
        Ok(Formula {
            ast: parse_formula(source)?,
            source: source.to_string(),
        })
    }

    pub fn from_ast(ast: Expr) -> Formula {
        Formula {
            source: ast.to_formula(),
            ast,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Number(f64),
    Text(String),
    Formula(Formula),
}

impl Cell {
    /// Interprets one grid field.
    pub fn from_field(field: &str) -> Result<Cell, ParseError> {
        if field.is_empty() {
            Ok(Cell::Empty)
        } else if field.starts_with('=') {
            Ok(Cell::Formula(Formula::parse(field)?))
        } else if is_decimal(field) {
            Ok(Cell::Number(field.parse().expect("decimal syntax checked")))
        } else {
            Ok(Cell::Text(field.to_string()))
        }
    }

    /// The field text this content is written as. Numbers use the shortest
    /// representation that reads back to the same value.
    pub fn content_text(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Number(n) => format!("{n}"),
            Cell::Text(t) => t.clone(),
            Cell::Formula(f) => f.source.clone(),
        }
    }

    pub fn is_formula(&self) -> bool {
        matches!(self, Cell::Formula(_))
    }

    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Cell::Formula(f) => Some(f),
            _ => None,
        }
    }
}

/// `-?digits(.digits)?`, or with the integer part omitted.
fn is_decimal(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => !f.is_empty() && digits(f) && digits(int),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UserGuide {
    pub builder: String,
    /// Raw text as written; see [`UserGuide::date_created`].
    pub date: String,
    pub purpose: String,
}

impl UserGuide {
    pub fn date_created(&self) -> Option<NaiveDate> {
        NaiveDate::parse_from_str(self.date.trim(), "%Y-%m-%d").ok()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workbook {
    pub name: String,
    cells: BTreeMap<CellRef, Cell>,
    pub user_guide: Option<UserGuide>,
    regions: BTreeMap<String, RangeRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("region `{0}` is declared twice")]
    Duplicate(String),
    #[error("region name `{0}` is invalid")]
    BadName(String),
}

impl Workbook {
    pub fn new(name: impl Into<String>) -> Workbook {
        Workbook {
            name: name.into(),
            ..Workbook::default()
        }
    }

    pub fn cell(&self, at: CellRef) -> &Cell {
        self.cells.get(&at).unwrap_or(&Cell::Empty)
    }

    pub fn contains(&self, at: CellRef) -> bool {
        self.cells.contains_key(&at)
    }

    /// Stores `cell`, or removes the entry when it is empty.
    pub fn set(&mut self, at: CellRef, cell: Cell) {
        if cell == Cell::Empty {
            self.cells.remove(&at);
        } else {
            self.cells.insert(at, cell);
        }
    }

    /// Non-empty cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (CellRef, &Cell)> {
        self.cells.iter().map(|(k, v)| (*k, v))
    }

    pub fn formula_cells(&self) -> impl Iterator<Item = (CellRef, &Formula)> {
        self.cells
            .iter()
            .filter_map(|(k, v)| v.formula().map(|f| (*k, f)))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Bounding box of the non-empty cells, anchored at A1.
    pub fn used_extent(&self) -> Option<RangeRef> {
        let max_col = self.cells.keys().map(|c| c.column()).max()?;
        let max_row = self.cells.keys().map(|c| c.row()).max()?;
        Some(RangeRef::new(
            CellRef::new(1, 1).unwrap(),
            CellRef::new(max_col, max_row).unwrap(),
        ))
    }

    pub fn regions(&self) -> &BTreeMap<String, RangeRef> {
        &self.regions
    }

    pub fn region(&self, name: &str) -> Option<RangeRef> {
        self.regions.get(name).copied()
    }

    pub fn add_region(&mut self, name: &str, range: RangeRef) -> Result<(), RegionError> {
        if name.is_empty() || name.contains('=') || name.contains(char::is_whitespace) {
            return Err(RegionError::BadName(name.to_string()));
        }
        if self.regions.contains_key(name) {
            return Err(RegionError::Duplicate(name.to_string()));
        }
        self.regions.insert(name.to_string(), range);
        Ok(())
    }

    /// True when both workbooks hold the same content in every cell.
    pub fn same_content(&self, other: &Workbook) -> bool {
        self.cells.len() == other.cells.len()
            && self
                .cells
                .iter()
                .all(|(k, v)| other.cell(*k).content_text() == v.content_text())
    }

    /// Serializes to the grid format. Loading the result yields an equal
    /// workbook.
    pub fn to_grid_string(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "#name {}", self.name);
        }
        if let Some(g) = &self.user_guide {
            let _ = writeln!(
                out,
                "#guide builder={};date={};purpose={}",
                g.builder, g.date, g.purpose
            );
        }
        for (name, range) in &self.regions {
            let _ = writeln!(out, "#region {name}={range}");
        }
        let Some(extent) = self.used_extent() else {
            return out;
        };
        for row in 1..=extent.bottom_right().row() {
            let last = self
                .cells
                .keys()
                .filter(|c| c.row() == row)
                .map(|c| c.column())
                .max()
                .unwrap_or(0);
            let fields: Vec<String> = (1..=last)
                .map(|col| quote_field(&self.cell(CellRef::new(col, row).unwrap()).content_text()))
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

fn quote_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) || field.starts_with('#') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("row {row}: unterminated quoted field")]
    UnterminatedQuote { row: usize },
    #[error("row {row}: more than {MAX_COLUMN} columns")]
    TooManyColumns { row: usize },
    #[error("more than {MAX_ROW} rows")]
    TooManyRows,
    #[error("cell {cell} (row {}, column {}): {source}", cell.row(), cell.column())]
    Formula { cell: CellRef, source: ParseError },
    #[error("region `{name}` ({range}) lies outside the grid")]
    RegionOutOfExtent { name: String, range: RangeRef },
}

fn split_fields(line: &str, row: usize) -> Result<Vec<String>, LoadError> {
    let mut fields = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        let mut field = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            loop {
                match chars.next() {
                    None => return Err(LoadError::UnterminatedQuote { row }),
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        field.push('"');
                    }
                    Some('"') => break,
                    Some(c) => field.push(c),
                }
            }
            // Anything between the closing quote and the next comma is kept.
            while let Some(&c) = chars.peek() {
                if c == ',' {
                    break;
                }
                field.push(c);
                chars.next();
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c == ',' {
                    break;
                }
                field.push(c);
                chars.next();
            }
        }
        fields.push(field);
        if chars.next().is_none() {
            return Ok(fields);
        }
    }
}

fn header_error(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Header {
        line,
        message: message.into(),
    }
}

fn parse_guide(body: &str, line: usize) -> Result<UserGuide, LoadError> {
    let mut guide = UserGuide::default();
    for part in body.split(';') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| header_error(line, format!("guide entry `{part}` lacks `=`")))?;
        match key.trim() {
            "builder" => guide.builder = value.to_string(),
            "date" => guide.date = value.to_string(),
            "purpose" => guide.purpose = value.to_string(),
            other => return Err(header_error(line, format!("unknown guide field `{other}`"))),
        }
    }
    Ok(guide)
}

/// Parses grid text into a workbook.
pub fn load_workbook(text: &str) -> Result<Workbook, LoadError> {
    let mut wb = Workbook::default();
    let mut lines = text.lines().enumerate().peekable();
    let mut pending_regions = Vec::new();

    while let Some((idx, line)) = lines.peek().copied() {
        let Some(rest) = line.strip_prefix('#') else {
            break;
        };
        lines.next();
        let line_no = idx + 1;
        let (tag, body) = rest.split_once(' ').unwrap_or((rest, ""));
        match tag {
            "name" => wb.name = body.to_string(),
            "guide" => wb.user_guide = Some(parse_guide(body, line_no)?),
            "region" => {
                let (name, range) = body.split_once('=').ok_or_else(|| {
                    header_error(line_no, "region record must be `<name>=<A1>:<A1>`")
                })?;
                let range: RangeRef = range
                    .trim()
                    .parse()
                    .map_err(|e: RefError| header_error(line_no, e.to_string()))?;
                wb.add_region(name.trim(), range)
                    .map_err(|e| header_error(line_no, e.to_string()))?;
                pending_regions.push((name.trim().to_string(), range));
            }
            other => {
                return Err(header_error(
                    line_no,
                    format!("unknown header record `#{other}`"),
                ))
            }
        }
    }

    let mut rows = 0usize;
    let mut width = 0usize;
    for (row_idx, (_, line)) in lines.enumerate() {
        let row = row_idx + 1;
        let fields = split_fields(line, row)?;
        if row > usize::from(MAX_ROW) {
            if fields.iter().any(|f| !f.is_empty()) {
                return Err(LoadError::TooManyRows);
            }
            continue;
        }
        rows = row;
        for (col_idx, field) in fields.iter().enumerate() {
            if field.is_empty() {
                continue;
            }
            if col_idx >= usize::from(MAX_COLUMN) {
                return Err(LoadError::TooManyColumns { row });
            }
            width = width.max(col_idx + 1);
            let at = CellRef::new(col_idx as u8 + 1, row as u16).unwrap();
            let cell = Cell::from_field(field)
                .map_err(|source| LoadError::Formula { cell: at, source })?;
            wb.set(at, cell);
        }
        width = width.max(fields.len().min(usize::from(MAX_COLUMN)));
    }

    for (name, range) in pending_regions {
        let br = range.bottom_right();
        if usize::from(br.row()) > rows || usize::from(br.column()) > width {
            return Err(LoadError::RegionOutOfExtent { name, range });
        }
    }
    Ok(wb)
}
