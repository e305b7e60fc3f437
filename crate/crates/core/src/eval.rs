//! Evaluation in dependency order.
//!
//! Semantics:
//! - empty cells read as 0 in arithmetic; text in arithmetic is `#VALUE!`;
//! - an error in any cell a formula reads propagates to the formula (for a
//!   binary operator the left operand's error wins, for functions the first
//!   error in argument order);
//! - division by zero, and any non-finite arithmetic result, is `#DIV/0!`;
//! - `LOOKUP` is an exact match (text compares case-insensitively), a miss
//!   is `#REF!`;
//! - a formula whose result is empty yields 0;
//! - every cell on, or downstream of, a reference cycle is `#CYCLE!`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::cell::CellRef;
use crate::formula::{BinOp, Expr, Function};
use crate::graph::DependencyGraph;
use crate::workbook::{Cell, Workbook};

/// Absolute tolerance for comparing currency values (half a penny).
pub const CURRENCY_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CellError {
    Div0,
    BadRef,
    Cycle,
    Type,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellError::Div0 => "#DIV/0!",
            CellError::BadRef => "#REF!",
            CellError::Cycle => "#CYCLE!",
            CellError::Type => "#VALUE!",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Value {
    Number(f64),
    Text(String),
    Empty,
    Error(CellError),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Value::Error(_))
    }

    /// Equal kind and, for numbers, within `tolerance`.
    pub fn approx_eq(&self, other: &Value, tolerance: f64) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => (a - b).abs() <= tolerance,
            (a, b) => a == b,
        }
    }

    fn to_number(&self) -> Result<f64, CellError> {
        match self {
            Value::Number(n) => Ok(*n),
            Value::Empty => Ok(0.0),
            Value::Text(_) => Err(CellError::Type),
            Value::Error(e) => Err(*e),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Text(t) => f.write_str(t),
            Value::Empty => Ok(()),
            Value::Error(e) => write!(f, "{e}"),
        }
    }
}

/// Evaluated values of every non-empty cell.
pub type Values = BTreeMap<CellRef, Value>;

fn literal_value(cell: &Cell) -> Value {
    match cell {
        Cell::Empty => Value::Empty,
        Cell::Number(n) => Value::Number(*n),
        Cell::Text(t) => Value::Text(t.clone()),
        Cell::Formula(_) => unreachable!("formulas are evaluated"),
    }
}

/// Evaluates a single expression against already-computed values. Cells
/// missing from `values` read as empty.
pub fn eval_expr(expr: &Expr, values: &Values) -> Value {
    let get = |c: &CellRef| values.get(c).cloned().unwrap_or(Value::Empty);
    match expr {
        Expr::Number(n) => Value::Number(*n),
        Expr::Text(t) => Value::Text(t.clone()),
        Expr::Ref(r) => get(r),
        // Bare ranges only occur as function arguments.
        Expr::Range(_) => Value::Error(CellError::Type),
        Expr::Neg(inner) => match eval_expr(inner, values) {
            Value::Error(e) => Value::Error(e),
            v => match v.to_number() {
                Ok(n) => Value::Number(-n),
                Err(e) => Value::Error(e),
            },
        },
        Expr::Binary { op, lhs, rhs } => {
            let l = eval_expr(lhs, values);
            if let Value::Error(e) = l {
                return Value::Error(e);
            }
            let r = eval_expr(rhs, values);
            if let Value::Error(e) = r {
                return Value::Error(e);
            }
            let (a, b) = match (l.to_number(), r.to_number()) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Value::Error(e),
            };
            let out = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div if b == 0.0 => return Value::Error(CellError::Div0),
                BinOp::Div => a / b,
            };
            finite(out)
        }
        Expr::Call {
            func: Function::Sum,
            args,
        } => {
            let mut total = 0.0;
            for arg in args {
                let items: Vec<Value> = match arg {
                    Expr::Range(range) => range.cells().map(|c| get(&c)).collect(),
                    other => vec![eval_expr(other, values)],
                };
                for v in items {
                    match v.to_number() {
                        Ok(n) => total += n,
                        Err(e) => return Value::Error(e),
                    }
                }
            }
            finite(total)
        }
        Expr::Call {
            func: Function::Lookup,
            args,
        } => {
            let key = eval_expr(&args[0], values);
            if let Value::Error(e) = key {
                return Value::Error(e);
            }
            let (Expr::Range(keys), Expr::Range(results)) = (&args[1], &args[2]) else {
                return Value::Error(CellError::Type);
            };
            let key_vals: Vec<Value> = keys.cells().map(|c| get(&c)).collect();
            let result_vals: Vec<Value> = results.cells().map(|c| get(&c)).collect();
            if let Some(Value::Error(e)) =
                key_vals.iter().chain(&result_vals).find(|v| v.is_error())
            {
                return Value::Error(*e);
            }
            match key_vals.iter().position(|k| lookup_match(&key, k)) {
                Some(i) => result_vals[i].clone(),
                None => Value::Error(CellError::BadRef),
            }
        }
    }
}

fn finite(n: f64) -> Value {
    if n.is_finite() {
        Value::Number(n)
    } else {
        Value::Error(CellError::Div0)
    }
}

fn lookup_match(key: &Value, candidate: &Value) -> bool {
    match (key, candidate) {
        (Value::Number(a), Value::Number(b)) => a == b,
        (Value::Text(a), Value::Text(b)) => a.eq_ignore_ascii_case(b),
        _ => false,
    }
}

/// Evaluates every cell of the workbook.
pub fn evaluate(workbook: &Workbook) -> Values {
    evaluate_with_graph(workbook, &DependencyGraph::build(workbook))
}

pub fn evaluate_with_graph(workbook: &Workbook, graph: &DependencyGraph) -> Values {
    let mut values: Values = workbook
        .cells()
        .filter(|(_, c)| !c.is_formula())
        .map(|(at, c)| (at, literal_value(c)))
        .collect();
    let (order, stuck) = graph.topological_order();
    for at in order {
        let formula = workbook
            .cell(at)
            .formula()
            .expect("graph nodes are formulas");
        let v = match eval_expr(formula.ast(), &values) {
            Value::Empty => Value::Number(0.0),
            v => v,
        };
        values.insert(at, v);
    }
    for at in stuck {
        values.insert(at, Value::Error(CellError::Cycle));
    }
    values
}
