//! Synthetic workbook generator and an evaluator oracle that shares no
//! code with the library: expressions are kept as a test-side tree,
//! rendered to grid text for the library, and evaluated here by naive
//! fixed-point iteration.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// (row, column), both 1-based; derived ordering is row-major.
pub type Pos = (u16, u8);

#[derive(Debug, Clone)]
pub enum TArg {
    Ref(Pos),
    Range(Pos, Pos),
    Num(String),
}

#[derive(Debug, Clone)]
pub enum TExpr {
    Num(String),
    Ref(Pos),
    Bin(char, Box<TExpr>, Box<TExpr>),
    Neg(Box<TExpr>),
    Sum(Vec<TArg>),
}

#[derive(Debug, Clone)]
pub enum TCell {
    Num(String),
    Text(String),
    Formula(TExpr),
}

#[derive(Debug, Clone, Default)]
pub struct Synthetic {
    pub cells: BTreeMap<Pos, TCell>,
}

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    pub rows: u16,
    pub cols: u8,
    pub empty_ratio: f64,
    pub input_ratio: f64,
    pub allow_div: bool,
    pub allow_text: bool,
    pub max_depth: u32,
}

impl GenOptions {
    /// Up to 100 cells, every error path reachable.
    pub fn wide() -> GenOptions {
        GenOptions {
            rows: 10,
            cols: 10,
            empty_ratio: 0.15,
            input_ratio: 0.4,
            allow_div: true,
            allow_text: true,
            max_depth: 3,
        }
    }

    /// Up to 60 cells, error-free by construction.
    pub fn clean() -> GenOptions {
        GenOptions {
            rows: 6,
            cols: 10,
            empty_ratio: 0.05,
            input_ratio: 0.35,
            allow_div: false,
            allow_text: false,
            max_depth: 2,
        }
    }
}

pub fn a1((row, col): Pos) -> String {
    format!("{}{row}", char::from(b'A' + col - 1))
}

fn number(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{}.{}", rng.gen_range(0..100), rng.gen_range(1..10)),
        1 => "0".to_string(),
        _ => rng.gen_range(1..500).to_string(),
    }
}

fn render_arg(a: &TArg) -> String {
    match a {
        TArg::Ref(p) => a1(*p),
        TArg::Range(p, q) => format!("{}:{}", a1(*p), a1(*q)),
        TArg::Num(n) => n.clone(),
    }
}

pub fn render(e: &TExpr) -> String {
    match e {
        TExpr::Num(n) => n.clone(),
        TExpr::Ref(p) => a1(*p),
        TExpr::Bin(op, l, r) => format!("({}{op}{})", render(l), render(r)),
        TExpr::Neg(x) => format!("-({})", render(x)),
        TExpr::Sum(args) => format!(
            "SUM({})",
            args.iter().map(render_arg).collect::<Vec<_>>().join(",")
        ),
    }
}

impl Synthetic {
    pub fn to_grid(&self, name: &str) -> String {
        let mut out = format!("#name {name}\n");
        let rows = self.cells.keys().map(|p| p.0).max().unwrap_or(0);
        let cols = self.cells.keys().map(|p| p.1).max().unwrap_or(0);
        for r in 1..=rows {
            let fields: Vec<String> = (1..=cols)
                .map(|c| match self.cells.get(&(r, c)) {
                    None => String::new(),
                    Some(TCell::Num(n)) => n.clone(),
                    Some(TCell::Text(t)) => t.clone(),
                    Some(TCell::Formula(e)) => format!("\"={}\"", render(e)),
                })
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn workbook(&self, name: &str) -> sheetaudit::Workbook {
        sheetaudit::load_workbook(&self.to_grid(name)).expect("synthetic grid loads")
    }

    pub fn formula_count(&self) -> usize {
        self.cells
            .values()
            .filter(|c| matches!(c, TCell::Formula(_)))
            .count()
    }
}

fn gen_expr(
    rng: &mut ChaCha8Rng,
    earlier: &[Pos],
    here: Pos,
    opts: &GenOptions,
    depth: u32,
) -> TExpr {
    let leaf = depth >= opts.max_depth || rng.gen_bool(0.3);
    if leaf {
        return if rng.gen_bool(0.8) {
            TExpr::Ref(earlier[rng.gen_range(0..earlier.len())])
        } else {
            TExpr::Num(number(rng))
        };
    }
    match rng.gen_range(0..10) {
        0 => TExpr::Neg(Box::new(gen_expr(rng, earlier, here, opts, depth + 1))),
        1 | 2 => gen_sum(rng, earlier, here),
        _ => {
            let ops: &[char] = if opts.allow_div {
                &['+', '-', '*', '/']
            } else {
                &['+', '-', '*']
            };
            let op = ops[rng.gen_range(0..ops.len())];
            TExpr::Bin(
                op,
                Box::new(gen_expr(rng, earlier, here, opts, depth + 1)),
                Box::new(gen_expr(rng, earlier, here, opts, depth + 1)),
            )
        }
    }
}

/// A SUM whose ranges lie wholly before `here` in row-major order.
fn gen_sum(rng: &mut ChaCha8Rng, earlier: &[Pos], (row, col): Pos) -> TExpr {
    let mut args = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let arg = if col > 2 && rng.gen_bool(0.5) {
            let c1 = rng.gen_range(1..col - 1);
            let c2 = rng.gen_range(c1 + 1..col);
            TArg::Range((row, c1), (row, c2))
        } else if row > 1 && rng.gen_bool(0.6) {
            let r1 = rng.gen_range(1..row);
            let r2 = rng.gen_range(r1..row);
            let c1 = rng.gen_range(1..=col.max(2));
            let c2 = rng.gen_range(c1..=col.max(2));
            TArg::Range((r1, c1), (r2, c2))
        } else if rng.gen_bool(0.8) {
            TArg::Ref(earlier[rng.gen_range(0..earlier.len())])
        } else {
            TArg::Num(number(rng))
        };
        args.push(arg);
    }
    TExpr::Sum(args)
}

/// Acyclic by construction: every formula reads only earlier cells.
pub fn gen_acyclic(rng: &mut ChaCha8Rng, opts: &GenOptions) -> Synthetic {
    let rows = rng.gen_range(1..=opts.rows);
    let cols = rng.gen_range(2..=opts.cols);
    let mut s = Synthetic::default();
    let mut earlier: Vec<Pos> = Vec::new();
    for r in 1..=rows {
        for c in 1..=cols {
            let here = (r, c);
            if !earlier.is_empty() && rng.gen_bool(opts.empty_ratio) {
                earlier.push(here);
                continue;
            }
            let cell = if earlier.is_empty() || rng.gen_bool(opts.input_ratio) {
                if opts.allow_text && rng.gen_bool(0.1) {
                    TCell::Text(format!("t{}", rng.gen_range(0..5)))
                } else {
                    TCell::Num(number(rng))
                }
            } else {
                TCell::Formula(gen_expr(rng, &earlier, here, opts, 0))
            };
            s.cells.insert(here, cell);
            earlier.push(here);
        }
    }
    s
}

pub fn expand(p: Pos, q: Pos) -> Vec<Pos> {
    let mut out = Vec::new();
    for r in p.0.min(q.0)..=p.0.max(q.0) {
        for c in p.1.min(q.1)..=p.1.max(q.1) {
            out.push((r, c));
        }
    }
    out
}

pub fn reads(e: &TExpr, out: &mut BTreeSet<Pos>) {
    match e {
        TExpr::Num(_) => {}
        TExpr::Ref(p) => {
            out.insert(*p);
        }
        TExpr::Bin(_, l, r) => {
            reads(l, out);
            reads(r, out);
        }
        TExpr::Neg(x) => reads(x, out),
        TExpr::Sum(args) => {
            for a in args {
                match a {
                    TArg::Ref(p) => {
                        out.insert(*p);
                    }
                    TArg::Range(p, q) => out.extend(expand(*p, *q)),
                    TArg::Num(_) => {}
                }
            }
        }
    }
}

pub fn precedent_map(s: &Synthetic) -> BTreeMap<Pos, BTreeSet<Pos>> {
    s.cells
        .iter()
        .filter_map(|(p, c)| match c {
            TCell::Formula(e) => {
                let mut set = BTreeSet::new();
                reads(e, &mut set);
                Some((*p, set))
            }
            _ => None,
        })
        .collect()
}

/// Makes some formula read a cell that already depends on it (possibly
/// itself), guaranteeing at least one cycle. Returns false if the sheet
/// has no formula.
pub fn inject_cycle(rng: &mut ChaCha8Rng, s: &mut Synthetic) -> bool {
    let formulas: Vec<Pos> = precedent_map(s).keys().copied().collect();
    if formulas.is_empty() {
        return false;
    }
    let target = formulas[rng.gen_range(0..formulas.len())];
    let prec = precedent_map(s);
    // Cells that transitively read `target`, plus `target` itself.
    let mut downstream: BTreeSet<Pos> = [target].into();
    loop {
        let before = downstream.len();
        for (cell, reads) in &prec {
            if reads.iter().any(|p| downstream.contains(p)) {
                downstream.insert(*cell);
            }
        }
        if downstream.len() == before {
            break;
        }
    }
    let pick: Vec<Pos> = downstream.into_iter().collect();
    let back = pick[rng.gen_range(0..pick.len())];
    if let Some(TCell::Formula(e)) = s.cells.get_mut(&target) {
        *e = TExpr::Bin('+', Box::new(e.clone()), Box::new(TExpr::Ref(back)));
    }
    true
}

/// Cells on a cycle or reading one, by brute-force reachability.
pub fn cycle_reachable(s: &Synthetic) -> BTreeSet<Pos> {
    let prec = precedent_map(s);
    let closure = |start: Pos| {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<Pos> = prec.get(&start).into_iter().flatten().copied().collect();
        while let Some(p) = stack.pop() {
            if seen.insert(p) {
                stack.extend(prec.get(&p).into_iter().flatten().copied());
            }
        }
        seen
    };
    let on_cycle: BTreeSet<Pos> = prec
        .keys()
        .copied()
        .filter(|p| closure(*p).contains(p))
        .collect();
    prec.keys()
        .copied()
        .filter(|p| on_cycle.contains(p) || closure(*p).iter().any(|q| on_cycle.contains(q)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum OVal {
    Num(f64),
    Text(String),
    Empty,
    Err(&'static str),
}

fn num_of(v: &OVal) -> Result<f64, &'static str> {
    match v {
        OVal::Num(n) => Ok(*n),
        OVal::Empty => Ok(0.0),
        OVal::Text(_) => Err("TYPE"),
        OVal::Err(e) => Err(e),
    }
}

fn checked(n: f64) -> OVal {
    if n.is_finite() {
        OVal::Num(n)
    } else {
        OVal::Err("DIV0")
    }
}

fn oracle_expr(e: &TExpr, known: &BTreeMap<Pos, OVal>) -> OVal {
    let get = |p: &Pos| known.get(p).cloned().unwrap_or(OVal::Empty);
    match e {
        TExpr::Num(n) => OVal::Num(n.parse().unwrap()),
        TExpr::Ref(p) => get(p),
        TExpr::Neg(x) => match num_of(&oracle_expr(x, known)) {
            Ok(n) => OVal::Num(-n),
            Err(e) => OVal::Err(e),
        },
        TExpr::Bin(op, l, r) => {
            let a = oracle_expr(l, known);
            if let OVal::Err(e) = a {
                return OVal::Err(e);
            }
            let b = oracle_expr(r, known);
            if let OVal::Err(e) = b {
                return OVal::Err(e);
            }
            let (x, y) = match (num_of(&a), num_of(&b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => return OVal::Err(e),
            };
            match op {
                '+' => checked(x + y),
                '-' => checked(x - y),
                '*' => checked(x * y),
                _ if y == 0.0 => OVal::Err("DIV0"),
                _ => checked(x / y),
            }
        }
        TExpr::Sum(args) => {
            let mut total = 0.0;
            for a in args {
                let items: Vec<OVal> = match a {
                    TArg::Ref(p) => vec![get(p)],
                    TArg::Range(p, q) => expand(*p, *q).iter().map(get).collect(),
                    TArg::Num(n) => vec![OVal::Num(n.parse().unwrap())],
                };
                for v in items {
                    match num_of(&v) {
                        Ok(n) => total += n,
                        Err(e) => return OVal::Err(e),
                    }
                }
            }
            checked(total)
        }
    }
}

/// Naive fixed point: repeatedly evaluate any formula whose inputs are all
/// known. Formulas never resolved are reported as CYCLE.
pub fn oracle_eval(s: &Synthetic) -> BTreeMap<Pos, OVal> {
    let mut known: BTreeMap<Pos, OVal> = BTreeMap::new();
    let mut pending: BTreeMap<Pos, (TExpr, BTreeSet<Pos>)> = BTreeMap::new();
    for (p, c) in &s.cells {
        match c {
            TCell::Num(n) => {
                known.insert(*p, OVal::Num(n.parse().unwrap()));
            }
            TCell::Text(t) => {
                known.insert(*p, OVal::Text(t.clone()));
            }
            TCell::Formula(e) => {
                let mut r = BTreeSet::new();
                reads(e, &mut r);
                pending.insert(*p, (e.clone(), r));
            }
        }
    }
    loop {
        let ready: Vec<Pos> = pending
            .iter()
            .filter(|(_, (_, r))| r.iter().all(|q| !pending.contains_key(q)))
            .map(|(p, _)| *p)
            .collect();
        if ready.is_empty() {
            break;
        }
        for p in ready {
            let (e, _) = pending.remove(&p).unwrap();
            let v = match oracle_expr(&e, &known) {
                OVal::Empty => OVal::Num(0.0),
                v => v,
            };
            known.insert(p, v);
        }
    }
    for p in pending.into_keys() {
        known.insert(p, OVal::Err("CYCLE"));
    }
    known
}

/// Library value in oracle terms.
pub fn to_oval(v: &sheetaudit::Value) -> OVal {
    use sheetaudit::{CellError, Value};
    match v {
        Value::Number(n) => OVal::Num(*n),
        Value::Text(t) => OVal::Text(t.clone()),
        Value::Empty => OVal::Empty,
        Value::Error(CellError::Div0) => OVal::Err("DIV0"),
        Value::Error(CellError::BadRef) => OVal::Err("BADREF"),
        Value::Error(CellError::Cycle) => OVal::Err("CYCLE"),
        Value::Error(CellError::Type) => OVal::Err("TYPE"),
    }
}

pub fn pos_of(c: sheetaudit::CellRef) -> Pos {
    (c.row(), c.column())
}

/// Compares the library's evaluation against the oracle on every cell.
/// Returns the first mismatch.
pub fn compare_with_oracle(s: &Synthetic) -> Result<(), String> {
    let wb = s.workbook("synthetic");
    let lib = sheetaudit::evaluate(&wb);
    let oracle = oracle_eval(s);
    let lib: BTreeMap<Pos, OVal> = lib.iter().map(|(c, v)| (pos_of(*c), to_oval(v))).collect();
    for (p, want) in &oracle {
        let got = lib.get(p).cloned().unwrap_or(OVal::Empty);
        if &got != want {
            return Err(format!(
                "{}: library {got:?}, oracle {want:?}\n{}",
                a1(*p),
                s.to_grid("synthetic")
            ));
        }
    }
    if lib.len() != oracle.len() {
        return Err(format!(
            "cell count differs: {} vs {}",
            lib.len(),
            oracle.len()
        ));
    }
    Ok(())
}
