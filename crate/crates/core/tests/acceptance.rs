//! Acceptance criteria. Runs as a plain binary (`harness = false`) so each
//! criterion prints exactly one PASS/FAIL line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheetaudit::audit::{diff_workbooks, run_audit_script, Classification};
use sheetaudit::cohort::{
    compute_metrics, make_pairing, tally_feedback, PairingError, Response, SheetResult,
};
use sheetaudit::seeding::plan_seeds_excluding;
use sheetaudit::{
    apply_seeds, evaluate, fixtures, plan_seeds, Cell, CellError, CellRef, ErrorKind, Value,
    Workbook,
};

use common::{compare_with_oracle, cycle_reachable, gen_acyclic, inject_cycle, pos_of, GenOptions};

const TOL: f64 = 0.005;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn r(s: &str) -> CellRef {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn row_values(values: &sheetaudit::Values, row: u16) -> Vec<f64> {
    (2..=7u8)
        .map(|c| {
            values[&CellRef::new(c, row).unwrap()]
                .as_number()
                .unwrap_or(f64::NAN)
        })
        .collect()
}

fn close(got: &[f64], want: &[f64]) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(a, b)| (a - b).abs() <= TOL)
}

fn c1_nightclub() -> Outcome {
    let reference = fixtures::nightclub();
    let values = evaluate(&reference);
    let rows = [
        (
            "TOTAL INCOME",
            4,
            [5500.0, 4500.0, 4000.0, 4000.0, 6000.0, 7000.0],
        ),
        (
            "TOTAL OUTGOINGS",
            8,
            [1000.0, 4500.0, 6700.0, 1200.0, 5500.0, 7000.0],
        ),
        (
            "MONTHLY PROFIT",
            9,
            [4500.0, 0.0, -2700.0, 2800.0, 500.0, 0.0],
        ),
    ];
    for (label, row, want) in rows {
        let got = row_values(&values, row);
        ensure(close(&got, &want), || format!("{label}: {got:?}"))?;
    }
    let seeded = fixtures::nightclub_seeded();
    let got = row_values(&evaluate(&seeded), 10);
    let want = [4500.0, 4500.0, -2700.0, 100.0, 600.0, 600.0];
    ensure(close(&got, &want), || {
        format!("seeded ACCUMULATING PROFIT: {got:?}")
    })?;
    ensure(
        apply_seeds(&reference, &fixtures::nightclub_manifest())
            .unwrap()
            .same_content(&seeded),
        || "manifest does not reproduce the seeded file".into(),
    )?;
    let diff = diff_workbooks(&reference, &seeded);
    let roots: Vec<CellRef> = diff
        .iter()
        .filter(|d| d.classification == Classification::Root)
        .map(|d| d.cell)
        .collect();
    let propagated: Vec<CellRef> = diff
        .iter()
        .filter(|d| d.classification == Classification::Propagated)
        .map(|d| d.cell)
        .collect();
    ensure(roots == [r("D10")], || format!("ROOT {roots:?}"))?;
    ensure(propagated == [r("E10"), r("F10"), r("G10")], || {
        format!("PROPAGATED {propagated:?}")
    })?;
    Ok(
        "income/outgoings/profit rows exact, seeded row matches, diff 1 ROOT (D10) + 3 PROPAGATED"
            .into(),
    )
}

fn c2_sales_script() -> Outcome {
    let reference = fixtures::sales();
    let script = fixtures::sales_script();
    let mut rated = reference.clone();
    for (cell, v) in [("B2", 1.69), ("C2", 2.40), ("D2", 1300.0)] {
        rated.set(r(cell), Cell::Number(v));
    }
    let values = evaluate(&rated);
    let i9 = values[&r("I9")].as_number().unwrap_or(f64::NAN);
    let g16 = values[&r("G16")].as_number().unwrap_or(f64::NAN);
    ensure((i9 - 4773.99).abs() <= TOL, || format!("I9 = {i9}"))?;
    ensure((g16 - 47425.00).abs() <= TOL, || format!("G16 = {g16}"))?;
    let full = run_audit_script(&reference, &reference, &script);
    ensure(full.total_mark == 7 && full.possible_mark == 7, || {
        format!(
            "reference scores {}/{}",
            full.total_mark, full.possible_mark
        )
    })?;

    let kinds: BTreeSet<ErrorKind> = ErrorKind::ALL.into_iter().collect();
    let inputs = script.input_cells();
    let mut by_kind: BTreeMap<ErrorKind, usize> = BTreeMap::new();
    for seed in 0..100u64 {
        let manifest = plan_seeds_excluding(&reference, 1, &kinds, seed, &inputs)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let subject = apply_seeds(&reference, &manifest).unwrap();
        let report = run_audit_script(&subject, &reference, &script);
        let s = &manifest.seeds[0];
        ensure(report.total_mark < 7, || {
            format!(
                "seed {seed}: {} {} `{}` -> `{}` still scores 7/7",
                s.kind, s.cell, s.original, s.mutated
            )
        })?;
        *by_kind.entry(s.kind).or_default() += 1;
    }
    Ok(format!(
        "I9 = {i9:.3}, G16 = {g16:.2}, 7/7 on reference, <7 on 100 one-seed mutants {by_kind:?}"
    ))
}

fn c3_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut per_kind: BTreeMap<ErrorKind, usize> = BTreeMap::new();
    let mut regenerated = 0usize;
    for i in 0..1000usize {
        let kinds: BTreeSet<ErrorKind> = if i % 7 == 6 {
            ErrorKind::ALL.into_iter().collect()
        } else {
            [ErrorKind::ALL[i % 6]].into()
        };
        let count = rng.gen_range(1..=3);
        let (wb, manifest) = loop {
            let s = gen_acyclic(&mut rng, &GenOptions::clean());
            if s.cells.len() > 60 {
                return Err("generator exceeded 60 cells".into());
            }
            let wb = s.workbook(&format!("sheet{i}"));
            match plan_seeds(&wb, count, &kinds, rng.gen()) {
                Ok(m) => break (wb, m),
                Err(_) => regenerated += 1,
            }
            if regenerated > 100_000 {
                return Err("generator rarely admits the requested kinds".into());
            }
        };
        let subject = apply_seeds(&wb, &manifest).map_err(|e| e.to_string())?;
        let roots: BTreeSet<CellRef> = diff_workbooks(&wb, &subject)
            .into_iter()
            .filter(|d| d.classification == Classification::Root)
            .map(|d| d.cell)
            .collect();
        ensure(roots == manifest.cells(), || {
            format!(
                "instance {i}: ROOT {roots:?} vs manifest {:?}",
                manifest.cells()
            )
        })?;
        for s in &manifest.seeds {
            *per_kind.entry(s.kind).or_default() += 1;
        }
    }
    ensure(per_kind.len() == 6, || {
        format!("kinds exercised: {per_kind:?}")
    })?;
    Ok(format!(
        "1000 instances, ROOT set = manifest set every time; seeds per kind {per_kind:?}"
    ))
}

fn c4_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..500 {
        let s = gen_acyclic(&mut rng, &GenOptions::wide());
        ensure(s.cells.len() <= 100, || {
            "generator exceeded 100 cells".into()
        })?;
        compare_with_oracle(&s).map_err(|e| format!("acyclic {i}: {e}"))?;
        for v in evaluate(&s.workbook("acyclic")).values() {
            let key = match v {
                Value::Error(e) => e.to_string(),
                Value::Number(_) => "number".into(),
                Value::Text(_) => "text".into(),
                Value::Empty => "empty".into(),
            };
            *seen.entry(key).or_default() += 1;
        }
    }
    for key in ["number", "#DIV/0!", "#VALUE!"] {
        ensure(seen.contains_key(key), || {
            format!("generator never produced {key}: {seen:?}")
        })?;
    }
    let mut cycles = 0;
    while cycles < 100 {
        let mut s = gen_acyclic(&mut rng, &GenOptions::wide());
        if !inject_cycle(&mut rng, &mut s) {
            continue;
        }
        cycles += 1;
        let expected = cycle_reachable(&s);
        ensure(!expected.is_empty(), || {
            "injected cycle not detected by the reachability oracle".into()
        })?;
        let values = evaluate(&s.workbook("cyclic"));
        let flagged: BTreeSet<_> = values
            .iter()
            .filter(|(_, v)| **v == Value::Error(CellError::Cycle))
            .map(|(c, _)| pos_of(*c))
            .collect();
        ensure(flagged == expected, || {
            format!("cyclic {cycles}: CYCLE cells {flagged:?} vs reachable {expected:?}")
        })?;
        compare_with_oracle(&s).map_err(|e| format!("cyclic {cycles}: {e}"))?;
    }
    Ok(format!("500 acyclic sheets match the fixed-point oracle (values seen {seen:?}); 100 cyclic sheets flag exactly the cycle-reachable cells"))
}

/// Decomposes the edge map into cycles by explicit traversal; there must
/// be exactly one, of length n, and no 2- or 3-cycle.
fn check_ring(edges: &BTreeMap<String, String>, n: usize) -> Result<(), String> {
    ensure(edges.len() == n, || {
        format!("{} edges for {n} names", edges.len())
    })?;
    let targets: BTreeSet<&String> = edges.values().collect();
    ensure(targets.len() == n, || {
        "edge map is not a permutation".into()
    })?;
    let mut visited: BTreeSet<&String> = BTreeSet::new();
    let mut cycle_lengths = Vec::new();
    for start in edges.keys() {
        if visited.contains(start) {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while visited.insert(at) {
            at = edges.get(at).ok_or("edge leaves the roster")?;
            len += 1;
        }
        ensure(at == start, || format!("walk from {start} did not close"))?;
        cycle_lengths.push(len);
    }
    ensure(cycle_lengths == [n], || {
        format!("cycle lengths {cycle_lengths:?}")
    })?;
    for (a, b) in edges {
        ensure(a != b, || format!("{a} audits themselves"))?;
        ensure(&edges[b] != a, || format!("{a} and {b} audit each other"))?;
        ensure(&edges[&edges[b]] != a, || format!("{a} is on a 3-cycle"))?;
    }
    Ok(())
}

fn c5_pairing() -> Outcome {
    for n in 4..=100usize {
        let names: Vec<String> = (0..n).map(|i| format!("student{i}")).collect();
        for seed in 0..100u64 {
            let p = make_pairing(&names, seed).map_err(|e| e.to_string())?;
            check_ring(&p.edges, n).map_err(|e| format!("n={n} seed={seed}: {e}"))?;
        }
    }
    for n in [2usize, 3] {
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        ensure(
            make_pairing(&names, 1) == Err(PairingError::TooFew(n)),
            || format!("n={n} not rejected"),
        )?;
    }
    let names = ["a", "b", "c", "d", "e"];
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let trials = 10_000;
    for seed in 0..trials {
        let ring = make_pairing(&names, seed).unwrap().ring;
        let k = ring.iter().position(|x| x == "a").unwrap();
        let canonical: Vec<String> = ring[k..].iter().chain(&ring[..k]).cloned().collect();
        *counts.entry(canonical).or_default() += 1;
    }
    let expected = trials as f64 / 24.0;
    ensure(counts.len() == 24, || {
        format!("{} distinct rings", counts.len())
    })?;
    let (lo, hi) = (
        counts.values().min().unwrap(),
        counts.values().max().unwrap(),
    );
    ensure(
        counts
            .values()
            .all(|&c| (c as f64 - expected).abs() <= 0.2 * expected),
        || format!("ring counts {lo}..{hi} outside 20% of {expected:.1}"),
    )?;
    Ok(format!("n=4..100 x 100 seeds single rings, n=2,3 rejected, 24 rings at n=5 counts {lo}..{hi} (uniform {expected:.1})"))
}

/// Column A inputs, column B a running formula chain: `k` formula cells.
fn chain_sheet(name: &str, k: u16) -> Workbook {
    let mut grid = format!("#name {name}\n");
    for row in 1..=k {
        let formula = if row == 1 {
            "=A1*2".to_string()
        } else {
            format!("=B{}+A{row}", row - 1)
        };
        grid.push_str(&format!("{},{formula}\n", 10 * row + 1));
    }
    sheetaudit::load_workbook(&grid).unwrap()
}

fn c6_metrics() -> Outcome {
    // 20 sheets of 29 formulas and 15 of 28: 1000 formula cells. The first
    // 16 sheets carry 2 seeds, the next 14 carry 1: 46 seeds on 30 sheets.
    let kinds: BTreeSet<ErrorKind> =
        [ErrorKind::WrongReference, ErrorKind::FormulaToConstant].into();
    let mut from_manifest = Vec::new();
    let mut from_diff = Vec::new();
    for i in 0..35u16 {
        let reference = chain_sheet(&format!("sheet{i}"), if i < 20 { 29 } else { 28 });
        let seeds = match i {
            0..=15 => 2,
            16..=29 => 1,
            _ => 0,
        };
        let manifest =
            plan_seeds(&reference, seeds, &kinds, u64::from(i)).map_err(|e| e.to_string())?;
        let subject = apply_seeds(&reference, &manifest).unwrap();
        from_manifest.push(SheetResult::from_manifest(&reference, &manifest));
        from_diff.push(SheetResult::from_diff(&reference, &subject));
    }
    let m = compute_metrics(&from_manifest).map_err(|e| e.to_string())?;
    ensure(compute_metrics(&from_diff).unwrap() == m, || {
        "diff-derived metrics differ from manifest-derived".into()
    })?;
    ensure(m.sheets_total == 35 && m.sheets_with_errors == 30, || {
        format!("{m:?}")
    })?;
    ensure(
        m.formula_cells_total == 1000 && m.erroneous_formula_cells == 46,
        || format!("{m:?}"),
    )?;
    ensure(m.pct_with_errors_display() == 86, || {
        format!("pct {}", m.pct_with_errors_display())
    })?;
    ensure(m.cell_error_rate_display() == "4.6%", || {
        format!("CER {}", m.cell_error_rate_display())
    })?;
    Ok(format!(
        "35 sheets, 30 with errors -> {}%; 46/1000 formula cells -> CER {}",
        m.pct_with_errors_display(),
        m.cell_error_rate_display()
    ))
}

fn c7_feedback() -> Outcome {
    let responses: Vec<Response> = (0..42)
        .map(|i| [i < 21, i < 40, i < 30, i < 35, i < 38])
        .collect();
    let t = tally_feedback(&responses).map_err(|e| e.to_string())?;
    ensure(t.respondents == 42 && t.questions[0].yes == 21, || {
        format!("{t:?}")
    })?;
    ensure(t.questions[0].yes_percent == 50, || {
        format!("Q1 {}%", t.questions[0].yes_percent)
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=200);
        let set: Vec<Response> = (0..n)
            .map(|_| std::array::from_fn(|_| rng.gen_bool(0.6)))
            .collect();
        let t = tally_feedback(&set).unwrap();
        for (q, tally) in t.questions.iter().enumerate() {
            let yes = set.iter().filter(|r| r[q]).count();
            ensure(
                tally.yes == yes && tally.yes + tally.no_or_not_sure == n,
                || format!("trial {trial} Q{}", q + 1),
            )?;
            ensure(
                tally.yes_percent == ((200 * yes + n) / (2 * n)) as u32,
                || format!("trial {trial} Q{} percent", q + 1),
            )?;
        }
    }
    Ok(
        "42 respondents, 21 yes on Q1 -> 50%; conservation holds on 1000 random response sets"
            .into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (
            "1 night-club model reproduction",
            c1_nightclub,
            Duration::from_secs(1),
        ),
        (
            "2 sales audit script",
            c2_sales_script,
            Duration::from_secs(5),
        ),
        (
            "3 seed/diff round trip",
            c3_round_trip,
            Duration::from_secs(30),
        ),
        (
            "4 evaluator oracle equivalence",
            c4_oracle,
            Duration::from_secs(30),
        ),
        ("5 pairing constraints", c5_pairing, Duration::from_secs(10)),
        ("6 corpus metrics", c6_metrics, Duration::from_secs(30)),
        ("7 feedback tally", c7_feedback, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => {
                Err(format!("{detail}; took {elapsed:?}, limit {limit:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {name} ({} ms): {detail}",
                elapsed.as_millis()
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({} ms): {why}", elapsed.as_millis());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
