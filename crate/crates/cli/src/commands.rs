use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde_json::json;
use sheetaudit::audit::{
    diff_workbooks, rank_risks, run_audit_script, self_audit as run_self_audit, AuditReport,
    AuditScript, Classification, RiskTable, SelfAuditChecklist,
};
use sheetaudit::cohort::{
    compute_metrics, grade_auditor, make_pairing, parse_responses, parse_roster, tally_feedback,
    SheetResult,
};
use sheetaudit::seeding::plan_seeds_excluding;
use sheetaudit::{apply_seeds, evaluate, CellRef, ErrorKind, SeedManifest};

use crate::files::{read_json, read_text, read_workbook, stem, write_atomic, CliError};
use crate::render;

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn parse_cells(cells: &[String]) -> Result<BTreeSet<CellRef>, CliError> {
    cells
        .iter()
        .map(|c| c.trim().parse::<CellRef>().map_err(CliError::invalid))
        .collect()
}

pub fn eval(path: &Path, json: bool) -> Result<String, CliError> {
    let wb = read_workbook(path)?;
    let values = evaluate(&wb);
    if json {
        return Ok(pretty(&json!({ "name": wb.name, "values": values })));
    }
    Ok(render::grid(&wb, &values))
}

pub fn seed(
    path: &Path,
    count: usize,
    kinds: &[String],
    rng_seed: u64,
    out_dir: &Path,
    exclude: &[String],
    json: bool,
) -> Result<String, CliError> {
    let text = read_text(path)?;
    let reference = read_workbook(path)?;
    let kinds: BTreeSet<ErrorKind> = if kinds.is_empty() {
        ErrorKind::ALL.into_iter().collect()
    } else {
        kinds
            .iter()
            .map(|k| k.trim().parse::<ErrorKind>().map_err(CliError::invalid))
            .collect::<Result<_, _>>()?
    };
    let excluded = parse_cells(exclude)?;
    let manifest = plan_seeds_excluding(&reference, count, &kinds, rng_seed, &excluded)
        .map_err(CliError::invalid)?;
    let seeded = apply_seeds(&reference, &manifest).map_err(CliError::invalid)?;

    let base = stem(path);
    let grid_out = out_dir.join(format!("{base}.grid"));
    let manifest_out = out_dir.join(format!("{base}.manifest.json"));
    let ref_out = out_dir.join(format!("{base}.ref.grid"));
    write_atomic(&ref_out, &text)?;
    write_atomic(&grid_out, &seeded.to_grid_string())?;
    write_atomic(&manifest_out, &manifest.to_json())?;

    if json {
        return Ok(manifest.to_json());
    }
    let mut out = format!(
        "seeded {} cell(s) of {}\n",
        manifest.seeds.len(),
        reference.name
    );
    for s in &manifest.seeds {
        let _ = writeln!(
            out,
            "  {:<4} {:<20} {}  ->  {}",
            s.cell.to_string(),
            s.kind.name(),
            s.original,
            s.mutated
        );
    }
    for p in [&grid_out, &manifest_out, &ref_out] {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(out)
}

pub fn diff(reference: &Path, subject: &Path, json: bool) -> Result<String, CliError> {
    let divergences = diff_workbooks(&read_workbook(reference)?, &read_workbook(subject)?);
    let roots = divergences
        .iter()
        .filter(|d| d.classification == Classification::Root)
        .count();
    let propagated = divergences.len() - roots;
    if json {
        return Ok(pretty(
            &json!({ "root": roots, "propagated": propagated, "divergences": divergences }),
        ));
    }
    let mut out = String::new();
    for d in &divergences {
        let tag = match d.classification {
            Classification::Root => "ROOT",
            Classification::Propagated => "PROPAGATED",
        };
        let _ = writeln!(
            out,
            "{tag:<10} {:<4} reference {:>12}  subject {:>12}",
            d.cell.to_string(),
            render::value(&d.reference_value),
            render::value(&d.subject_value)
        );
    }
    let _ = writeln!(out, "{roots} ROOT, {propagated} PROPAGATED");
    Ok(out)
}

pub fn self_audit(
    grid: &Path,
    declare: &Path,
    risk: Option<&Path>,
    json: bool,
) -> Result<String, CliError> {
    let wb = read_workbook(grid)?;
    let declarations: SelfAuditChecklist = read_json(declare)?;
    let risk = match risk {
        Some(p) => Some(
            RiskTable::from_json(&read_text(p)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?,
        ),
        None => None,
    };
    let report = run_self_audit(&wb, &declarations, risk.as_ref());
    let ranked = match &risk {
        Some(table) if !table.entries.is_empty() => {
            Some(rank_risks(table, &wb).map_err(CliError::invalid)?)
        }
        _ => None,
    };
    if json {
        return Ok(pretty(&json!({ "checklist": report, "risks": ranked })));
    }
    let mut out = report.render_text();
    if let Some(ranked) = ranked {
        out.push_str("\nRISKS (likelihood x impact)\n");
        for r in &ranked {
            let _ = writeln!(out, "{:>3}  {}", r.score, r.entry.event);
        }
        if let Some(first) = ranked.first() {
            let cells: Vec<String> = first
                .hottest_cells
                .iter()
                .map(ToString::to_string)
                .collect();
            let _ = writeln!(out, "most depended-on cells: {}", cells.join(", "));
        }
    }
    Ok(out)
}

pub struct PeerAuditArgs {
    pub subject: PathBuf,
    pub reference: PathBuf,
    pub script: PathBuf,
    pub auditor: String,
    pub audited: String,
    pub date: NaiveDate,
    pub flag: Vec<String>,
    pub note: Option<String>,
    pub out_dir: PathBuf,
}

fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect();
    s.trim_matches('-').to_string()
}

pub fn peer_audit(args: &PeerAuditArgs, json: bool) -> Result<String, CliError> {
    let subject = read_workbook(&args.subject)?;
    let reference = read_workbook(&args.reference)?;
    let script =
        AuditScript::from_json(&read_text(&args.script)?).map_err(|source| CliError::Json {
            path: args.script.clone(),
            source,
        })?;
    let mut report = run_audit_script(&subject, &reference, &script).signed(
        &args.auditor,
        &args.audited,
        args.date,
    );
    let flagged = parse_cells(&args.flag)?;
    if !flagged.is_empty() {
        report.flag(flagged, "cells the auditor believes are wrong");
    }
    if let Some(note) = &args.note {
        report.narrative = note.clone();
    }
    let base = format!("{}-audits-{}", slug(&args.auditor), slug(&args.audited));
    let text = report.render_text();
    write_atomic(
        &args.out_dir.join(format!("{base}.report.json")),
        &report.to_json(),
    )?;
    write_atomic(&args.out_dir.join(format!("{base}.report.txt")), &text)?;
    Ok(if json { report.to_json() } else { text })
}

pub fn pair(
    roster: &Path,
    rng_seed: u64,
    out: Option<PathBuf>,
    json: bool,
) -> Result<String, CliError> {
    let names = parse_roster(&read_text(roster)?);
    let pairing = make_pairing(&names, rng_seed).map_err(CliError::invalid)?;
    let out =
        out.unwrap_or_else(|| roster.with_file_name(format!("{}.pairing.json", stem(roster))));
    write_atomic(&out, &pairing.to_json())?;
    if json {
        return Ok(pairing.to_json());
    }
    let mut text = String::new();
    for auditor in &pairing.ring {
        let _ = writeln!(text, "{auditor} audits {}", pairing.edges[auditor]);
    }
    let _ = writeln!(text, "wrote {}", out.display());
    Ok(text)
}

pub fn grade(
    report: &Path,
    manifest: &Path,
    reference: &Path,
    subject: &Path,
    json: bool,
) -> Result<String, CliError> {
    let report = AuditReport::from_json(&read_text(report)?).map_err(CliError::invalid)?;
    let manifest: SeedManifest = read_json(manifest)?;
    let grade = grade_auditor(
        &report,
        &manifest,
        &read_workbook(reference)?,
        &read_workbook(subject)?,
    )
    .map_err(CliError::invalid)?;
    if json {
        return Ok(pretty(&grade));
    }
    Ok(format!(
        "auditor {}: {} true, {} false, {} missed; precision {:.2}, recall {:.2}\n",
        grade.auditor,
        grade.true_findings,
        grade.false_findings,
        grade.missed,
        grade.precision,
        grade.recall
    ))
}

fn files_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<(String, PathBuf)>, CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if let Some(s) = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_suffix(suffix))
        {
            out.push((s.to_string(), path.clone()));
        }
    }
    out.sort();
    Ok(out)
}

pub fn metrics(dir: &Path, json: bool) -> Result<String, CliError> {
    let mut results = Vec::new();
    for (name, ref_path) in files_with_suffix(dir, ".ref.grid")? {
        let reference = read_workbook(&ref_path)?;
        let manifest_path = dir.join(format!("{name}.manifest.json"));
        let subject_path = dir.join(format!("{name}.grid"));
        let result = if manifest_path.exists() {
            SheetResult::from_manifest(&reference, &read_json(&manifest_path)?)
        } else if subject_path.exists() {
            SheetResult::from_diff(&reference, &read_workbook(&subject_path)?)
        } else {
            return Err(CliError::Invalid(format!(
                "{name}: no {name}.manifest.json or {name}.grid next to the reference"
            )));
        };
        results.push(result);
    }
    let m = compute_metrics(&results)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", dir.display())))?;
    if json {
        return Ok(pretty(&m));
    }
    Ok(format!(
        "sheets: {}, with errors: {} ({}%)\nformula cells: {}, erroneous: {} (CER {})\n",
        m.sheets_total,
        m.sheets_with_errors,
        m.pct_with_errors_display(),
        m.formula_cells_total,
        m.erroneous_formula_cells,
        m.cell_error_rate_display()
    ))
}

pub fn tally(path: &Path, json: bool) -> Result<String, CliError> {
    let responses = parse_responses(&read_text(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let t = tally_feedback(&responses)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    if json {
        return Ok(pretty(&t));
    }
    let mut out = format!("{} respondents\n", t.respondents);
    for (i, q) in t.questions.iter().enumerate() {
        let _ = writeln!(
            out,
            "Q{}  yes {:>3}  no/not sure {:>3}  {:>3}%",
            i + 1,
            q.yes,
            q.no_or_not_sure,
            q.yes_percent
        );
    }
    Ok(out)
}

fn first_existing(dir: &Path, names: &[String]) -> Option<PathBuf> {
    names.iter().map(|n| dir.join(n)).find(|p| p.exists())
}

pub fn verify_bundle(dir: &Path, json: bool) -> Result<String, CliError> {
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let reference_for = |name: &str| {
        first_existing(
            dir,
            &[format!("{name}.ref.grid"), format!("{name}_ref.grid")],
        )
    };

    for (name, manifest_path) in files_with_suffix(dir, ".manifest.json")? {
        let manifest: SeedManifest = read_json(&manifest_path)?;
        let (Some(ref_path), Some(seeded_path)) = (
            reference_for(&name),
            first_existing(
                dir,
                &[format!("{name}.grid"), format!("{name}_seeded.grid")],
            ),
        ) else {
            checks.push((name, false, "reference or seeded model missing".into()));
            continue;
        };
        let reference = read_workbook(&ref_path)?;
        let seeded = read_workbook(&seeded_path)?;
        let (ok, detail) = match apply_seeds(&reference, &manifest) {
            Ok(applied) if applied.same_content(&seeded) => (
                true,
                format!(
                    "{} seed(s) reproduce the seeded model",
                    manifest.seeds.len()
                ),
            ),
            Ok(_) => (
                false,
                "seeded model differs from reference + manifest".to_string(),
            ),
            Err(e) => (false, e.to_string()),
        };
        checks.push((name, ok, detail));
    }
    for (name, script_path) in files_with_suffix(dir, ".script.json")? {
        let script =
            AuditScript::from_json(&read_text(&script_path)?).map_err(|source| CliError::Json {
                path: script_path.clone(),
                source,
            })?;
        let Some(ref_path) = reference_for(&name) else {
            checks.push((name, false, "script has no reference model".into()));
            continue;
        };
        let reference = read_workbook(&ref_path)?;
        let report = run_audit_script(&reference, &reference, &script);
        let ok = report.total_mark == report.possible_mark;
        checks.push((
            name,
            ok,
            format!(
                "script scores {}/{} on the reference",
                report.total_mark, report.possible_mark
            ),
        ));
    }
    for (name, roster_path) in files_with_suffix(dir, ".roster.txt")? {
        let names = parse_roster(&read_text(&roster_path)?);
        let (ok, detail) = match make_pairing(&names, 0) {
            Ok(_) => (true, format!("roster of {} can be paired", names.len())),
            Err(e) => (false, e.to_string()),
        };
        checks.push((name, ok, detail));
    }
    if checks.is_empty() {
        return Err(CliError::Invalid(format!(
            "{}: no manifests, scripts or rosters found",
            dir.display()
        )));
    }
    if let Some((name, _, detail)) = checks.iter().find(|c| !c.1) {
        let failed = checks.iter().filter(|c| !c.1).count();
        return Err(CliError::Invalid(format!(
            "bundle check failed ({failed} problem(s)); first: {name}: {detail}"
        )));
    }
    if json {
        let list: Vec<_> = checks
            .iter()
            .map(|(n, ok, d)| json!({ "name": n, "ok": ok, "detail": d }))
            .collect();
        return Ok(pretty(&list));
    }
    let mut out = String::new();
    for (name, _, detail) in &checks {
        let _ = writeln!(out, "ok  {name}: {detail}");
    }
    Ok(out)
}
