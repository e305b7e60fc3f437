use sheetaudit::{Value, Values, Workbook};

/// Whole numbers with thousands separators; fractions keep up to four
/// decimals.
pub fn number(n: f64) -> String {
    let neg = n < 0.0;
    let text = if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{:.0}", n.abs())
    } else {
        let s = format!("{:.4}", n.abs());
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    };
    let (int, frac) = text
        .split_once('.')
        .map_or((text.as_str(), None), |(i, f)| (i, Some(f)));
    let mut grouped = String::new();
    for (i, ch) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    if let Some(f) = frac {
        grouped.push('.');
        grouped.push_str(f);
    }
    if neg && grouped.chars().any(|c| c != '0' && c != ',' && c != '.') {
        grouped.insert(0, '-');
    }
    grouped
}

pub fn value(v: &Value) -> String {
    match v {
        Value::Number(n) => number(*n),
        other => other.to_string(),
    }
}

/// Evaluated grid as an aligned table with row numbers and column letters.
pub fn grid(workbook: &Workbook, values: &Values) -> String {
    let Some(extent) = workbook.used_extent() else {
        return String::from("(empty workbook)\n");
    };
    let (cols, rows) = (extent.width(), extent.height());
    let mut table: Vec<Vec<(String, bool)>> = Vec::new();
    for r in 0..rows {
        let row = (0..cols)
            .map(|c| {
                let at = extent
                    .top_left()
                    .offset(c as i32, r as i32)
                    .expect("inside extent");
                match values.get(&at) {
                    Some(v @ Value::Text(_)) => (value(v), false),
                    Some(v) => (value(v), true),
                    None => (String::new(), false),
                }
            })
            .collect();
        table.push(row);
    }
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            table
                .iter()
                .map(|row| row[c].0.chars().count())
                .max()
                .unwrap_or(0)
                .max(1)
        })
        .collect();
    let row_label = rows.to_string().len();
    let mut out = format!("{:>row_label$}", "");
    for (c, w) in widths.iter().enumerate() {
        let letter = extent
            .top_left()
            .offset(c as i32, 0)
            .expect("inside extent")
            .column_letter();
        out.push_str(&format!("  {letter:<w$}"));
    }
    let trimmed = out.trim_end().len();
    out.truncate(trimmed);
    out.push('\n');
    for (r, row) in table.iter().enumerate() {
        out.push_str(&format!("{:>row_label$}", r + 1));
        for ((text, right), w) in row.iter().zip(&widths) {
            if *right {
                out.push_str(&format!("  {text:>w$}"));
            } else {
                out.push_str(&format!("  {text:<w$}"));
            }
        }
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
    }
    out
}
