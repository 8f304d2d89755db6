//! Human-readable rendering. Not part of the output contract.

use std::fmt::Write;

use krein_core::Multivector;
use serde_json::Value;

use crate::commands::CommandResult;

pub fn text(out: &CommandResult) -> String {
    let mut s = String::new();
    let status = if out.ok { "ok" } else { "FAIL" };
    writeln!(s, "{}: {status}", out.command).unwrap();
    match out.command {
        "ko-table" => ko_table(&mut s, &out.payload),
        "verify" => checks(&mut s, &out.payload),
        _ => fields(&mut s, &out.payload),
    }
    s
}

fn ko_table(s: &mut String, p: &Value) {
    writeln!(s, "case {}", p["case"].as_str().unwrap_or("?")).unwrap();
    writeln!(s, "{:>3} {:>7} {:>4} {:>5} {:>5} {:>5} {:>5} {:>5} {:>6}", "n", "sig", "KO", "eps", "eps''", "eps~", "kap", "kap~", "table").unwrap();
    for row in p["rows"].as_array().into_iter().flatten() {
        let sig = format!("({},{})", row["signature"][0], row["signature"][1]);
        writeln!(
            s,
            "{:>3} {:>7} {:>4} {:>5} {:>5} {:>5} {:>5} {:>5} {:>6}",
            row["n"].to_string(),
            sig,
            row["ko_dim"].to_string(),
            row["j"]["eps"].to_string(),
            row["j"]["eps_dprime"].to_string(),
            row["charge"]["eps_tilde"].to_string(),
            row["j"]["kappa"].to_string(),
            row["charge"]["kappa_tilde"].to_string(),
            if row["matches_reference"] == true { "match" } else { "DIFF" }
        )
        .unwrap();
    }
}

fn checks(s: &mut String, p: &Value) {
    let list = p["checks"].as_array().cloned().unwrap_or_default();
    let width = list.iter().filter_map(|c| c["name"].as_str()).map(str::len).max().unwrap_or(0);
    for c in &list {
        let mark = if c["passed"] == true { "pass" } else { "FAIL" };
        let value = c["value"].as_f64().map_or("-".to_string(), |v| format!("{v:.2e}"));
        write!(s, "{mark}  {:<width$}  {value:>9}  tol {:.0e}  cases {}", c["name"].as_str().unwrap_or("?"), c["tolerance"].as_f64().unwrap_or(0.0), c["cases"]).unwrap();
        if let Some(e) = c["error"].as_str() {
            write!(s, "  ({e})").unwrap();
        }
        s.push('\n');
    }
}

/// Top-level fields one per line; matrices are summarized by shape.
fn fields(s: &mut String, p: &Value) {
    let Some(map) = p.as_object() else {
        writeln!(s, "{p}").unwrap();
        return;
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    for (k, v) in map {
        writeln!(s, "{k:<width$}  {}", summary(v)).unwrap();
    }
}

fn summary(v: &Value) -> String {
    if let Ok(m) = serde_json::from_value::<Multivector>(v.clone()) {
        return m.to_string();
    }
    match v {
        Value::Array(rows) if rows.first().is_some_and(is_matrix) => format!("[{} matrices]", rows.len()),
        v if is_matrix(v) => {
            let rows = v.as_array().map_or(0, Vec::len);
            format!("[{rows}x{rows} matrix]")
        }
        other => other.to_string(),
    }
}

fn is_matrix(v: &Value) -> bool {
    v.as_array()
        .and_then(|rows| rows.first())
        .and_then(Value::as_array)
        .and_then(|row| row.first())
        .is_some_and(Value::is_array)
}
