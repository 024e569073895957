//! Plain-text rendering of command output for `--pretty`.

use serde_json::Value;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Object(m) if m.contains_key("a") && m.contains_key("b") => {
            let a = m["a"].as_str().unwrap_or("?");
            let b = m["b"].as_str().unwrap_or("?");
            let d = &m["d"];
            if b == "0" {
                a.to_string()
            } else {
                format!("{a} + {b}√{d}")
            }
        }
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    match v {
        Value::Array(_) => false,
        Value::Object(m) => m.contains_key("a") && m.contains_key("b"),
        _ => true,
    }
}

fn is_matrix(v: &Value) -> bool {
    match v {
        Value::Array(rows) => {
            !rows.is_empty()
                && rows.iter().all(|r| matches!(r, Value::Array(c) if !c.is_empty() && c.iter().all(is_scalar)))
        }
        _ => false,
    }
}

fn matrix(v: &Value, indent: usize, out: &mut String) {
    let rows: Vec<Vec<String>> = v
        .as_array()
        .map(|rs| rs.iter().map(|r| r.as_array().map(|c| c.iter().map(scalar).collect()).unwrap_or_default()).collect())
        .unwrap_or_default();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    for r in rows {
        out.push_str(&" ".repeat(indent));
        let cells: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:>w$}", w = widths[c])).collect();
        out.push_str(&format!("[ {} ]\n", cells.join("  ")));
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) if !is_scalar(v) => {
            let key_w = m.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, val) in m {
                if is_scalar(val) {
                    out.push_str(&format!("{pad}{k:<key_w$}  {}\n", scalar(val)));
                } else if matches!(val, Value::Array(a) if a.iter().all(is_scalar)) {
                    let items: Vec<String> = val.as_array().into_iter().flatten().map(scalar).collect();
                    out.push_str(&format!("{pad}{k:<key_w$}  [{}]\n", items.join(", ")));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(val, indent + 2, out);
                }
            }
        }
        _ if is_matrix(v) => matrix(v, indent, out),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if is_scalar(item) {
                    out.push_str(&format!("{pad}{i:>3}  {}\n", scalar(item)));
                } else {
                    out.push_str(&format!("{pad}[{i}]\n"));
                    render(item, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

/// Aligned key/value listing with matrices drawn as tables.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

/// The `verify` report as a one-line-per-row table.
pub fn verify_table(v: &Value) -> String {
    let mut out = String::new();
    let rows = v.get("rows").and_then(Value::as_array).cloned().unwrap_or_default();
    let name_w = rows.iter().filter_map(|r| r["name"].as_str()).map(|s| s.chars().count()).max().unwrap_or(0);
    for r in &rows {
        let tag = if r["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
        let name = r["name"].as_str().unwrap_or("");
        out.push_str(&format!(
            "{tag}  {name:<name_w$}  expected {}  computed {}\n",
            r["expected"].as_str().unwrap_or(""),
            r["computed"].as_str().unwrap_or("")
        ));
    }
    out.push_str(&format!("{} passed, {} failed\n", v["passed"], v["failed"]));
    out
}
