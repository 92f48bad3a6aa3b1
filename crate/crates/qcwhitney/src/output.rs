//! Deterministic JSON and CSV emission.
//!
//! All floats are printed with 12 significant digits in scientific
//! notation, so identical runs produce byte-identical files. Infinities
//! become the strings "inf" / "-inf" (JSON numbers cannot carry them).

use std::fmt::Write as _;

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "null".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "\"inf\"".to_string() } else { "\"-inf\"".to_string() }
    } else {
        format!("{x:.11e}")
    }
}

/// Plain 12-significant-digit float for CSV cells (no JSON quoting).
pub fn fmt_cell(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Clone, Debug)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn obj(pairs: Vec<(&str, Json)>) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn render_pretty(&self) -> String {
        let mut out = String::new();
        self.render(&mut out, 0, true);
        out.push('\n');
        out
    }

    pub fn render_compact(&self) -> String {
        let mut out = String::new();
        self.render(&mut out, 0, false);
        out
    }

    fn render(&self, out: &mut String, indent: usize, pretty: bool) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => escape_into(s, out),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    if pretty {
                        out.push('\n');
                        push_indent(out, indent + 1);
                    }
                    item.render(out, indent + 1, pretty);
                }
                if pretty {
                    out.push('\n');
                    push_indent(out, indent);
                }
                out.push(']');
            }
            Json::Obj(pairs) => {
                if pairs.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (k, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    if pretty {
                        out.push('\n');
                        push_indent(out, indent + 1);
                    }
                    escape_into(k, out);
                    out.push(':');
                    if pretty {
                        out.push(' ');
                    }
                    v.render(out, indent + 1, pretty);
                }
                if pretty {
                    out.push('\n');
                    push_indent(out, indent);
                }
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn escape_into(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(fmt_f64(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(fmt_f64(0.1), "1.00000000000e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "\"inf\"");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "\"-inf\"");
        assert_eq!(fmt_cell(1.5), "1.50000000000e0");
        assert_eq!(fmt_cell(f64::INFINITY), "inf");
    }

    #[test]
    fn rendering_is_deterministic_and_ordered() {
        let doc = Json::obj(vec![
            ("b", Json::Int(2)),
            ("a", Json::Num(1.0)),
            ("items", Json::Arr(vec![Json::Bool(true), Json::Null])),
            ("s", Json::str("quote\" and \\slash")),
        ]);
        let a = doc.render_pretty();
        let b = doc.render_pretty();
        assert_eq!(a, b);
        // insertion order is preserved, not sorted
        assert!(a.find("\"b\"").unwrap() < a.find("\"a\"").unwrap());
        let compact = doc.render_compact();
        assert!(!compact.contains('\n'));
        assert!(compact.contains("\"quote\\\" and \\\\slash\""));
    }

    #[test]
    fn empty_containers() {
        assert_eq!(Json::Arr(vec![]).render_compact(), "[]");
        assert_eq!(Json::Obj(vec![]).render_compact(), "{}");
    }
}
