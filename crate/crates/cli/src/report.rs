//! Deterministic JSON rendering.
//!
//! Reports must be byte-identical across runs and machines, so this module
//! renders JSON with a fixed field order (insertion order of the object
//! vector) and prints every float with 17 significant digits, enough to
//! round-trip an `f64` exactly. No map types are involved anywhere, so no
//! ordering decision is left to a library.

/// A JSON value with deterministic rendering.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Arr(Vec<Json>),
    /// Keys are static so field order is fixed at the construction site.
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn int(n: usize) -> Json {
        Json::Int(n as i64)
    }

    /// A complex number in the wire convention `[re, im]`.
    pub fn complex(re: f64, im: f64) -> Json {
        Json::Arr(vec![Json::Float(re), Json::Float(im)])
    }

    pub fn opt_int(n: Option<usize>) -> Json {
        match n {
            Some(v) => Json::int(v),
            None => Json::Null,
        }
    }

    pub fn opt_float(x: Option<f64>) -> Json {
        match x {
            Some(v) => Json::Float(v),
            None => Json::Null,
        }
    }
}

/// Renders with no whitespace beyond single spaces after `:` and `,`,
/// so output is diff-friendly yet compact and, above all, reproducible.
pub fn render(value: &Json) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out
}

fn write_value(out: &mut String, value: &Json) {
    match value {
        Json::Null => out.push_str("null"),
        Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Json::Int(n) => out.push_str(&n.to_string()),
        Json::Float(x) => write_float(out, *x),
        Json::Str(s) => write_string(out, s),
        Json::Arr(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Json::Obj(fields) => {
            out.push('{');
            for (i, (key, item)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_string(out, key);
                out.push_str(": ");
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

fn write_float(out: &mut String, x: f64) {
    if x.is_finite() {
        // 1 leading digit + 16 decimals = 17 significant digits.
        out.push_str(&format!("{x:.16e}"));
    } else {
        // JSON has no NaN/Inf token; report values are always finite, so
        // this only guards against a defect upstream.
        out.push_str("null");
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        let x = 0.1f64 + 0.2f64;
        let rendered = render(&Json::Float(x));
        assert_eq!(rendered, "3.0000000000000004e-1");
        let parsed: f64 = rendered.parse().unwrap();
        assert_eq!(parsed, x);
    }

    #[test]
    fn object_field_order_is_insertion_order() {
        let v = Json::Obj(vec![
            ("zeta", Json::Int(1)),
            ("alpha", Json::Bool(false)),
        ]);
        assert_eq!(render(&v), "{\"zeta\": 1, \"alpha\": false}");
    }

    #[test]
    fn strings_are_escaped() {
        let v = Json::str("a\"b\\c\nd");
        assert_eq!(render(&v), "\"a\\\"b\\\\c\\nd\"");
    }

    #[test]
    fn rendering_parses_as_json() {
        let v = Json::Obj(vec![
            ("x", Json::Float(1.0 / 3.0)),
            ("y", Json::Arr(vec![Json::Null, Json::Int(-2), Json::complex(0.5, -0.25)])),
        ]);
        let text = render(&v);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["x"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(parsed["y"][2][1].as_f64().unwrap(), -0.25);
    }
}
