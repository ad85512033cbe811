//! Fields CSV and JSON-style reports.
//!
//! Every number is printed with 17 significant digits, enough for binary64
//! values to survive a text round trip bit for bit.

use std::fmt::Write as _;

use hyperturb_core::{Field, RescaledState, Sym6};

pub const FIELDS_MAGIC: &str = "# hyperturb fields v1";
pub const FIELDS_HEADER: &str = "x,y,phi,u1,u2,u3,s11,s12,s13,s22,s23,s33,k,y1,y2,y3";

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fields CSV: magic line, header, one row per cell in storage order.
pub fn fields_csv(field: &Field) -> String {
    let mut out = String::with_capacity(64 + field.cells.len() * 16 * 24);
    out.push_str(FIELDS_MAGIC);
    out.push('\n');
    out.push_str(FIELDS_HEADER);
    out.push('\n');
    for (c, s) in field.cells.iter().enumerate() {
        let (x, y) = field.grid.center(c);
        let row = [x, y].into_iter().chain(s.to_array());
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// One parsed CSV row: cell center and state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub state: RescaledState,
}

/// Inverse of [`fields_csv`]; error messages carry the line number.
pub fn parse_fields_csv(text: &str) -> Result<Vec<FieldRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(FIELDS_MAGIC) {
        return Err(format!("line 1: expected '{FIELDS_MAGIC}'"));
    }
    if lines.next() != Some(FIELDS_HEADER) {
        return Err("line 2: unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 3;
            let vals: Vec<f64> = l
                .split(',')
                .map(|v| v.parse().map_err(|_| format!("line {line}: invalid number '{v}'")))
                .collect::<Result<_, _>>()?;
            if vals.len() != 16 {
                return Err(format!("line {line}: expected 16 columns, got {}", vals.len()));
            }
            Ok(FieldRow {
                x: vals[0],
                y: vals[1],
                state: RescaledState {
                    phi: vals[2],
                    u: [vals[3], vals[4], vals[5]],
                    sigma: Sym6([vals[6], vals[7], vals[8], vals[9], vals[10], vals[11]]),
                    k: vals[12],
                    y: [vals[13], vals[14], vals[15]],
                },
            })
        })
        .collect()
}

/// Minimal JSON value for reports. Objects keep insertion order.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl From<bool> for Json {
    fn from(b: bool) -> Self {
        Json::Bool(b)
    }
}

impl From<usize> for Json {
    fn from(n: usize) -> Self {
        Json::Int(n as i64)
    }
}

impl From<u64> for Json {
    fn from(n: u64) -> Self {
        Json::Int(n as i64)
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Self {
        Json::Num(x)
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Self {
        Json::Str(s.to_string())
    }
}

impl From<String> for Json {
    fn from(s: String) -> Self {
        Json::Str(s)
    }
}

impl<T: Into<Json>> From<Option<T>> for Json {
    fn from(o: Option<T>) -> Self {
        o.map_or(Json::Null, Into::into)
    }
}

impl<T: Into<Json>> From<Vec<T>> for Json {
    fn from(v: Vec<T>) -> Self {
        Json::List(v.into_iter().map(Into::into).collect())
    }
}

/// Builder for `Json::Object`.
#[derive(Debug, Clone, Default)]
pub struct Obj(Vec<(String, Json)>);

impl Obj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Json>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn build(self) -> Json {
        Json::Object(self.0)
    }
}

fn escape(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn scalar_list(items: &[Json]) -> bool {
    items.iter().all(|j| !matches!(j, Json::List(_) | Json::Object(_)))
}

impl Json {
    /// Pretty-printed text. Non-finite numbers become the strings
    /// `"NaN"`, `"inf"` and `"-inf"`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Json::Num(x) if x.is_finite() => out.push_str(&fmt_f64(*x)),
            Json::Num(x) => escape(&x.to_string(), out),
            Json::Str(s) => escape(s, out),
            Json::List(items) if items.is_empty() => out.push_str("[]"),
            Json::List(items) if scalar_list(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.write(out, indent);
                }
                out.push(']');
            }
            Json::List(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Json::Object(entries) if entries.is_empty() => out.push_str("{}"),
            Json::Object(entries) => {
                out.push_str("{\n");
                for (i, (k, v)) in entries.iter().enumerate() {
                    out.push_str(&"  ".repeat(indent + 1));
                    escape(k, out);
                    out.push_str(": ");
                    v.write(out, indent + 1);
                    out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
                }
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperturb_core::Grid;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 6.02214076e23, -1e-300, f64::MIN_POSITIVE, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let g = Grid::new_2d(4, 5, 1.0, 2.0).unwrap();
        let f = Field::from_fn(g, |x, y| RescaledState {
            phi: x / 3.0,
            u: [y, -x, 0.1],
            sigma: Sym6([x * y, 1e-17, 0.0, -y, 7.0, 1.0 / 7.0]),
            k: x + y,
            y: [0.2, x, y],
        });
        let text = fields_csv(&f);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(FIELDS_MAGIC));
        assert_eq!(lines.next(), Some(FIELDS_HEADER));
        assert_eq!(lines.count(), 20);
        let rows = parse_fields_csv(&text).unwrap();
        for (c, row) in rows.iter().enumerate() {
            assert_eq!((row.x, row.y), g.center(c));
            assert_eq!(row.state, f.cells[c]);
        }
        // row-major: x varies fastest
        assert!(rows[1].x > rows[0].x && rows[1].y == rows[0].y);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let bad = format!("{FIELDS_MAGIC}\n{FIELDS_HEADER}\n1,2,3\n");
        assert!(parse_fields_csv(&bad).unwrap_err().starts_with("line 3"));
        assert!(parse_fields_csv("x\n").is_err());
    }

    #[test]
    fn report_is_valid_json() {
        let report = Obj::new()
            .with("name", "a \"quoted\"\nname")
            .with("count", 3usize)
            .with("value", 0.1)
            .with("missing", Option::<f64>::None)
            .with("bad", f64::NAN)
            .with("flags", vec![true, false])
            .with("rows", vec![Obj::new().with("eps", 0.2).build(), Obj::new().build()])
            .with("empty", Vec::<f64>::new())
            .build();
        let text = report.render();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["count"], 3);
        assert_eq!(v["value"].as_f64().unwrap().to_bits(), 0.1f64.to_bits());
        assert_eq!(v["name"], "a \"quoted\"\nname");
        assert_eq!(v["bad"], "NaN");
        assert!(v["missing"].is_null());
        assert_eq!(v["rows"][0]["eps"].as_f64(), Some(0.2));
    }
}
