//! Deterministic text and JSON rendering.
//!
//! JSON is hand-assembled: the schemas are flat and fixed, numbers are
//! emitted with 15 significant digits, and non-finite values become `null`
//! so the output always parses. Text output is aligned key/value lines
//! carrying the same numbers at full precision.

use std::fmt::Write;

/// JSON number: 15 significant digits, `null` when not finite.
pub fn jnum(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        "null".to_owned()
    }
}

/// JSON string with the mandatory escapes.
pub fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
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
    out
}

/// Aligned `key  value` lines: keys padded to the longest, two-space gutter.
pub struct TextBlock {
    rows: Vec<(String, String)>,
}

impl TextBlock {
    pub fn new() -> Self {
        TextBlock { rows: Vec::new() }
    }

    pub fn row(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.rows.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

/// Aligned table: every column padded to its widest cell, two-space gutter,
/// trailing spaces trimmed.
pub struct TextTable {
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new() -> Self {
        TextTable { rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn render(&self) -> String {
        let columns = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut widths = vec![0usize; columns];
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(visible_len(cell));
            }
        }
        let mut out = String::new();
        for row in &self.rows {
            let mut line = String::new();
            for (i, cell) in row.iter().enumerate() {
                let pad = widths[i] - visible_len(cell);
                line.push_str(cell);
                if i + 1 < row.len() {
                    line.extend(std::iter::repeat_n(' ', pad + 2));
                }
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }
}

/// Cell width ignoring ANSI color sequences, so colored and plain output
/// align identically.
fn visible_len(s: &str) -> usize {
    let mut len = 0;
    let mut in_escape = false;
    for c in s.chars() {
        if in_escape {
            if c == 'm' {
                in_escape = false;
            }
        } else if c == '\u{1b}' {
            in_escape = true;
        } else {
            len += 1;
        }
    }
    len
}
