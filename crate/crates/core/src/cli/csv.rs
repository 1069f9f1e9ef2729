//! Minimal CSV emission with round-trip-exact number formatting.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Accumulates comment lines, a header and rows, then writes them in one go.
#[derive(Debug, Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.text, "# {key}={value}");
        self
    }

    pub fn note(&mut self, msg: &str) -> &mut Self {
        let _ = writeln!(self.text, "# note: {msg}");
        self
    }

    pub fn header(&mut self, cols: &[&str]) -> &mut Self {
        let _ = writeln!(self.text, "{}", cols.join(","));
        self
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) -> &mut Self {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
            first = false;
        }
        self.text.push('\n');
        self
    }

    pub fn write_to(&self, out: &mut dyn Write) -> Result<()> {
        out.write_all(self.text.as_bytes()).map_err(|e| Error::InvalidInput(format!("write failed: {e}")))
    }
}

pub fn pair(x: [f64; 2]) -> String {
    format!("{},{}", num(x[0]), num(x[1]))
}
