//! Deterministic output helpers: fixed 17-significant-digit float
//! formatting, CSV assembly and file/stdout dispatch.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// 17 significant digits, scientific notation; enough to round-trip any
/// finite f64 and identical across runs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Writes to the path, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
