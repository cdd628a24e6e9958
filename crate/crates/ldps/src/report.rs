//! Deterministic CSV output.
//!
//! Every report starts with a comment line recording the config hash,
//! artifact version and seed, followed by a header row. Numbers are
//! written in the shortest decimal form that round-trips binary64 (Rust's
//! `Display` for `f64`), so identical runs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::Result;

/// Shortest round-trip decimal form of a binary64 value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

/// First 16 hex digits of the SHA-256 of the canonical config text.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// The standard comment line carried by every CSV report.
pub fn comment_line(hash: &str, seed: u64) -> String {
    format!(
        "# config_hash={hash} version={} seed={seed}",
        env!("CARGO_PKG_VERSION")
    )
}

/// A CSV report under construction: comment, header, then rows in order.
pub struct CsvReport {
    buf: String,
    columns: usize,
}

impl CsvReport {
    pub fn new(comment: &str, header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(comment);
        buf.push('\n');
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    /// Append one row; values must match the header width.
    pub fn row(&mut self, values: &[String]) {
        debug_assert_eq!(values.len(), self.columns, "row width mismatch");
        self.buf.push_str(&values.join(","));
        self.buf.push('\n');
    }

    /// Append a trailing comment line (trend verdicts and the like).
    pub fn trailing_comment(&mut self, text: &str) {
        self.buf.push_str("# ");
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.buf.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_formatting_round_trips() {
        for &v in &[
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            1.7182818284590453,
            123456789.123456789,
            0.0,
        ] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s}");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn hash_is_stable_and_text_sensitive() {
        let a = config_hash("{\"model\": \"p1\"}");
        let b = config_hash("{\"model\": \"p1\"}");
        let c = config_hash("{\"model\": \"p2\"}");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn report_layout() {
        let mut r = CsvReport::new("# c", &["a", "b"]);
        r.row(&["1".into(), "2".into()]);
        r.trailing_comment("trend x=ok");
        let lines: Vec<&str> = r.as_str().lines().collect();
        assert_eq!(lines, vec!["# c", "a,b", "1,2", "# trend x=ok"]);
    }
}
