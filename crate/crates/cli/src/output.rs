use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float for CSV and text output: integers without a fraction,
/// very large or small magnitudes in exponent form, `-0` as `0`.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let m = v.abs();
    if m == 0.0 || (1e-5..1e15).contains(&m) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

pub fn emit(out: Option<&Path>, body: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, body),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1.5e-9), "1.5e-9");
        assert_eq!(num(-3e20), "-3e20");
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], vec![vec!["1".into(), "2.5".into()]]);
        assert_eq!(s, "a,b\n1,2.5\n");
    }
}
