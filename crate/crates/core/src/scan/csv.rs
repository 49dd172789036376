//! Dataset files: `# key = value` header lines, one column-name line,
//! then comma-separated numeric rows. Floats use 17 significant digits so
//! a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{format_float, SweepResult, INTEGER_COLUMNS};
use crate::error::{Error, Result};

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::new();
    for (k, v) in &result.header {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str(&result.columns.join(","));
    out.push('\n');
    let integer: Vec<bool> = result
        .columns
        .iter()
        .map(|c| INTEGER_COLUMNS.contains(&c.as_str()))
        .collect();
    for row in &result.rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if integer.get(i).copied().unwrap_or(false) && v.fract() == 0.0 && v.abs() < 1e15 {
                let _ = write!(out, "{}", *v as i64);
            } else {
                out.push_str(&format_float(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// Parses a dataset; `origin` only labels errors.
pub fn from_csv_str(text: &str, origin: &Path) -> Result<SweepResult> {
    let bad = |line: usize, message: String| Error::CsvFormat {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut header = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(rest) = line.strip_prefix('#') {
            if columns.is_some() {
                return Err(bad(line_no, "header line after the column line".into()));
            }
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| bad(line_no, "header line without '='".into()))?;
            header.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match &columns {
            None => columns = Some(line.split(',').map(|s| s.trim().to_string()).collect()),
            Some(cols) => {
                let row = line
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(line_no, format!("not a number: '{}'", s.trim())))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                if row.len() != cols.len() {
                    return Err(bad(line_no, format!("expected {} fields, found {}", cols.len(), row.len())));
                }
                rows.push(row);
            }
        }
    }
    let columns = columns.ok_or_else(|| bad(text.lines().count(), "missing column line".into()))?;
    Ok(SweepResult { header, columns, rows })
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(result)).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })?;
    from_csv_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepResult {
        SweepResult {
            header: vec![("kind".into(), "radial-profile".into()), ("note".into(), "a = b".into())],
            columns: vec!["m".into(), "p".into(), "x".into()],
            rows: vec![
                vec![2.0, 0.0, 0.1 + 0.2],
                vec![20.0, 1.0, -1.234_567_890_123_456_7e-300],
                vec![0.0, 0.0, f64::MIN_POSITIVE / 3.0],
            ],
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let r = sample();
        let text = to_csv_string(&r);
        let back = from_csv_str(&text, Path::new("mem")).unwrap();
        assert_eq!(back.header, r.header);
        assert_eq!(back.columns, r.columns);
        for (a, b) in back.rows.iter().flatten().zip(r.rows.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(to_csv_string(&back), text);
    }

    #[test]
    fn integers_are_written_plainly() {
        let text = to_csv_string(&sample());
        assert!(text.lines().any(|l| l.starts_with("20,1,")));
    }

    #[test]
    fn malformed_input_reports_line() {
        let err = from_csv_str("# a = 1\nx,y\n1,2\n3\n", Path::new("f.csv")).unwrap_err();
        match err {
            Error::CsvFormat { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other}"),
        }
        assert!(from_csv_str("# a = 1\n", Path::new("f.csv")).is_err());
    }

    #[test]
    fn file_round_trip_and_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_csv(&sample(), &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, sample());
        let err = read_csv(&dir.path().join("missing.csv")).unwrap_err();
        assert!(err.to_string().contains("missing.csv"));
    }
}
