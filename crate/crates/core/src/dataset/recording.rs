//! Delimited-text recording files.
//!
//! One sample per line, ten comma-separated numbers in canonical channel
//! order. Leading lines starting with `#` are treated as a header. Values
//! are written with the shortest representation that parses back to the
//! same `f64`, so save/load is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::{DatasetError, RawRecording, RecordingMeta};
use crate::{CHANNEL_NAMES, SENSOR_COUNT};

pub fn load_recording(path: &Path, meta: RecordingMeta) -> Result<RawRecording, DatasetError> {
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_recording(&text, &path.display().to_string(), meta)
}

/// Parses recording text; `origin` is only used in error messages.
pub fn parse_recording(text: &str, origin: &str, meta: RecordingMeta) -> Result<RawRecording, DatasetError> {
    let malformed = |line: usize, reason: String| DatasetError::MalformedFile {
        path: origin.to_string(),
        line,
        reason,
    };

    let mut values = Vec::new();
    let mut rows = 0;
    let mut in_header = true;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if in_header && trimmed.starts_with('#') {
            continue;
        }
        in_header = false;
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != SENSOR_COUNT {
            return Err(malformed(
                line_no,
                format!("expected {SENSOR_COUNT} fields, found {}", fields.len()),
            ));
        }
        for field in fields {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| malformed(line_no, format!("non-numeric cell {field:?}")))?;
            if !v.is_finite() {
                return Err(malformed(line_no, format!("non-finite cell {field:?}")));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows < 2 {
        return Err(DatasetError::TooShort { rows });
    }
    RawRecording::new(meta, DMatrix::from_row_slice(rows, SENSOR_COUNT, &values))
}

pub fn format_recording(rec: &RawRecording) -> String {
    let mut out = String::new();
    out.push_str("# ");
    out.push_str(&CHANNEL_NAMES.join(","));
    out.push('\n');
    for row in rec.samples().row_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn save_recording(path: &Path, rec: &RawRecording) -> Result<(), DatasetError> {
    crate::io::write_atomic(path, format_recording(rec).as_bytes()).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta() -> RecordingMeta {
        RecordingMeta::new(1, 1, 1)
    }

    #[test]
    fn zeros_file() {
        let text = "0,0,0,0,0,0,0,0,0,0\n".repeat(3);
        let rec = parse_recording(&text, "mem", meta()).unwrap();
        assert_eq!(rec.samples().shape(), (3, 10));
        assert!(rec.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn header_and_whitespace() {
        let text = "# thumb,...\n# second header\n1, 2,3,4,5,6,7,8,9,10\n\n 1,2,3,4,5,6,7,8,9,-1e-3 \n";
        let rec = parse_recording(text, "mem", meta()).unwrap();
        assert_eq!(rec.len(), 2);
        assert_eq!(rec.samples()[(1, 9)], -1e-3);
    }

    #[test]
    fn nine_columns_is_malformed() {
        let text = "0,0,0,0,0,0,0,0,0\n".repeat(3);
        let err = parse_recording(&text, "mem", meta()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedFile { line: 1, .. }), "{err}");
    }

    #[test]
    fn non_numeric_cell_is_malformed() {
        let text = "0,0,0,0,0,0,0,0,0,0\n0,0,0,x,0,0,0,0,0,0\n";
        let err = parse_recording(text, "mem", meta()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedFile { line: 2, .. }), "{err}");
        let text = "0,0,0,0,0,0,0,0,0,0\n0,0,0,NaN,0,0,0,0,0,0\n";
        assert!(parse_recording(text, "mem", meta()).is_err());
    }

    #[test]
    fn single_row_is_too_short() {
        let text = "0,0,0,0,0,0,0,0,0,0\n";
        assert!(matches!(
            parse_recording(text, "mem", meta()),
            Err(DatasetError::TooShort { rows: 1 })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_recording(Path::new("/nonexistent/rec.csv"), meta()).unwrap_err();
        assert!(matches!(err, DatasetError::Io { .. }));
    }

    proptest! {
        #[test]
        fn save_load_is_bit_exact(
            rows in 2usize..30,
            seed in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 300),
        ) {
            let data: Vec<f64> = seed.into_iter().take(rows * SENSOR_COUNT).collect();
            let rows = data.len() / SENSOR_COUNT;
            prop_assume!(rows >= 2);
            let rec = RawRecording::new(meta(), DMatrix::from_row_slice(rows, SENSOR_COUNT, &data[..rows * SENSOR_COUNT])).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rec.csv");
            save_recording(&path, &rec).unwrap();
            let back = load_recording(&path, meta()).unwrap();
            for (a, b) in rec.samples().iter().zip(back.samples().iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
