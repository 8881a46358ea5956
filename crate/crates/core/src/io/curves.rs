//! Curve manifests: JSON lines of
//! `{"attribute": ..., "identity": ..., "indices": [...], "params": [...]}`.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::energy::{Curve, CurveSet};
use crate::error::{Error, FormatError, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveLine {
    attribute: String,
    identity: String,
    indices: Vec<u32>,
    params: Vec<f64>,
}

/// Parses a manifest against its companion embeddings. Blank lines are
/// skipped; every problem is reported with its 1-based line number.
pub fn parse_curves<R: BufRead>(reader: R, set: &EmbeddingSet) -> Result<CurveSet> {
    let mut curves = Vec::new();
    let mut lengths: HashMap<String, usize> = HashMap::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k as u64 + 1;
        let line = line.map_err(|e| FormatError::Json {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let c: CurveLine = serde_json::from_str(&line).map_err(|e| FormatError::Json {
            line: line_no,
            message: e.to_string(),
        })?;
        curves.push(check_line(c, line_no, set, &mut lengths)?);
    }
    CurveSet::new(curves, set)
}

fn check_line(
    c: CurveLine,
    line: u64,
    set: &EmbeddingSet,
    lengths: &mut HashMap<String, usize>,
) -> std::result::Result<Curve, FormatError> {
    if c.indices.len() != c.params.len() {
        return Err(FormatError::ParamCountMismatch {
            line,
            indices: c.indices.len(),
            params: c.params.len(),
        });
    }
    if c.indices.len() < 2 {
        return Err(FormatError::ShortCurve { line });
    }
    let mut seen = HashSet::new();
    for &i in &c.indices {
        if !seen.insert(i) {
            return Err(FormatError::DuplicateCurveIndex { line, index: i });
        }
    }
    for &i in &c.indices {
        if i as usize >= set.len() {
            return Err(FormatError::DanglingIndex {
                line,
                index: i,
                rows: set.len(),
            });
        }
        if set.identity(i as usize) != c.identity {
            return Err(FormatError::CurveIdentity {
                line,
                row: i,
                declared: c.identity.clone(),
                actual: set.identity(i as usize).to_string(),
            });
        }
    }
    if c.params.iter().any(|p| !p.is_finite()) || c.params.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FormatError::NonIncreasingParams { line });
    }
    let expected = *lengths.entry(c.attribute.clone()).or_insert(c.indices.len());
    if expected != c.indices.len() {
        return Err(FormatError::CurveLength {
            line,
            attribute: c.attribute,
            expected,
            found: c.indices.len(),
        });
    }
    Ok(Curve {
        attribute: c.attribute,
        identity: c.identity,
        indices: c.indices.into_iter().map(|i| i as usize).collect(),
        params: c.params,
    })
}

pub fn read_curves(path: impl AsRef<Path>, set: &EmbeddingSet) -> Result<CurveSet> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path.display(), e))?;
    parse_curves(std::io::BufReader::new(f), set)
}

pub fn format_curves(curves: &CurveSet) -> String {
    let mut out = String::new();
    for c in curves.curves() {
        let line = CurveLine {
            attribute: c.attribute.clone(),
            identity: c.identity.clone(),
            indices: c.indices.iter().map(|&i| i as u32).collect(),
            params: c.params.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("curve serializes"));
        out.push('\n');
    }
    out
}

pub fn write_curves(curves: &CurveSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_curves(curves)).map_err(|e| Error::io(path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Metric;

    fn set() -> EmbeddingSet {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 1.0]).collect();
        let ids = ["a", "a", "a", "b", "b", "b"].iter().map(|s| s.to_string()).collect();
        EmbeddingSet::from_rows(&rows, ids, Metric::Euclidean).unwrap()
    }

    fn parse(text: &str) -> Result<CurveSet> {
        parse_curves(text.as_bytes(), &set())
    }

    fn format_err(text: &str) -> FormatError {
        match parse(text) {
            Err(Error::Format(f)) => f,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_and_round_trips() {
        let text = "{\"attribute\":\"pose\",\"identity\":\"a\",\"indices\":[0,1,2],\"params\":[-1.0,0.0,1.0]}\n\n\
                    {\"attribute\":\"pose\",\"identity\":\"b\",\"indices\":[3,4,5],\"params\":[0.0,0.5,1.0]}\n";
        let c = parse(text).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.curves()[1].indices, vec![3, 4, 5]);
        let out = format_curves(&c);
        assert_eq!(format_curves(&parse(&out).unwrap()), out);
    }

    #[test]
    fn located_errors() {
        let l = |idx: &str, params: &str| {
            format!("{{\"attribute\":\"pose\",\"identity\":\"a\",\"indices\":{idx},\"params\":{params}}}")
        };
        assert_eq!(
            format_err(&l("[3,3,4]", "[0,1,2]")),
            FormatError::DuplicateCurveIndex { line: 1, index: 3 }
        );
        let text = format!("{}\n{}", l("[0,1]", "[0,1]"), l("[0,9]", "[0,1]"));
        assert_eq!(format_err(&text), FormatError::DanglingIndex { line: 2, index: 9, rows: 6 });
        assert_eq!(format_err(&l("[0,1]", "[1,1]")), FormatError::NonIncreasingParams { line: 1 });
        assert!(matches!(format_err(&l("[0,1]", "[1]")), FormatError::ParamCountMismatch { .. }));
        assert!(matches!(format_err(&l("[0]", "[1]")), FormatError::ShortCurve { .. }));
        assert!(matches!(format_err(&l("[0,3]", "[0,1]")), FormatError::CurveIdentity { row: 3, .. }));
        let text = format!("{}\n{}", l("[0,1]", "[0,1]"), l("[0,1,2]", "[0,1,2]"));
        assert!(matches!(format_err(&text), FormatError::CurveLength { line: 2, .. }));
        assert!(matches!(format_err("{\"attribute\": 3}"), FormatError::Json { line: 1, .. }));
    }
}
