//! Attribute tables: a CSV file (`sample_id`, `identity`, then one column per
//! attribute) plus a JSON schema sidecar declaring each attribute column.
//!
//! ```json
//! {"columns": [
//!   {"name": "male", "kind": "categorical", "modalities": ["-1", "1"]},
//!   {"name": "age", "kind": "continuous"},
//!   {"name": "old", "source": "age", "kind": "continuous", "thresholds": [40]}
//! ]}
//! ```
//!
//! A continuous column with `thresholds` is binned at load time into a
//! categorical attribute with modalities `<t1`, `[t1,t2)`, ..., `>=tk`.
//! `source` lets several schema entries read the same CSV column.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};
use crate::macroscale::{Attribute, AttributeTable, Column};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColumnKind {
    Categorical { modalities: Vec<String> },
    Continuous {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        thresholds: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    /// CSV column to read; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

impl ColumnSchema {
    pub fn source(&self) -> &str {
        self.source.as_deref().unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttrSchema {
    pub columns: Vec<ColumnSchema>,
}

impl AttrSchema {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: AttrSchema =
            serde_json::from_str(text).map_err(|e| FormatError::Schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schema serializes");
        s.push('\n');
        s
    }

    fn validate(&self) -> Result<()> {
        let schema = |m: String| Err(FormatError::Schema(m).into());
        let mut names = HashSet::new();
        for c in &self.columns {
            if !names.insert(c.name.as_str()) {
                return schema(format!("duplicate column {:?}", c.name));
            }
            if c.source() == "sample_id" || c.source() == "identity" {
                return schema(format!("{:?} is reserved", c.source()));
            }
            match &c.kind {
                ColumnKind::Categorical { modalities } => {
                    if modalities.is_empty() {
                        return schema(format!("column {:?} declares no modalities", c.name));
                    }
                    let set: HashSet<&String> = modalities.iter().collect();
                    if set.len() != modalities.len() {
                        return schema(format!("column {:?} repeats a modality", c.name));
                    }
                }
                ColumnKind::Continuous { thresholds: Some(t) } => {
                    if t.is_empty() || t.iter().any(|x| !x.is_finite()) || t.windows(2).any(|w| w[0] >= w[1]) {
                        return schema(format!(
                            "column {:?}: thresholds must be finite and strictly increasing",
                            c.name
                        ));
                    }
                }
                ColumnKind::Continuous { thresholds: None } => {}
            }
        }
        Ok(())
    }

    /// Schema that describes `table` exactly.
    pub fn describe(table: &AttributeTable) -> Self {
        AttrSchema {
            columns: table
                .attributes()
                .iter()
                .map(|a| ColumnSchema {
                    name: a.name.clone(),
                    source: None,
                    kind: match &a.column {
                        Column::Categorical { modalities, .. } => ColumnKind::Categorical {
                            modalities: modalities.clone(),
                        },
                        Column::Continuous { .. } => ColumnKind::Continuous { thresholds: None },
                    },
                })
                .collect(),
        }
    }
}

/// Modality labels for a binned continuous column.
pub fn bin_labels(thresholds: &[f64]) -> Vec<String> {
    let mut out = vec![format!("<{}", thresholds[0])];
    for w in thresholds.windows(2) {
        out.push(format!("[{},{})", w[0], w[1]));
    }
    out.push(format!(">={}", thresholds[thresholds.len() - 1]));
    out
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    FormatError::Csv {
        line,
        message: e.to_string(),
    }
    .into()
}

enum Builder {
    Categorical {
        index: HashMap<String, u32>,
        values: Vec<u32>,
    },
    Continuous(Vec<f64>),
    Binned {
        thresholds: Vec<f64>,
        values: Vec<u32>,
    },
}

pub fn parse_attrs(csv_text: &str, schema: &AttrSchema) -> Result<AttributeTable> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let position: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    if position.len() != header.len() {
        return Err(FormatError::Csv {
            line: 1,
            message: "duplicate header column".into(),
        }
        .into());
    }
    let col = |name: &str| -> Result<usize> {
        position.get(name).copied().ok_or_else(|| {
            FormatError::MissingColumn {
                column: name.to_string(),
            }
            .into()
        })
    };
    let id_col = col("sample_id")?;
    let identity_col = col("identity")?;
    let sources: Vec<usize> = schema.columns.iter().map(|c| col(c.source())).collect::<Result<_>>()?;
    let declared: HashSet<&str> = schema.columns.iter().map(|c| c.source()).collect();
    if let Some(extra) = header
        .iter()
        .find(|h| h.as_str() != "sample_id" && h.as_str() != "identity" && !declared.contains(h.as_str()))
    {
        return Err(FormatError::Schema(format!("column {extra:?} is not declared in the schema")).into());
    }

    let mut builders: Vec<Builder> = schema
        .columns
        .iter()
        .map(|c| match &c.kind {
            ColumnKind::Categorical { modalities } => Builder::Categorical {
                index: modalities.iter().enumerate().map(|(k, m)| (m.clone(), k as u32)).collect(),
                values: Vec::new(),
            },
            ColumnKind::Continuous { thresholds: None } => Builder::Continuous(Vec::new()),
            ColumnKind::Continuous { thresholds: Some(t) } => Builder::Binned {
                thresholds: t.clone(),
                values: Vec::new(),
            },
        })
        .collect();
    let mut sample_ids = Vec::new();
    let mut identities = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(FormatError::Arity {
                line,
                expected: header.len(),
                found: record.len(),
            }
            .into());
        }
        let field = |i: usize| record.get(i).expect("arity checked").trim();
        let missing = |name: &str| -> Error {
            FormatError::MissingValue {
                line,
                column: name.to_string(),
            }
            .into()
        };
        let sid = field(id_col);
        if sid.is_empty() {
            return Err(missing("sample_id"));
        }
        if !seen.insert(sid.to_string()) {
            return Err(FormatError::DuplicateSampleIdLine { line, id: sid.to_string() }.into());
        }
        let ident = field(identity_col);
        if ident.is_empty() {
            return Err(missing("identity"));
        }
        sample_ids.push(sid.to_string());
        identities.push(ident.to_string());
        for ((c, &src), b) in schema.columns.iter().zip(&sources).zip(builders.iter_mut()) {
            let raw = field(src);
            if raw.is_empty() {
                return Err(missing(c.source()));
            }
            let number = || -> Result<f64> {
                raw.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                    FormatError::BadNumber {
                        line,
                        column: c.source().to_string(),
                        value: raw.to_string(),
                    }
                    .into()
                })
            };
            match b {
                Builder::Categorical { index, values } => {
                    let v = index.get(raw).ok_or_else(|| FormatError::UnknownModality {
                        line,
                        column: c.source().to_string(),
                        value: raw.to_string(),
                    })?;
                    values.push(*v);
                }
                Builder::Continuous(values) => values.push(number()?),
                Builder::Binned { thresholds, values } => {
                    let x = number()?;
                    values.push(thresholds.partition_point(|&t| t <= x) as u32);
                }
            }
        }
    }
    let attributes = schema
        .columns
        .iter()
        .zip(builders)
        .map(|(c, b)| Attribute {
            name: c.name.clone(),
            column: match (b, &c.kind) {
                (Builder::Categorical { values, .. }, ColumnKind::Categorical { modalities }) => Column::Categorical {
                    modalities: modalities.clone(),
                    values,
                },
                (Builder::Continuous(values), _) => Column::Continuous { values },
                (Builder::Binned { thresholds, values }, _) => Column::Categorical {
                    modalities: bin_labels(&thresholds),
                    values,
                },
                _ => unreachable!("builders follow the schema"),
            },
        })
        .collect();
    AttributeTable::new(sample_ids, identities, attributes)
}

pub fn read_attrs(csv_path: impl AsRef<Path>, schema_path: impl AsRef<Path>) -> Result<AttributeTable> {
    let (csv_path, schema_path) = (csv_path.as_ref(), schema_path.as_ref());
    let schema_text = std::fs::read_to_string(schema_path).map_err(|e| Error::io(schema_path.display(), e))?;
    let csv_text = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path.display(), e))?;
    parse_attrs(&csv_text, &AttrSchema::from_json(&schema_text)?)
}

/// CSV text for `table`; numbers use the shortest round-trip form.
pub fn format_attrs(table: &AttributeTable) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["sample_id".to_string(), "identity".to_string()];
    header.extend(table.names().map(str::to_string));
    w.write_record(&header).map_err(csv_error)?;
    for i in 0..table.len() {
        let mut row = vec![table.sample_ids()[i].clone(), table.identities()[i].clone()];
        for a in table.attributes() {
            row.push(match &a.column {
                Column::Categorical { modalities, values } => modalities[values[i] as usize].clone(),
                Column::Continuous { values } => format!("{}", values[i]),
            });
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 strings"))
}

pub fn write_attrs(table: &AttributeTable, csv_path: impl AsRef<Path>, schema_path: impl AsRef<Path>) -> Result<()> {
    let (csv_path, schema_path) = (csv_path.as_ref(), schema_path.as_ref());
    std::fs::write(csv_path, format_attrs(table)?).map_err(|e| Error::io(csv_path.display(), e))?;
    std::fs::write(schema_path, AttrSchema::describe(table).to_json()).map_err(|e| Error::io(schema_path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &str = r#"{"columns": [
        {"name": "male", "kind": "categorical", "modalities": ["-1", "1"]},
        {"name": "age", "kind": "continuous"},
        {"name": "old", "source": "age", "kind": "continuous", "thresholds": [40]}
    ]}"#;

    fn schema() -> AttrSchema {
        AttrSchema::from_json(SCHEMA).unwrap()
    }

    #[test]
    fn two_identity_fixture_matches_oracle() {
        let csv = "sample_id,identity,male,age\na1,alice,-1,30\na2,alice,-1,31.5\nb1,bob,1,52\n";
        let t = parse_attrs(csv, &schema()).unwrap();
        let oracle = AttributeTable::new(
            vec!["a1".into(), "a2".into(), "b1".into()],
            vec!["alice".into(), "alice".into(), "bob".into()],
            vec![
                Attribute {
                    name: "male".into(),
                    column: Column::Categorical {
                        modalities: vec!["-1".into(), "1".into()],
                        values: vec![0, 0, 1],
                    },
                },
                Attribute {
                    name: "age".into(),
                    column: Column::Continuous { values: vec![30.0, 31.5, 52.0] },
                },
                Attribute {
                    name: "old".into(),
                    column: Column::Categorical {
                        modalities: vec!["<40".into(), ">=40".into()],
                        values: vec![0, 0, 1],
                    },
                },
            ],
        )
        .unwrap();
        assert_eq!(t, oracle);
    }

    #[test]
    fn unknown_modality_names_line_and_column() {
        let csv = "sample_id,identity,male,age\na1,alice,-1,30\na2,alice,0,31\n";
        let e = parse_attrs(csv, &schema()).unwrap_err();
        assert!(matches!(
            e,
            Error::Format(FormatError::UnknownModality { line: 3, ref column, ref value }) if column == "male" && value == "0"
        ), "{e}");
        assert!(e.to_string().contains("line 3"));
    }

    #[test]
    fn located_errors() {
        let s = schema();
        let err = |csv: &str| match parse_attrs(csv, &s) {
            Err(Error::Format(f)) => f,
            other => panic!("{other:?}"),
        };
        assert_eq!(
            err("sample_id,identity,male\na,x,1\n"),
            FormatError::MissingColumn { column: "age".into() }
        );
        assert_eq!(
            err("sample_id,identity,male,age\na,x,1\n"),
            FormatError::Arity { line: 2, expected: 4, found: 3 }
        );
        assert!(matches!(err("sample_id,identity,male,age\na,x,1,old\n"), FormatError::BadNumber { line: 2, .. }));
        assert!(matches!(err("sample_id,identity,male,age\na,x,1,\n"), FormatError::MissingValue { line: 2, .. }));
        assert!(matches!(
            err("sample_id,identity,male,age\na,x,1,3\na,y,1,4\n"),
            FormatError::DuplicateSampleIdLine { line: 3, .. }
        ));
        assert!(matches!(err("sample_id,identity,male,age,zzz\na,x,1,3,4\n"), FormatError::Schema(_)));
        assert!(AttrSchema::from_json(r#"{"columns": [{"name": "a", "kind": "categorical", "modalities": []}]}"#).is_err());
        assert!(AttrSchema::from_json(r#"{"columns": [{"name": "a", "kind": "continuous", "thresholds": [2, 1]}]}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let csv = "sample_id,identity,male,age\na1,alice,-1,30\n\"b,1\",bob,1,52.25\n";
        let t = parse_attrs(csv, &schema()).unwrap();
        let text = format_attrs(&t).unwrap();
        let again = parse_attrs(&text, &AttrSchema::describe(&t)).unwrap();
        assert_eq!(t, again);
        assert_eq!(format_attrs(&again).unwrap(), text);
    }

    #[test]
    fn bins() {
        assert_eq!(bin_labels(&[1.0, 2.5]), vec!["<1", "[1,2.5)", ">=2.5"]);
    }
}
