use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Column {
    /// `values[k]` indexes into `modalities`.
    Categorical {
        modalities: Vec<String>,
        values: Vec<u32>,
    },
    Continuous { values: Vec<f64> },
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Categorical { values, .. } => values.len(),
            Column::Continuous { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, Column::Categorical { .. })
    }

    /// Numeric value per row: continuous values as is, categorical
    /// modalities by their numeric label when all parse as numbers, or as
    /// 0/1 for a two-modality attribute. `None` otherwise.
    pub fn numeric(&self) -> Option<Vec<f64>> {
        match self {
            Column::Continuous { values } => Some(values.clone()),
            Column::Categorical { modalities, values } => {
                let parsed: Option<Vec<f64>> =
                    modalities.iter().map(|m| m.trim().parse::<f64>().ok()).collect();
                let codes = match parsed {
                    Some(p) if p.iter().all(|x| x.is_finite()) => p,
                    _ if modalities.len() <= 2 => (0..modalities.len()).map(|k| k as f64).collect(),
                    _ => return None,
                };
                Some(values.iter().map(|&v| codes[v as usize]).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub column: Column,
}

/// Per-sample attribute values keyed by sample id, with identity labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTable {
    sample_ids: Vec<String>,
    identities: Vec<String>,
    attributes: Vec<Attribute>,
    by_name: HashMap<String, usize>,
}

impl AttributeTable {
    pub fn new(
        sample_ids: Vec<String>,
        identities: Vec<String>,
        attributes: Vec<Attribute>,
    ) -> Result<Self> {
        let n = sample_ids.len();
        if identities.len() != n {
            return Err(Error::LengthMismatch {
                left: identities.len(),
                right: n,
            });
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &sample_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateSampleId(id.clone()));
            }
        }
        let mut by_name = HashMap::new();
        for (k, a) in attributes.iter().enumerate() {
            if a.column.len() != n {
                return Err(Error::LengthMismatch {
                    left: a.column.len(),
                    right: n,
                });
            }
            if let Column::Categorical { modalities, values } = &a.column {
                if modalities.is_empty() {
                    return Err(Error::invalid(format!("attribute {:?} declares no modalities", a.name)));
                }
                if values.iter().any(|&v| v as usize >= modalities.len()) {
                    return Err(Error::invalid(format!("attribute {:?} has an undeclared modality", a.name)));
                }
            }
            if by_name.insert(a.name.clone(), k).is_some() {
                return Err(Error::invalid(format!("duplicate attribute {:?}", a.name)));
            }
        }
        Ok(AttributeTable {
            sample_ids,
            identities,
            attributes,
            by_name,
        })
    }

    pub fn len(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_ids.is_empty()
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn identities(&self) -> &[String] {
        &self.identities
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    pub fn attribute(&self, name: &str) -> Result<&Attribute> {
        self.by_name
            .get(name)
            .map(|&k| &self.attributes[k])
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Row indices grouped by identity label (sorted labels).
    pub fn identity_groups(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut g: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, id) in self.identities.iter().enumerate() {
            g.entry(id.as_str()).or_default().push(i);
        }
        g
    }

    /// Reorders rows to follow `set`. Every sample of `set` must be present
    /// with the same identity; extra table rows are dropped.
    pub fn aligned_to(&self, set: &EmbeddingSet) -> Result<AttributeTable> {
        let pos: HashMap<&str, usize> = self
            .sample_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut order = Vec::with_capacity(set.len());
        for (r, sid) in set.sample_ids().iter().enumerate() {
            let &i = pos
                .get(sid.as_str())
                .ok_or_else(|| Error::MissingSample(sid.clone()))?;
            if self.identities[i] != set.identity(r) {
                return Err(Error::invalid(format!(
                    "sample {sid:?}: identity {:?} in attributes, {:?} in embeddings",
                    self.identities[i],
                    set.identity(r)
                )));
            }
            order.push(i);
        }
        let attributes = self
            .attributes
            .iter()
            .map(|a| Attribute {
                name: a.name.clone(),
                column: match &a.column {
                    Column::Categorical { modalities, values } => Column::Categorical {
                        modalities: modalities.clone(),
                        values: order.iter().map(|&i| values[i]).collect(),
                    },
                    Column::Continuous { values } => Column::Continuous {
                        values: order.iter().map(|&i| values[i]).collect(),
                    },
                },
            })
            .collect();
        AttributeTable::new(
            order.iter().map(|&i| self.sample_ids[i].clone()).collect(),
            order.iter().map(|&i| self.identities[i].clone()).collect(),
            attributes,
        )
    }

    pub fn is_aligned(&self, set: &EmbeddingSet) -> bool {
        self.sample_ids == set.sample_ids()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Metric;

    fn table() -> AttributeTable {
        AttributeTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["p".into(), "p".into(), "q".into()],
            vec![
                Attribute {
                    name: "male".into(),
                    column: Column::Categorical {
                        modalities: vec!["-1".into(), "1".into()],
                        values: vec![0, 1, 1],
                    },
                },
                Attribute {
                    name: "hair".into(),
                    column: Column::Categorical {
                        modalities: vec!["black".into(), "blond".into(), "red".into()],
                        values: vec![0, 2, 1],
                    },
                },
                Attribute {
                    name: "age".into(),
                    column: Column::Continuous { values: vec![20.0, 21.0, 40.0] },
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn numeric_encodings() {
        let t = table();
        assert_eq!(t.attribute("male").unwrap().column.numeric(), Some(vec![-1.0, 1.0, 1.0]));
        assert_eq!(t.attribute("hair").unwrap().column.numeric(), None);
        assert_eq!(t.attribute("age").unwrap().column.numeric(), Some(vec![20.0, 21.0, 40.0]));
        let yes_no = Column::Categorical {
            modalities: vec!["no".into(), "yes".into()],
            values: vec![1, 0],
        };
        assert_eq!(yes_no.numeric(), Some(vec![1.0, 0.0]));
        assert!(matches!(t.attribute("nope"), Err(Error::UnknownAttribute(_))));
    }

    #[test]
    fn alignment() {
        let t = table();
        let set = EmbeddingSet::new(
            vec![0.0, 1.0],
            1,
            vec!["c".into(), "a".into()],
            vec!["q".into(), "p".into()],
            Metric::Euclidean,
        )
        .unwrap();
        let a = t.aligned_to(&set).unwrap();
        assert!(a.is_aligned(&set));
        assert_eq!(a.attribute("age").unwrap().column.numeric(), Some(vec![40.0, 20.0]));

        let missing = EmbeddingSet::new(vec![0.0], 1, vec!["z".into()], vec!["q".into()], Metric::Euclidean)
            .unwrap();
        assert!(matches!(t.aligned_to(&missing), Err(Error::MissingSample(_))));
        let wrong_id = EmbeddingSet::new(vec![0.0], 1, vec!["a".into()], vec!["q".into()], Metric::Euclidean)
            .unwrap();
        assert!(t.aligned_to(&wrong_id).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let bad = AttributeTable::new(
            vec!["a".into()],
            vec!["p".into()],
            vec![Attribute {
                name: "x".into(),
                column: Column::Categorical {
                    modalities: vec!["0".into()],
                    values: vec![3],
                },
            }],
        );
        assert!(bad.is_err());
        assert!(AttributeTable::new(vec!["a".into(), "a".into()], vec!["p".into(); 2], vec![]).is_err());
    }
}
