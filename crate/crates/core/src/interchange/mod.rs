//! Feature sets, classifier-head parameters and their on-disk formats.
//!
//! Two formats are supported for each type:
//!
//! * a little-endian binary layout with a 4-byte magic tag, a version byte and
//!   explicit dimensions (see [`binary`]);
//! * a header-first CSV layout using `.` as decimal point (see [`text`]).
//!
//! Values travel as 32-bit floats in both formats. In memory everything is
//! `f64`, so writing quantizes to `f32` and reading widens back. A set that was
//! read from disk (or generated already quantized) therefore round-trips
//! bit-exactly.
//!
//! An optional JSON sidecar (`<basename>.meta.json`) carries category names and
//! provenance strings; see [`sidecar`].

pub mod binary;
pub mod sidecar;
pub mod signatures;
pub mod store;
pub mod text;

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

pub use sidecar::Sidecar;
pub use signatures::{read_signatures, write_signatures, SignatureRecord};
pub use store::{read_store, write_store};

/// On-disk encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Binary,
}

impl Format {
    /// `.csv` means CSV; anything else is treated as binary.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Binary,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Binary => "bin",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "binary" | "bin" => Ok(Format::Binary),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// One labelled object.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub label: usize,
    pub features: Vec<f64>,
}

/// `N` objects with `m`-dimensional feature vectors and integer category labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    m: usize,
    objects: Vec<FeatureRecord>,
    category_names: Option<Vec<String>>,
}

impl FeatureSet {
    /// Validates every invariant: uniform dimensionality, finite values,
    /// unique ids, and labels inside the name table when one is given.
    pub fn new(
        m: usize,
        objects: Vec<FeatureRecord>,
        category_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(objects.len());
        for (record, obj) in objects.iter().enumerate() {
            if obj.features.len() != m {
                return Err(Error::DimensionMismatch {
                    record: Some(record),
                    expected: m,
                    found: obj.features.len(),
                });
            }
            if let Some(column) = obj.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { record, column });
            }
            if let Some(names) = &category_names {
                if obj.label >= names.len() {
                    return Err(Error::LabelOutOfRange {
                        record,
                        label: obj.label,
                        n_categories: names.len(),
                    });
                }
            }
            if !seen.insert(obj.id.as_str()) {
                return Err(Error::DuplicateId {
                    record,
                    id: obj.id.clone(),
                });
            }
        }
        Ok(FeatureSet {
            m,
            objects,
            category_names,
        })
    }

    pub fn empty(m: usize) -> Self {
        FeatureSet {
            m,
            objects: Vec::new(),
            category_names: None,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[FeatureRecord] {
        &self.objects
    }

    pub fn category_names(&self) -> Option<&[String]> {
        self.category_names.as_deref()
    }

    pub fn set_category_names(&mut self, names: Option<Vec<String>>) -> Result<()> {
        if let Some(names) = &names {
            if let Some((record, obj)) = self
                .objects
                .iter()
                .enumerate()
                .find(|(_, o)| o.label >= names.len())
            {
                return Err(Error::LabelOutOfRange {
                    record,
                    label: obj.label,
                    n_categories: names.len(),
                });
            }
        }
        self.category_names = names;
        Ok(())
    }

    /// Number of categories: the name table length when present, otherwise
    /// one past the largest label.
    pub fn n_categories(&self) -> usize {
        match &self.category_names {
            Some(names) => names.len(),
            None => self.objects.iter().map(|o| o.label + 1).max().unwrap_or(0),
        }
    }

    /// Distinct labels in ascending order.
    pub fn labels_present(&self) -> Vec<usize> {
        let mut labels: Vec<usize> = self.objects.iter().map(|o| o.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    pub fn members(&self, category: usize) -> impl Iterator<Item = &FeatureRecord> {
        self.objects.iter().filter(move |o| o.label == category)
    }

    /// A new set holding only the members of `category`, in original order.
    pub fn subset(&self, category: usize) -> FeatureSet {
        FeatureSet {
            m: self.m,
            objects: self.members(category).cloned().collect(),
            category_names: self.category_names.clone(),
        }
    }

    pub fn labels(&self) -> Vec<usize> {
        self.objects.iter().map(|o| o.label).collect()
    }

    pub fn into_objects(self) -> Vec<FeatureRecord> {
        self.objects
    }
}

/// Per-category linear classifier head: one weight row and one bias per category.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    m: usize,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

impl HeadParams {
    pub fn new(m: usize, weights: Vec<Vec<f64>>, biases: Vec<f64>) -> Result<Self> {
        if weights.len() != biases.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weight rows but {} biases",
                weights.len(),
                biases.len()
            )));
        }
        for (record, row) in weights.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    record: Some(record),
                    expected: m,
                    found: row.len(),
                });
            }
            if let Some(column) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { record, column });
            }
        }
        if let Some(record) = biases.iter().position(|b| !b.is_finite()) {
            return Err(Error::NonFinite { record, column: m });
        }
        Ok(HeadParams { m, weights, biases })
    }

    /// Number of categories.
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weights(&self, category: usize) -> &[f64] {
        &self.weights[category]
    }

    pub fn bias(&self, category: usize) -> f64 {
        self.biases[category]
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.weights
            .iter()
            .map(Vec::as_slice)
            .zip(self.biases.iter().copied())
    }
}

pub(crate) fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Converts to the 32-bit interchange precision, rejecting values that
/// overflow it.
pub(crate) fn to_f32(value: f64, record: usize, column: usize) -> Result<f32> {
    let narrowed = value as f32;
    if narrowed.is_finite() {
        Ok(narrowed)
    } else {
        Err(Error::NonFinite { record, column })
    }
}

/// Reads a feature set and, when present, its `.meta.json` sidecar.
pub fn read_feature_set(path: &Path, format: Format) -> Result<FeatureSet> {
    let mut set = match format {
        Format::Csv => text::read_feature_set(open(path)?)?,
        Format::Binary => binary::read_feature_set(&std::fs::read(path).map_err(|source| {
            Error::File {
                path: path.to_path_buf(),
                source,
            }
        })?)?,
    };
    if let Some(meta) = Sidecar::read_for(path)? {
        if meta.category_names.is_some() {
            set.set_category_names(meta.category_names)?;
        }
    }
    Ok(set)
}

/// Writes a feature set. Category names, when present, go to the sidecar.
pub fn write_feature_set(set: &FeatureSet, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Csv => text::write_feature_set(set, create(path)?)?,
        Format::Binary => {
            let bytes = binary::encode_feature_set(set)?;
            std::fs::write(path, bytes).map_err(|source| Error::File {
                path: path.to_path_buf(),
                source,
            })?;
        }
    }
    if let Some(names) = set.category_names() {
        Sidecar {
            category_names: Some(names.to_vec()),
            provenance: Vec::new(),
        }
        .write_for(path)?;
    }
    Ok(())
}

pub fn read_head(path: &Path, format: Format) -> Result<HeadParams> {
    match format {
        Format::Csv => text::read_head(open(path)?),
        Format::Binary => binary::read_head(&std::fs::read(path).map_err(|source| {
            Error::File {
                path: path.to_path_buf(),
                source,
            }
        })?),
    }
}

pub fn write_head(params: &HeadParams, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Csv => text::write_head(params, create(path)?),
        Format::Binary => {
            let bytes = binary::encode_head(params)?;
            std::fs::write(path, bytes).map_err(|source| Error::File {
                path: path.to_path_buf(),
                source,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, label: usize, features: Vec<f64>) -> FeatureRecord {
        FeatureRecord {
            id: id.into(),
            label,
            features,
        }
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = FeatureSet::new(
            1,
            vec![rec("a", 0, vec![1.0]), rec("a", 0, vec![2.0])],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId { record: 1, .. }));
    }

    #[test]
    fn rejects_non_finite() {
        let err = FeatureSet::new(2, vec![rec("a", 0, vec![1.0, f64::NAN])], None).unwrap_err();
        assert!(matches!(err, Error::NonFinite { record: 0, column: 1 }));
    }

    #[test]
    fn rejects_label_outside_names() {
        let err = FeatureSet::new(1, vec![rec("a", 2, vec![1.0])], Some(vec!["x".into(), "y".into()]))
            .unwrap_err();
        assert!(matches!(err, Error::LabelOutOfRange { label: 2, .. }));
    }

    #[test]
    fn head_row_length_checked() {
        let err = HeadParams::new(2, vec![vec![1.0, 2.0], vec![1.0]], vec![0.0, 0.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                record: Some(1),
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("x.CSV")), Format::Csv);
        assert_eq!(Format::from_path(Path::new("x.bin")), Format::Binary);
        assert_eq!(Format::from_path(Path::new("x")), Format::Binary);
    }
}
