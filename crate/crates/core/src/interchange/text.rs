//! CSV layouts.
//!
//! Feature set: header `id,label,f0,...,f{m-1}`, one object per row.
//! Head parameters: header `category,bias,w0,...,w{m-1}`, one category per
//! row in ascending order.
//!
//! Values are written with the shortest decimal that round-trips the 32-bit
//! value and parsed as `f32`, so CSV round-trips are exact as well.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{to_f32, FeatureRecord, FeatureSet, HeadParams};

fn csv_err(record: usize, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Parse {
            record,
            message: format!("{other:?}"),
        },
    }
}

fn parse_f32(field: &str, record: usize, column: usize) -> Result<f64> {
    let v: f32 = field.trim().parse().map_err(|_| Error::Parse {
        record,
        message: format!("column {column}: {field:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite { record, column });
    }
    Ok(f64::from(v))
}

fn parse_index(field: &str, record: usize, what: &str) -> Result<usize> {
    field.trim().parse().map_err(|_| Error::Parse {
        record,
        message: format!("{what} {field:?} is not a non-negative integer"),
    })
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

fn check_header(header: &csv::StringRecord, first: &str, second: &str) -> Result<usize> {
    if header.len() < 2 || &header[0] != first || &header[1] != second {
        return Err(Error::MalformedHeader(format!(
            "expected header starting with `{first},{second}`, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(header.len() - 2)
}

pub fn read_feature_set<R: Read>(input: R) -> Result<FeatureSet> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| csv_err(0, e))?.clone();
    let m = check_header(&header, "id", "label")?;
    let mut objects = Vec::new();
    for (record, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| csv_err(record, e))?;
        if row.len() != m + 2 {
            return Err(Error::DimensionMismatch {
                record: Some(record),
                expected: m,
                found: row.len().saturating_sub(2),
            });
        }
        let label = parse_index(&row[1], record, "label")?;
        let features = (0..m)
            .map(|j| parse_f32(&row[j + 2], record, j))
            .collect::<Result<Vec<_>>>()?;
        objects.push(FeatureRecord {
            id: row[0].to_string(),
            label,
            features,
        });
    }
    FeatureSet::new(m, objects, None)
}

pub fn write_feature_set<W: Write>(set: &FeatureSet, output: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((0..set.m()).map(|j| format!("f{j}")));
    wtr.write_record(&header).map_err(|e| csv_err(0, e))?;
    for (record, obj) in set.objects().iter().enumerate() {
        let mut row = Vec::with_capacity(set.m() + 2);
        row.push(obj.id.clone());
        row.push(obj.label.to_string());
        for (column, &v) in obj.features.iter().enumerate() {
            row.push(to_f32(v, record, column)?.to_string());
        }
        wtr.write_record(&row).map_err(|e| csv_err(record, e))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_head<R: Read>(input: R) -> Result<HeadParams> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(|e| csv_err(0, e))?.clone();
    let m = check_header(&header, "category", "bias")?;
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for (record, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| csv_err(record, e))?;
        if row.len() != m + 2 {
            return Err(Error::DimensionMismatch {
                record: Some(record),
                expected: m,
                found: row.len().saturating_sub(2),
            });
        }
        let category = parse_index(&row[0], record, "category")?;
        if category != record {
            return Err(Error::Parse {
                record,
                message: format!("category {category} out of order (expected {record})"),
            });
        }
        biases.push(parse_f32(&row[1], record, m)?);
        weights.push(
            (0..m)
                .map(|j| parse_f32(&row[j + 2], record, j))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    HeadParams::new(m, weights, biases)
}

pub fn write_head<W: Write>(params: &HeadParams, output: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    let mut header = vec!["category".to_string(), "bias".to_string()];
    header.extend((0..params.m()).map(|j| format!("w{j}")));
    wtr.write_record(&header).map_err(|e| csv_err(0, e))?;
    for (record, (row, bias)) in params.rows().enumerate() {
        let mut fields = Vec::with_capacity(params.m() + 2);
        fields.push(record.to_string());
        fields.push(to_f32(bias, record, params.m())?.to_string());
        for (column, &w) in row.iter().enumerate() {
            fields.push(to_f32(w, record, column)?.to_string());
        }
        wtr.write_record(&fields).map_err(|e| csv_err(record, e))?;
    }
    wtr.flush()?;
    Ok(())
}
