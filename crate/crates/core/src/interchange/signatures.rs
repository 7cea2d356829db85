//! Signature files.
//!
//! Binary (`GSSG`, version 1), little-endian:
//!
//! ```text
//! magic      4 bytes  "GSSG"
//! version    u8       1
//! count      u64
//! count records:
//!   id_len   u32, id bytes (UTF-8)
//!   taxonomy u8       0 object, 1 abstract prototype, 2 category
//!   category u32
//!   r, m, m_padded, p, q   u32 each
//!   values   (2 · 8 · m_padded / r²) x f32
//! ```
//!
//! CSV: header `id,taxonomy,category,r,m,m_padded,p,q,v0,...`, one signature
//! per row. All rows in one CSV file must share a length.
//!
//! Values are stored as `f32`, so a signature read back equals the written
//! one rounded to 32 bits; rewriting it is byte-identical.

use std::path::Path;

use crate::descriptor::{ReductionConfig, Signature, Taxonomy};
use crate::error::{Error, Result};

use super::binary::{put_f32s, put_str, ByteReader};
use super::{create, open, Format};

pub const SIGNATURE_MAGIC: &[u8; 4] = b"GSSG";

/// A signature together with the id of what it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureRecord {
    pub id: String,
    pub signature: Signature,
}

fn u32_field(v: usize, record: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Parse {
        record,
        message: format!("{v} does not fit in u32"),
    })
}

pub fn encode_signatures(records: &[SignatureRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(SIGNATURE_MAGIC);
    out.push(super::binary::VERSION);
    out.extend_from_slice(&(records.len() as u64).to_le_bytes());
    for (i, rec) in records.iter().enumerate() {
        let sig = &rec.signature;
        let c = sig.config();
        put_str(&mut out, &rec.id)?;
        out.push(sig.taxonomy().code());
        for v in [sig.category(), c.r, c.m, c.m_padded, c.p, c.q] {
            out.extend_from_slice(&u32_field(v, i)?.to_le_bytes());
        }
        put_f32s(&mut out, sig.values(), i)?;
    }
    Ok(out)
}

pub fn decode_signatures(bytes: &[u8]) -> Result<Vec<SignatureRecord>> {
    let mut r = ByteReader::new(bytes);
    r.header(SIGNATURE_MAGIC)?;
    let count = r.dim()?;
    let mut out = Vec::with_capacity(count.min(bytes.len() / 29));
    for record in 0..count {
        let id = r.string(record)?;
        let taxonomy = Taxonomy::from_code(r.u8(record)?)?;
        let mut fields = [0usize; 6];
        for f in &mut fields {
            *f = r.u32(record)? as usize;
        }
        let [category, rr, m, m_padded, p, q] = fields;
        let config = ReductionConfig {
            r: rr,
            m,
            m_padded,
            p,
            q,
        };
        config.validate().map_err(|e| Error::Parse {
            record,
            message: e.to_string(),
        })?;
        let values = r.f32_vec(config.signature_len(), record)?;
        let signature = Signature::new(values, taxonomy, category, config).map_err(|e| {
            Error::Parse {
                record,
                message: e.to_string(),
            }
        })?;
        out.push(SignatureRecord { id, signature });
    }
    r.finish()?;
    Ok(out)
}

fn write_csv<W: std::io::Write>(records: &[SignatureRecord], output: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(output);
    let len = records.first().map_or(0, |r| r.signature.len());
    let mut header: Vec<String> = ["id", "taxonomy", "category", "r", "m", "m_padded", "p", "q"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..len).map(|i| format!("v{i}")));
    wtr.write_record(&header).map_err(|e| Error::Io(e.into()))?;
    for (i, rec) in records.iter().enumerate() {
        let sig = &rec.signature;
        if sig.len() != len {
            return Err(Error::DimensionMismatch {
                record: Some(i),
                expected: len,
                found: sig.len(),
            });
        }
        let c = sig.config();
        let mut row = vec![
            rec.id.clone(),
            sig.taxonomy().name().to_string(),
            sig.category().to_string(),
        ];
        row.extend([c.r, c.m, c.m_padded, c.p, c.q].iter().map(|v| v.to_string()));
        for (column, &v) in sig.values().iter().enumerate() {
            row.push(super::to_f32(v, i, column)?.to_string());
        }
        wtr.write_record(&row).map_err(|e| Error::Io(e.into()))?;
    }
    wtr.flush()?;
    Ok(())
}

fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SignatureRecord>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::MalformedHeader(e.to_string()))?
        .clone();
    let expected = ["id", "taxonomy", "category", "r", "m", "m_padded", "p", "q"];
    if header.len() < expected.len() || header.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::MalformedHeader(
            "expected `id,taxonomy,category,r,m,m_padded,p,q,v0,...`".into(),
        ));
    }
    let len = header.len() - expected.len();
    let mut out = Vec::new();
    for (record, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            record,
            message: e.to_string(),
        })?;
        if row.len() != header.len() {
            return Err(Error::DimensionMismatch {
                record: Some(record),
                expected: len,
                found: row.len().saturating_sub(expected.len()),
            });
        }
        let parse_err = |message: String| Error::Parse { record, message };
        let taxonomy: Taxonomy = row[1].parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let mut ints = [0usize; 6];
        for (k, slot) in ints.iter_mut().enumerate() {
            *slot = row[k + 2]
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("{:?} is not an integer", &row[k + 2])))?;
        }
        let [category, r, m, m_padded, p, q] = ints;
        let config = ReductionConfig {
            r,
            m,
            m_padded,
            p,
            q,
        };
        let mut values = Vec::with_capacity(len);
        for column in 0..len {
            let field = &row[column + expected.len()];
            let v: f32 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("{field:?} is not a number")))?;
            if !v.is_finite() {
                return Err(Error::NonFinite { record, column });
            }
            values.push(f64::from(v));
        }
        let signature = Signature::new(values, taxonomy, category, config)
            .map_err(|e| parse_err(e.to_string()))?;
        out.push(SignatureRecord {
            id: row[0].to_string(),
            signature,
        });
    }
    Ok(out)
}

pub fn write_signatures(records: &[SignatureRecord], path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Binary => std::fs::write(path, encode_signatures(records)?).map_err(|source| {
            Error::File {
                path: path.to_path_buf(),
                source,
            }
        }),
        Format::Csv => write_csv(records, create(path)?),
    }
}

pub fn read_signatures(path: &Path, format: Format) -> Result<Vec<SignatureRecord>> {
    match format {
        Format::Binary => decode_signatures(&std::fs::read(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?),
        Format::Csv => read_csv(open(path)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{describe_abstract_prototype, describe_object, plan_grid};
    use crate::prototype::SemanticPrototype;

    fn records() -> Vec<SignatureRecord> {
        let m = 20;
        let proto = SemanticPrototype::new(
            4,
            (0..m).map(|j| j as f64 * 0.25).collect(),
            vec![0.5; m],
            (0..m).map(|j| (j as f64 - 9.5) / 3.0).collect(),
            0.75,
            3,
        )
        .unwrap();
        let config = plan_grid(m, 3).unwrap();
        let f: Vec<f64> = (0..m).map(|j| (j * j) as f64 / 7.0).collect();
        vec![
            SignatureRecord {
                id: "obj-1".into(),
                signature: describe_object(&f, &proto, &config).unwrap(),
            },
            SignatureRecord {
                id: "prototype:4".into(),
                signature: describe_abstract_prototype(&proto, &config).unwrap(),
            },
        ]
    }

    fn quantized(recs: &[SignatureRecord]) -> Vec<SignatureRecord> {
        recs.iter()
            .map(|r| {
                let s = &r.signature;
                SignatureRecord {
                    id: r.id.clone(),
                    signature: Signature::new(
                        s.values().iter().map(|&v| f64::from(v as f32)).collect(),
                        s.taxonomy(),
                        s.category(),
                        *s.config(),
                    )
                    .unwrap(),
                }
            })
            .collect()
    }

    #[test]
    fn binary_round_trip_is_f32_exact() {
        let recs = records();
        let bytes = encode_signatures(&recs).unwrap();
        let back = decode_signatures(&bytes).unwrap();
        assert_eq!(back, quantized(&recs));
        assert_eq!(encode_signatures(&back).unwrap(), bytes);
    }

    #[test]
    fn csv_round_trip_is_f32_exact() {
        let recs = records();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), quantized(&recs));
    }

    #[test]
    fn corrupt_config_rejected() {
        let mut bytes = encode_signatures(&records()).unwrap();
        // first record: 5+8 header, 4+5 id, 1 taxonomy, 4 category, then r
        let r_at = 13 + 4 + 5 + 1 + 4;
        bytes[r_at..r_at + 4].copy_from_slice(&1u32.to_le_bytes());
        assert!(matches!(
            decode_signatures(&bytes),
            Err(Error::Parse { record: 0, .. })
        ));
    }
}
