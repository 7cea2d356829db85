//! Little-endian binary layouts.
//!
//! Feature set (`GSFS`, version 1):
//!
//! ```text
//! magic      4 bytes  "GSFS"
//! version    u8       1
//! n          u64      object count
//! m          u64      feature dimensionality
//! n records:
//!   id_len   u32
//!   id       id_len bytes, UTF-8
//!   label    u32
//!   features m x f32
//! ```
//!
//! Head parameters (`GSHP`, version 1):
//!
//! ```text
//! magic      4 bytes  "GSHP"
//! version    u8       1
//! n          u64      category count
//! m          u64      feature dimensionality
//! weights    n x m x f32, row-major (one row per category)
//! biases     n x f32
//! ```
//!
//! These layouts are specific to this project; no external tool defines them.

use crate::error::{Error, Result};

use super::{to_f32, FeatureRecord, FeatureSet, HeadParams};

pub const FEATURE_MAGIC: &[u8; 4] = b"GSFS";
pub const HEAD_MAGIC: &[u8; 4] = b"GSHP";
pub const VERSION: u8 = 1;

pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        ByteReader { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize, record: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::Parse {
                record,
                message: format!("truncated input at byte {}", self.pos),
            }),
        }
    }

    pub(crate) fn header(&mut self, magic: &[u8; 4]) -> Result<u8> {
        let tag = self
            .take(4, 0)
            .map_err(|_| Error::MalformedHeader("file shorter than magic tag".into()))?;
        if tag != magic {
            return Err(Error::MalformedHeader(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(tag),
                String::from_utf8_lossy(magic)
            )));
        }
        let version = self
            .u8(0)
            .map_err(|_| Error::MalformedHeader("missing version byte".into()))?;
        if version != VERSION {
            return Err(Error::MalformedHeader(format!(
                "unsupported version {version}"
            )));
        }
        Ok(version)
    }

    pub(crate) fn u8(&mut self, record: usize) -> Result<u8> {
        Ok(self.take(1, record)?[0])
    }

    pub(crate) fn u32(&mut self, record: usize) -> Result<u32> {
        let b = self.take(4, record)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn u64(&mut self, record: usize) -> Result<u64> {
        let b = self.take(8, record)?;
        let mut buf = [0u8; 8];
        buf.copy_from_slice(b);
        Ok(u64::from_le_bytes(buf))
    }

    pub(crate) fn dim(&mut self) -> Result<usize> {
        let v = self
            .u64(0)
            .map_err(|_| Error::MalformedHeader("truncated dimensions".into()))?;
        usize::try_from(v).map_err(|_| Error::MalformedHeader(format!("dimension {v} too large")))
    }

    pub(crate) fn f32_vec(&mut self, len: usize, record: usize) -> Result<Vec<f64>> {
        let bytes = self.take(len.saturating_mul(4), record)?;
        let mut out = Vec::with_capacity(len);
        for (column, c) in bytes.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            if !v.is_finite() {
                return Err(Error::NonFinite { record, column });
            }
            out.push(f64::from(v));
        }
        Ok(out)
    }

    pub(crate) fn string(&mut self, record: usize) -> Result<String> {
        let len = self.u32(record)? as usize;
        let raw = self.take(len, record)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::Parse {
            record,
            message: "id is not valid UTF-8".into(),
        })
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::MalformedHeader(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )))
        }
    }
}

pub(crate) fn put_f32s(out: &mut Vec<u8>, values: &[f64], record: usize) -> Result<()> {
    for (column, &v) in values.iter().enumerate() {
        out.extend_from_slice(&to_f32(v, record, column)?.to_le_bytes());
    }
    Ok(())
}

pub(crate) fn put_str(out: &mut Vec<u8>, s: &str) -> Result<()> {
    let len = u32::try_from(s.len())
        .map_err(|_| Error::InvalidArgument(format!("id of {} bytes is too long", s.len())))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

fn label_u32(label: usize, record: usize) -> Result<u32> {
    u32::try_from(label).map_err(|_| Error::Parse {
        record,
        message: format!("label {label} does not fit in u32"),
    })
}

pub fn encode_feature_set(set: &FeatureSet) -> Result<Vec<u8>> {
    let m = set.m();
    let mut out = Vec::with_capacity(21 + set.len() * (12 + 4 * m));
    out.extend_from_slice(FEATURE_MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(set.len() as u64).to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    for (record, obj) in set.objects().iter().enumerate() {
        put_str(&mut out, &obj.id)?;
        out.extend_from_slice(&label_u32(obj.label, record)?.to_le_bytes());
        put_f32s(&mut out, &obj.features, record)?;
    }
    Ok(out)
}

pub fn read_feature_set(bytes: &[u8]) -> Result<FeatureSet> {
    let mut r = ByteReader::new(bytes);
    r.header(FEATURE_MAGIC)?;
    let n = r.dim()?;
    let m = r.dim()?;
    // Guard the allocation against absurd headers: every record needs at least 8 bytes.
    let mut objects = Vec::with_capacity(n.min(bytes.len() / 8));
    for record in 0..n {
        let id = r.string(record)?;
        let label = r.u32(record)? as usize;
        let features = r.f32_vec(m, record)?;
        objects.push(FeatureRecord {
            id,
            label,
            features,
        });
    }
    r.finish()?;
    FeatureSet::new(m, objects, None)
}

pub fn encode_head(params: &HeadParams) -> Result<Vec<u8>> {
    let (n, m) = (params.n(), params.m());
    let mut out = Vec::with_capacity(21 + 4 * n * (m + 1));
    out.extend_from_slice(HEAD_MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    for (record, (row, _)) in params.rows().enumerate() {
        put_f32s(&mut out, row, record)?;
    }
    put_f32s(&mut out, params.biases(), n)?;
    Ok(out)
}

pub fn read_head(bytes: &[u8]) -> Result<HeadParams> {
    let mut r = ByteReader::new(bytes);
    r.header(HEAD_MAGIC)?;
    let n = r.dim()?;
    let m = r.dim()?;
    let expected = n
        .checked_mul(m + 1)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(21));
    if expected != Some(bytes.len()) {
        return Err(Error::MalformedHeader(format!(
            "header declares n={n}, m={m} but file has {} bytes",
            bytes.len()
        )));
    }
    let mut weights = Vec::with_capacity(n);
    for record in 0..n {
        weights.push(r.f32_vec(m, record)?);
    }
    let biases = r.f32_vec(n, n)?;
    r.finish()?;
    HeadParams::new(m, weights, biases)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_set() -> FeatureSet {
        FeatureSet::new(
            2,
            vec![
                FeatureRecord {
                    id: "a".into(),
                    label: 0,
                    features: vec![1.0, -2.5],
                },
                FeatureRecord {
                    id: "béta".into(),
                    label: 3,
                    features: vec![0.125, 7.0],
                },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode_feature_set(&small_set()).unwrap();
        assert_eq!(&bytes[..4], b"GSFS");
        assert_eq!(bytes[4], 1);
        assert_eq!(u64::from_le_bytes(bytes[5..13].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[13..21].try_into().unwrap()), 2);
        // first record: id_len=1, 'a', label 0, 1.0f32, -2.5f32
        assert_eq!(&bytes[21..25], &1u32.to_le_bytes());
        assert_eq!(bytes[25], b'a');
        assert_eq!(&bytes[26..30], &0u32.to_le_bytes());
        assert_eq!(&bytes[30..34], &1.0f32.to_le_bytes());
        assert_eq!(&bytes[34..38], &(-2.5f32).to_le_bytes());
    }

    #[test]
    fn round_trip_small() {
        let set = small_set();
        let back = read_feature_set(&encode_feature_set(&set).unwrap()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = encode_feature_set(&small_set()).unwrap();
        bytes[4] = 9;
        assert!(matches!(read_feature_set(&bytes), Err(Error::MalformedHeader(_))));
        bytes[0] = b'X';
        assert!(matches!(read_feature_set(&bytes), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn truncated_record_reports_index() {
        let bytes = encode_feature_set(&small_set()).unwrap();
        let err = read_feature_set(&bytes[..bytes.len() - 2]).unwrap_err();
        assert!(matches!(err, Error::Parse { record: 1, .. }), "{err}");
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode_feature_set(&small_set()).unwrap();
        bytes.push(0);
        assert!(matches!(read_feature_set(&bytes), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn non_finite_payload_rejected() {
        let mut bytes = encode_feature_set(&small_set()).unwrap();
        bytes[34..38].copy_from_slice(&f32::INFINITY.to_le_bytes());
        assert!(matches!(
            read_feature_set(&bytes),
            Err(Error::NonFinite { record: 0, column: 1 })
        ));
    }

    #[test]
    fn overflowing_value_rejected_on_write() {
        let set = FeatureSet::new(
            1,
            vec![FeatureRecord {
                id: "a".into(),
                label: 0,
                features: vec![1e300],
            }],
            None,
        )
        .unwrap();
        assert!(matches!(encode_feature_set(&set), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn scalar_head_round_trip() {
        let head = HeadParams::new(1, vec![vec![2.0]], vec![-1.0]).unwrap();
        let back = read_head(&encode_head(&head).unwrap()).unwrap();
        assert_eq!(back.weights(0), &[2.0]);
        assert_eq!(back.bias(0), -1.0);
    }

    #[test]
    fn head_size_mismatch_rejected() {
        let head = HeadParams::new(2, vec![vec![1.0, 2.0]], vec![0.5]).unwrap();
        let mut bytes = encode_head(&head).unwrap();
        // declare m = 3 while the payload holds m = 2
        bytes[13..21].copy_from_slice(&3u64.to_le_bytes());
        assert!(matches!(read_head(&bytes), Err(Error::MalformedHeader(_))));
    }
}
