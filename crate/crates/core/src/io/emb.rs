//! `EMB1` binary embedding files.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "EMB1"
//! 4       2     version (u16 LE), currently 1
//! 6       1     metric tag: 0 euclidean, 1 cosine dissimilarity
//! 7       1     reserved, must be 0
//! 8       4     n rows (u32 LE)
//! 12      4     p columns (u32 LE)
//! 16      4·n·p coordinates, f32 LE, row-major
//! ...           n sample ids, then n identities: u16 LE length + UTF-8
//! ```

use std::collections::HashSet;
use std::path::Path;

use crate::embedding::EmbeddingSet;
use crate::error::{Error, FormatError, Result};
use crate::metric::Metric;

pub const MAGIC: &[u8; 4] = b"EMB1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

fn metric_tag(m: Metric) -> u8 {
    match m {
        Metric::Euclidean => 0,
        Metric::Cosine => 1,
    }
}

/// Serializes `set`; coordinates are rounded to f32.
pub fn encode_emb(set: &EmbeddingSet) -> Result<Vec<u8>> {
    let n = u32::try_from(set.len()).map_err(|_| Error::invalid("too many rows for EMB1"))?;
    let p = u32::try_from(set.dim()).map_err(|_| Error::invalid("dimension too large for EMB1"))?;
    let mut out = Vec::with_capacity(HEADER_LEN + set.points().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(metric_tag(set.metric()));
    out.push(0);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&p.to_le_bytes());
    for &x in set.points() {
        let f = x as f32;
        if !f.is_finite() {
            return Err(Error::invalid(format!("coordinate {x} does not fit in f32")));
        }
        out.extend_from_slice(&f.to_le_bytes());
    }
    for s in set.sample_ids().iter().chain(set.identities()) {
        let len = u16::try_from(s.len())
            .map_err(|_| Error::invalid(format!("label longer than 65535 bytes: {:.40}...", s)))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> std::result::Result<&'a [u8], FormatError> {
        let available = self.bytes.len() - self.pos;
        if k > available {
            return Err(FormatError::Truncated {
                offset: self.pos as u64,
                needed: k as u64,
                available: available as u64,
            });
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u16(&mut self) -> std::result::Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> std::result::Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn label(&mut self) -> std::result::Result<String, FormatError> {
        let len = self.u16()? as usize;
        let offset = self.pos as u64;
        let raw = self.take(len)?;
        std::str::from_utf8(raw)
            .map(str::to_string)
            .map_err(|_| FormatError::InvalidUtf8 { offset })
    }
}

pub fn decode_emb(bytes: &[u8]) -> Result<EmbeddingSet> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(FormatError::BadMagic { offset: 0 }.into());
    }
    let version = c.u16()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion { offset: 4, version }.into());
    }
    let tag = c.take(1)?[0];
    let metric = match tag {
        0 => Metric::Euclidean,
        1 => Metric::Cosine,
        _ => return Err(FormatError::BadMetricTag { offset: 6, tag }.into()),
    };
    let reserved = c.take(1)?[0];
    if reserved != 0 {
        return Err(FormatError::NonzeroReserved { offset: 7, value: reserved }.into());
    }
    let n = c.u32()? as usize;
    let p = c.u32()? as usize;
    if p == 0 {
        return Err(FormatError::ZeroDimension { offset: 12 }.into());
    }
    if n == 0 {
        return Err(Error::Empty { what: "embedding file" });
    }
    let payload_len = (n as u64) * (p as u64) * 4;
    let available = (bytes.len() - c.pos) as u64;
    // every row also needs at least two 2-byte label headers
    let needed = payload_len + 4 * n as u64;
    if needed > available {
        return Err(FormatError::Truncated {
            offset: c.pos as u64,
            needed,
            available,
        }
        .into());
    }
    let payload_offset = c.pos;
    let raw = c.take(payload_len as usize)?;
    let mut points = Vec::with_capacity(n * p);
    for (k, chunk) in raw.chunks_exact(4).enumerate() {
        let f = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !f.is_finite() {
            return Err(FormatError::NonFinite {
                offset: (payload_offset + 4 * k) as u64,
            }
            .into());
        }
        points.push(f as f64);
    }
    if metric == Metric::Cosine {
        for (row, r) in points.chunks_exact(p).enumerate() {
            if r.iter().all(|&x| x == 0.0) {
                return Err(FormatError::ZeroRowUnderCosine {
                    offset: (payload_offset + 4 * row * p) as u64,
                    row,
                }
                .into());
            }
        }
    }
    let mut sample_ids = Vec::with_capacity(n);
    let mut seen = HashSet::with_capacity(n);
    for _ in 0..n {
        let offset = c.pos as u64;
        let id = c.label()?;
        if !seen.insert(id.clone()) {
            return Err(FormatError::DuplicateSampleIdAt { offset, id }.into());
        }
        sample_ids.push(id);
    }
    let mut identities = Vec::with_capacity(n);
    for _ in 0..n {
        identities.push(c.label()?);
    }
    if c.pos != bytes.len() {
        return Err(FormatError::TrailingBytes {
            offset: c.pos as u64,
            count: (bytes.len() - c.pos) as u64,
        }
        .into());
    }
    EmbeddingSet::new(points, p, sample_ids, identities, metric)
}

pub fn read_emb(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display(), e))?;
    decode_emb(&bytes)
}

pub fn write_emb(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_emb(set)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one() -> EmbeddingSet {
        EmbeddingSet::new(vec![0.5], 1, vec!["a".into()], vec!["p".into()], Metric::Euclidean).unwrap()
    }

    #[test]
    fn one_by_one_golden_bytes() {
        let bytes = encode_emb(&one_by_one()).unwrap();
        let mut want = b"EMB1".to_vec();
        want.extend([1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0]);
        want.extend(0.5f32.to_le_bytes());
        want.extend([1, 0, b'a', 1, 0, b'p']);
        assert_eq!(bytes, want);
        assert_eq!(bytes.len(), 4 + 2 + 1 + 1 + 4 + 4 + 4 + 3 + 3);
        let back = decode_emb(&bytes).unwrap();
        assert_eq!(back.points(), &[0.5]);
        assert_eq!(encode_emb(&back).unwrap(), bytes);
    }

    fn format_err(bytes: &[u8]) -> FormatError {
        match decode_emb(bytes) {
            Err(Error::Format(f)) => f,
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn distinct_errors() {
        let good = encode_emb(&one_by_one()).unwrap();
        let mut bad = good.clone();
        bad[..4].copy_from_slice(b"XEMB");
        assert_eq!(format_err(&bad), FormatError::BadMagic { offset: 0 });
        let mut bad = good.clone();
        bad[8] = 2;
        assert!(matches!(format_err(&bad), FormatError::Truncated { offset: 16, .. }));
        let mut bad = good.clone();
        bad.push(0);
        assert_eq!(format_err(&bad), FormatError::TrailingBytes { offset: 26, count: 1 });
        let mut bad = good.clone();
        bad[6] = 9;
        assert_eq!(format_err(&bad), FormatError::BadMetricTag { offset: 6, tag: 9 });
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(format_err(&bad), FormatError::UnsupportedVersion { version: 2, .. }));
        let mut bad = good.clone();
        bad[7] = 1;
        assert!(matches!(format_err(&bad), FormatError::NonzeroReserved { .. }));
        let mut bad = good.clone();
        bad[12] = 0;
        assert!(matches!(format_err(&bad), FormatError::ZeroDimension { .. }));
        let mut bad = good.clone();
        bad[16..20].copy_from_slice(&f32::NAN.to_le_bytes());
        assert_eq!(format_err(&bad), FormatError::NonFinite { offset: 16 });
        let mut bad = good.clone();
        bad[22] = 0xff;
        assert_eq!(format_err(&bad), FormatError::InvalidUtf8 { offset: 22 });
        assert!(matches!(format_err(&good[..10]), FormatError::Truncated { .. }));
    }

    #[test]
    fn duplicate_ids_are_located() {
        let set = EmbeddingSet::new(
            vec![1.0, 2.0],
            1,
            vec!["a".into(), "b".into()],
            vec!["p".into(), "p".into()],
            Metric::Euclidean,
        )
        .unwrap();
        let mut bytes = encode_emb(&set).unwrap();
        // ids start after 16 header bytes and 8 payload bytes
        assert_eq!(&bytes[24..30], &[1, 0, b'a', 1, 0, b'b']);
        bytes[29] = b'a';
        assert_eq!(
            format_err(&bytes),
            FormatError::DuplicateSampleIdAt { offset: 27, id: "a".into() }
        );
    }

    #[test]
    fn cosine_zero_row_rejected() {
        let set = EmbeddingSet::new(vec![0.0, 0.0], 2, vec!["a".into()], vec!["p".into()], Metric::Euclidean).unwrap();
        let mut bytes = encode_emb(&set).unwrap();
        bytes[6] = 1;
        assert_eq!(format_err(&bytes), FormatError::ZeroRowUnderCosine { offset: 16, row: 0 });
    }
}
