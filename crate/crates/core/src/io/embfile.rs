//! `EMB1` embedding files.
//!
//! Little-endian layout:
//!
//! ```text
//! offset        size     field
//! 0             4        magic "EMB1"
//! 4             4        version (u32) = 1
//! 8             4        N (u32) item count
//! 12            4        D (u32) dimension
//! 16            4        C (u32) class count
//! 20            4N       labels, u32 each, < C
//! 20+4N         4ND      values, f32, row-major
//! 20+4N+4ND     4        CRC32 (IEEE) of all preceding bytes
//! ```

use std::path::Path;

use crate::dataset::EmbeddingSet;
use crate::error::{Error, FormatError, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

pub const MAGIC: [u8; 4] = *b"EMB1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 20;

/// Exact file length for `n` items of dimension `d`.
pub fn encoded_len(n: usize, d: usize) -> Option<usize> {
    let body = n.checked_mul(d)?.checked_add(n)?.checked_mul(4)?;
    HEADER_LEN.checked_add(body)?.checked_add(4)
}

/// Serializes a set; values are stored as `f32`.
pub fn encode_embeddings<T: Scalar>(set: &EmbeddingSet<T>) -> Result<Vec<u8>> {
    let (n, d) = (set.len(), set.dim());
    let too_big = || Error::domain("embedding set too large for the EMB1 format");
    let n32 = u32::try_from(n).map_err(|_| too_big())?;
    let d32 = u32::try_from(d).map_err(|_| too_big())?;
    let len = encoded_len(n, d).ok_or_else(too_big)?;
    let mut out = Vec::with_capacity(len);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&n32.to_le_bytes());
    out.extend_from_slice(&d32.to_le_bytes());
    out.extend_from_slice(&set.num_classes().to_le_bytes());
    for &l in set.labels() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for (i, v) in set.vectors().iter().enumerate() {
        for &x in v.iter() {
            let f = x.to_f32().filter(|f| f.is_finite()).ok_or_else(|| {
                Error::domain(format!("item {i} has a value outside the f32 range"))
            })?;
            out.extend_from_slice(&f.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    debug_assert_eq!(out.len(), len);
    Ok(out)
}

fn u32_at(bytes: &[u8], offset: usize) -> u32 {
    u32::from_le_bytes(bytes[offset..offset + 4].try_into().expect("4 bytes"))
}

/// Parses and validates an `EMB1` byte image: magic, version, exact length,
/// CRC, then label bounds and finiteness.
pub fn decode_embeddings(bytes: &[u8]) -> std::result::Result<EmbeddingSet<f32>, FormatError> {
    if bytes.len() < 4 {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            needed: HEADER_LEN + 4,
            actual: bytes.len(),
        });
    }
    if bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic {
            offset: 0,
            found: bytes[..4].try_into().expect("4 bytes"),
        });
    }
    if bytes.len() < HEADER_LEN + 4 {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            needed: HEADER_LEN + 4,
            actual: bytes.len(),
        });
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion { offset: 4, version });
    }
    let n = u32_at(bytes, 8) as usize;
    let d = u32_at(bytes, 12) as usize;
    let c = u32_at(bytes, 16);
    let expected = encoded_len(n, d).ok_or_else(|| FormatError::InvalidHeader {
        offset: 8,
        reason: format!("N={n}, D={d} overflow the addressable size"),
    })?;
    if bytes.len() < expected {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            needed: expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(FormatError::TrailingBytes {
            offset: expected,
            expected,
            actual: bytes.len(),
        });
    }
    let crc_at = expected - 4;
    let stored = u32_at(bytes, crc_at);
    let computed = crc32fast::hash(&bytes[..crc_at]);
    if stored != computed {
        return Err(FormatError::CrcMismatch {
            offset: crc_at,
            stored,
            computed,
        });
    }
    if n > 0 && d == 0 {
        return Err(FormatError::InvalidHeader {
            offset: 12,
            reason: "D = 0 with N > 0".into(),
        });
    }
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let offset = HEADER_LEN + 4 * i;
        let label = u32_at(bytes, offset);
        if label >= c {
            return Err(FormatError::LabelOutOfRange {
                offset,
                item: i,
                label,
                classes: c,
            });
        }
        labels.push(label);
    }
    let data = HEADER_LEN + 4 * n;
    let mut vectors = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f32> = (0..d)
            .map(|j| {
                f32::from_le_bytes(
                    bytes[data + 4 * (i * d + j)..][..4]
                        .try_into()
                        .expect("4 bytes"),
                )
            })
            .collect();
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(FormatError::NonFinite {
                offset: data + 4 * (i * d + j),
                item: i,
            });
        }
        vectors.push(Vector::from_raw(row));
    }
    Ok(EmbeddingSet::new(d, c, vectors, labels).expect("validated above"))
}

pub fn write_embeddings<T: Scalar>(set: &EmbeddingSet<T>, path: &Path) -> Result<()> {
    super::write_atomic(path, &encode_embeddings(set)?)
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingSet<f32>> {
    let bytes = super::read_bytes(path)?;
    decode_embeddings(&bytes).map_err(|source| Error::Format {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_benchmark, BenchmarkSpec};
    use proptest::prelude::*;

    fn sample() -> EmbeddingSet<f32> {
        let spec = BenchmarkSpec {
            classes: 5,
            per_class: 20,
            dim: 16,
            test_per_class: 1,
            ..Default::default()
        };
        gen_benchmark::<f32>(&spec).unwrap().0
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let set = sample();
        let bytes = encode_embeddings(&set).unwrap();
        assert_eq!(bytes.len(), 20 + 4 * 100 + 4 * 100 * 16 + 4);
        let back = decode_embeddings(&bytes).unwrap();
        assert_eq!(back, set);
        assert_eq!(encode_embeddings(&back).unwrap(), bytes);
    }

    #[test]
    fn empty_file_is_24_bytes() {
        let set = EmbeddingSet::<f32>::new(8, 3, vec![], vec![]).unwrap();
        let bytes = encode_embeddings(&set).unwrap();
        assert_eq!(bytes.len(), 24);
        assert_eq!(decode_embeddings(&bytes).unwrap(), set);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = encode_embeddings(&sample()).unwrap();
        let mut flipped = bytes.clone();
        flipped[500] ^= 0x01;
        assert!(matches!(
            decode_embeddings(&flipped),
            Err(FormatError::CrcMismatch { .. })
        ));

        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(
            decode_embeddings(&magic),
            Err(FormatError::BadMagic { offset: 0, .. })
        ));

        let mut version = bytes.clone();
        version[4] = 2;
        assert!(matches!(
            decode_embeddings(&version),
            Err(FormatError::UnsupportedVersion {
                offset: 4,
                version: 2
            })
        ));

        assert!(matches!(
            decode_embeddings(&bytes[..bytes.len() - 1]),
            Err(FormatError::Truncated { .. })
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(
            decode_embeddings(&long),
            Err(FormatError::TrailingBytes { .. })
        ));
    }

    fn with_crc(mut body: Vec<u8>) -> Vec<u8> {
        let crc = crc32fast::hash(&body);
        body.extend_from_slice(&crc.to_le_bytes());
        body
    }

    #[test]
    fn label_and_value_errors_carry_offsets() {
        let mut b = Vec::new();
        b.extend_from_slice(b"EMB1");
        for v in [1u32, 2, 1, 2] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        // N=2, D=1, C=2; second label is 2 (out of range).
        b.extend_from_slice(&0u32.to_le_bytes());
        b.extend_from_slice(&2u32.to_le_bytes());
        b.extend_from_slice(&1.0f32.to_le_bytes());
        b.extend_from_slice(&2.0f32.to_le_bytes());
        assert_eq!(
            decode_embeddings(&with_crc(b.clone())),
            Err(FormatError::LabelOutOfRange {
                offset: 24,
                item: 1,
                label: 2,
                classes: 2
            })
        );
        b[24..28].copy_from_slice(&1u32.to_le_bytes());
        b[32..36].copy_from_slice(&f32::NAN.to_le_bytes());
        assert_eq!(
            decode_embeddings(&with_crc(b)),
            Err(FormatError::NonFinite {
                offset: 32,
                item: 1
            })
        );
    }

    proptest! {
        #[test]
        fn arbitrary_sets_round_trip(
            rows in prop::collection::vec((prop::collection::vec(-1e6f32..1e6, 3), 0u32..4), 0..20)
        ) {
            let set = EmbeddingSet::new(
                3, 4,
                rows.iter().map(|(v, _)| Vector::new(v.clone()).unwrap()).collect(),
                rows.iter().map(|(_, l)| *l).collect(),
            ).unwrap();
            let bytes = encode_embeddings(&set).unwrap();
            prop_assert_eq!(bytes.len(), encoded_len(set.len(), 3).unwrap());
            prop_assert_eq!(decode_embeddings(&bytes).unwrap(), set);
        }

        #[test]
        fn random_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
            let _ = decode_embeddings(&bytes);
        }
    }
}
