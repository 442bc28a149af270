//! Flat binary coefficient dump.
//!
//! Layout: a 16-byte header — magic `SPCF`, little-endian u32 length, and
//! 8 reserved zero bytes — followed by `length` IEEE-754 f64 values,
//! little-endian.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const COEFF_MAGIC: [u8; 4] = *b"SPCF";
const HEADER_LEN: usize = 16;

pub fn encode_coeffs(coeffs: &[f64]) -> Result<Vec<u8>> {
    let len = u32::try_from(coeffs.len())
        .map_err(|_| Error::parameter("coefficient vector too long for the SPCF format"))?;
    let mut out = Vec::with_capacity(HEADER_LEN + coeffs.len() * 8);
    out.extend_from_slice(&COEFF_MAGIC);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&[0u8; 8]);
    for v in coeffs {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_coeffs(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Parse { offset: 0, message: "truncated SPCF header".into() });
    }
    if bytes[..4] != COEFF_MAGIC {
        return Err(Error::Parse { offset: 0, message: "expected SPCF magic".into() });
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let expected = HEADER_LEN + len * 8;
    if bytes.len() < expected {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("SPCF payload truncated: expected {expected} bytes, found {}", bytes.len()),
        });
    }
    let mut coeffs = Vec::with_capacity(len);
    for i in 0..len {
        let at = HEADER_LEN + i * 8;
        coeffs.push(f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes")));
    }
    Ok(coeffs)
}

pub fn write_coeffs(coeffs: &[f64], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_coeffs(coeffs)?)?;
    Ok(())
}

pub fn read_coeffs(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    decode_coeffs(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_is_sixteen_bytes_little_endian() {
        let bytes = encode_coeffs(&[1.5, -2.0]).unwrap();
        assert_eq!(&bytes[..4], b"SPCF");
        assert_eq!(bytes[4..8], 2u32.to_le_bytes());
        assert_eq!(&bytes[8..16], &[0u8; 8]);
        assert_eq!(bytes.len(), 16 + 16);
        assert_eq!(bytes[16..24], 1.5f64.to_le_bytes());
    }

    #[test]
    fn bad_magic_and_truncation_are_rejected() {
        assert!(matches!(decode_coeffs(b"SPCX"), Err(Error::Parse { .. })));
        let mut bytes = encode_coeffs(&[1.0, 2.0, 3.0]).unwrap();
        bytes.truncate(20);
        assert!(matches!(decode_coeffs(&bytes), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn roundtrip_preserves_values(values in proptest::collection::vec(-1e6f64..1e6, 0..64)) {
            let bytes = encode_coeffs(&values).unwrap();
            let back = decode_coeffs(&bytes).unwrap();
            prop_assert_eq!(back, values);
        }
    }
}
