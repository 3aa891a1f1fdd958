//! Canonical byte encodings.
//!
//! Points use the 48/96-byte compressed BLS12-381 encoding (flag bits in the
//! top three bits of the first byte); scalars are 32 bytes little-endian and
//! must be fully reduced. Every decoder checks curve membership and the
//! prime-order subgroup, so accepted bytes re-encode to themselves.
//!
//! Composite values travel in an envelope:
//!
//! ```text
//! "OMSK" | version (1 byte) | type tag (1 byte) | payload
//! ```

use blstrs::{G1Affine, G1Projective, G2Affine, G2Projective, Scalar};
use group::Curve;
use thiserror::Error;

pub const SCALAR_LEN: usize = 32;
pub const G1_LEN: usize = 48;
pub const G2_LEN: usize = 96;

pub const MAGIC: [u8; 4] = *b"OMSK";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 6;

const FLAG_COMPRESSED: u8 = 0x80;
const FLAG_INFINITY: u8 = 0x40;
const FLAG_SORT: u8 = 0x20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("point is not on the curve")]
    OffCurve,
    #[error("point is not in the prime-order subgroup")]
    WrongSubgroup,
    #[error("unexpected length")]
    BadLength,
    #[error("bad header or flag bits")]
    BadHeader,
    #[error("non-canonical field or scalar encoding")]
    NonCanonical,
    #[error("unknown curve identifier")]
    UnknownCurve,
    #[error("decoded value violates a structural invariant")]
    Inconsistent,
}

/// Envelope type tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum TypeTag {
    Scalar = 0x01,
    G1 = 0x02,
    G2 = 0x03,
    Signature = 0x04,
    PublicKey = 0x05,
    AggregatedKey = 0x06,
    Params = 0x07,
    DsParams = 0x08,
    DsPublicKey = 0x09,
    SecretKey = 0x0a,
    SasChain = 0x0b,
    OmsChain = 0x0c,
    DsSecretKey = 0x0d,
}

/// Wraps `payload` in the versioned envelope.
pub fn seal(tag: TypeTag, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(tag as u8);
    out.extend_from_slice(payload);
    out
}

/// Strips and checks the envelope header, returning the payload.
pub fn open(bytes: &[u8], tag: TypeTag) -> Result<&[u8], DecodeError> {
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::BadLength);
    }
    if bytes[..4] != MAGIC || bytes[4] != VERSION || bytes[5] != tag as u8 {
        return Err(DecodeError::BadHeader);
    }
    Ok(&bytes[HEADER_LEN..])
}

pub fn encode_scalar(s: &Scalar) -> [u8; SCALAR_LEN] {
    s.to_bytes_le()
}

pub fn decode_scalar(bytes: &[u8]) -> Result<Scalar, DecodeError> {
    let arr: &[u8; SCALAR_LEN] = bytes.try_into().map_err(|_| DecodeError::BadLength)?;
    Option::from(Scalar::from_bytes_le(arr)).ok_or(DecodeError::NonCanonical)
}

pub fn encode_g1(p: &G1Projective) -> [u8; G1_LEN] {
    p.to_affine().to_compressed()
}

pub fn encode_g2(p: &G2Projective) -> [u8; G2_LEN] {
    p.to_affine().to_compressed()
}

/// Validates the flag bits and returns whether the encoding is the point at
/// infinity.
fn check_flags(bytes: &[u8]) -> Result<bool, DecodeError> {
    let flags = bytes[0];
    if flags & FLAG_COMPRESSED == 0 {
        return Err(DecodeError::BadHeader);
    }
    if flags & FLAG_INFINITY != 0 {
        let rest_zero = bytes[0] & 0x1f == 0 && bytes[1..].iter().all(|&b| b == 0);
        if flags & FLAG_SORT != 0 || !rest_zero {
            return Err(DecodeError::BadHeader);
        }
        return Ok(true);
    }
    Ok(false)
}

/// Base-field modulus, big-endian.
const FP_MODULUS: [u8; 48] = [
    0x1a, 0x01, 0x11, 0xea, 0x39, 0x7f, 0xe6, 0x9a, 0x4b, 0x1b, 0xa7, 0xb6,
    0x43, 0x4b, 0xac, 0xd7, 0x64, 0x77, 0x4b, 0x84, 0xf3, 0x85, 0x12, 0xbf,
    0x67, 0x30, 0xd2, 0xa0, 0xf6, 0xb0, 0xf6, 0x24, 0x1e, 0xab, 0xff, 0xfe,
    0xb1, 0x53, 0xff, 0xff, 0xb9, 0xfe, 0xff, 0xff, 0xff, 0xff, 0xaa, 0xab,
];

fn fp_is_canonical(be: &[u8]) -> bool {
    be < &FP_MODULUS[..]
}

pub fn decode_g1(bytes: &[u8]) -> Result<G1Projective, DecodeError> {
    let arr: [u8; G1_LEN] = bytes.try_into().map_err(|_| DecodeError::BadLength)?;
    if check_flags(&arr)? {
        return Ok(G1Projective::from(G1Affine::from_compressed(&arr).unwrap()));
    }
    let mut x = arr;
    x[0] &= 0x1f;
    if !fp_is_canonical(&x) {
        return Err(DecodeError::NonCanonical);
    }
    let p: G1Affine =
        Option::from(G1Affine::from_compressed_unchecked(&arr)).ok_or(DecodeError::OffCurve)?;
    if !bool::from(p.is_on_curve()) {
        return Err(DecodeError::OffCurve);
    }
    if !bool::from(p.is_torsion_free()) {
        return Err(DecodeError::WrongSubgroup);
    }
    Ok(p.into())
}

pub fn decode_g2(bytes: &[u8]) -> Result<G2Projective, DecodeError> {
    let arr: [u8; G2_LEN] = bytes.try_into().map_err(|_| DecodeError::BadLength)?;
    if check_flags(&arr)? {
        return Ok(G2Projective::from(G2Affine::from_compressed(&arr).unwrap()));
    }
    let mut x = arr;
    x[0] &= 0x1f;
    if !fp_is_canonical(&x[..48]) || !fp_is_canonical(&x[48..]) {
        return Err(DecodeError::NonCanonical);
    }
    let p: G2Affine =
        Option::from(G2Affine::from_compressed_unchecked(&arr)).ok_or(DecodeError::OffCurve)?;
    if !bool::from(p.is_on_curve()) {
        return Err(DecodeError::OffCurve);
    }
    if !bool::from(p.is_torsion_free()) {
        return Err(DecodeError::WrongSubgroup);
    }
    Ok(p.into())
}

/// Cursor over a payload.
pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.buf.len() < n {
            return Err(DecodeError::BadLength);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, DecodeError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn u32(&mut self) -> Result<u32, DecodeError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn scalar(&mut self) -> Result<Scalar, DecodeError> {
        decode_scalar(self.take(SCALAR_LEN)?)
    }

    pub fn g1(&mut self) -> Result<G1Projective, DecodeError> {
        decode_g1(self.take(G1_LEN)?)
    }

    pub fn g2(&mut self) -> Result<G2Projective, DecodeError> {
        decode_g2(self.take(G2_LEN)?)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    /// Fails if any bytes are left over.
    pub fn finish(self) -> Result<(), DecodeError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(DecodeError::BadLength)
        }
    }
}

/// Appends canonical encodings to a buffer.
pub trait Writer {
    fn put_scalar(&mut self, s: &Scalar);
    fn put_g1(&mut self, p: &G1Projective);
    fn put_g2(&mut self, p: &G2Projective);
}

impl Writer for Vec<u8> {
    fn put_scalar(&mut self, s: &Scalar) {
        self.extend_from_slice(&encode_scalar(s));
    }

    fn put_g1(&mut self, p: &G1Projective) {
        self.extend_from_slice(&encode_g1(p));
    }

    fn put_g2(&mut self, p: &G2Projective) {
        self.extend_from_slice(&encode_g2(p));
    }
}

/// Enveloped encodings of single elements.
pub fn scalar_envelope(s: &Scalar) -> Vec<u8> {
    seal(TypeTag::Scalar, &encode_scalar(s))
}

pub fn g1_envelope(p: &G1Projective) -> Vec<u8> {
    seal(TypeTag::G1, &encode_g1(p))
}

pub fn g2_envelope(p: &G2Projective) -> Vec<u8> {
    seal(TypeTag::G2, &encode_g2(p))
}

pub fn scalar_from_envelope(bytes: &[u8]) -> Result<Scalar, DecodeError> {
    decode_scalar(open(bytes, TypeTag::Scalar)?)
}

pub fn g1_from_envelope(bytes: &[u8]) -> Result<G1Projective, DecodeError> {
    decode_g1(open(bytes, TypeTag::G1)?)
}

pub fn g2_from_envelope(bytes: &[u8]) -> Result<G2Projective, DecodeError> {
    decode_g2(open(bytes, TypeTag::G2)?)
}
